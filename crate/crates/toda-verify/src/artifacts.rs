//! Grid and curve artifacts, their CSV form and a reader for grid files.
//!
//! A grid file starts with a line describing the grid,
//!
//! ```text
//! # grid half_width=<L> refine=<k> h=<h> nx=<nx> ny=<ny>
//! ```
//!
//! followed by a CSV table `i,j,x,y,value` with `nx·ny` rows in row-major
//! order (`i` fastest). Curve files are a plain CSV table with a header row.
//! Floats are written with 17 significant digits.

use std::path::{Path, PathBuf};

use thiserror::Error;
use toda_lump::kernel::GridSpec;

use crate::report::write_atomic;

/// Grid geometry as written in a grid file header.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridHeader {
    pub half_width: f64,
    pub refine: usize,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl From<GridSpec> for GridHeader {
    fn from(g: GridSpec) -> Self {
        GridHeader { half_width: g.half_width, refine: g.refine, h: g.h, nx: g.nx, ny: g.ny }
    }
}

impl GridHeader {
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h
    }

    fn line(&self) -> String {
        format!(
            "# grid half_width={} refine={} h={} nx={} ny={}",
            fmt17(self.half_width),
            self.refine,
            fmt17(self.h),
            self.nx,
            self.ny
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Grid { file: String, grid: GridHeader, values: Vec<f64> },
    Curve { file: String, columns: Vec<String>, rows: Vec<Vec<f64>> },
}

impl Artifact {
    pub fn file(&self) -> &str {
        match self {
            Artifact::Grid { file, .. } | Artifact::Curve { file, .. } => file,
        }
    }

    pub fn to_csv(&self) -> Result<String, ArtifactError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = String::new();
        match self {
            Artifact::Grid { grid, values, .. } => {
                if values.len() != grid.nx * grid.ny {
                    return Err(ArtifactError::Shape { expected: grid.nx * grid.ny, got: values.len() });
                }
                head = grid.line() + "\n";
                w.write_record(["i", "j", "x", "y", "value"])?;
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        let v = values[j * grid.nx + i];
                        w.write_record([i.to_string(), j.to_string(), fmt17(grid.x(i)), fmt17(grid.y(j)), fmt17(v)])?;
                    }
                }
            }
            Artifact::Curve { columns, rows, .. } => {
                w.write_record(columns)?;
                for r in rows {
                    if r.len() != columns.len() {
                        return Err(ArtifactError::Shape { expected: columns.len(), got: r.len() });
                    }
                    w.write_record(r.iter().map(|v| fmt17(*v)))?;
                }
            }
        }
        let body = w.into_inner().map_err(|e| ArtifactError::Io(e.into_error()))?;
        Ok(head + &String::from_utf8(body).expect("csv output is ASCII"))
    }
}

/// `v` with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("bad grid header: {0}")]
    Header(String),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
}

/// Writes every artifact into `dir`; returns the paths in the given order.
pub fn emit_csv(artifacts: &[Artifact], dir: &Path) -> Result<Vec<PathBuf>, ArtifactError> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(a.file());
        write_atomic(&path, a.to_csv()?.as_bytes())?;
        out.push(path);
    }
    Ok(out)
}

/// A grid file read back into memory.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCsv {
    pub grid: GridHeader,
    pub values: Vec<f64>,
}

/// Largest grid the reader accepts, in nodes.
pub const MAX_GRID_NODES: usize = 1 << 24;

fn parse_header(line: &str) -> Result<GridHeader, ArtifactError> {
    let bad = |m: &str| ArtifactError::Header(m.to_string());
    let rest = line.strip_prefix("# grid").ok_or_else(|| bad("missing `# grid` prefix"))?;
    let (mut l, mut k, mut h, mut nx, mut ny) = (None, None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad(field))?;
        let num = || value.parse::<f64>().map_err(|_| bad(field));
        let int = || value.parse::<usize>().map_err(|_| bad(field));
        match key {
            "half_width" => l = Some(num()?),
            "refine" => k = Some(int()?),
            "h" => h = Some(num()?),
            "nx" => nx = Some(int()?),
            "ny" => ny = Some(int()?),
            _ => return Err(bad(field)),
        }
    }
    let g = GridHeader {
        half_width: l.ok_or_else(|| bad("half_width missing"))?,
        refine: k.ok_or_else(|| bad("refine missing"))?,
        h: h.ok_or_else(|| bad("h missing"))?,
        nx: nx.ok_or_else(|| bad("nx missing"))?,
        ny: ny.ok_or_else(|| bad("ny missing"))?,
    };
    if !(g.half_width.is_finite() && g.half_width > 0.0 && g.h.is_finite() && g.h > 0.0) {
        return Err(bad("half_width and h must be finite and positive"));
    }
    if g.nx == 0 || g.ny == 0 || g.nx.checked_mul(g.ny).is_none_or(|n| n > MAX_GRID_NODES) {
        return Err(bad("node counts out of range"));
    }
    Ok(g)
}

/// Parses a grid file, checking the header, the row order and the node
/// coordinates (to a relative `1e-9` of the box).
pub fn read_grid_csv(text: &str) -> Result<GridCsv, ArtifactError> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    let grid = parse_header(first.trim_end_matches('\r'))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["i", "j", "x", "y", "value"] {
        return Err(ArtifactError::Header(format!("unexpected columns {headers:?}")));
    }
    let n = grid.nx * grid.ny;
    let mut values = Vec::with_capacity(n.min(1 << 16));
    let tol = 1e-9 * grid.half_width.max(1.0);
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let err = |msg: String| ArtifactError::Row { row, msg };
        if row >= n {
            return Err(err(format!("more than nx·ny = {n} rows")));
        }
        if rec.len() != 5 {
            return Err(err(format!("{} fields", rec.len())));
        }
        let (i, j) = (row % grid.nx, row / grid.nx);
        let idx = |f: usize| rec[f].trim().parse::<usize>().map_err(|_| err(format!("bad index `{}`", &rec[f])));
        if (idx(0)?, idx(1)?) != (i, j) {
            return Err(err(format!("expected node ({i}, {j})")));
        }
        let num = |f: usize| {
            rec[f]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("bad number `{}`", &rec[f])))
        };
        if (num(2)? - grid.x(i)).abs() > tol || (num(3)? - grid.y(j)).abs() > tol {
            return Err(err("coordinates off the grid".into()));
        }
        values.push(num(4)?);
    }
    if values.len() != n {
        return Err(ArtifactError::Shape { expected: n, got: values.len() });
    }
    Ok(GridCsv { grid, values })
}
