#![no_main]

use libfuzzer_sys::fuzz_target;
use toda_verify::artifacts::{read_grid_csv, Artifact};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = read_grid_csv(text) {
        assert_eq!(g.values.len(), g.grid.nx * g.grid.ny);
        // anything accepted is written back in a form the reader accepts
        let again = Artifact::Grid { file: String::new(), grid: g.grid, values: g.values.clone() };
        let back = read_grid_csv(&again.to_csv().unwrap()).unwrap();
        assert_eq!(back.values, g.values);
    }
});
