#![no_main]

use libfuzzer_sys::fuzz_target;
use toda_verify::config::parse_tol;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((name, value)) = parse_tol(s) {
            assert!(!name.is_empty());
            assert!(value.is_finite() && value > 0.0);
        }
    }
});
