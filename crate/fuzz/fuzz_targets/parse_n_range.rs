#![no_main]

use libfuzzer_sys::fuzz_target;
use toda_verify::config::parse_n_range;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok((lo, hi)) = parse_n_range(s) {
            assert!(lo <= hi);
        }
    }
});
