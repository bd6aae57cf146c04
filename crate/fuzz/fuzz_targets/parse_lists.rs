#![no_main]

use binomcensus_cli::parse::{parse_count_list, parse_real_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_count_list(s) {
        assert!(!v.is_empty());
        assert_eq!(v.len(), s.split(',').count());
    }
    if let Ok(v) = parse_real_list(s) {
        assert!(v.iter().all(|x| x.is_finite()));
    }
});
