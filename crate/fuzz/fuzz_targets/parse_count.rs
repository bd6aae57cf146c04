#![no_main]

use binomcensus_cli::parse::parse_count;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(n) = parse_count(s) {
        assert_eq!(parse_count(&n.to_string()), Ok(n));
    }
});
