#![no_main]

use binomcensus_cli::record::OutputRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rec) = OutputRecord::from_json(s) {
        let again = OutputRecord::from_json(&rec.to_json()).expect("re-serialized record parses");
        assert_eq!(again.to_json(), rec.to_json());
        let _ = rec.to_csv();
        let _ = rec.to_table();
    }
});
