#![no_main]

use flsplan::io::{read_metrics_json, write_metrics, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(reports) = read_metrics_json(text) {
        let _ = write_metrics(&reports, Format::Csv, Vec::new());
        let _ = write_metrics(&reports, Format::Json, Vec::new());
    }
});
