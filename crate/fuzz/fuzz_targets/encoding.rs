#![no_main]

use flsplan::io::{parse_encoding, write_encoding};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(enc) = parse_encoding(text) {
        let _ = enc.total_distance();
        let mut out = Vec::new();
        write_encoding(&enc, &mut out).unwrap();
    }
});
