#![no_main]

use flsplan::io::{parse_xyz, write_xyz};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything accepted must survive a write and re-read unchanged.
    if let Ok(cloud) = parse_xyz(text) {
        let mut out = Vec::new();
        write_xyz(&cloud, &mut out).unwrap();
        let again = parse_xyz(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(cloud, again);
    }
});
