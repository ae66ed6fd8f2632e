#![no_main]

use flsplan::io::{parse_ply, parse_ply_cloud, parse_ply_mesh};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_ply(text);
    let _ = parse_ply_cloud(text);
    let _ = parse_ply_mesh(text);
});
