#![no_main]

use flsplan::io::{parse_off, sample_mesh_to_cloud};
use flsplan::model::Dims;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Quantizing arbitrary coordinates must not panic either.
    if let Ok(mesh) = parse_off(text) {
        let _ = sample_mesh_to_cloud(&mesh, Dims::new(16, 16, 16), 0, 0);
    }
});
