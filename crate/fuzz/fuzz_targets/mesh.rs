#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mesh) = modelforge::mesh::load_mesh(text) {
        let _ = modelforge::mesh::volume_properties(&mesh);
    }
});
