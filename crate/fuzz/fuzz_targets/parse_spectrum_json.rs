#![no_main]

use libfuzzer_sys::fuzz_target;
use screwspec::io::{parse_spectrum_json, write_spectrum_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_spectrum_json(text) {
        let written = write_spectrum_json(&file);
        let again = parse_spectrum_json(&written).expect("written spectrum parses");
        assert_eq!(write_spectrum_json(&again), written);
        let _ = file.entries();
    }
});
