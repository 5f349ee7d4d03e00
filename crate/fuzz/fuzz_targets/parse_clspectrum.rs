#![no_main]

use libfuzzer_sys::fuzz_target;
use screwspec::io::{parse_clspectrum, write_clspectrum};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cls) = parse_clspectrum(text) {
        let again = parse_clspectrum(&write_clspectrum(&cls)).expect("written spectrum parses");
        assert_eq!(again, cls);
    }
});
