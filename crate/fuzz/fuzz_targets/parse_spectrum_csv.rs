#![no_main]

use libfuzzer_sys::fuzz_target;
use screwspec::io::{parse_spectrum_csv, write_spectrum_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_spectrum_csv(text) {
        let written = write_spectrum_csv(&file);
        let again = parse_spectrum_csv(&written).expect("written spectrum parses");
        assert_eq!(write_spectrum_csv(&again), written);
        // rows that parse must also rebuild into witnesses or fail cleanly
        let _ = file.entries();
    }
});
