#![no_main]

use libfuzzer_sys::fuzz_target;
use spss_core::io::{parse_field_csv, write_field_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(field) = parse_field_csv(text) {
        let again = parse_field_csv(&write_field_csv(&field)).expect("written fields parse");
        assert_eq!(again, field);
    }
});
