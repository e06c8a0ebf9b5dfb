#![no_main]

use libfuzzer_sys::fuzz_target;
use spss_cli::parse_run_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_run_config(text) {
        let _ = cfg.solve_options();
        let _ = cfg.params();
    }
});
