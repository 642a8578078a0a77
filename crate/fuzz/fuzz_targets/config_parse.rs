#![no_main]

use libfuzzer_sys::fuzz_target;
use shadowrec_cli::parse_config;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = parse_config(data) {
        let _ = config.validate();
    }
});
