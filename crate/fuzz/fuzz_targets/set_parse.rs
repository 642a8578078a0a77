#![no_main]

use libfuzzer_sys::fuzz_target;
use shadowrec_cli::parse_set_file;

fuzz_target!(|data: &[u8]| {
    let _ = parse_set_file(data);
});
