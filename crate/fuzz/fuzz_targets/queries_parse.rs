#![no_main]

use libfuzzer_sys::fuzz_target;
use shadowrec_cli::parse_queries;
use shadowrec_core::Field;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let field = if selector & 0x80 == 0 { Field::Real } else { Field::Complex };
    let dim = 1 + usize::from(selector & 0x03);
    let _ = parse_queries(text, field, dim);
});
