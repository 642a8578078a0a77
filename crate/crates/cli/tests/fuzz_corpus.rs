//! Replays the checked-in fuzz seeds through the parser entry points.

use std::fs;
use std::path::PathBuf;

use shadowrec_cli::{parse_config, parse_grid, parse_queries, parse_set_file};
use shadowrec_core::Field;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    for (name, bytes) in seeds("config_parse") {
        let parsed = parse_config(&bytes).and_then(|c| c.validate());
        assert_eq!(parsed.is_ok(), name != "truncated.json", "{name}: {:?}", parsed.err());
    }
}

#[test]
fn set_seeds() {
    for (name, bytes) in seeds("set_parse") {
        assert!(parse_set_file(&bytes).is_ok(), "{name}");
    }
}

#[test]
fn queries_seeds() {
    for (name, bytes) in seeds("queries_parse") {
        let (selector, rest) = bytes.split_first().unwrap();
        let field = if selector & 0x80 == 0 { Field::Real } else { Field::Complex };
        let dim = 1 + usize::from(selector & 0x03);
        let parsed = parse_queries(std::str::from_utf8(rest).unwrap(), field, dim);
        assert_eq!(parsed.is_ok(), name != "malformed", "{name}");
    }
}

#[test]
fn grid_seeds() {
    for (name, bytes) in seeds("grid_parse") {
        let parsed = parse_grid(std::str::from_utf8(&bytes).unwrap());
        assert_eq!(parsed.is_ok(), name == "symmetric" || name == "positive", "{name}");
    }
}
