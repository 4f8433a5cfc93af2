use std::path::PathBuf;

use couples_cli::document::{parse, to_canonical};
use couples_cli::fixtures::shipped;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn fixture_files_match_their_generators() {
    for (name, doc) in shipped() {
        let text =
            std::fs::read_to_string(dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(text, to_canonical(&doc), "{name} is stale");
    }
}

#[test]
fn fixtures_round_trip_byte_identically() {
    for (name, _) in shipped() {
        let text = std::fs::read_to_string(dir().join(name)).unwrap();
        let doc = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(to_canonical(&doc), text, "{name}");
    }
}

/// Rewrites the fixture files: `cargo test -p exact-couples-cli --test fixtures -- --ignored`.
#[test]
#[ignore]
fn regenerate_fixtures() {
    for (name, doc) in shipped() {
        std::fs::write(dir().join(name), to_canonical(&doc)).unwrap();
    }
}
