use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_couples"))
        .args(args)
        .output()
        .expect("run couples");
    let text =
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key:?} in\n{text}"))
        .trim()
        .to_string()
}

#[test]
fn valid_fixtures_check_clean() {
    for name in [
        "zero.json",
        "degenerate.json",
        "alpha_zero.json",
        "zero_differential.json",
        "f1.json",
        "massey.json",
    ] {
        let (code, text) = run(&["check", &fixture(name)]);
        assert_eq!(code, 0, "{name}: {text}");
        assert!(text.trim_end().ends_with("valid"), "{name}: {text}");
    }
}

#[test]
fn certificate_lists_witnesses() {
    let (code, text) = run(&["check", &fixture("f1.json"), "--certificate"]);
    assert_eq!(code, 0);
    assert!(text.contains("witness for im beta = ker gamma"));
    assert!(text.contains("bar inverse"));
}

#[test]
fn cohomology_dimensions_of_the_fixtures() {
    for (name, h) in [
        ("zero_differential.json", "2"),
        ("alpha_zero.json", "0"),
        ("massey.json", "8"),
        ("f1.json", "2"),
    ] {
        let (code, text) = run(&["cohomology", &fixture(name)]);
        assert_eq!(code, 0, "{name}: {text}");
        assert_eq!(field(&text, "dim H-"), h, "{name}");
        assert_eq!(field(&text, "dim H+"), h, "{name}");
        assert_eq!(field(&text, "dim E1 left"), h, "{name}");
    }
}

#[test]
fn derive_reports_oracle_pages_for_complexes() {
    let (code, text) = run(&["derive", &fixture("massey.json"), "--depth", "2"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("page total"), "{text}");
    assert!(!text.contains(" no\n"), "{text}");
}

#[test]
fn one_sided_derivation_builds_a_path() {
    let (code, text) = run(&[
        "derive",
        &fixture("degenerate.json"),
        "--side",
        "left",
        "--depth",
        "3",
    ]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("LLL"), "{text}");
    assert!(!text.contains("LR"), "{text}");
}

#[test]
fn tree_documents_are_not_inputs() {
    let out = std::env::temp_dir().join(format!("couples-cli-tree-{}.json", std::process::id()));
    let path = out.to_string_lossy().into_owned();
    let (code, _) = run(&["derive", &fixture("f1.json"), "--out", &path]);
    assert_eq!(code, 0);
    let (code, text) = run(&["check", &path]);
    let _ = std::fs::remove_file(&out);
    assert_eq!(code, 2);
    assert!(text.contains("tree document"), "{text}");
}

#[test]
fn invalid_inputs_have_distinct_exit_codes() {
    let (code, text) = run(&["check", &fixture("invalid/not_exact.json")]);
    assert_eq!(code, 1, "{text}");
    let (code, text) = run(&["check", &fixture("invalid/syntax.json")]);
    assert_eq!(code, 2);
    assert!(text.contains("line 5, column 3"), "{text}");
    let (code, text) = run(&["cohomology", &fixture("invalid/beta_not_respecting.json")]);
    assert_eq!(code, 2);
    assert!(text.contains("morphisms.beta"), "{text}");
    let (code, _) = run(&["derive", &fixture("zero.json"), "--depth", "many"]);
    assert_eq!(code, 2);
    let (code, _) = run(&[]);
    assert_eq!(code, 2);
}
