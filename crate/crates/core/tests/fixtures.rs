use std::path::Path;

use lawvere::theory::{builtin, TheoryPresentation, BUILTINS};

#[test]
fn theory_files_match_the_builtins() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for name in BUILTINS {
        let src = std::fs::read_to_string(dir.join(format!("{name}.thy"))).unwrap();
        let parsed = TheoryPresentation::parse(&src, false).unwrap();
        assert_eq!(parsed.to_text(), builtin(name).unwrap().to_text(), "{name}");
    }
}

#[test]
fn unsafe_fixture_needs_the_waiver() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let src = std::fs::read_to_string(dir.join("nonconfluent.thy")).unwrap();
    assert!(TheoryPresentation::parse(&src, false).is_err());
    assert!(TheoryPresentation::parse(&src, true).unwrap().is_waived());
}
