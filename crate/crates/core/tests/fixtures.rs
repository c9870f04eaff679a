use std::path::PathBuf;

use posilab::fixtures;
use posilab::io::{matrix_to_json, parse_matrix, parse_space, SpaceDoc};
use posilab::linalg::ComplexMatrix;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
fn every_fixture_round_trips() {
    let mut seen = 0;
    for entry in std::fs::read_dir(dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Ok(m) = parse_matrix(&text) {
            let again = parse_matrix(&matrix_to_json(&m)).unwrap();
            assert_eq!(again, m, "{}", path.display());
        } else {
            let s = parse_space(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let doc = SpaceDoc::from_setup(&s);
            let again = parse_space(&serde_json::to_string(&doc).unwrap()).unwrap();
            assert_eq!(again, s, "{}", path.display());
        }
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn fixture_files_match_builders() {
    let load = |name: &str| parse_matrix(&std::fs::read_to_string(dir().join(name)).unwrap()).unwrap();
    assert_eq!(load("shift3.json"), fixtures::shift3());
    assert_eq!(load("truncated_shift6.json"), fixtures::truncated_shift(6));
    assert_eq!(load("restriction_example.json"), fixtures::restriction_example());
    assert_eq!(load("restriction_block.json"), fixtures::restriction_block());
    assert_eq!(load("decomposition_example.json"), fixtures::decomposition_example());
    assert_eq!(load("identity3.json"), ComplexMatrix::identity(3));
    let space = parse_space(&std::fs::read_to_string(dir().join("interval8.json")).unwrap()).unwrap();
    assert_eq!(space, posilab::condexp::discretize_interval_example(8).unwrap());
}
