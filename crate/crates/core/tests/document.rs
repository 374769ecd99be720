mod common;

use strmach_core::document::{parse_document, parse_spec, serialize_document, validate_document};
use strmach_core::Error;

fn shipped() -> Vec<(String, String)> {
    let dir = format!("{}/../../machines", env!("CARGO_MANIFEST_DIR"));
    let mut docs: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_stem().is_some_and(|s| s != "golden"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    docs.sort();
    docs
}

#[test]
fn shipped_documents_are_canonical() {
    for (name, text) in shipped() {
        let spec = parse_spec(&text).unwrap();
        assert_eq!(strmach_core::document::serialize_spec(&spec), text, "{name}");
    }
}

#[test]
fn valid_documents_round_trip() {
    for (name, text) in shipped().into_iter().filter(|(n, _)| n != "invalid") {
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = parse_document(&serialize_document(&doc)).unwrap();
        assert_eq!(again.spec, doc.spec, "{name}");
        assert_eq!(serialize_document(&again), serialize_document(&doc), "{name}");
    }
}

#[test]
fn palindrome_document_resolves_everything() {
    let text = shipped().into_iter().find(|(n, _)| n == "palindrome").unwrap().1;
    let doc = parse_document(&text).unwrap();
    assert_eq!(doc.transducers.keys().collect::<Vec<_>>(), ["strip_a", "strip_b", "builder"]);
    assert_eq!(doc.machine("palindrome").unwrap().meta_level(), 1);
}

#[test]
fn invalid_document_reports_each_transducer() {
    let text = shipped().into_iter().find(|(n, _)| n == "invalid").unwrap().1;
    let names: Vec<String> = validate_document(&text)
        .iter()
        .filter_map(|e| match e.root() {
            Error::InvalidTransducer { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(names, ["too_heavy", "no_output_var"]);
}

#[test]
fn unknown_generator_is_a_resolution_error() {
    let text = r#"{
  "tape_categories": [{"name": "ab", "generators": [{"name": "a", "arity_in": 1, "arity_out": 1, "degree": 1}]}],
  "transducers": [{
    "name": "t", "input_category": "ab", "output_category": {"tape": "ab"},
    "primary": [1, 1], "states": [{"name": "s"}],
    "generators": {"z": {"degree": 1, "transition": {"s": "s"}}}
  }]
}"#;
    let err = parse_document(text).unwrap_err();
    assert!(matches!(err.root(), Error::Resolution(g) if g.contains("`z`")), "{err}");
}

#[test]
fn unknown_machine_reference_is_a_resolution_error() {
    let text = r#"{"machines": [{"name": "m", "nodes": [{"name": "n", "kind": "transducer", "transducer": "nope"}]}]}"#;
    let err = parse_document(text).unwrap_err();
    assert!(matches!(err.root(), Error::Resolution(n) if n.contains("nope")), "{err}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_document("{\n  \"machines\": [,]\n}").unwrap_err();
    assert!(matches!(err, Error::DocumentSyntax { line: 2, .. }), "{err}");
}
