mod common;

use std::sync::Arc;

use common::{ab, fixture, letters_of, strings, tape, word};
use strmach_core::freecat::{Morphism, Signature};
use strmach_core::machine::{
    dfa_machine, dfa_transducer, intersection_chain, ipd, palindrome_machine, wire_machines, Dfa, LegType,
    MachineBuilder, MachineObject, NodeKind, StringMachine, Value,
};
use strmach_core::oracles::{oracle_dfa, oracle_product_dfa, oracle_reverse_palindrome};
use strmach_core::tape::{TapeCategory, TapeTerm};
use strmach_core::Error;

fn word_value(cat: &TapeCategory, w: &str) -> Value {
    Value::Morphism(tape(word(cat, w)))
}

fn output_letters(v: &Value) -> String {
    letters_of(v.as_morphism().expect("a morphism output"))
}

fn even_a(cat: &Arc<TapeCategory>) -> Dfa {
    Dfa::new("even_a", cat.clone(), &["even", "odd"], "even", &[
        ("even", "a", "odd"),
        ("odd", "a", "even"),
        ("even", "b", "even"),
        ("odd", "b", "odd"),
    ], &["even"])
    .unwrap()
}

fn ends_b(cat: &Arc<TapeCategory>) -> Dfa {
    Dfa::new("ends_b", cat.clone(), &["no", "yes"], "no", &[
        ("no", "a", "no"),
        ("yes", "a", "no"),
        ("no", "b", "yes"),
        ("yes", "b", "yes"),
    ], &["yes"])
    .unwrap()
}

fn letters(w: &str) -> Vec<String> {
    w.chars().map(String::from).collect()
}

#[test]
fn chaining_two_strippers_sums_primary_degrees() {
    let doc = fixture("palindrome");
    let chained = wire_machines(doc.machine("step_a").unwrap(), doc.machine("step_b").unwrap(), &[(0, 0)]).unwrap();
    let cat = doc.category("sigma").unwrap();
    let run = chained.evaluate(&[word_value(cat, "ab")]).unwrap();
    let degrees: Vec<_> = run.trace.nodes.iter().filter_map(|n| n.primary_degree).collect();
    assert_eq!(degrees, vec![2, 1]);
    assert_eq!(ipd(&run.trace), 3);
    assert_eq!(run.outputs[0], Value::Morphism(tape(TapeTerm::Id(1))));
}

#[test]
fn empty_pairing_is_the_monoidal_product() {
    let doc = fixture("palindrome");
    let (f, g) = (doc.machine("step_a").unwrap(), doc.machine("step_b").unwrap());
    let both = wire_machines(f, g, &[]).unwrap();
    assert_eq!(both.dom(), f.dom().concat(&g.dom()));
    let cat = doc.category("sigma").unwrap();
    for u in strings("ab", 3) {
        for v in strings("ab", 3) {
            let run = both.evaluate(&[word_value(cat, &u), word_value(cat, &v)]).unwrap();
            let alone_f = f.evaluate(&[word_value(cat, &u)]).unwrap();
            let alone_g = g.evaluate(&[word_value(cat, &v)]).unwrap();
            assert_eq!(run.outputs, [alone_f.outputs, alone_g.outputs].concat());
            assert_eq!(ipd(&run.trace), ipd(&alone_f.trace) + ipd(&alone_g.trace));
        }
    }
}

#[test]
fn feeding_a_machine_its_own_output_is_a_cycle() {
    let doc = fixture("palindrome");
    let err = doc.machine("step_a").unwrap().contract(&[(0, 0)]).unwrap_err();
    assert!(matches!(err, Error::CycleDetected(_)), "{err}");
}

#[test]
fn mismatched_legs_do_not_wire() {
    let doc = fixture("palindrome");
    let strip = doc.machine("strip_a_only").unwrap();
    let err = wire_machines(strip, doc.machine("step_a").unwrap(), &[(1, 0)]).unwrap_err();
    assert!(matches!(err, Error::SignatureMismatch { .. }), "{err}");
}

#[test]
fn copy_then_discard_is_the_identity() {
    let cat = ab();
    let leg = LegType::Morphism(Signature::tape("ab", 1, 1));
    let m = MachineBuilder::new("copy_drop")
        .input("w", leg.clone())
        .node("copy", NodeKind::Copy(MachineObject(vec![leg])))
        .wire("in.w", "copy.in0")
        .wire("copy.out0", "out.w")
        .build()
        .unwrap();
    for w in strings("ab", 4) {
        let run = m.evaluate(&[word_value(&cat, &w)]).unwrap();
        assert_eq!(output_letters(&run.outputs[0]), w);
        assert_eq!(ipd(&run.trace), 0);
    }
}

#[test]
fn palindrome_machine_matches_reversal() {
    let cat = Arc::new(TapeCategory::alphabet("sigma", "abr").unwrap());
    let m = palindrome_machine(&cat, "r").unwrap();
    for w in strings("ab", 6) {
        let run = m.evaluate(&[word_value(&cat, &w)]).unwrap();
        let got = match run.outputs[0].as_morphism().and_then(Morphism::as_tape) {
            Some(TapeTerm::Id(1)) => "id",
            Some(t) if t.decode_word().is_some_and(|l| l.len() == 1 && &*l[0] == "r") => "r",
            other => panic!("{w}: unexpected output {other:?}"),
        };
        assert_eq!(got, oracle_reverse_palindrome(&w), "{w}");
    }
}

/// Primary degrees seen by a chain of strippers, recomputed by hand: the
/// builder reads the word, and the built machine tests the last letter
/// first against the front of the word.
fn palindrome_ipd_oracle(w: &str) -> u64 {
    let mut rest: Vec<char> = w.chars().collect();
    let mut total = w.len() as u64;
    for letter in w.chars().rev() {
        total += rest.len() as u64;
        rest = match rest.first() {
            Some(&c) if c == letter => rest[1..].to_vec(),
            Some(_) => vec!['r'],
            None => Vec::new(),
        };
    }
    total
}

#[test]
fn palindrome_ipd_counts_the_inner_run() {
    let cat = Arc::new(TapeCategory::alphabet("sigma", "abr").unwrap());
    let m = palindrome_machine(&cat, "r").unwrap();
    for w in strings("ab", 6) {
        let run = m.evaluate(&[word_value(&cat, &w)]).unwrap();
        assert_eq!(ipd(&run.trace), palindrome_ipd_oracle(&w), "{w}");
    }
    let run = m.evaluate(&[word_value(&cat, "abba")]).unwrap();
    assert_eq!(ipd(&run.trace), 14);
}

#[test]
fn palindrome_trace_follows_name_order() {
    let cat = Arc::new(TapeCategory::alphabet("sigma", "abr").unwrap());
    let m = palindrome_machine(&cat, "r").unwrap();
    let run = m.evaluate(&[word_value(&cat, "ab")]).unwrap();
    let names: Vec<_> = run.trace.nodes.iter().map(|n| n.node.as_str()).collect();
    assert_eq!(names, ["copy", "seed", "builder", "run"]);
    assert_eq!(run.trace.nodes[3].inner.as_ref().unwrap().nodes.len(), 4);
}

#[test]
fn reserved_letter_in_the_input_is_refused() {
    let cat = Arc::new(TapeCategory::alphabet("sigma", "abr").unwrap());
    let m = palindrome_machine(&cat, "r").unwrap();
    let err = m.evaluate(&[word_value(&cat, "arb")]).unwrap_err();
    assert!(matches!(err, Error::ReservedCharacterInInput(ref g) if g == "r"), "{err}");
}

#[test]
fn meta_vertex_refuses_a_machine_of_its_own_level() {
    let cat = Arc::new(TapeCategory::alphabet("sigma", "abr").unwrap());
    let words = MachineObject(vec![LegType::Morphism(Signature::tape("sigma", 1, 1))]);
    let m = MachineBuilder::new("runner")
        .input("m", LegType::Morphism(Signature::machines(words.clone(), words.clone())))
        .input("w", words.0[0].clone())
        .node("run", NodeKind::Meta { dom: words.clone(), cod: words, level: 1 })
        .wire("in.m", "run.machine")
        .wire("in.w", "run.in0")
        .wire("run.out0", "out.w")
        .meta_level(2)
        .build()
        .unwrap();
    let inner = Value::Morphism(Morphism::Machine(Arc::new(palindrome_machine(&cat, "r").unwrap())));
    let err = m.evaluate(&[inner, word_value(&cat, "ab")]).unwrap_err();
    assert!(matches!(err, Error::MetaLevelViolation { limit: 1, found: 1, .. }), "{err}");
}

#[test]
fn meta_level_must_exceed_the_vertices() {
    let words = MachineObject(vec![LegType::Morphism(Signature::tape("sigma", 1, 1))]);
    let err = MachineBuilder::new("runner")
        .input("m", LegType::Morphism(Signature::machines(words.clone(), words.clone())))
        .input("w", words.0[0].clone())
        .node("run", NodeKind::Meta { dom: words.clone(), cod: words, level: 1 })
        .wire("in.m", "run.machine")
        .wire("in.w", "run.in0")
        .wire("run.out0", "out.w")
        .build()
        .unwrap_err();
    assert!(matches!(err, Error::MetaLevelTooSmall { .. }), "{err}");
}

#[test]
fn dfa_machine_matches_direct_simulation() {
    let cat = ab();
    let dfa = even_a(&cat);
    let m = dfa_machine(&dfa).unwrap();
    for w in strings("ab", 8) {
        let run = m.evaluate(&[word_value(&cat, &w)]).unwrap();
        let ls = letters(&w);
        let refs: Vec<&str> = ls.iter().map(String::as_str).collect();
        assert_eq!(run.accepted, Some(oracle_dfa(&dfa, &refs)), "{w}");
    }
}

#[test]
fn accept_all_dfa_accepts_everything() {
    let cat = ab();
    let dfa = Dfa::new("all", cat.clone(), &["q"], "q", &[("q", "a", "q"), ("q", "b", "q")], &["q"]).unwrap();
    let m = dfa_machine(&dfa).unwrap();
    for w in strings("ab", 5) {
        assert_eq!(m.evaluate(&[word_value(&cat, &w)]).unwrap().accepted, Some(true));
    }
}

#[test]
fn dfa_transducer_has_no_variables() {
    let cat = ab();
    let t = dfa_transducer(&even_a(&cat)).unwrap();
    assert!(t.validate().is_empty());
    assert!(t.state_image().all_vars().next().is_none());
}

#[test]
fn partial_transition_is_refused() {
    let cat = ab();
    let err = Dfa::new("bad", cat, &["q"], "q", &[("q", "a", "q")], &[]).unwrap_err();
    assert!(matches!(err, Error::PartialTransition { ref letter, .. } if letter == "b"), "{err}");
}

#[test]
fn chain_matches_the_product_automaton() {
    let cat = ab();
    let dfas = [even_a(&cat), ends_b(&cat)];
    let chain = intersection_chain(&dfas).unwrap();
    assert_eq!(chain.transducer_count(), 2);
    for w in strings("ab", 8) {
        let run = chain.evaluate(&[word_value(&cat, &w)]).unwrap();
        let ls = letters(&w);
        let refs: Vec<&str> = ls.iter().map(String::as_str).collect();
        assert_eq!(run.accepted, Some(oracle_product_dfa(&dfas, &refs)), "{w}");
        assert_eq!(output_letters(run.outputs.last().unwrap()), w);
    }
    let run = chain.evaluate(&[word_value(&cat, "aab")]).unwrap();
    assert_eq!(run.accepted, Some(true));
}

#[test]
fn single_dfa_chain_behaves_like_the_dfa() {
    let cat = ab();
    let dfa = even_a(&cat);
    let (chain, alone) = (intersection_chain(std::slice::from_ref(&dfa)).unwrap(), dfa_machine(&dfa).unwrap());
    for w in strings("ab", 6) {
        let v = word_value(&cat, &w);
        assert_eq!(chain.evaluate(std::slice::from_ref(&v)).unwrap().accepted, alone.evaluate(&[v]).unwrap().accepted);
    }
}

#[test]
fn chain_size_grows_with_the_number_of_automata() {
    let cat = ab();
    let odd_b = Dfa::new("odd_b", cat.clone(), &["e", "o"], "e", &[
        ("e", "b", "o"),
        ("o", "b", "e"),
        ("e", "a", "e"),
        ("o", "a", "o"),
    ], &["o"])
    .unwrap();
    let dfas = [even_a(&cat), ends_b(&cat), odd_b];
    let chain = intersection_chain(&dfas).unwrap();
    assert_eq!(chain.transducer_count(), 3);
    assert_eq!(dfas.iter().map(|d| d.states().len()).product::<usize>(), 8);
}

#[test]
fn chain_needs_a_common_alphabet() {
    let other = Arc::new(TapeCategory::alphabet("ba", "ab").unwrap());
    let err = intersection_chain(&[even_a(&ab()), ends_b(&other)]).unwrap_err();
    assert!(matches!(err, Error::AlphabetMismatch(_)), "{err}");
}

#[test]
fn serial_composition_runs_both_halves() {
    let doc = fixture("palindrome");
    let (f, g) = (doc.machine("step_a").unwrap(), doc.machine("step_b").unwrap());
    let fg: StringMachine = f.then(g).unwrap();
    let cat = doc.category("sigma").unwrap();
    for w in strings("ab", 4) {
        let direct = g.evaluate(&f.evaluate(&[word_value(cat, &w)]).unwrap().outputs).unwrap();
        let composed = fg.evaluate(&[word_value(cat, &w)]).unwrap();
        assert_eq!(direct.outputs, composed.outputs, "{w}");
    }
}
