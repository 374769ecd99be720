#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use strmach_core::degrees::Degree2;
use strmach_core::document::{parse_document, Document};
use strmach_core::freecat::{BaseCategory, FreeTerm, Morphism, Signature, VarDecl};
use strmach_core::statecat::{StateMorphism, StateObject};
use strmach_core::tape::{encode_word, TapeCategory, TapeTerm};

pub fn fixture(name: &str) -> Document {
    let path = format!("{}/../../machines/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_document(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn word(cat: &TapeCategory, w: &str) -> TapeTerm {
    encode_word(w, cat).unwrap()
}

pub fn tape(t: TapeTerm) -> Morphism {
    Morphism::Tape(t)
}

/// Every string over `letters` of length at most `n`.
pub fn strings(letters: &str, n: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| letters.chars().map(move |c| format!("{w}{c}"))).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

/// The letters of a morphism that is a chain of letters.
pub fn letters_of(m: &Morphism) -> String {
    m.as_tape().and_then(|t| t.decode_word()).expect("a word").iter().map(|s| s.to_string()).collect()
}

pub fn ab() -> Arc<TapeCategory> {
    Arc::new(TapeCategory::alphabet("ab", "ab").unwrap())
}

/// A random state object over `cat` whose variables are all `X → X` with
/// linear term at least 1.
pub fn random_object(rng: &mut impl Rng, cat: &TapeCategory) -> Arc<StateObject> {
    let states = (0..rng.gen_range(1..=3))
        .map(|i| {
            let vars = (0..rng.gen_range(0..=2))
                .map(|_| {
                    VarDecl::new(
                        Signature::tape(cat.name(), 1, 1),
                        Degree2::new(rng.gen_range(1..=2), rng.gen_range(0..=2)),
                    )
                })
                .collect();
            (format!("s{i}"), vars)
        })
        .collect();
    Arc::new(StateObject::new(states).unwrap())
}

/// A random term over `ctx` whose degree stays within `budget`.
fn random_term(rng: &mut impl Rng, cat: &TapeCategory, ctx: &[VarDecl], budget: Degree2) -> FreeTerm {
    let (mut linear, mut constant) = (0, 0);
    let mut leaves = Vec::new();
    for _ in 0..3 {
        if ctx.is_empty() {
            break;
        }
        let i = rng.gen_range(0..ctx.len());
        let d = ctx[i].degree;
        if linear + d.linear <= budget.linear && constant + d.constant <= budget.constant && rng.gen_bool(0.7) {
            linear += d.linear;
            constant += d.constant;
            leaves.push(FreeTerm::Var(i));
        }
    }
    let spare = (budget.constant - constant).min(3);
    for _ in 0..rng.gen_range(0..=spare) {
        let g = &cat.generators()[rng.gen_range(0..cat.generators().len())];
        leaves.push(FreeTerm::tape(TapeTerm::gen(&g.name)));
    }
    for i in (1..leaves.len()).rev() {
        leaves.swap(i, rng.gen_range(0..=i));
    }
    leaves.into_iter().reduce(FreeTerm::seq).unwrap_or_else(|| FreeTerm::tape(TapeTerm::Id(1)))
}

/// A random valid state morphism between the given objects.
pub fn random_morphism(
    rng: &mut impl Rng,
    cat: &Arc<TapeCategory>,
    source: &Arc<StateObject>,
    target: &Arc<StateObject>,
) -> StateMorphism {
    let ell = rng.gen_range(0..=3);
    let mut transition = Vec::new();
    let mut outputs = Vec::new();
    for x in 0..source.len() {
        let y = rng.gen_range(0..target.len());
        transition.push(y);
        outputs.push(
            target
                .vars(y)
                .iter()
                .map(|v| random_term(rng, cat, source.vars(x), v.degree.shift(ell).unwrap()))
                .collect(),
        );
    }
    StateMorphism::new(BaseCategory::Tape(cat.clone()), source.clone(), target.clone(), ell, transition, outputs)
        .expect("generated morphisms are valid")
}
