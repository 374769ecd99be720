//! Ready-made machines: the palindrome machine, DFA embeddings, and chains
//! of DFAs run in sequence.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{LegType, MachineBuilder, MachineObject, NodeKind, StringMachine, Value};
use crate::degrees::Degree2;
use crate::error::{Error, Result};
use crate::freecat::{BaseCategory, FreeTerm, Morphism, Signature, VarDecl};
use crate::statecat::StateObject;
use crate::tape::{TapeCategory, TapeTerm};
use crate::transducer::{ImageSpec, Transducer, TransducerSpec};

fn endo(cat: &TapeCategory) -> Signature {
    Signature::tape(cat.name(), 1, 1)
}

fn word_leg(cat: &TapeCategory) -> LegType {
    LegType::Morphism(endo(cat))
}

fn id_const(cat: &TapeCategory) -> NodeKind {
    NodeKind::Const(Value::Morphism(Morphism::Tape(TapeTerm::Id(1))), word_leg(cat))
}

/// The machine with one input leg wired straight to its output.
pub fn identity_machine(name: &str, ty: LegType) -> StringMachine {
    MachineBuilder::new(name).input("w", ty).wire("in.w", "out.w").build().expect("identity machine")
}

/// `T_α`: outputs its input with the leading `α` removed when it starts
/// with `α`, and `r` otherwise.
fn strip_transducer(cat: &Arc<TapeCategory>, alpha: &str, r: &str) -> Result<Transducer> {
    let var = VarDecl::new(endo(cat), Degree2::new(1, 0));
    let states = ["start", "accept", "reject"].map(|s| (s.to_string(), vec![var.clone()]));
    let images = cat
        .generators()
        .iter()
        .map(|g| {
            let letter = FreeTerm::tape(TapeTerm::gen(&g.name));
            let start = if g.name == alpha {
                ("start", "accept", vec![FreeTerm::Var(0)])
            } else {
                ("start", "reject", vec![FreeTerm::tape(TapeTerm::gen(r))])
            };
            let spec = ImageSpec::new(g.degree)
                .row(start.0, start.1, start.2)
                .row("accept", "accept", vec![FreeTerm::seq(FreeTerm::Var(0), letter)])
                .row("reject", "reject", vec![FreeTerm::Var(0)]);
            (g.name.clone(), spec)
        })
        .collect();
    Transducer::new(TransducerSpec {
        name: format!("strip_{alpha}"),
        input_cat: cat.clone(),
        output_cat: BaseCategory::Tape(cat.clone()),
        primary: (1, 1),
        aux: vec![endo(cat)],
        outputs: vec![endo(cat)],
        state_image: StateObject::new(states.into()).expect("fixed states"),
        images,
        initial_state: Some("start".into()),
    })
}

/// The machine that outputs `id` on palindromes and `r` otherwise. A
/// builder transducer reads the word and prepends one stripping stage per
/// character to a stored machine; a meta-vertex then runs the built
/// machine on a copy of the word.
pub fn palindrome_machine(cat: &Arc<TapeCategory>, r: &str) -> Result<StringMachine> {
    let reserved = cat.generator(r)?;
    if cat.generators().iter().any(|g| !g.is_endomorphism()) || !reserved.is_endomorphism() {
        return Err(Error::Unsupported("palindrome machines need an alphabet of endomorphisms".into()));
    }
    let word = word_leg(cat);
    let words = MachineObject(vec![word.clone()]);
    let machines = Signature::machines(words.clone(), words.clone());

    let mut images = Vec::new();
    for g in cat.generators() {
        let out = if g.name == r {
            FreeTerm::Var(0)
        } else {
            let stage = MachineBuilder::new(&format!("step_{}", g.name))
                .input("w", word.clone())
                .node("strip", NodeKind::Transducer(Arc::new(strip_transducer(cat, &g.name, r)?)))
                .node("unit", id_const(cat))
                .wire("in.w", "strip.primary")
                .wire("unit.out0", "strip.aux0")
                .wire("strip.out0", "out.w")
                .build()?;
            FreeTerm::seq(FreeTerm::Base(Morphism::Machine(Arc::new(stage))), FreeTerm::Var(0))
        };
        images.push((g.name.clone(), ImageSpec::new(g.degree).row("s", "s", vec![out])));
    }
    let builder = Transducer::new(TransducerSpec {
        name: "builder".into(),
        input_cat: cat.clone(),
        output_cat: BaseCategory::Machines(1),
        primary: (1, 1),
        aux: vec![machines.clone()],
        outputs: vec![machines.clone()],
        state_image: StateObject::new(vec![("s".into(), vec![VarDecl::new(machines.clone(), Degree2::new(1, 0))])])?,
        images,
        initial_state: Some("s".into()),
    })?;
    let seed = identity_machine("id_machine", word.clone());

    MachineBuilder::new("palindrome")
        .input("w", word)
        .node("copy", NodeKind::Copy(words.clone()))
        .node("builder", NodeKind::Transducer(Arc::new(builder)))
        .node("seed", NodeKind::Const(Value::Morphism(Morphism::Machine(Arc::new(seed))), LegType::Morphism(machines)))
        .node("run", NodeKind::Meta { dom: words.clone(), cod: words, level: 1 })
        .wire("in.w", "copy.in0")
        .wire("copy.out0", "builder.primary")
        .wire("seed.out0", "builder.aux0")
        .wire("builder.out0", "run.machine")
        .wire("copy.out1", "run.in0")
        .wire("run.out0", "out.result")
        .reserve(r)
        .meta_level(1)
        .build()
}

/// A deterministic finite automaton over the endomorphism generators of a
/// tape category.
#[derive(Clone, Debug, PartialEq)]
pub struct Dfa {
    name: String,
    alphabet: Arc<TapeCategory>,
    states: Vec<String>,
    start: usize,
    /// `delta[state][letter]`, letters in generator order.
    delta: Vec<Vec<usize>>,
    accepting: BTreeSet<usize>,
}

impl Dfa {
    pub fn new(
        name: &str,
        alphabet: Arc<TapeCategory>,
        states: &[&str],
        start: &str,
        transitions: &[(&str, &str, &str)],
        accepting: &[&str],
    ) -> Result<Self> {
        if let Some(g) = alphabet.generators().iter().find(|g| !g.is_endomorphism()) {
            return Err(Error::AlphabetMismatch(format!("generator `{}` is not a letter", g.name)));
        }
        let find = |s: &str| states.iter().position(|x| *x == s).ok_or_else(|| Error::UnknownState(s.to_string()));
        let letters = alphabet.generators().len();
        let mut delta = vec![vec![usize::MAX; letters]; states.len()];
        for &(from, letter, to) in transitions {
            let l = alphabet
                .generators()
                .iter()
                .position(|g| g.name == letter)
                .ok_or_else(|| Error::UnknownGenerator(letter.to_string()))?;
            delta[find(from)?][l] = find(to)?;
        }
        for (s, row) in delta.iter().enumerate() {
            if let Some(l) = row.iter().position(|&t| t == usize::MAX) {
                return Err(Error::PartialTransition {
                    state: states[s].to_string(),
                    letter: alphabet.generators()[l].name.clone(),
                });
            }
        }
        Ok(Dfa {
            name: name.to_string(),
            alphabet,
            states: states.iter().map(|s| s.to_string()).collect(),
            start: find(start)?,
            delta,
            accepting: accepting.iter().map(|s| find(s)).collect::<Result<_>>()?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Arc<TapeCategory> {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start(&self) -> &str {
        &self.states[self.start]
    }

    pub fn is_accepting(&self, state: &str) -> bool {
        self.states.iter().position(|s| s == state).is_some_and(|i| self.accepting.contains(&i))
    }

    pub fn accepting_states(&self) -> Vec<&str> {
        self.accepting.iter().map(|&i| self.states[i].as_str()).collect()
    }

    /// Target of the transition from `state` on `letter`.
    pub fn step(&self, state: &str, letter: &str) -> Option<&str> {
        let s = self.states.iter().position(|x| x == state)?;
        let l = self.alphabet.generators().iter().position(|g| g.name == letter)?;
        Some(&self.states[self.delta[s][l]])
    }

    fn transducer(&self, name: String, pass_through: bool) -> Result<Transducer> {
        let cat = &self.alphabet;
        let vars = if pass_through { vec![VarDecl::new(endo(cat), Degree2::new(1, 0))] } else { Vec::new() };
        let images = cat
            .generators()
            .iter()
            .enumerate()
            .map(|(l, g)| {
                let mut spec = ImageSpec::new(if pass_through { g.degree } else { 0 });
                for (s, row) in self.delta.iter().enumerate() {
                    let out = if pass_through {
                        vec![FreeTerm::seq(FreeTerm::Var(0), FreeTerm::tape(TapeTerm::gen(&g.name)))]
                    } else {
                        Vec::new()
                    };
                    spec = spec.row(&self.states[s], &self.states[row[l]], out);
                }
                (g.name.clone(), spec)
            })
            .collect();
        Transducer::new(TransducerSpec {
            name,
            input_cat: cat.clone(),
            output_cat: BaseCategory::Tape(cat.clone()),
            primary: (1, 1),
            aux: if pass_through { vec![endo(cat)] } else { Vec::new() },
            outputs: if pass_through { vec![endo(cat)] } else { Vec::new() },
            state_image: StateObject::new(self.states.iter().map(|s| (s.clone(), vars.clone())).collect())?,
            images,
            initial_state: Some(self.start().to_string()),
        })
    }
}

/// The DFA as a transducer with states only: no variables, no outputs.
pub fn dfa_transducer(dfa: &Dfa) -> Result<Transducer> {
    dfa.transducer(dfa.name.clone(), false)
}

/// A machine running [`dfa_transducer`] on its input and accepting in the
/// DFA's accepting states.
pub fn dfa_machine(dfa: &Dfa) -> Result<StringMachine> {
    MachineBuilder::new(&dfa.name)
        .input("w", word_leg(&dfa.alphabet))
        .node(&dfa.name, NodeKind::Transducer(Arc::new(dfa_transducer(dfa)?)))
        .wire("in.w", &format!("{}.primary", dfa.name))
        .wire(&format!("{}.state", dfa.name), "out.state")
        .accept("state", &dfa.accepting_states())
        .build()
}

/// Runs the DFAs in sequence. Each stage passes the word through unchanged
/// to the next and exposes its final state; the machine accepts when every
/// stage does.
pub fn intersection_chain(dfas: &[Dfa]) -> Result<StringMachine> {
    let first = dfas.first().ok_or_else(|| Error::AlphabetMismatch("no automata given".into()))?;
    if let Some(d) = dfas.iter().find(|d| d.alphabet != first.alphabet) {
        return Err(Error::AlphabetMismatch(format!("`{}` and `{}` use different alphabets", first.name, d.name)));
    }
    let cat = &first.alphabet;
    let mut b = MachineBuilder::new("chain").input("w", word_leg(cat));
    let mut feed = "in.w".to_string();
    for (i, d) in dfas.iter().enumerate() {
        let node = format!("stage{i}");
        b = b
            .node(&node, NodeKind::Transducer(Arc::new(d.transducer(d.name.clone(), true)?)))
            .node(&format!("unit{i}"), id_const(cat))
            .wire(&feed, &format!("{node}.primary"))
            .wire(&format!("unit{i}.out0"), &format!("{node}.aux0"))
            .wire(&format!("{node}.state"), &format!("out.{}", d.name))
            .accept(&d.name, &d.accepting_states());
        feed = format!("{node}.out0");
    }
    b.wire(&feed, "out.w").build()
}
