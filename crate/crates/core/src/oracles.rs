//! Naive reference implementations for tests. None of these go through
//! transducer or machine evaluation.

use crate::analysis::IncOp;
use crate::freecat::{FreeTerm, Morphism};
use crate::machine::Dfa;
use crate::tape::TapeTerm;
use crate::transducer::Transducer;
use crate::{Error, Result};

/// `"id"` for palindromes, `"r"` otherwise.
pub fn oracle_reverse_palindrome(word: &str) -> &'static str {
    let reversed: String = word.chars().rev().collect();
    if reversed == word {
        "id"
    } else {
        "r"
    }
}

/// Runs every DFA on the word in lockstep and accepts when all accept.
pub fn oracle_product_dfa(dfas: &[Dfa], word: &[&str]) -> bool {
    let mut states: Vec<String> = dfas.iter().map(|d| d.start().to_string()).collect();
    for letter in word {
        for (d, s) in dfas.iter().zip(states.iter_mut()) {
            *s = d.step(s, letter).expect("total transition").to_string();
        }
    }
    dfas.iter().zip(&states).all(|(d, s)| d.is_accepting(s))
}

/// Runs one DFA on the word.
pub fn oracle_dfa(dfa: &Dfa, word: &[&str]) -> bool {
    oracle_product_dfa(std::slice::from_ref(dfa), word)
}

/// Builds the full input term from the op sequence, starting at `id`, and
/// reads off the state the transducer reaches from `start`.
pub fn oracle_full_reeval(t: &Transducer, start: &str, ops: &[IncOp], sequence: &[usize]) -> Result<String> {
    let g = materialize(ops, sequence)?;
    Ok(t.evaluate(start, &g, &[])?.output_state)
}

/// The term obtained by substituting each op into the next.
pub fn materialize(ops: &[IncOp], sequence: &[usize]) -> Result<TapeTerm> {
    let mut g = FreeTerm::tape(TapeTerm::Id(1));
    for &i in sequence {
        let op = ops.get(i).ok_or_else(|| Error::Resolution(format!("op {i}")))?;
        g = plug(&op.term(), &g);
    }
    to_tape(&g)
}

fn plug(t: &FreeTerm, g: &FreeTerm) -> FreeTerm {
    match t {
        FreeTerm::Var(_) => g.clone(),
        FreeTerm::Base(m) => FreeTerm::Base(m.clone()),
        FreeTerm::Seq(a, b) => FreeTerm::seq(plug(a, g), plug(b, g)),
        FreeTerm::Par(a, b) => FreeTerm::par(plug(a, g), plug(b, g)),
    }
}

fn to_tape(t: &FreeTerm) -> Result<TapeTerm> {
    match t {
        FreeTerm::Base(Morphism::Tape(t)) => Ok(t.clone()),
        FreeTerm::Seq(a, b) => Ok(TapeTerm::seq(to_tape(a)?, to_tape(b)?)),
        FreeTerm::Par(a, b) => Ok(TapeTerm::par(to_tape(a)?, to_tape(b)?)),
        other => Err(Error::Unsupported(format!("`{other}` in a materialized input"))),
    }
}
