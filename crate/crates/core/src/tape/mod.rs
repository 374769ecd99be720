//! Tape categories: free copy-discard symmetric monoidal categories on one
//! object `X`, generated by finitely many morphisms `X^m → X^n` of positive
//! degree. Objects are represented by their width `n` (for `X^n`).

pub mod grammar;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::degrees::{add1, Degree1};
use crate::error::{Error, Result};
use grammar::{Syntax, TermView, View};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub arity_in: usize,
    pub arity_out: usize,
    pub degree: Degree1,
}

impl Generator {
    pub fn new(name: &str, arity_in: usize, arity_out: usize, degree: Degree1) -> Self {
        Generator { name: name.to_string(), arity_in, arity_out, degree }
    }

    pub fn is_endomorphism(&self) -> bool {
        self.arity_in == 1 && self.arity_out == 1
    }
}

#[derive(Clone, Debug)]
pub struct TapeCategory {
    name: String,
    generators: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl PartialEq for TapeCategory {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.generators == other.generators
    }
}

impl Eq for TapeCategory {}

impl TapeCategory {
    pub fn new(name: &str, generators: Vec<Generator>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if !grammar::is_identifier(&g.name) || grammar::is_reserved_name(&g.name) {
                return Err(Error::InvalidName(g.name.clone()));
            }
            if g.degree == 0 {
                return Err(Error::ZeroDegreeGenerator(g.name.clone()));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(TapeCategory { name: name.to_string(), generators, index })
    }

    /// A category whose generators are the given characters, each an
    /// endomorphism of degree 1.
    pub fn alphabet(name: &str, chars: &str) -> Result<Self> {
        let gens = chars.chars().map(|c| Generator::new(&c.to_string(), 1, 1, 1)).collect();
        Self::new(name, gens)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&Generator> {
        self.index
            .get(name)
            .map(|&i| &self.generators[i])
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Endomorphism generators, in declaration order.
    pub fn letters(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.is_endomorphism())
    }

    /// Resolves parsed syntax into a term of this category. Variables are
    /// rejected.
    pub fn resolve(&self, syntax: &Syntax) -> Result<TapeTerm> {
        crate::deep(|| {
            Ok(match syntax {
                Syntax::Ident(name) => {
                    self.generator(name)?;
                    TapeTerm::Gen(Arc::from(name.as_str()))
                }
                Syntax::Id(n) => TapeTerm::Id(*n),
                Syntax::Var(n) => {
                    return Err(Error::TermSyntax { position: 0, message: format!("var{n} is not allowed here") })
                }
                Syntax::Copy => TapeTerm::Copy,
                Syntax::Discard => TapeTerm::Discard,
                Syntax::Swap => TapeTerm::Swap,
                Syntax::Seq(l, r) => TapeTerm::seq(self.resolve(l)?, self.resolve(r)?),
                Syntax::Par(l, r) => TapeTerm::par(self.resolve(l)?, self.resolve(r)?),
            })
        })
    }

    pub fn parse_term(&self, text: &str) -> Result<TapeTerm> {
        self.resolve(&grammar::parse(text)?)
    }
}

/// A string-diagram term over a tape category.
///
/// `Seq(f, g)` applies `f` first. Subterms are reference counted so that
/// substitution can share them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TapeTerm {
    Gen(Arc<str>),
    Id(usize),
    Seq(Arc<TapeTerm>, Arc<TapeTerm>),
    Par(Arc<TapeTerm>, Arc<TapeTerm>),
    Copy,
    Discard,
    Swap,
}

static HOLE: LazyLock<Arc<TapeTerm>> = LazyLock::new(|| Arc::new(TapeTerm::Id(0)));

impl Drop for TapeTerm {
    fn drop(&mut self) {
        if let TapeTerm::Seq(l, r) | TapeTerm::Par(l, r) = self {
            let l = std::mem::replace(l, HOLE.clone());
            let r = std::mem::replace(r, HOLE.clone());
            crate::deep(move || {
                drop(l);
                drop(r);
            });
        }
    }
}

impl TapeTerm {
    pub fn gen(name: &str) -> Self {
        TapeTerm::Gen(Arc::from(name))
    }

    pub fn seq(first: TapeTerm, second: TapeTerm) -> Self {
        TapeTerm::Seq(Arc::new(first), Arc::new(second))
    }

    pub fn par(left: TapeTerm, right: TapeTerm) -> Self {
        TapeTerm::Par(Arc::new(left), Arc::new(right))
    }

    /// `(m, n)` such that the term is a morphism `X^m → X^n`.
    pub fn signature(&self, cat: &TapeCategory) -> Result<(usize, usize)> {
        crate::deep(|| match self {
            TapeTerm::Gen(name) => {
                let g = cat.generator(name)?;
                Ok((g.arity_in, g.arity_out))
            }
            TapeTerm::Id(n) => Ok((*n, *n)),
            TapeTerm::Copy => Ok((1, 2)),
            TapeTerm::Discard => Ok((1, 0)),
            TapeTerm::Swap => Ok((2, 2)),
            TapeTerm::Seq(f, g) => {
                let (fi, fo) = f.signature(cat)?;
                let (gi, go) = g.signature(cat)?;
                if fo != gi {
                    return Err(Error::IllTyped(format!("`{}` has {fo} outputs but `{}` takes {gi} inputs", f, g)));
                }
                Ok((fi, go))
            }
            TapeTerm::Par(f, g) => {
                let (fi, fo) = f.signature(cat)?;
                let (gi, go) = g.signature(cat)?;
                Ok((fi + gi, fo + go))
            }
        })
    }

    /// Sum of generator degrees over all generator occurrences. Does not
    /// check typing; see [`TapeTerm::signature`].
    pub fn degree(&self, cat: &TapeCategory) -> Result<Degree1> {
        crate::deep(|| match self {
            TapeTerm::Gen(name) => Ok(cat.generator(name)?.degree),
            TapeTerm::Id(_) | TapeTerm::Copy | TapeTerm::Discard | TapeTerm::Swap => Ok(0),
            TapeTerm::Seq(f, g) | TapeTerm::Par(f, g) => add1(f.degree(cat)?, g.degree(cat)?),
        })
    }

    /// Type checks and returns the degree.
    pub fn checked_degree(&self, cat: &TapeCategory) -> Result<Degree1> {
        self.signature(cat)?;
        self.degree(cat)
    }

    /// Whether any generator occurrence is named `name`.
    pub fn mentions(&self, name: &str) -> bool {
        crate::deep(|| match self {
            TapeTerm::Gen(g) => &**g == name,
            TapeTerm::Seq(f, g) | TapeTerm::Par(f, g) => f.mentions(name) || g.mentions(name),
            _ => false,
        })
    }

    /// Reads a term built only from composition, `id1` and endomorphism
    /// generators back as a word, leftmost character applied first.
    pub fn decode_word(&self) -> Option<Vec<Arc<str>>> {
        fn go(t: &TapeTerm, out: &mut Vec<Arc<str>>) -> bool {
            crate::deep(|| match t {
                TapeTerm::Gen(g) => {
                    out.push(g.clone());
                    true
                }
                TapeTerm::Id(1) => true,
                TapeTerm::Seq(f, g) => go(f, out) && go(g, out),
                _ => false,
            })
        }
        let mut out = Vec::new();
        go(self, &mut out).then_some(out)
    }
}

/// Encodes a word as a composition chain, first character applied first.
/// The empty word is `id1`.
pub fn encode_word(word: &str, cat: &TapeCategory) -> Result<TapeTerm> {
    let mut term: Option<TapeTerm> = None;
    for c in word.chars() {
        let name = c.to_string();
        let g = cat.generator(&name)?;
        if !g.is_endomorphism() {
            return Err(Error::NonEndomorphismCharacter(c));
        }
        let letter = TapeTerm::Gen(Arc::from(name.as_str()));
        term = Some(match term {
            None => letter,
            Some(t) => TapeTerm::seq(t, letter),
        });
    }
    Ok(term.unwrap_or(TapeTerm::Id(1)))
}

/// Encodes a sequence of generator names (of any length) as a chain.
pub fn encode_letters<S: AsRef<str>>(letters: &[S]) -> TapeTerm {
    letters
        .iter()
        .map(|s| TapeTerm::gen(s.as_ref()))
        .reduce(TapeTerm::seq)
        .unwrap_or(TapeTerm::Id(1))
}

impl TermView for TapeTerm {
    fn view(&self) -> View<'_, Self> {
        match self {
            TapeTerm::Seq(l, r) => View::Seq(l, r),
            TapeTerm::Par(l, r) => View::Par(l, r),
            TapeTerm::Gen(g) => View::Leaf(g.to_string()),
            TapeTerm::Id(1) => View::Leaf("id".into()),
            TapeTerm::Id(n) => View::Leaf(format!("id{n}")),
            TapeTerm::Copy => View::Leaf("copy".into()),
            TapeTerm::Discard => View::Leaf("discard".into()),
            TapeTerm::Swap => View::Leaf("swap".into()),
        }
    }
}

impl fmt::Display for TapeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&grammar::render(self))
    }
}
