//! Freely generated ℕ²-filtered categories over an output category.
//!
//! A [`FreeTerm`] is a term over the morphisms of a [`BaseCategory`] extended
//! with numbered variable generators. The variables are declared by an
//! ordered context of [`VarDecl`]s that lives with the term's owner (the
//! source state of a state morphism) rather than inside the term.

use std::fmt;
use std::sync::{Arc, LazyLock};

use crate::degrees::{Degree1, Degree2};
use crate::error::{Error, Result};
use crate::machine::{MachineObject, StringMachine};
use crate::tape::grammar::{self, Syntax, TermView, View};
use crate::tape::{TapeCategory, TapeTerm};

/// Objects of a base category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Object {
    /// `X^width` in the named tape category.
    Tape { category: Arc<str>, width: usize },
    /// An object of the category of string machines.
    Machines(MachineObject),
}

impl Object {
    pub fn tape(category: &str, width: usize) -> Self {
        Object::Tape { category: Arc::from(category), width }
    }

    pub fn tensor(&self, other: &Object) -> Result<Object> {
        match (self, other) {
            (Object::Tape { category: c1, width: w1 }, Object::Tape { category: c2, width: w2 }) if c1 == c2 => {
                Ok(Object::Tape { category: c1.clone(), width: w1 + w2 })
            }
            (Object::Machines(a), Object::Machines(b)) => Ok(Object::Machines(a.concat(b))),
            _ => Err(Error::IllTyped(format!("cannot form the product of {self} and {other}"))),
        }
    }
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Tape { category, width } => write!(f, "{category}^{width}"),
            Object::Machines(m) => write!(f, "{m}"),
        }
    }
}

/// A morphism signature `dom → cod`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub dom: Object,
    pub cod: Object,
}

impl Signature {
    pub fn new(dom: Object, cod: Object) -> Self {
        Signature { dom, cod }
    }

    pub fn tape(category: &str, dom: usize, cod: usize) -> Self {
        Signature { dom: Object::tape(category, dom), cod: Object::tape(category, cod) }
    }

    /// Signature of a string machine `dom → cod`, as a morphism of the
    /// category of string machines.
    pub fn machines(dom: MachineObject, cod: MachineObject) -> Self {
        Signature { dom: Object::Machines(dom), cod: Object::Machines(cod) }
    }

    pub fn tensor(&self, other: &Signature) -> Result<Signature> {
        Ok(Signature { dom: self.dom.tensor(&other.dom)?, cod: self.cod.tensor(&other.cod)? })
    }

    /// Tape widths if this is a tape signature.
    pub fn tape_widths(&self) -> Option<(&str, usize, usize)> {
        match (&self.dom, &self.cod) {
            (Object::Tape { category, width: m }, Object::Tape { category: c2, width: n }) if category == c2 => {
                Some((category, *m, *n))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.dom, self.cod)
    }
}

/// A concrete morphism of a base category.
#[derive(Clone, Debug, PartialEq)]
pub enum Morphism {
    Tape(TapeTerm),
    Machine(Arc<StringMachine>),
}

impl Morphism {
    pub fn as_tape(&self) -> Option<&TapeTerm> {
        match self {
            Morphism::Tape(t) => Some(t),
            Morphism::Machine(_) => None,
        }
    }

    pub fn as_machine(&self) -> Option<&Arc<StringMachine>> {
        match self {
            Morphism::Machine(m) => Some(m),
            Morphism::Tape(_) => None,
        }
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Morphism::Tape(t) => write!(f, "{t}"),
            Morphism::Machine(m) => write!(f, "{}", m.name()),
        }
    }
}

/// The category a transducer writes into.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseCategory {
    Tape(Arc<TapeCategory>),
    /// String machines of meta level strictly below the given level.
    Machines(u32),
}

impl BaseCategory {
    pub fn describe(&self) -> String {
        match self {
            BaseCategory::Tape(c) => format!("tape category `{}`", c.name()),
            BaseCategory::Machines(k) => format!("string machines below level {k}"),
        }
    }

    pub fn signature_of(&self, m: &Morphism) -> Result<Signature> {
        match (self, m) {
            (BaseCategory::Tape(cat), Morphism::Tape(t)) => {
                let (i, o) = t.signature(cat)?;
                Ok(Signature::tape(cat.name(), i, o))
            }
            (BaseCategory::Machines(level), Morphism::Machine(machine)) => {
                if machine.meta_level() >= *level {
                    return Err(Error::BaseCategoryMismatch(format!(
                        "machine `{}` has meta level {} but the category holds levels below {level}",
                        machine.name(),
                        machine.meta_level()
                    )));
                }
                Ok(machine.signature())
            }
            _ => Err(Error::BaseCategoryMismatch(format!("`{m}` is not a morphism of the {}", self.describe()))),
        }
    }

    /// Degree of a concrete morphism: the generator degree sum for tape
    /// terms, the number of transducers for string machines.
    pub fn degree_of(&self, m: &Morphism) -> Result<Degree1> {
        match (self, m) {
            (BaseCategory::Tape(cat), Morphism::Tape(t)) => t.degree(cat),
            (BaseCategory::Machines(_), Morphism::Machine(machine)) => Ok(machine.transducer_count() as Degree1),
            _ => Err(Error::BaseCategoryMismatch(format!("`{m}` is not a morphism of the {}", self.describe()))),
        }
    }

    /// Whether `sig` is a signature of this category.
    pub fn owns(&self, sig: &Signature) -> bool {
        match self {
            BaseCategory::Tape(cat) => matches!(sig.tape_widths(), Some((c, _, _)) if c == cat.name()),
            BaseCategory::Machines(_) => matches!((&sig.dom, &sig.cod), (Object::Machines(_), Object::Machines(_))),
        }
    }

    /// Composite `f ; g`, dropping identity factors. Typing is the caller's
    /// responsibility.
    pub fn compose(&self, f: Morphism, g: Morphism) -> Result<Morphism> {
        match (f, g) {
            (Morphism::Tape(TapeTerm::Id(_)), g @ Morphism::Tape(_)) => Ok(g),
            (f @ Morphism::Tape(_), Morphism::Tape(TapeTerm::Id(_))) => Ok(f),
            (Morphism::Tape(f), Morphism::Tape(g)) => Ok(Morphism::Tape(TapeTerm::seq(f, g))),
            (Morphism::Machine(f), Morphism::Machine(g)) => Ok(Morphism::Machine(Arc::new(f.then(&g)?))),
            (f, g) => Err(Error::BaseCategoryMismatch(format!("cannot compose `{f}` with `{g}`"))),
        }
    }

    pub fn tensor(&self, f: Morphism, g: Morphism) -> Result<Morphism> {
        match (f, g) {
            (Morphism::Tape(TapeTerm::Id(0)), g @ Morphism::Tape(_)) => Ok(g),
            (f @ Morphism::Tape(_), Morphism::Tape(TapeTerm::Id(0))) => Ok(f),
            (Morphism::Tape(f), Morphism::Tape(g)) => Ok(Morphism::Tape(TapeTerm::par(f, g))),
            (Morphism::Machine(f), Morphism::Machine(g)) => Ok(Morphism::Machine(Arc::new(f.beside(&g)))),
            (f, g) => Err(Error::BaseCategoryMismatch(format!("cannot form `{f} * {g}`"))),
        }
    }

    /// Resolves parsed syntax into a free term. Identifiers name generators
    /// in a tape category and machines (through `machines`) otherwise.
    pub fn resolve(
        &self,
        syntax: &Syntax,
        machines: &dyn Fn(&str) -> Option<Arc<StringMachine>>,
    ) -> Result<FreeTerm> {
        crate::deep(|| {
            Ok(match (self, syntax) {
                (_, Syntax::Var(i)) => FreeTerm::Var(*i),
                (_, Syntax::Seq(l, r)) => FreeTerm::seq(self.resolve(l, machines)?, self.resolve(r, machines)?),
                (_, Syntax::Par(l, r)) => FreeTerm::par(self.resolve(l, machines)?, self.resolve(r, machines)?),
                (BaseCategory::Tape(cat), leaf) => FreeTerm::Base(Morphism::Tape(cat.resolve(leaf)?)),
                (BaseCategory::Machines(_), Syntax::Ident(name)) => {
                    let m = machines(name).ok_or_else(|| Error::Resolution(name.clone()))?;
                    FreeTerm::Base(Morphism::Machine(m))
                }
                (BaseCategory::Machines(_), leaf) => {
                    return Err(Error::Unsupported(format!("`{leaf}` in a term over string machines")))
                }
            })
        })
    }

    pub fn parse_free(
        &self,
        text: &str,
        machines: &dyn Fn(&str) -> Option<Arc<StringMachine>>,
    ) -> Result<FreeTerm> {
        self.resolve(&grammar::parse(text)?, machines)
    }
}

/// Declaration of one variable: its signature and ℕ² degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub signature: Signature,
    pub degree: Degree2,
}

impl VarDecl {
    pub fn new(signature: Signature, degree: Degree2) -> Self {
        VarDecl { signature, degree }
    }
}

/// A term of the free ℕ²-filtered category over a base category.
#[derive(Clone, Debug, PartialEq)]
pub enum FreeTerm {
    Var(usize),
    Base(Morphism),
    Seq(Arc<FreeTerm>, Arc<FreeTerm>),
    Par(Arc<FreeTerm>, Arc<FreeTerm>),
}

static HOLE: LazyLock<Arc<FreeTerm>> = LazyLock::new(|| Arc::new(FreeTerm::Var(0)));

impl Drop for FreeTerm {
    fn drop(&mut self) {
        if let FreeTerm::Seq(l, r) | FreeTerm::Par(l, r) = self {
            let l = std::mem::replace(l, HOLE.clone());
            let r = std::mem::replace(r, HOLE.clone());
            crate::deep(move || {
                drop(l);
                drop(r);
            });
        }
    }
}

impl FreeTerm {
    pub fn seq(first: FreeTerm, second: FreeTerm) -> Self {
        FreeTerm::Seq(Arc::new(first), Arc::new(second))
    }

    pub fn par(left: FreeTerm, right: FreeTerm) -> Self {
        FreeTerm::Par(Arc::new(left), Arc::new(right))
    }

    pub fn tape(t: TapeTerm) -> Self {
        FreeTerm::Base(Morphism::Tape(t))
    }

    pub fn signature(&self, ctx: &[VarDecl], base: &BaseCategory) -> Result<Signature> {
        crate::deep(|| match self {
            FreeTerm::Var(i) => ctx
                .get(*i)
                .map(|d| d.signature.clone())
                .ok_or(Error::VarOutOfRange { index: *i, len: ctx.len() }),
            FreeTerm::Base(m) => base.signature_of(m),
            FreeTerm::Seq(f, g) => {
                let fs = f.signature(ctx, base)?;
                let gs = g.signature(ctx, base)?;
                if fs.cod != gs.dom {
                    return Err(Error::IllTyped(format!("`{f}` ends at {} but `{g}` starts at {}", fs.cod, gs.dom)));
                }
                Ok(Signature::new(fs.dom, gs.cod))
            }
            FreeTerm::Par(f, g) => f.signature(ctx, base)?.tensor(&g.signature(ctx, base)?),
        })
    }

    /// ℕ² degree: each variable occurrence contributes its declared degree,
    /// each base leaf contributes its degree as a constant.
    pub fn degree(&self, ctx: &[VarDecl], base: &BaseCategory) -> Result<Degree2> {
        crate::deep(|| match self {
            FreeTerm::Var(i) => ctx.get(*i).map(|d| d.degree).ok_or(Error::VarOutOfRange { index: *i, len: ctx.len() }),
            FreeTerm::Base(m) => Ok(Degree2::constant(base.degree_of(m)?)),
            FreeTerm::Seq(f, g) | FreeTerm::Par(f, g) => f.degree(ctx, base)?.checked_add(g.degree(ctx, base)?),
        })
    }

    /// Number of `Var(index)` leaves.
    pub fn var_occurrences(&self, index: usize) -> usize {
        crate::deep(|| match self {
            FreeTerm::Var(i) => usize::from(*i == index),
            FreeTerm::Base(_) => 0,
            FreeTerm::Seq(f, g) | FreeTerm::Par(f, g) => f.var_occurrences(index) + g.var_occurrences(index),
        })
    }

    /// Largest variable index plus one.
    pub fn var_bound(&self) -> usize {
        crate::deep(|| match self {
            FreeTerm::Var(i) => i + 1,
            FreeTerm::Base(_) => 0,
            FreeTerm::Seq(f, g) | FreeTerm::Par(f, g) => f.var_bound().max(g.var_bound()),
        })
    }

    /// Replaces every `Var(i)` with `fills[i]` without any checks.
    pub fn substitute_free_unchecked(&self, fills: &[FreeTerm]) -> FreeTerm {
        crate::deep(|| match self {
            FreeTerm::Var(i) => fills[*i].clone(),
            FreeTerm::Base(m) => FreeTerm::Base(m.clone()),
            FreeTerm::Seq(f, g) => FreeTerm::seq(f.substitute_free_unchecked(fills), g.substitute_free_unchecked(fills)),
            FreeTerm::Par(f, g) => FreeTerm::par(f.substitute_free_unchecked(fills), g.substitute_free_unchecked(fills)),
        })
    }

    /// The functor induced by `fills`: replaces `Var(i)` (declared in `ctx`)
    /// by `fills[i]`, a term over `fills_ctx`.
    pub fn substitute_free(
        &self,
        ctx: &[VarDecl],
        fills: &[FreeTerm],
        fills_ctx: &[VarDecl],
        base: &BaseCategory,
    ) -> Result<FreeTerm> {
        if fills.len() != ctx.len() {
            return Err(Error::ContextMismatch(format!("{} fills for a context of {} variables", fills.len(), ctx.len())));
        }
        for (index, (fill, decl)) in fills.iter().zip(ctx).enumerate() {
            let found = fill.signature(fills_ctx, base)?;
            if found != decl.signature {
                return Err(Error::SignatureMismatch {
                    index,
                    expected: decl.signature.to_string(),
                    found: found.to_string(),
                });
            }
        }
        Ok(self.substitute_free_unchecked(fills))
    }

    /// Evaluates the term to a base morphism with `Var(i) := fills[i]`,
    /// without any checks.
    pub fn instantiate(&self, fills: &[Morphism], base: &BaseCategory) -> Result<Morphism> {
        crate::deep(|| match self {
            FreeTerm::Var(i) => fills
                .get(*i)
                .cloned()
                .ok_or(Error::VarOutOfRange { index: *i, len: fills.len() }),
            FreeTerm::Base(m) => Ok(m.clone()),
            FreeTerm::Seq(f, g) => base.compose(f.instantiate(fills, base)?, g.instantiate(fills, base)?),
            FreeTerm::Par(f, g) => base.tensor(f.instantiate(fills, base)?, g.instantiate(fills, base)?),
        })
    }

    /// Substitutes concrete morphisms for all variables after checking their
    /// signatures against `ctx`.
    pub fn substitute_concrete(&self, ctx: &[VarDecl], fills: &[Morphism], base: &BaseCategory) -> Result<Morphism> {
        check_fills(ctx, fills, base)?;
        self.instantiate(fills, base)
    }
}

/// Checks that `fills` matches `ctx` in length and signatures.
pub fn check_fills(ctx: &[VarDecl], fills: &[Morphism], base: &BaseCategory) -> Result<()> {
    if fills.len() != ctx.len() {
        return Err(Error::ContextMismatch(format!("{} values for {} variables", fills.len(), ctx.len())));
    }
    for (index, (fill, decl)) in fills.iter().zip(ctx).enumerate() {
        let found = base.signature_of(fill)?;
        if found != decl.signature {
            return Err(Error::SignatureMismatch { index, expected: decl.signature.to_string(), found: found.to_string() });
        }
    }
    Ok(())
}

impl TermView for FreeTerm {
    fn view(&self) -> View<'_, Self> {
        match self {
            FreeTerm::Seq(l, r) => View::Seq(l, r),
            FreeTerm::Par(l, r) => View::Par(l, r),
            FreeTerm::Var(i) => View::Leaf(format!("var{i}")),
            FreeTerm::Base(Morphism::Tape(t @ (TapeTerm::Seq(..) | TapeTerm::Par(..)))) => View::Leaf(format!("({t})")),
            FreeTerm::Base(m) => View::Leaf(m.to_string()),
        }
    }
}

impl fmt::Display for FreeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&grammar::render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tape::encode_word;
    use crate::tape::Generator;
    use proptest::prelude::*;

    fn cat() -> Arc<TapeCategory> {
        Arc::new(
            TapeCategory::new(
                "sigma",
                vec![Generator::new("a", 1, 1, 1), Generator::new("b", 1, 1, 1), Generator::new("g", 1, 1, 2)],
            )
            .unwrap(),
        )
    }

    fn xx(d: Degree2) -> VarDecl {
        VarDecl::new(Signature::tape("sigma", 1, 1), d)
    }

    fn no_machines(_: &str) -> Option<Arc<StringMachine>> {
        None
    }

    fn parse(base: &BaseCategory, text: &str) -> FreeTerm {
        base.parse_free(text, &no_machines).unwrap()
    }

    #[test]
    fn degree_examples() {
        let base = BaseCategory::Tape(cat());
        let ctx = [xx(Degree2::new(1, 0))];
        assert_eq!(parse(&base, "var0 ; var0").degree(&ctx, &base).unwrap(), Degree2::new(2, 0));
        let ctx = [xx(Degree2::new(1, 1))];
        assert_eq!(parse(&base, "var0 ; g").degree(&ctx, &base).unwrap(), Degree2::new(1, 3));
        assert_eq!(parse(&base, "a ; b ; g").degree(&[], &base).unwrap(), Degree2::new(0, 4));
    }

    #[test]
    fn occurrence_examples() {
        let base = BaseCategory::Tape(cat());
        assert_eq!(parse(&base, "var0 ; var0").var_occurrences(0), 2);
        assert_eq!(parse(&base, "a ; b").var_occurrences(0), 0);
        assert_eq!(parse(&base, "var0 * var1").var_occurrences(1), 1);
    }

    #[test]
    fn concrete_substitution_examples() {
        let c = cat();
        let base = BaseCategory::Tape(c.clone());
        let ctx = [xx(Degree2::new(1, 0))];
        let w = Morphism::Tape(encode_word("ab", &c).unwrap());
        assert_eq!(FreeTerm::Var(0).substitute_concrete(&ctx, std::slice::from_ref(&w), &base).unwrap(), w);
        let doubled = parse(&base, "var0 ; var0").substitute_concrete(&ctx, std::slice::from_ref(&w), &base).unwrap();
        assert_eq!(base.degree_of(&doubled).unwrap(), 4);
        let r = parse(&base, "b");
        assert_eq!(r.substitute_concrete(&[], &[], &base).unwrap(), Morphism::Tape(TapeTerm::gen("b")));

        let wide = Morphism::Tape(TapeTerm::Id(2));
        assert!(matches!(
            FreeTerm::Var(0).substitute_concrete(&ctx, &[wide], &base),
            Err(Error::SignatureMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn free_substitution_examples() {
        let base = BaseCategory::Tape(cat());
        let ctx = [xx(Degree2::new(1, 0))];
        let relabel = FreeTerm::Var(0).substitute_free(&ctx, &[FreeTerm::Var(0)], &ctx, &base).unwrap();
        assert_eq!(relabel, FreeTerm::Var(0));

        let inner_ctx = [xx(Degree2::new(1, 0))];
        let u = parse(&base, "var0 ; a");
        assert_eq!(u.degree(&inner_ctx, &base).unwrap(), Degree2::new(1, 1));
        let doubled = parse(&base, "var0 ; var0").substitute_free(&ctx, &[u], &inner_ctx, &base).unwrap();
        assert_eq!(doubled.degree(&inner_ctx, &base).unwrap(), Degree2::new(2, 2));

        let err = FreeTerm::Var(0).substitute_free(&ctx, &[], &ctx, &base);
        assert!(matches!(err, Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn ill_typed_terms_are_rejected() {
        let base = BaseCategory::Tape(cat());
        let ctx = [xx(Degree2::new(1, 0))];
        assert!(matches!(parse(&base, "copy ; var0").signature(&ctx, &base), Err(Error::IllTyped(_))));
        assert!(matches!(parse(&base, "var3").signature(&ctx, &base), Err(Error::VarOutOfRange { .. })));
    }

    // Random small terms over a two-variable context, all of type X -> X.
    fn arb_term() -> BoxedStrategy<FreeTerm> {
        let leaf = prop_oneof![
            Just(FreeTerm::Var(0)),
            Just(FreeTerm::Var(1)),
            Just(FreeTerm::tape(TapeTerm::gen("a"))),
            Just(FreeTerm::tape(TapeTerm::gen("g"))),
            Just(FreeTerm::tape(TapeTerm::Id(1))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| FreeTerm::seq(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| FreeTerm::seq(
                    FreeTerm::tape(TapeTerm::Copy),
                    FreeTerm::seq(FreeTerm::par(l, r), FreeTerm::par(FreeTerm::tape(TapeTerm::Id(1)), FreeTerm::tape(TapeTerm::Discard)))
                )),
            ]
        })
        .boxed()
    }

    fn ctx2() -> Vec<VarDecl> {
        vec![xx(Degree2::new(1, 0)), xx(Degree2::new(2, 1))]
    }

    proptest! {
        #[test]
        fn linear_degree_counts_occurrences(t in arb_term()) {
            let base = BaseCategory::Tape(cat());
            let ctx = ctx2();
            let d = t.degree(&ctx, &base).unwrap();
            let expected = t.var_occurrences(0) as u64 + t.var_occurrences(1) as u64 * 2;
            prop_assert_eq!(d.linear, expected);
        }

        #[test]
        fn concrete_degree_formula(t in arb_term(), w0 in "[ab]{0,5}", w1 in "[ab]{0,5}") {
            let c = cat();
            let base = BaseCategory::Tape(c.clone());
            let ctx = ctx2();
            let fills = [Morphism::Tape(encode_word(&w0, &c).unwrap()), Morphism::Tape(encode_word(&w1, &c).unwrap())];
            let out = t.substitute_concrete(&ctx, &fills, &base).unwrap();
            // var1 is declared with constant term 1; var0 with 0.
            let base_part = t.degree(&ctx, &base).unwrap().constant - t.var_occurrences(1) as u64;
            let expected = base_part
                + t.var_occurrences(0) as u64 * w0.len() as u64
                + t.var_occurrences(1) as u64 * w1.len() as u64;
            prop_assert_eq!(base.degree_of(&out).unwrap(), expected);
        }

        #[test]
        fn substitution_composes(t in arb_term(), f0 in arb_term(), f1 in arb_term(), w0 in "[ab]{0,4}", w1 in "[ab]{0,4}") {
            let c = cat();
            let base = BaseCategory::Tape(c.clone());
            let ctx = ctx2();
            let gs = [Morphism::Tape(encode_word(&w0, &c).unwrap()), Morphism::Tape(encode_word(&w1, &c).unwrap())];
            let fills = [f0, f1];
            // The second fill stands for a variable of degree (2,1); only its
            // signature matters for substitution.
            let lhs = t.substitute_free_unchecked(&fills).substitute_concrete(&ctx, &gs, &base).unwrap();
            let staged: Vec<Morphism> = fills.iter().map(|f| f.substitute_concrete(&ctx, &gs, &base).unwrap()).collect();
            let rhs = t.substitute_concrete(&ctx, &staged, &base).unwrap();
            let (l, r) = (lhs.as_tape().unwrap(), rhs.as_tape().unwrap());
            prop_assert_eq!(l.degree(&c).unwrap(), r.degree(&c).unwrap());
            prop_assert_eq!(l, r);
        }
    }
}
