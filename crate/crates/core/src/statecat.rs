//! The filtered state category over a base category.
//!
//! An object is a finite set of states, each carrying an ordered list of
//! variables (a signature and an ℕ² degree). A morphism of degree `ℓ` maps
//! states to states, and for every source state `x` and every variable `j`
//! of the target state builds a [`FreeTerm`] over the variables at `x`.
//! That term may have ℕ² degree at most `(a, a·ℓ + b)` when the target
//! variable has degree `(a, b)`.
//!
//! Monoidal products are strictly unital: the unit object has a single state
//! named `""` and no variables, and `I ⊗ A` is `A` itself. Product states of
//! non-unit objects are rendered `"x|y"`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::degrees::{Degree1, Degree2};
use crate::error::{Error, Result};
use crate::freecat::{check_fills, BaseCategory, FreeTerm, Morphism, VarDecl};

const UNIT_STATE: &str = "";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateObject {
    states: Vec<String>,
    vars: Vec<Vec<VarDecl>>,
    index: HashMap<String, usize>,
}

fn join_states(a: &str, b: &str) -> String {
    match (a, b) {
        (UNIT_STATE, b) => b.to_string(),
        (a, UNIT_STATE) => a.to_string(),
        (a, b) => format!("{a}|{b}"),
    }
}

impl StateObject {
    /// Builds an object from `(state, variables)` pairs. State names must be
    /// non-empty, unique and free of `|`.
    pub fn new(states: Vec<(String, Vec<VarDecl>)>) -> Result<Self> {
        for (s, _) in &states {
            if s.is_empty() || s.contains('|') || s.contains(char::is_whitespace) {
                return Err(Error::InvalidName(s.clone()));
            }
        }
        Self::from_parts(states)
    }

    fn from_parts(states: Vec<(String, Vec<VarDecl>)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        let mut names = Vec::with_capacity(states.len());
        let mut vars = Vec::with_capacity(states.len());
        for (i, (s, v)) in states.into_iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidName(format!("duplicate state `{s}`")));
            }
            names.push(s);
            vars.push(v);
        }
        Ok(StateObject { states: names, vars, index })
    }

    /// Object of the unfiltered state category: every variable gets the
    /// permissive degree [`Degree2::UNBOUNDED`].
    pub fn unfiltered(states: Vec<(String, Vec<crate::freecat::Signature>)>) -> Result<Self> {
        Self::new(
            states
                .into_iter()
                .map(|(s, sigs)| (s, sigs.into_iter().map(|sig| VarDecl::new(sig, Degree2::UNBOUNDED)).collect()))
                .collect(),
        )
    }

    /// Single state, no variables.
    pub fn unit() -> Self {
        Self::from_parts(vec![(UNIT_STATE.to_string(), Vec::new())]).expect("unit object")
    }

    pub fn is_unit(&self) -> bool {
        self.states.len() == 1 && self.states[0] == UNIT_STATE
    }

    /// `A ⊗ B`: product state set, variable lists concatenated.
    pub fn tensor(&self, other: &StateObject) -> StateObject {
        if self.is_unit() {
            return other.clone();
        }
        if other.is_unit() {
            return self.clone();
        }
        let mut parts = Vec::with_capacity(self.len() * other.len());
        for (a, va) in self.states.iter().zip(&self.vars) {
            for (b, vb) in other.states.iter().zip(&other.vars) {
                parts.push((join_states(a, b), va.iter().chain(vb).cloned().collect()));
            }
        }
        Self::from_parts(parts).expect("product of valid objects")
    }

    /// `A^{⊗k}`; `A^{⊗0}` is the unit.
    pub fn power(&self, k: usize) -> StateObject {
        (0..k).fold(StateObject::unit(), |acc, _| acc.tensor(self))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn vars(&self, i: usize) -> &[VarDecl] {
        &self.vars[i]
    }

    pub fn vars_of(&self, name: &str) -> Result<&[VarDecl]> {
        Ok(&self.vars[self.state_index(name)?])
    }

    pub fn all_vars(&self) -> impl Iterator<Item = (usize, &VarDecl)> {
        self.vars.iter().enumerate().flat_map(|(i, v)| v.iter().map(move |d| (i, d)))
    }
}

impl fmt::Display for StateObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.states.join(", "))
    }
}

fn same_object(a: &Arc<StateObject>, b: &Arc<StateObject>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A problem found by [`StateMorphism::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    Degree { state: String, var: usize, found: Degree2, bound: Degree2 },
    Signature { state: String, var: usize, expected: String, found: String },
    Term { state: String, var: usize, message: String },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Degree { state, var, found, bound } => {
                write!(f, "state `{state}` variable {var}: degree {found} exceeds bound {bound}")
            }
            MorphismViolation::Signature { state, var, expected, found } => {
                write!(f, "state `{state}` variable {var}: signature {found}, expected {expected}")
            }
            MorphismViolation::Term { state, var, message } => write!(f, "state `{state}` variable {var}: {message}"),
        }
    }
}

/// A morphism of the filtered state category.
#[derive(Clone, Debug, PartialEq)]
pub struct StateMorphism {
    base: BaseCategory,
    source: Arc<StateObject>,
    target: Arc<StateObject>,
    degree: Degree1,
    transition: Vec<usize>,
    /// `outputs[x][j]` builds target variable `j` at `transition[x]`.
    outputs: Vec<Vec<FreeTerm>>,
}

impl StateMorphism {
    /// Builds and validates a morphism. `transition[x]` is the target state
    /// index of source state `x`.
    pub fn new(
        base: BaseCategory,
        source: Arc<StateObject>,
        target: Arc<StateObject>,
        degree: Degree1,
        transition: Vec<usize>,
        outputs: Vec<Vec<FreeTerm>>,
    ) -> Result<Self> {
        let m = Self::unchecked(base, source, target, degree, transition, outputs)?;
        let violations = m.validate();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::InvalidStateMorphism(violations))
        }
    }

    /// Structural checks only (shapes of the transition and output rows).
    fn unchecked(
        base: BaseCategory,
        source: Arc<StateObject>,
        target: Arc<StateObject>,
        degree: Degree1,
        transition: Vec<usize>,
        outputs: Vec<Vec<FreeTerm>>,
    ) -> Result<Self> {
        if transition.len() != source.len() || outputs.len() != source.len() {
            return Err(Error::ObjectMismatch(format!(
                "{} transitions and {} output rows for {} source states",
                transition.len(),
                outputs.len(),
                source.len()
            )));
        }
        for (x, (&y, row)) in transition.iter().zip(&outputs).enumerate() {
            if y >= target.len() {
                return Err(Error::ObjectMismatch(format!("state `{}` maps outside the target", source.state(x))));
            }
            if row.len() != target.vars(y).len() {
                return Err(Error::ObjectMismatch(format!(
                    "state `{}` provides {} outputs for the {} variables at `{}`",
                    source.state(x),
                    row.len(),
                    target.vars(y).len(),
                    target.state(y)
                )));
            }
        }
        Ok(StateMorphism { base, source, target, degree, transition, outputs })
    }

    /// Builds a morphism from state names. `rows` maps each source state to
    /// its target state and output terms.
    pub fn from_table(
        base: BaseCategory,
        source: Arc<StateObject>,
        target: Arc<StateObject>,
        degree: Degree1,
        rows: &[(&str, &str, Vec<FreeTerm>)],
    ) -> Result<Self> {
        let m = Self::from_table_unchecked(base, source, target, degree, rows)?;
        let violations = m.validate();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::InvalidStateMorphism(violations))
        }
    }

    /// [`StateMorphism::from_table`] with structural checks only.
    pub(crate) fn from_table_unchecked(
        base: BaseCategory,
        source: Arc<StateObject>,
        target: Arc<StateObject>,
        degree: Degree1,
        rows: &[(&str, &str, Vec<FreeTerm>)],
    ) -> Result<Self> {
        let mut transition = vec![usize::MAX; source.len()];
        let mut outputs = vec![Vec::new(); source.len()];
        for (from, to, terms) in rows {
            let x = source.state_index(from)?;
            transition[x] = target.state_index(to)?;
            outputs[x] = terms.clone();
        }
        if let Some(x) = transition.iter().position(|&y| y == usize::MAX) {
            return Err(Error::ObjectMismatch(format!("no transition for state `{}`", source.state(x))));
        }
        Self::unchecked(base, source, target, degree, transition, outputs)
    }

    pub fn identity(base: BaseCategory, obj: Arc<StateObject>) -> Self {
        let outputs = (0..obj.len()).map(|x| (0..obj.vars(x).len()).map(FreeTerm::Var).collect()).collect();
        StateMorphism { base, source: obj.clone(), target: obj.clone(), degree: 0, transition: (0..obj.len()).collect(), outputs }
    }

    /// `A → A ⊗ A`: duplicates the state and every variable.
    pub fn copy(base: BaseCategory, obj: Arc<StateObject>) -> Self {
        let target = Arc::new(obj.tensor(&obj));
        let n = obj.len();
        let transition = if obj.is_unit() { vec![0] } else { (0..n).map(|x| x * n + x).collect() };
        let outputs = (0..n)
            .map(|x| {
                let k = obj.vars(x).len();
                (0..k).chain(0..k).map(FreeTerm::Var).collect()
            })
            .collect();
        StateMorphism { base, source: obj, target, degree: 0, transition, outputs }
    }

    /// `A → I`.
    pub fn discard(base: BaseCategory, obj: Arc<StateObject>) -> Self {
        let n = obj.len();
        StateMorphism {
            base,
            source: obj,
            target: Arc::new(StateObject::unit()),
            degree: 0,
            transition: vec![0; n],
            outputs: vec![Vec::new(); n],
        }
    }

    /// `A ⊗ B → B ⊗ A`.
    pub fn swap(base: BaseCategory, a: Arc<StateObject>, b: Arc<StateObject>) -> Self {
        let source = Arc::new(a.tensor(&b));
        let target = Arc::new(b.tensor(&a));
        let (na, nb) = (a.len(), b.len());
        let mut transition = Vec::with_capacity(na * nb);
        let mut outputs = Vec::with_capacity(na * nb);
        for x in 0..na {
            for y in 0..nb {
                transition.push(y * na + x);
                let (ka, kb) = (a.vars(x).len(), b.vars(y).len());
                outputs.push((0..kb).map(|k| FreeTerm::Var(ka + k)).chain((0..ka).map(FreeTerm::Var)).collect());
            }
        }
        StateMorphism { base, source, target, degree: 0, transition, outputs }
    }

    pub fn base(&self) -> &BaseCategory {
        &self.base
    }

    pub fn source(&self) -> &Arc<StateObject> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StateObject> {
        &self.target
    }

    pub fn degree(&self) -> Degree1 {
        self.degree
    }

    pub fn transition(&self) -> &[usize] {
        &self.transition
    }

    /// Target state name of a source state name.
    pub fn transition_of(&self, state: &str) -> Result<&str> {
        Ok(self.target.state(self.transition[self.source.state_index(state)?]))
    }

    pub fn outputs(&self, x: usize) -> &[FreeTerm] {
        &self.outputs[x]
    }

    /// Checks every output term against the signature and shifted degree of
    /// its target variable.
    pub fn validate(&self) -> Vec<MorphismViolation> {
        let mut report = Vec::new();
        for x in 0..self.source.len() {
            let ctx = self.source.vars(x);
            let y = self.transition[x];
            let state = self.source.state(x).to_string();
            for (j, (term, decl)) in self.outputs[x].iter().zip(self.target.vars(y)).enumerate() {
                match term.signature(ctx, &self.base) {
                    Ok(sig) if sig != decl.signature => report.push(MorphismViolation::Signature {
                        state: state.clone(),
                        var: j,
                        expected: decl.signature.to_string(),
                        found: sig.to_string(),
                    }),
                    Ok(_) => {}
                    Err(e) => {
                        report.push(MorphismViolation::Term { state: state.clone(), var: j, message: e.to_string() });
                        continue;
                    }
                }
                if decl.degree == Degree2::UNBOUNDED {
                    continue;
                }
                match term.degree(ctx, &self.base) {
                    Ok(found) if !found.within_shifted(decl.degree, self.degree) => {
                        let bound = decl.degree.shift(self.degree).unwrap_or(Degree2::UNBOUNDED);
                        report.push(MorphismViolation::Degree { state: state.clone(), var: j, found, bound });
                    }
                    Ok(_) => {}
                    Err(e) => report.push(MorphismViolation::Term { state: state.clone(), var: j, message: e.to_string() }),
                }
            }
        }
        report
    }

    /// Smallest `ℓ` under which every output term fits its bound, or `None`
    /// if some term exceeds the linear part of its variable's degree.
    pub fn minimal_degree(&self) -> Result<Option<Degree1>> {
        let mut ell = 0u64;
        for x in 0..self.source.len() {
            let ctx = self.source.vars(x);
            for (term, decl) in self.outputs[x].iter().zip(self.target.vars(self.transition[x])) {
                let found = term.degree(ctx, &self.base)?;
                if found.linear > decl.degree.linear {
                    return Ok(None);
                }
                if found.constant > decl.degree.constant {
                    if decl.degree.linear == 0 {
                        return Ok(None);
                    }
                    let excess = found.constant - decl.degree.constant;
                    ell = ell.max(excess.div_ceil(decl.degree.linear));
                }
            }
        }
        Ok(Some(ell))
    }

    /// `g ∘ f`, written `f.then(g)`: apply `self` first.
    pub fn then(&self, g: &StateMorphism) -> Result<StateMorphism> {
        compose(g, self)
    }

    /// Applies the morphism to a variable store at one of its source states.
    pub fn apply(&self, store: &VarStore) -> Result<VarStore> {
        let x = self.source.state_index(&store.state)?;
        check_fills(self.source.vars(x), &store.values, &self.base)
            .map_err(|e| Error::StoreMismatch(format!("at `{}`: {e}", store.state)))?;
        let values = self.outputs[x]
            .iter()
            .map(|t| t.instantiate(&store.values, &self.base))
            .collect::<Result<Vec<_>>>()?;
        Ok(VarStore { state: self.target.state(self.transition[x]).to_string(), values })
    }
}

/// Composite `g ∘ f` (apply `f`, then `g`). Output rows of `g` are
/// substituted with `f`'s rows, and degrees add.
pub fn compose(g: &StateMorphism, f: &StateMorphism) -> Result<StateMorphism> {
    if !same_object(&f.target, &g.source) {
        return Err(Error::ObjectMismatch(format!("cannot compose: {} is not {}", f.target, g.source)));
    }
    if f.base != g.base {
        return Err(Error::BaseCategoryMismatch(format!("{} vs {}", f.base.describe(), g.base.describe())));
    }
    let degree = f.degree.checked_add(g.degree).ok_or(Error::DegreeOverflow)?;
    let mut transition = Vec::with_capacity(f.source.len());
    let mut outputs = Vec::with_capacity(f.source.len());
    for x in 0..f.source.len() {
        let y = f.transition[x];
        transition.push(g.transition[y]);
        let fills = &f.outputs[x];
        outputs.push(g.outputs[y].iter().map(|t| t.substitute_free_unchecked(fills)).collect());
    }
    Ok(StateMorphism {
        base: f.base.clone(),
        source: f.source.clone(),
        target: g.target.clone(),
        degree,
        transition,
        outputs,
    })
}

fn shift_vars(t: &FreeTerm, offset: usize) -> FreeTerm {
    if offset == 0 {
        return t.clone();
    }
    let fills: Vec<FreeTerm> = (0..t.var_bound()).map(|i| FreeTerm::Var(i + offset)).collect();
    t.substitute_free_unchecked(&fills)
}

/// `f ⊗ g`, acting componentwise with `g`'s variable indices offset.
pub fn tensor(f: &StateMorphism, g: &StateMorphism) -> Result<StateMorphism> {
    if f.base != g.base {
        return Err(Error::BaseCategoryMismatch(format!("{} vs {}", f.base.describe(), g.base.describe())));
    }
    let source = Arc::new(f.source.tensor(&g.source));
    let target = Arc::new(f.target.tensor(&g.target));
    let (na, nb) = (f.source.len(), g.source.len());
    let nd = g.target.len();
    let mut transition = Vec::with_capacity(na * nb);
    let mut outputs = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            transition.push(f.transition[a] * nd + g.transition[b]);
            let offset = f.source.vars(a).len();
            let row = f.outputs[a].iter().cloned().chain(g.outputs[b].iter().map(|t| shift_vars(t, offset))).collect();
            outputs.push(row);
        }
    }
    let degree = f.degree.checked_add(g.degree).ok_or(Error::DegreeOverflow)?;
    Ok(StateMorphism { base: f.base.clone(), source, target, degree, transition, outputs })
}

/// Runtime assignment of concrete morphisms to the variables of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct VarStore {
    pub state: String,
    pub values: Vec<Morphism>,
}

impl VarStore {
    pub fn new(state: impl Into<String>, values: Vec<Morphism>) -> Self {
        VarStore { state: state.into(), values }
    }

    /// Pairs two stores of `A` and `B` into a store of `A ⊗ B`.
    pub fn pair(&self, other: &VarStore) -> VarStore {
        VarStore {
            state: join_states(&self.state, &other.state),
            values: self.values.iter().chain(&other.values).cloned().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::Signature;
    use crate::tape::{encode_word, Generator, TapeCategory, TapeTerm};

    fn cat() -> Arc<TapeCategory> {
        Arc::new(
            TapeCategory::new(
                "sigma",
                vec![Generator::new("a", 1, 1, 1), Generator::new("b", 1, 1, 1), Generator::new("g", 1, 1, 3)],
            )
            .unwrap(),
        )
    }

    fn base() -> BaseCategory {
        BaseCategory::Tape(cat())
    }

    fn var(a: u64, b: u64) -> VarDecl {
        VarDecl::new(Signature::tape("sigma", 1, 1), Degree2::new(a, b))
    }

    fn obj(states: &[(&str, Vec<VarDecl>)]) -> Arc<StateObject> {
        Arc::new(StateObject::new(states.iter().map(|(s, v)| (s.to_string(), v.clone())).collect()).unwrap())
    }

    fn term(text: &str) -> FreeTerm {
        base().parse_free(text, &|_| None).unwrap()
    }

    #[test]
    fn identity_validates() {
        let o = obj(&[("p", vec![var(1, 0)]), ("q", vec![var(2, 3), var(0, 1)])]);
        let id = StateMorphism::identity(base(), o);
        assert!(id.validate().is_empty());
        assert_eq!(id.degree(), 0);
    }

    #[test]
    fn doubling_exceeds_a_linear_bound() {
        let o = obj(&[("p", vec![var(1, 0)])]);
        let err = StateMorphism::from_table(base(), o.clone(), o.clone(), 0, &[("p", "p", vec![term("var0 ; var0")])]);
        match err {
            Err(Error::InvalidStateMorphism(v)) => assert_eq!(
                v,
                vec![MorphismViolation::Degree {
                    state: "p".into(),
                    var: 0,
                    found: Degree2::new(2, 0),
                    bound: Degree2::new(1, 0)
                }]
            ),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_output_fits_constant_variable() {
        let src = obj(&[("p", vec![])]);
        let dst = obj(&[("q", vec![var(0, 5)])]);
        let m = StateMorphism::from_table(base(), src, dst, 0, &[("p", "q", vec![term("g")])]).unwrap();
        assert!(m.validate().is_empty());
    }

    #[test]
    fn signature_violations_are_reported() {
        let o = obj(&[("p", vec![var(1, 0)])]);
        let r = StateMorphism::from_table(base(), o.clone(), o, 5, &[("p", "p", vec![term("copy")])]);
        assert!(matches!(r, Err(Error::InvalidStateMorphism(v)) if matches!(v[0], MorphismViolation::Signature { .. })));
    }

    #[test]
    fn composite_degree_adds() {
        let o = obj(&[("p", vec![var(1, 0)])]);
        let f = StateMorphism::from_table(base(), o.clone(), o.clone(), 2, &[("p", "p", vec![term("var0 ; a ; b")])]).unwrap();
        let g = StateMorphism::from_table(base(), o.clone(), o.clone(), 3, &[("p", "p", vec![term("var0 ; g")])]).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.degree(), 5);
        assert!(gf.validate().is_empty());
        assert_eq!(gf.outputs(0)[0].to_string(), "var0 ; a ; b ; g");
        assert_eq!(gf.minimal_degree().unwrap(), Some(5));
    }

    #[test]
    fn composing_with_identity_is_neutral() {
        let o = obj(&[("p", vec![var(1, 0)]), ("q", vec![var(1, 1)])]);
        let f = StateMorphism::from_table(
            base(),
            o.clone(),
            o.clone(),
            1,
            &[("p", "q", vec![term("var0 ; a")]), ("q", "p", vec![term("var0")])],
        )
        .unwrap();
        let id = StateMorphism::identity(base(), o);
        assert_eq!(compose(&id, &f).unwrap(), f);
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn mismatched_objects_do_not_compose() {
        let o1 = obj(&[("p", vec![])]);
        let o2 = obj(&[("q", vec![])]);
        let f = StateMorphism::identity(base(), o1);
        let g = StateMorphism::identity(base(), o2);
        assert!(matches!(compose(&g, &f), Err(Error::ObjectMismatch(_))));
    }

    #[test]
    fn tensor_objects() {
        let a = obj(&[("x", vec![var(1, 0)]), ("y", vec![])]);
        let b = obj(&[("u", vec![var(2, 0), var(3, 0)]), ("v", vec![]), ("w", vec![])]);
        let ab = a.tensor(&b);
        assert_eq!(ab.len(), 6);
        assert_eq!(ab.vars_of("x|u").unwrap(), &[var(1, 0), var(2, 0), var(3, 0)]);
        let unit = StateObject::unit();
        assert_eq!(a.tensor(&unit), *a);
        assert_eq!(unit.tensor(&a), *a);
        assert!(a.power(0).is_unit());
        assert_eq!(a.power(3).len(), 8);
    }

    #[test]
    fn copy_duplicates_variables() {
        let o = obj(&[("p", vec![var(1, 0)])]);
        let c = StateMorphism::copy(base(), o.clone());
        assert_eq!(c.transition_of("p").unwrap(), "p|p");
        assert_eq!(c.outputs(0), &[FreeTerm::Var(0), FreeTerm::Var(0)]);
        assert!(c.validate().is_empty());

        let bare = obj(&[("s", vec![]), ("t", vec![])]);
        let c = StateMorphism::copy(base(), bare);
        assert_eq!(c.transition_of("t").unwrap(), "t|t");
        assert!(c.outputs(1).is_empty());
    }

    #[test]
    fn swap_permutes_components_and_variables() {
        let a = obj(&[("x", vec![var(1, 0)])]);
        let b = obj(&[("u", vec![var(2, 0), var(3, 0)])]);
        let s = StateMorphism::swap(base(), a, b);
        assert_eq!(s.transition_of("x|u").unwrap(), "u|x");
        assert_eq!(s.outputs(0), &[FreeTerm::Var(1), FreeTerm::Var(2), FreeTerm::Var(0)]);
        assert!(s.validate().is_empty());
    }

    #[test]
    fn application() {
        let c = cat();
        let o = obj(&[("p", vec![var(1, 1)])]);
        let id = StateMorphism::identity(base(), o.clone());
        let store = VarStore::new("p", vec![Morphism::Tape(encode_word("a", &c).unwrap())]);
        assert_eq!(id.apply(&store).unwrap(), store);

        let app = StateMorphism::from_table(base(), o.clone(), o.clone(), 1, &[("p", "p", vec![term("var0 ; b")])]).unwrap();
        let out = app.apply(&store).unwrap();
        assert_eq!(out.values, vec![Morphism::Tape(encode_word("ab", &c).unwrap())]);

        let bare = obj(&[("s", vec![]), ("t", vec![])]);
        let mv = StateMorphism::from_table(base(), bare.clone(), bare, 1, &[("s", "t", vec![]), ("t", "s", vec![])]).unwrap();
        assert_eq!(mv.apply(&VarStore::new("s", vec![])).unwrap(), VarStore::new("t", vec![]));

        let bad = VarStore::new("p", vec![Morphism::Tape(TapeTerm::Id(2))]);
        assert!(matches!(app.apply(&bad), Err(Error::StoreMismatch(_))));
    }

    #[test]
    fn unfiltered_objects_accept_anything() {
        let o = Arc::new(StateObject::unfiltered(vec![("p".into(), vec![Signature::tape("sigma", 1, 1)])]).unwrap());
        let m = StateMorphism::from_table(base(), o.clone(), o, 0, &[("p", "p", vec![term("var0 ; var0 ; var0 ; g")])]);
        assert!(m.is_ok());
    }

    #[test]
    fn tensor_respects_application() {
        let c = cat();
        let a = obj(&[("x", vec![var(1, 0)]), ("y", vec![var(1, 0)])]);
        let f = StateMorphism::from_table(
            base(),
            a.clone(),
            a.clone(),
            1,
            &[("x", "y", vec![term("var0 ; a")]), ("y", "x", vec![term("b ; var0")])],
        )
        .unwrap();
        let g = StateMorphism::from_table(base(), a.clone(), a.clone(), 1, &[("x", "x", vec![term("var0")]), ("y", "x", vec![term("a")])]).unwrap();
        let fg = tensor(&f, &g).unwrap();
        assert_eq!(fg.degree(), 2);
        assert!(fg.validate().is_empty());
        let w = |s: &str| Morphism::Tape(encode_word(s, &c).unwrap());
        for (s1, s2) in [("x", "x"), ("x", "y"), ("y", "x"), ("y", "y")] {
            let st1 = VarStore::new(s1, vec![w("ab")]);
            let st2 = VarStore::new(s2, vec![w("ba")]);
            let together = fg.apply(&st1.pair(&st2)).unwrap();
            let apart = f.apply(&st1).unwrap().pair(&g.apply(&st2).unwrap());
            assert_eq!(together, apart);
        }
    }
}
