//! Static degree analysis and growth measurements.
//!
//! * [`output_degree`] computes the coefficients bounding an output's degree.
//! * [`check_duplication`] and [`check_output_bound`] test those bounds
//!   exhaustively on small inputs.
//! * [`ipd_bound`] propagates linear bounds through a machine.
//! * [`family_growth`] measures IPD along a sequence of growing machines.
//! * [`IncrementalSession`] tracks a transducer's state while its input is
//!   rebuilt by substitution.
//! * [`residual_probe`] counts residual classes of a machine's language.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::degrees::{Degree1, Degree2};
use crate::error::{Error, Result};
use crate::freecat::{BaseCategory, FreeTerm, Morphism};
use crate::machine::{ipd, LegType, MachineBuilder, NodeKind, Source, StringMachine, Value};
use crate::tape::{encode_letters, TapeCategory, TapeTerm};
use crate::transducer::Transducer;

/// `deg(γ) ≤ a·deg(α) + b·deg_m(β) + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutputDegreeTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl fmt::Display for OutputDegreeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl OutputDegreeTriple {
    /// The right-hand side of the bound.
    pub fn bound(&self, primary: Degree1, aux_max: Degree1) -> u128 {
        self.a as u128 * primary as u128 + self.b as u128 * aux_max as u128 + self.c as u128
    }
}

/// Smallest linear coefficient over the variables of the input states;
/// 1 when no input state has variables.
pub fn min_input_linear(t: &Transducer) -> Result<u64> {
    let input = t.input_states();
    let mut a_min = None;
    for (x, decl) in input.all_vars() {
        if decl.degree.linear == 0 {
            return Err(Error::ZeroLinearInputVariable(format!("{} at state `{}`", decl.signature, input.state(x))));
        }
        a_min = Some(a_min.map_or(decl.degree.linear, |m: u64| m.min(decl.degree.linear)));
    }
    Ok(a_min.unwrap_or(1))
}

/// Largest linear coefficient over all variables of all output states.
pub fn max_output_linear(t: &Transducer) -> u64 {
    t.output_states().all_vars().map(|(_, d)| d.degree.linear).max().unwrap_or(0)
}

/// Triple for output `j`: the largest linear and constant terms of the
/// `j`-th variable over the output states, and the largest linear term
/// divided by the smallest linear term among input variables.
pub fn output_degree(t: &Transducer, j: usize) -> Result<OutputDegreeTriple> {
    if j >= t.outputs().len() {
        return Err(Error::VarOutOfRange { index: j, len: t.outputs().len() });
    }
    let a_min = min_input_linear(t)?;
    let output = t.output_states();
    let (mut a, mut c) = (0, 0);
    for y in 0..output.len() {
        let d = output.vars(y)[j].degree;
        a = a.max(d.linear);
        c = c.max(d.constant);
    }
    Ok(OutputDegreeTriple { a, b: a / a_min, c })
}

/// Words over the endomorphism generators of `cat` whose total degree is
/// at most `max_degree`, shortest first.
pub fn words_up_to_degree(cat: &TapeCategory, max_degree: Degree1) -> Vec<Vec<String>> {
    let letters: Vec<(String, Degree1)> = cat.letters().map(|g| (g.name.clone(), g.degree)).collect();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::<String>::new(), 0)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, d) in &frontier {
            for (l, ld) in &letters {
                if d + ld <= max_degree {
                    let mut v = w.clone();
                    v.push(l.clone());
                    out.push(v.clone());
                    next.push((v, d + ld));
                }
            }
        }
        frontier = next;
    }
    out
}

fn require_word_primary(t: &Transducer) -> Result<()> {
    if t.primary() != (1, 1) {
        return Err(Error::Unsupported(format!(
            "exhaustive checks enumerate words, but `{}` has primary signature {:?}",
            t.name(),
            t.primary()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DuplicationReport {
    /// The largest linear coefficient over output-state variables.
    pub bound: u64,
    pub max_observed: usize,
    pub cases: usize,
    pub violations: Vec<String>,
}

/// Counts how often each auxiliary variable occurs in each output, over
/// every word up to `max_input_degree` and every input state.
pub fn check_duplication(t: &Transducer, max_input_degree: Degree1) -> Result<DuplicationReport> {
    require_word_primary(t)?;
    min_input_linear(t)?;
    let mut report = DuplicationReport { bound: max_output_linear(t), ..Default::default() };
    let input = t.input_states();
    for word in words_up_to_degree(t.input_cat(), max_input_degree) {
        let image = t.functor_image(&encode_letters(&word))?;
        for x in 0..input.len() {
            report.cases += 1;
            for (j, term) in image.outputs(x).iter().take(t.outputs().len()).enumerate() {
                for i in 0..input.vars(x).len() {
                    let k = term.var_occurrences(i);
                    report.max_observed = report.max_observed.max(k);
                    if k as u64 > report.bound {
                        report.violations.push(format!(
                            "word {:?} from `{}`: output {j} uses auxiliary input {i} {k} times",
                            word.concat(),
                            input.state(x)
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputBoundReport {
    pub triples: Vec<OutputDegreeTriple>,
    pub cases: usize,
    /// Cases where some output met its bound exactly.
    pub tight: usize,
    pub violations: Vec<String>,
}

/// A tape morphism `X → X` of degree `d`, built from a degree-1 letter.
pub fn sample_endomorphism(cat: &TapeCategory, d: Degree1) -> Result<TapeTerm> {
    let letter = cat
        .letters()
        .find(|g| g.degree == 1)
        .ok_or_else(|| Error::Unsupported(format!("`{}` has no letter of degree 1", cat.name())))?;
    Ok(encode_letters(&vec![letter.name.as_str(); d as usize]))
}

/// Checks `deg(γ_j) ≤ a·deg(α) + b·deg_m(β) + c` on every word up to
/// `max_input_degree`, every input state, and every assignment of the
/// sampled degrees to the auxiliary inputs.
pub fn check_output_bound(t: &Transducer, max_input_degree: Degree1, aux_samples: &[Degree1]) -> Result<OutputBoundReport> {
    require_word_primary(t)?;
    let BaseCategory::Tape(out_cat) = t.output_cat() else {
        return Err(Error::Unsupported("sampling auxiliary string machines".into()));
    };
    for sig in t.aux() {
        if sig.tape_widths().map(|(_, m, n)| (m, n)) != Some((1, 1)) {
            return Err(Error::Unsupported(format!("sampling auxiliary inputs of signature {sig}")));
        }
    }
    let triples = (0..t.outputs().len()).map(|j| output_degree(t, j)).collect::<Result<Vec<_>>>()?;
    let mut report = OutputBoundReport { triples: triples.clone(), ..Default::default() };
    let samples: Vec<(Degree1, Morphism)> = aux_samples
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|&d| Ok((d, Morphism::Tape(sample_endomorphism(out_cat, d)?))))
        .collect::<Result<_>>()?;
    let input = t.input_states();
    let words = words_up_to_degree(t.input_cat(), max_input_degree);
    let slots = t.aux().len();
    let mut choice = vec![0usize; slots];
    loop {
        let aux: Vec<Morphism> = choice.iter().map(|&c| samples[c].1.clone()).collect();
        for word in &words {
            let primary = encode_letters(word);
            for x in 0..input.len() {
                let k = input.vars(x).len();
                let aux_max = choice[..k].iter().map(|&c| samples[c].0).max().unwrap_or(0);
                let result = t.evaluate(input.state(x), &primary, &aux)?;
                report.cases += 1;
                let mut tight = false;
                for (j, out) in result.outputs.iter().enumerate() {
                    let deg = t.output_cat().degree_of(out)? as u128;
                    let bound = triples[j].bound(result.primary_degree_consumed, aux_max);
                    tight |= deg == bound;
                    if deg > bound {
                        report.violations.push(format!(
                            "word {:?} from `{}`, aux degree {aux_max}: output {j} has degree {deg} > {bound}",
                            word.concat(),
                            input.state(x)
                        ));
                    }
                }
                report.tight += usize::from(tight);
            }
        }
        // Next assignment of samples to slots.
        let Some(i) = (0..slots).find(|&i| choice[i] + 1 < samples.len()) else { break };
        choice[i] += 1;
        choice[..i].iter_mut().for_each(|c| *c = 0);
    }
    Ok(report)
}

/// Constants `(A, C)` with `IPD ≤ A·n + C`, where `n` is the total degree
/// of the machine's morphism inputs. Computed by propagating linear bounds
/// through the machine with the output-degree triples.
pub fn ipd_bound(m: &StringMachine) -> Result<(u64, u64)> {
    if let Some(node) = m.has_meta_node() {
        return Err(Error::HasMetaNode(node.to_string()));
    }
    let mut bounds: HashMap<Source, Degree2> = HashMap::new();
    let bound_of = |bounds: &HashMap<Source, Degree2>, s: Source| -> Degree2 {
        match s {
            Source::Input(_) => Degree2::new(1, 0),
            s => bounds.get(&s).copied().unwrap_or(Degree2::ZERO),
        }
    };
    let mut total = Degree2::ZERO;
    for &n in m.order() {
        let node = &m.nodes()[n];
        let inputs: Vec<Degree2> = m.wires()[n].iter().map(|s| s.map_or(Degree2::ZERO, |s| bound_of(&bounds, s))).collect();
        match &node.kind {
            NodeKind::Transducer(t) => {
                if !matches!(t.output_cat(), BaseCategory::Tape(_)) {
                    return Err(Error::Unsupported(format!("transducer `{}` outputs string machines", t.name())));
                }
                let primary = inputs[1];
                total = total.checked_add(primary)?;
                let aux = inputs[2..].iter().fold(Degree2::ZERO, |acc, d| {
                    Degree2::new(acc.linear.max(d.linear), acc.constant.max(d.constant))
                });
                for j in 0..t.outputs().len() {
                    let tr = output_degree(t, j)?;
                    let bound = primary
                        .checked_scale(tr.a)?
                        .checked_add(aux.checked_scale(tr.b)?)?
                        .checked_add(Degree2::constant(tr.c))?;
                    bounds.insert(Source::Node(n, j + 1), bound);
                }
            }
            NodeKind::Copy(obj) => {
                let k = obj.legs().len();
                for (i, d) in inputs.iter().enumerate() {
                    bounds.insert(Source::Node(n, i), *d);
                    bounds.insert(Source::Node(n, i + k), *d);
                }
            }
            NodeKind::Const(Value::Morphism(mor), _) => {
                let deg = match mor {
                    Morphism::Tape(t) => {
                        let cat = tape_category_of(m, &node.kind)?;
                        t.degree(&cat)?
                    }
                    Morphism::Machine(inner) => inner.transducer_count() as Degree1,
                };
                bounds.insert(Source::Node(n, 0), Degree2::constant(deg));
            }
            NodeKind::Const(Value::State(_), _) => {}
            NodeKind::Meta { .. } => unreachable!("checked above"),
        }
    }
    Ok((total.linear, total.constant))
}

/// The tape category a constant's signature lives in, looked up among the
/// machine's transducers.
fn tape_category_of(m: &StringMachine, kind: &NodeKind) -> Result<Arc<TapeCategory>> {
    let NodeKind::Const(_, LegType::Morphism(sig)) = kind else {
        return Err(Error::Unsupported("non-morphism constant".into()));
    };
    let (name, _, _) = sig.tape_widths().ok_or_else(|| Error::Unsupported(format!("constant of signature {sig}")))?;
    find_tape_category(m, name)
}

/// Looks up a tape category by name among the transducers of a machine.
pub fn find_tape_category(m: &StringMachine, name: &str) -> Result<Arc<TapeCategory>> {
    for node in m.nodes() {
        if let NodeKind::Transducer(t) = &node.kind {
            if t.input_cat().name() == name {
                return Ok(t.input_cat().clone());
            }
            if let BaseCategory::Tape(c) = t.output_cat() {
                if c.name() == name {
                    return Ok(c.clone());
                }
            }
        }
    }
    Err(Error::Resolution(name.to_string()))
}

/// A coefficient given as a polynomial in `N`, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly(pub Vec<u64>);

impl Poly {
    pub fn constant(c: u64) -> Self {
        Poly(vec![c])
    }

    pub fn at(&self, n: u64) -> u64 {
        self.0.iter().rev().fold(0u64, |acc, &c| acc.saturating_mul(n).saturating_add(c))
    }
}

/// Declared coefficients of one family stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRule {
    /// Values of `N` this rule applies to; `None` applies to all others.
    pub at: Option<Vec<usize>>,
    pub transducer: Arc<Transducer>,
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
}

/// A sequence of machines `K_1, K_2, …`: `K_1` is a single base
/// transducer fed the input word, and `K_N` feeds output 0 of the last
/// stage of `K_{N-1}` into the primary input of a new stage. Auxiliary
/// inputs of every stage are fed identity constants.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    pub base: Arc<Transducer>,
    pub rules: Vec<StageRule>,
}

impl FamilySpec {
    fn rule(&self, n: usize) -> Result<&StageRule> {
        self.rules
            .iter()
            .find(|r| r.at.as_ref().is_some_and(|at| at.contains(&n)))
            .or_else(|| self.rules.iter().find(|r| r.at.is_none()))
            .ok_or_else(|| Error::Resolution(format!("family `{}` has no stage rule for N={n}", self.name)))
    }

    fn stage(&self, n: usize) -> Result<Arc<Transducer>> {
        if n == 1 {
            Ok(self.base.clone())
        } else {
            Ok(self.rule(n)?.transducer.clone())
        }
    }

    /// Materializes `K_n`.
    pub fn machine(&self, n: usize) -> Result<StringMachine> {
        let base_cat = self.base.input_cat();
        let mut b = MachineBuilder::new(&format!("{}_{n}", self.name))
            .input("w", LegType::Morphism(crate::freecat::Signature::tape(base_cat.name(), 1, 1)));
        let mut feed = "in.w".to_string();
        for i in 1..=n {
            let t = self.stage(i)?;
            if !matches!(t.output_cat(), BaseCategory::Tape(_)) {
                return Err(Error::Unsupported(format!("stage `{}` outputs string machines", t.name())));
            }
            let node = format!("stage{i:03}");
            let id = Value::Morphism(Morphism::Tape(TapeTerm::Id(1)));
            b = b.node(&node, NodeKind::Transducer(t.clone())).wire(&feed, &format!("{node}.primary"));
            for (k, sig) in t.aux().iter().enumerate() {
                if sig.tape_widths().map(|(_, p, q)| (p, q)) != Some((1, 1)) {
                    return Err(Error::Unsupported(format!("auxiliary input of signature {sig} in a family stage")));
                }
                let unit = format!("{node}_unit{k}");
                b = b
                    .node(&unit, NodeKind::Const(id.clone(), LegType::Morphism(sig.clone())))
                    .wire(&format!("{unit}.out0"), &format!("{node}.aux{k}"));
            }
            if t.outputs().is_empty() {
                return Err(Error::Unsupported(format!("stage `{}` has no output to feed forward", t.name())));
            }
            feed = format!("{node}.out0");
        }
        b.wire(&feed, "out.w").build()
    }
}

/// Triple of a family stage once its auxiliary inputs are fed identity
/// constants of degree 0: `(a, 0, c)`.
pub fn wired_triple(t: &Transducer) -> Result<OutputDegreeTriple> {
    let tr = output_degree(t, 0)?;
    Ok(OutputDegreeTriple { a: tr.a, b: 0, c: tr.c })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub ipd: Degree1,
    /// `IPD_n / IPD_{n/2}` for even `n`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Stages `N ≥ 2` whose declared `a_N + b_N` exceeds 1.
    pub expansions: Vec<usize>,
    /// Least-squares slope of `log IPD` against `log N`.
    pub fitted_exponent: f64,
}

/// Evaluates `K_1 … K_{n_max}` on `input`, recording IPD, and checks that
/// every declared triple dominates the computed one.
pub fn family_growth(f: &FamilySpec, n_max: usize, input: &TapeTerm) -> Result<GrowthReport> {
    let mut expansions = Vec::new();
    for n in 2..=n_max {
        let rule = f.rule(n)?;
        let computed = wired_triple(&rule.transducer)?;
        let (a, b, c) = (rule.a.at(n as u64), rule.b.at(n as u64), rule.c.at(n as u64));
        if a < computed.a || b < computed.b || c < computed.c {
            return Err(Error::DeclaredParametersTooSmall {
                n,
                declared: format!("({a},{b},{c})"),
                computed: computed.to_string(),
            });
        }
        if a.saturating_add(b) > 1 {
            expansions.push(n);
        }
    }
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let k = f.machine(n)?;
        let run = k.evaluate(&[Value::Morphism(Morphism::Tape(input.clone()))])?;
        let value = ipd(&run.trace);
        let ratio = (n % 2 == 0)
            .then(|| rows[n / 2 - 1].ipd)
            .filter(|&half| half > 0)
            .map(|half| value as f64 / half as f64);
        rows.push(GrowthRow { n, ipd: value, ratio });
    }
    let points: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.ipd > 0).map(|r| ((r.n as f64).ln(), (r.ipd as f64).ln())).collect();
    Ok(GrowthReport { rows, expansions, fitted_exponent: slope(&points) })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// One way of rebuilding the input: `g ↦ op[var0 := g]`.
#[derive(Clone, Debug, PartialEq)]
pub enum IncOp {
    /// A term without `var0`.
    Replace(TapeTerm),
    /// `var0 ; e`.
    PostCompose(TapeTerm),
    /// `p ; var0 ; e`.
    PrePostCompose(TapeTerm, TapeTerm),
    /// `split ; (fills with var0 at position) ; merge`.
    Branch { split: TapeTerm, position: usize, fills: Vec<TapeTerm>, merge: TapeTerm },
    /// Any term in which `var0` occurs at most once.
    Term(FreeTerm),
}

impl IncOp {
    /// The op as a term over the tape category with the hole `var0`.
    pub fn term(&self) -> FreeTerm {
        let tape = |t: &TapeTerm| FreeTerm::tape(t.clone());
        match self {
            IncOp::Replace(t) => tape(t),
            IncOp::PostCompose(e) => FreeTerm::seq(FreeTerm::Var(0), tape(e)),
            IncOp::PrePostCompose(p, e) => FreeTerm::seq(FreeTerm::seq(tape(p), FreeTerm::Var(0)), tape(e)),
            IncOp::Branch { split, position, fills, merge } => {
                let mut branches: Vec<FreeTerm> = fills.iter().map(tape).collect();
                branches.insert((*position).min(branches.len()), FreeTerm::Var(0));
                let middle = branches.into_iter().reduce(FreeTerm::par).expect("at least the hole");
                FreeTerm::seq(FreeTerm::seq(tape(split), middle), tape(merge))
            }
            IncOp::Term(t) => t.clone(),
        }
    }
}

/// How to update the tracked table for one op. Subterms without the hole
/// are reduced to fixed transition tables on `F(X^k)`.
#[derive(Clone, Debug, PartialEq)]
enum Plan {
    Hole,
    Fixed(Vec<usize>),
    Seq(Box<Plan>, Box<Plan>),
    /// Product; the sizes are `|F(X^k)|` of the right factor's domain and
    /// codomain.
    Par(Box<Plan>, Box<Plan>, usize, usize),
}

impl Plan {
    fn entries(&self) -> usize {
        match self {
            Plan::Hole => 0,
            Plan::Fixed(t) => t.len(),
            Plan::Seq(a, b) | Plan::Par(a, b, ..) => a.entries() + b.entries(),
        }
    }

    fn run(&self, tracked: &[usize]) -> Vec<usize> {
        match self {
            Plan::Hole => tracked.to_vec(),
            Plan::Fixed(t) => t.clone(),
            Plan::Seq(a, b) => {
                let (a, b) = (a.run(tracked), b.run(tracked));
                a.iter().map(|&x| b[x]).collect()
            }
            Plan::Par(a, b, bd, bc) => {
                let (a, b) = (a.run(tracked), b.run(tracked));
                let mut out = vec![0; a.len() * bd];
                for (ia, &oa) in a.iter().enumerate() {
                    for (ib, &ob) in b.iter().enumerate() {
                        out[ia * bd + ib] = oa * bc + ob;
                    }
                }
                out
            }
        }
    }
}

/// Constant-memory tracking of a transducer's output state while its
/// primary input is rebuilt from a fixed finite set of ops. `tracked[x]`
/// is the state reached from `x` on the current input.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementalSession {
    transducer: Arc<Transducer>,
    start: usize,
    plans: Vec<Plan>,
    tracked: Vec<usize>,
    steps: usize,
}

fn as_tape(t: &FreeTerm) -> Result<TapeTerm> {
    crate::deep(|| match t {
        FreeTerm::Base(Morphism::Tape(t)) => Ok(t.clone()),
        FreeTerm::Seq(a, b) => Ok(TapeTerm::seq(as_tape(a)?, as_tape(b)?)),
        FreeTerm::Par(a, b) => Ok(TapeTerm::par(as_tape(a)?, as_tape(b)?)),
        FreeTerm::Var(i) => Err(Error::VarOutOfRange { index: *i, len: 0 }),
        FreeTerm::Base(m) => Err(Error::Unsupported(format!("`{m}` in an input term"))),
    })
}

/// Widths `(m, n)` of a term whose hole has signature `X → X`.
fn widths(t: &FreeTerm, cat: &TapeCategory) -> Result<(usize, usize)> {
    match t {
        FreeTerm::Var(0) => Ok((1, 1)),
        FreeTerm::Seq(a, b) => {
            let ((m, k), (k2, n)) = (widths(a, cat)?, widths(b, cat)?);
            if k != k2 {
                return Err(Error::IllTyped(format!("`{t}` composes width {k} with width {k2}")));
            }
            Ok((m, n))
        }
        FreeTerm::Par(a, b) => {
            let ((m1, n1), (m2, n2)) = (widths(a, cat)?, widths(b, cat)?);
            Ok((m1 + m2, n1 + n2))
        }
        other => as_tape(other)?.signature(cat),
    }
}

impl IncrementalSession {
    /// Starts tracking from `id_X` at state `start`. The transducer must
    /// read `X → X` and take no auxiliary inputs.
    pub fn new(t: Arc<Transducer>, start: &str, ops: &[IncOp]) -> Result<Self> {
        if t.primary() != (1, 1) || !t.aux().is_empty() {
            return Err(Error::Unsupported(format!(
                "incremental tracking needs a transducer X -> X without auxiliary inputs; `{}` is not one",
                t.name()
            )));
        }
        let space = t.input_states();
        let start = space.state_index(start)?;
        let plans = ops.iter().map(|op| Self::plan(&t, &op.term())).collect::<Result<Vec<_>>>()?;
        Ok(IncrementalSession { tracked: (0..space.len()).collect(), transducer: t, start, plans, steps: 0 })
    }

    fn plan(t: &Transducer, term: &FreeTerm) -> Result<Plan> {
        let k = term.var_occurrences(0);
        if k > 1 {
            return Err(Error::MultipleGeneratorOccurrences(k));
        }
        let cat = t.input_cat();
        let (m, n) = widths(term, cat)?;
        if (m, n) != (1, 1) {
            return Err(Error::IllTyped(format!("op `{term}` has widths ({m}, {n}), not (1, 1)")));
        }
        Self::compile(t, term)
    }

    fn compile(t: &Transducer, term: &FreeTerm) -> Result<Plan> {
        if term.var_occurrences(0) == 0 {
            return Ok(Plan::Fixed(t.functor_image(&as_tape(term)?)?.transition().to_vec()));
        }
        Ok(match term {
            FreeTerm::Var(_) => Plan::Hole,
            FreeTerm::Seq(a, b) => Plan::Seq(Box::new(Self::compile(t, a)?), Box::new(Self::compile(t, b)?)),
            FreeTerm::Par(a, b) => {
                let (bd, bc) = widths(b, t.input_cat())?;
                let s = t.state_image().len();
                Plan::Par(
                    Box::new(Self::compile(t, a)?),
                    Box::new(Self::compile(t, b)?),
                    s.pow(bd as u32),
                    s.pow(bc as u32),
                )
            }
            FreeTerm::Base(_) => unreachable!("a base leaf has no hole"),
        })
    }

    /// Applies op number `op` of the set given at construction.
    pub fn apply(&mut self, op: usize) -> Result<()> {
        let plan = self.plans.get(op).ok_or_else(|| Error::Resolution(format!("op {op}")))?;
        self.tracked = plan.run(&self.tracked);
        self.steps += 1;
        Ok(())
    }

    /// Current state reached from the start state.
    pub fn state(&self) -> &str {
        let space = self.transducer.state_image();
        space.state(self.tracked[self.start])
    }

    /// Number of stored table entries: the tracked table plus the fixed
    /// tables of every op.
    pub fn footprint(&self) -> usize {
        self.tracked.len() + self.plans.iter().map(Plan::entries).sum::<usize>()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

pub fn inc_init(t: Arc<Transducer>, start: &str, ops: &[IncOp]) -> Result<IncrementalSession> {
    IncrementalSession::new(t, start, ops)
}

pub fn inc_apply(session: &mut IncrementalSession, op: usize) -> Result<()> {
    session.apply(op)
}

pub fn inc_state(session: &IncrementalSession) -> &str {
    session.state()
}

pub fn inc_footprint(session: &IncrementalSession) -> usize {
    session.footprint()
}

/// Number of distinct residual classes among prefixes of length at most
/// `max_len`, told apart by suffixes of length at most `max_len`.
pub fn residual_probe(m: &StringMachine, max_len: usize) -> Result<usize> {
    if let Some(node) = m.has_meta_node() {
        return Err(Error::HasMetaNode(node.to_string()));
    }
    let [(_, LegType::Morphism(sig))] = m.inputs() else {
        return Err(Error::Unsupported("residual probing needs a single word input".into()));
    };
    let (name, 1, 1) = sig.tape_widths().ok_or_else(|| Error::Unsupported(format!("input {sig}")))? else {
        return Err(Error::Unsupported(format!("input {sig}")));
    };
    let cat = find_tape_category(m, name)?;
    let letters: Vec<String> = cat.letters().map(|g| g.name.clone()).collect();
    let words = words_up_to_length(&letters, max_len);
    let mut memo: HashMap<Vec<String>, bool> = HashMap::new();
    let mut accepts = |w: Vec<String>| -> Result<bool> {
        if let Some(&a) = memo.get(&w) {
            return Ok(a);
        }
        let run = m.evaluate(&[Value::Morphism(Morphism::Tape(encode_letters(&w)))])?;
        let a = run.accepted == Some(true);
        memo.insert(w, a);
        Ok(a)
    };
    let mut classes = BTreeSet::new();
    for p in &words {
        let signature = words
            .iter()
            .map(|s| accepts([p.as_slice(), s.as_slice()].concat()))
            .collect::<Result<Vec<bool>>>()?;
        classes.insert(signature);
    }
    Ok(classes.len())
}

/// Whether the residual count at `max_len` equals the count at
/// `max_len - 2`.
pub fn residual_stabilized(m: &StringMachine, max_len: usize) -> Result<bool> {
    Ok(max_len >= 2 && residual_probe(m, max_len)? == residual_probe(m, max_len - 2)?)
}

/// All words of length at most `n`, shortest first.
pub fn words_up_to_length(letters: &[String], n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..n {
        let end = out.len();
        for i in start..end {
            for l in letters {
                let mut w = out[i].clone();
                w.push(l.clone());
                out.push(w);
            }
        }
        start = end;
    }
    out
}
