//! The JSON definition document.
//!
//! A document has four top-level lists: `tape_categories`, `transducers`,
//! `machines` and `families`. Names may refer to definitions anywhere in
//! the document; machines may appear inside transducer output terms.
//! Serialization is canonical: keys sorted, two-space indentation.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::analysis::{FamilySpec, Poly, StageRule};
use crate::degrees::Degree2;
use crate::error::{Error, Result};
use crate::freecat::{BaseCategory, FreeTerm, Morphism, Signature, VarDecl};
use crate::machine::{LegType, MachineBuilder, MachineObject, NodeKind, StringMachine, Value};
use crate::statecat::StateObject;
use crate::tape::{Generator, TapeCategory};
use crate::transducer::{ImageSpec, Transducer, TransducerSpec};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tape_categories: Vec<CategorySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transducers: Vec<TransducerDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub machines: Vec<MachineDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilyDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub name: String,
    pub generators: Vec<Generator>,
}

/// A signature: `"cat:m->n"` for tape categories, or
/// `{"machines": {"dom": [...], "cod": [...]}}` for string machines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigSpec {
    Tape(String),
    Machines { machines: MachineSigSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSigSpec {
    pub dom: Vec<LegSpec>,
    pub cod: Vec<LegSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum LegSpec {
    State(Vec<String>),
    Morphism(SigSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OutputCategorySpec {
    Tape(String),
    Machines(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarSpec {
    pub sig: SigSpec,
    pub degree: [u64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vars: Vec<VarSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageDef {
    pub degree: u64,
    /// Source state to target state.
    pub transition: BTreeMap<String, String>,
    /// Source state to output terms; missing states output nothing.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerDef {
    pub name: String,
    pub input_category: String,
    pub output_category: OutputCategorySpec,
    pub primary: [usize; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<SigSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<SigSpec>,
    pub states: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
    pub generators: BTreeMap<String, ImageDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: LegSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ValueSpec {
    /// A tape term in the constant's category.
    Term(String),
    State(String),
    /// A machine defined in the document.
    Machine(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeKindSpec {
    Transducer {
        transducer: String,
    },
    Copy {
        legs: Vec<LegSpec>,
    },
    Meta {
        dom: Vec<LegSpec>,
        cod: Vec<LegSpec>,
        level: u32,
    },
    Const {
        #[serde(rename = "type")]
        ty: LegSpec,
        value: ValueSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: NodeKindSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeSpec>,
    /// `"node.leg -> node.leg"`; `in` and `out` name the free legs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wires: Vec<String>,
    /// Output leg to accepting states.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub accepting: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reserved: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub meta_level: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Constant(u64),
    Coefficients(Vec<u64>),
}

impl PolySpec {
    fn poly(&self) -> Poly {
        match self {
            PolySpec::Constant(c) => Poly::constant(*c),
            PolySpec::Coefficients(cs) => Poly(cs.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<usize>>,
    pub transducer: String,
    pub a: PolySpec,
    pub b: PolySpec,
    pub c: PolySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDef {
    pub name: String,
    /// Transducer of `K_1`.
    pub base: String,
    pub stages: Vec<StageDef>,
}

/// A parsed and resolved document.
#[derive(Clone, Debug)]
pub struct Document {
    pub spec: DocumentSpec,
    pub categories: IndexMap<String, Arc<TapeCategory>>,
    pub transducers: IndexMap<String, Arc<Transducer>>,
    pub machines: IndexMap<String, Arc<StringMachine>>,
    pub families: IndexMap<String, FamilySpec>,
}

impl Document {
    pub fn transducer(&self, name: &str) -> Result<&Arc<Transducer>> {
        self.transducers.get(name).ok_or_else(|| Error::Resolution(name.to_string()))
    }

    pub fn machine(&self, name: &str) -> Result<&Arc<StringMachine>> {
        self.machines.get(name).ok_or_else(|| Error::Resolution(name.to_string()))
    }

    pub fn family(&self, name: &str) -> Result<&FamilySpec> {
        self.families.get(name).ok_or_else(|| Error::Resolution(name.to_string()))
    }

    pub fn category(&self, name: &str) -> Result<&Arc<TapeCategory>> {
        self.categories.get(name).ok_or_else(|| Error::Resolution(name.to_string()))
    }
}

/// Reads the raw document without resolving names.
pub fn parse_spec(text: &str) -> Result<DocumentSpec> {
    serde_json::from_str(text)
        .map_err(|e| Error::DocumentSyntax { line: e.line(), column: e.column(), message: e.to_string() })
}

/// Parses, resolves and validates a document; fails on the first problem.
pub fn parse_document(text: &str) -> Result<Document> {
    let spec = parse_spec(text)?;
    let (doc, mut errors) = resolve(spec);
    match errors.is_empty() {
        true => Ok(doc),
        false => Err(errors.remove(0)),
    }
}

/// Every problem in the document, in document order.
pub fn validate_document(text: &str) -> Vec<Error> {
    match parse_spec(text) {
        Ok(spec) => resolve(spec).1,
        Err(e) => vec![e],
    }
}

/// Canonical text of a document: sorted keys, two-space indentation and a
/// trailing newline.
pub fn serialize_document(doc: &Document) -> String {
    serialize_spec(&doc.spec)
}

pub fn serialize_spec(spec: &DocumentSpec) -> String {
    let value = serde_json::to_value(spec).expect("document specs serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    text
}

fn resolve(spec: DocumentSpec) -> (Document, Vec<Error>) {
    let r = Resolver {
        spec: &spec,
        categories: RefCell::default(),
        transducers: RefCell::default(),
        machines: RefCell::default(),
        active: RefCell::default(),
    };
    let mut errors = Vec::new();
    for c in &spec.tape_categories {
        if let Err(e) = r.category(&c.name) {
            errors.push(e);
        }
    }
    for t in &spec.transducers {
        if let Err(e) = r.transducer(&t.name) {
            errors.push(e);
        }
    }
    for m in &spec.machines {
        if let Err(e) = r.machine(&m.name) {
            errors.push(e);
        }
    }
    let mut families = IndexMap::new();
    for f in &spec.families {
        match r.family(f) {
            Ok(fam) => {
                families.insert(f.name.clone(), fam);
            }
            Err(e) => errors.push(e.at(format!("family `{}`", f.name))),
        }
    }
    let Resolver { categories, transducers, machines, .. } = r;
    let doc = Document {
        categories: resolved(categories, spec.tape_categories.iter().map(|c| &c.name)),
        transducers: resolved(transducers, spec.transducers.iter().map(|t| &t.name)),
        machines: resolved(machines, spec.machines.iter().map(|m| &m.name)),
        families,
        spec: spec.clone(),
    };
    (doc, errors)
}

/// Successfully resolved definitions, in document order.
fn resolved<'a, T>(memo: Memo<T>, order: impl Iterator<Item = &'a String>) -> IndexMap<String, Arc<T>> {
    let mut memo = memo.into_inner();
    order.filter_map(|n| memo.shift_remove(n).and_then(|v| v.ok()).map(|v| (n.clone(), v))).collect()
}

type Memo<T> = RefCell<IndexMap<String, std::result::Result<Arc<T>, String>>>;

struct Resolver<'a> {
    spec: &'a DocumentSpec,
    categories: Memo<TapeCategory>,
    transducers: Memo<Transducer>,
    machines: Memo<StringMachine>,
    /// Definitions being resolved, for cycle detection.
    active: RefCell<BTreeSet<String>>,
}

impl Resolver<'_> {
    /// Memoized resolution; a failed definition is reported once, where it
    /// is defined, and as a resolution error where it is used.
    fn memo<T>(
        &self,
        memo: &Memo<T>,
        kind: &str,
        name: &str,
        build: impl FnOnce() -> Result<T>,
    ) -> Result<Arc<T>> {
        if let Some(found) = memo.borrow().get(name) {
            return found.clone().map_err(Error::Resolution);
        }
        let key = format!("{kind} {name}");
        if !self.active.borrow_mut().insert(key.clone()) {
            return Err(Error::Resolution(format!("{name} (definition refers to itself)")));
        }
        let result = build().map(Arc::new);
        self.active.borrow_mut().remove(&key);
        memo.borrow_mut().insert(name.to_string(), result.as_ref().map(Arc::clone).map_err(|_| name.to_string()));
        result.map_err(|e| e.at(format!("{kind} `{name}`")))
    }

    fn category(&self, name: &str) -> Result<Arc<TapeCategory>> {
        self.memo(&self.categories, "tape category", name, || {
            let c = self.find(&self.spec.tape_categories, |c| &c.name, name)?;
            TapeCategory::new(&c.name, c.generators.clone())
        })
    }

    fn find<'s, T>(&self, items: &'s [T], key: impl Fn(&T) -> &String, name: &str) -> Result<&'s T> {
        let mut found = items.iter().filter(|i| key(i) == name);
        let first = found.next().ok_or_else(|| Error::Resolution(name.to_string()))?;
        if found.next().is_some() {
            return Err(Error::Resolution(format!("{name} (defined more than once)")));
        }
        Ok(first)
    }

    fn signature(&self, s: &SigSpec) -> Result<Signature> {
        match s {
            SigSpec::Tape(text) => {
                let bad = || Error::Resolution(format!("signature `{text}` (expected `category:m->n`)"));
                let (cat, widths) = text.split_once(':').ok_or_else(bad)?;
                let (m, n) = widths.split_once("->").ok_or_else(bad)?;
                let cat = self.category(cat.trim())?;
                let m = m.trim().parse().map_err(|_| bad())?;
                let n = n.trim().parse().map_err(|_| bad())?;
                Ok(Signature::tape(cat.name(), m, n))
            }
            SigSpec::Machines { machines } => {
                Ok(Signature::machines(self.object(&machines.dom)?, self.object(&machines.cod)?))
            }
        }
    }

    fn leg(&self, l: &LegSpec) -> Result<LegType> {
        Ok(match l {
            LegSpec::State(states) => LegType::State(states.clone()),
            LegSpec::Morphism(s) => LegType::Morphism(self.signature(s)?),
        })
    }

    fn object(&self, legs: &[LegSpec]) -> Result<MachineObject> {
        Ok(MachineObject(legs.iter().map(|l| self.leg(l)).collect::<Result<_>>()?))
    }

    fn lookup_machine(&self, name: &str) -> Option<Arc<StringMachine>> {
        self.machine(name).ok()
    }

    fn transducer(&self, name: &str) -> Result<Arc<Transducer>> {
        self.memo(&self.transducers, "transducer", name, || {
            let d = self.find(&self.spec.transducers, |t| &t.name, name)?;
            let input_cat = self.category(&d.input_category)?;
            let output_cat = match &d.output_category {
                OutputCategorySpec::Tape(c) => BaseCategory::Tape(self.category(c)?),
                OutputCategorySpec::Machines(k) => BaseCategory::Machines(*k),
            };
            let sigs = |list: &[SigSpec]| list.iter().map(|s| self.signature(s)).collect::<Result<Vec<_>>>();
            let states = d
                .states
                .iter()
                .map(|s| {
                    let vars = s
                        .vars
                        .iter()
                        .map(|v| Ok(VarDecl::new(self.signature(&v.sig)?, Degree2::new(v.degree[0], v.degree[1]))))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((s.name.clone(), vars))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut images = Vec::new();
            for (g, image) in &d.generators {
                if input_cat.generator(g).is_err() {
                    return Err(Error::Resolution(format!("generator `{g}` in category `{}`", input_cat.name())));
                }
                let mut spec = ImageSpec::new(image.degree);
                for (from, to) in &image.transition {
                    let terms = image
                        .outputs
                        .get(from)
                        .map(|ts| {
                            ts.iter()
                                .map(|t| output_cat.parse_free(t, &|n| self.lookup_machine(n)))
                                .collect::<Result<Vec<FreeTerm>>>()
                        })
                        .transpose()
                        .map_err(|e| e.at(format!("image of `{g}` at `{from}`")))?
                        .unwrap_or_default();
                    spec = spec.row(from, to, terms);
                }
                if let Some(extra) = image.outputs.keys().find(|s| !image.transition.contains_key(*s)) {
                    return Err(Error::UnknownState(extra.clone()).at(format!("image of `{g}`")));
                }
                images.push((g.clone(), spec));
            }
            Transducer::new(TransducerSpec {
                name: d.name.clone(),
                input_cat,
                output_cat,
                primary: (d.primary[0], d.primary[1]),
                aux: sigs(&d.aux)?,
                outputs: sigs(&d.outputs)?,
                state_image: StateObject::new(states)?,
                images,
                initial_state: d.initial_state.clone(),
            })
        })
    }

    fn machine(&self, name: &str) -> Result<Arc<StringMachine>> {
        self.memo(&self.machines, "machine", name, || {
            let d = self.find(&self.spec.machines, |m| &m.name, name)?;
            let mut b = MachineBuilder::new(&d.name).meta_level(d.meta_level);
            for i in &d.inputs {
                b = b.input(&i.name, self.leg(&i.ty)?);
            }
            for n in &d.nodes {
                let kind = match &n.kind {
                    NodeKindSpec::Transducer { transducer } => NodeKind::Transducer(self.transducer(transducer)?),
                    NodeKindSpec::Copy { legs } => NodeKind::Copy(self.object(legs)?),
                    NodeKindSpec::Meta { dom, cod, level } => {
                        NodeKind::Meta { dom: self.object(dom)?, cod: self.object(cod)?, level: *level }
                    }
                    NodeKindSpec::Const { ty, value } => {
                        let ty = self.leg(ty)?;
                        let value = match (value, &ty) {
                            (ValueSpec::State(s), _) => Value::State(s.clone()),
                            (ValueSpec::Machine(m), _) => Value::Morphism(Morphism::Machine(self.machine(m)?)),
                            (ValueSpec::Term(t), LegType::Morphism(sig)) => {
                                let (cat, _, _) = sig
                                    .tape_widths()
                                    .ok_or_else(|| Error::Unsupported(format!("term constant of type {sig}")))?;
                                let cat = self.category(cat)?;
                                let term = cat.parse_term(t)?;
                                let found = term.signature(&cat)?;
                                if Some(found) != sig.tape_widths().map(|(_, m, n)| (m, n)) {
                                    return Err(Error::IllTyped(format!("constant `{t}` is not of type {sig}"))
                                        .at(format!("node `{}`", n.name)));
                                }
                                Value::Morphism(Morphism::Tape(term))
                            }
                            (ValueSpec::Term(_), LegType::State(_)) => {
                                return Err(Error::Wiring(format!("constant `{}` is not a state", n.name)))
                            }
                        };
                        NodeKind::Const(value, ty)
                    }
                };
                b = b.node(&n.name, kind);
            }
            for w in &d.wires {
                let (from, to) =
                    w.split_once("->").ok_or_else(|| Error::Wiring(format!("wire `{w}` is not `node.leg -> node.leg`")))?;
                b = b.wire(from.trim(), to.trim());
            }
            for (out, states) in &d.accepting {
                let states: Vec<&str> = states.iter().map(String::as_str).collect();
                b = b.accept(out, &states);
            }
            for r in &d.reserved {
                b = b.reserve(r);
            }
            b.build()
        })
    }

    fn family(&self, f: &FamilyDef) -> Result<FamilySpec> {
        let rules = f
            .stages
            .iter()
            .map(|s| {
                Ok(StageRule {
                    at: s.at.clone(),
                    transducer: self.transducer(&s.transducer)?,
                    a: s.a.poly(),
                    b: s.b.poly(),
                    c: s.c.poly(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FamilySpec { name: f.name.clone(), base: self.transducer(&f.base)?, rules })
    }
}
