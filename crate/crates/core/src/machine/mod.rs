//! String machines: acyclic wirings of transducers, copy nodes and
//! meta-vertices.
//!
//! Every node has named input and output legs. A wire runs from a source
//! (a free input of the machine, or an output leg of a node) to one input
//! leg. A source feeds at most one leg; fan-out goes through copy nodes.
//! Unused sources are discarded.

mod builtins;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::degrees::Degree1;
use crate::error::{Error, Result};
use crate::freecat::{Morphism, Signature};
use crate::transducer::Transducer;

pub use builtins::{dfa_machine, dfa_transducer, identity_machine, intersection_chain, palindrome_machine, Dfa};

/// Type of one leg.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LegType {
    /// A state of the given finite set.
    State(Vec<String>),
    Morphism(Signature),
}

impl fmt::Display for LegType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LegType::State(states) => write!(f, "{{{}}}", states.join(",")),
            LegType::Morphism(sig) => write!(f, "({sig})"),
        }
    }
}

/// An object of the category of string machines: an ordered list of legs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MachineObject(pub Vec<LegType>);

impl MachineObject {
    pub fn new(legs: Vec<LegType>) -> Self {
        MachineObject(legs)
    }

    pub fn legs(&self) -> &[LegType] {
        &self.0
    }

    pub fn concat(&self, other: &MachineObject) -> MachineObject {
        MachineObject(self.0.iter().chain(&other.0).cloned().collect())
    }
}

impl fmt::Display for MachineObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let legs: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", legs.join(", "))
    }
}

/// A runtime value on a leg.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    State(String),
    Morphism(Morphism),
}

impl Value {
    pub fn as_morphism(&self) -> Option<&Morphism> {
        match self {
            Value::Morphism(m) => Some(m),
            Value::State(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::State(s) => f.write_str(s),
            Value::Morphism(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// Inputs `state`, `primary`, `aux0..`; outputs `state`, `out0..`.
    Transducer(Arc<Transducer>),
    /// Inputs `in0..in(k-1)`; outputs `out0..out(2k-1)`, two copies in order.
    Copy(MachineObject),
    /// Inputs `machine`, `in0..`; outputs `out0..`. Runs machines of meta
    /// level strictly below `level`.
    Meta { dom: MachineObject, cod: MachineObject, level: u32 },
    /// A constant on output `out0`.
    Const(Value, LegType),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn new(name: &str, kind: NodeKind) -> Self {
        Node { name: name.to_string(), kind }
    }

    pub fn input_legs(&self) -> Vec<(String, LegType)> {
        match &self.kind {
            NodeKind::Transducer(t) => {
                let mut legs = vec![
                    ("state".to_string(), LegType::State(t.input_states().states().to_vec())),
                    ("primary".to_string(), LegType::Morphism(t.primary_signature())),
                ];
                legs.extend(t.aux().iter().enumerate().map(|(i, s)| (format!("aux{i}"), LegType::Morphism(s.clone()))));
                legs
            }
            NodeKind::Copy(obj) => numbered("in", obj.legs()),
            NodeKind::Meta { dom, cod, .. } => {
                let mut legs =
                    vec![("machine".to_string(), LegType::Morphism(Signature::machines(dom.clone(), cod.clone())))];
                legs.extend(numbered("in", dom.legs()));
                legs
            }
            NodeKind::Const(..) => Vec::new(),
        }
    }

    pub fn output_legs(&self) -> Vec<(String, LegType)> {
        match &self.kind {
            NodeKind::Transducer(t) => {
                let mut legs = vec![("state".to_string(), LegType::State(t.output_states().states().to_vec()))];
                legs.extend(numbered("out", t.outputs().iter().map(|s| LegType::Morphism(s.clone())).collect::<Vec<_>>().as_slice()));
                legs
            }
            NodeKind::Copy(obj) => numbered("out", &[obj.legs(), obj.legs()].concat()),
            NodeKind::Meta { cod, .. } => numbered("out", cod.legs()),
            NodeKind::Const(_, ty) => vec![("out0".to_string(), ty.clone())],
        }
    }

    fn input_index(&self, leg: &str) -> Option<usize> {
        self.input_legs().iter().position(|(n, _)| n == leg)
    }

    fn output_index(&self, leg: &str) -> Option<usize> {
        self.output_legs().iter().position(|(n, _)| n == leg)
    }
}

fn numbered(prefix: &str, legs: &[LegType]) -> Vec<(String, LegType)> {
    legs.iter().enumerate().map(|(i, l)| (format!("{prefix}{i}"), l.clone())).collect()
}

/// Where a value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Input(usize),
    /// `(node, output leg)`.
    Node(usize, usize),
}

/// An output leg that must land in a set of states for the machine to
/// accept.
#[derive(Clone, Debug, PartialEq)]
pub struct Accepting {
    pub output: usize,
    pub states: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StringMachine {
    name: String,
    inputs: Vec<(String, LegType)>,
    nodes: Vec<Node>,
    /// `wires[n][leg]` feeds input leg `leg` of node `n`.
    wires: Vec<Vec<Option<Source>>>,
    outputs: Vec<(String, Source)>,
    accepting: Vec<Accepting>,
    reserved: Vec<String>,
    meta_level: u32,
    order: Vec<usize>,
}

/// Parts of a machine before validation.
#[derive(Clone, Debug, Default)]
pub struct MachineParts {
    pub name: String,
    pub inputs: Vec<(String, LegType)>,
    pub nodes: Vec<Node>,
    pub wires: Vec<Vec<Option<Source>>>,
    pub outputs: Vec<(String, Source)>,
    pub accepting: Vec<Accepting>,
    pub reserved: Vec<String>,
    pub meta_level: u32,
}

/// Builds a machine from named legs. Endpoints are written `node.leg`; the
/// pseudo-node `in` names free inputs and `out` names free outputs.
#[derive(Clone, Debug, Default)]
pub struct MachineBuilder {
    name: String,
    inputs: Vec<(String, LegType)>,
    nodes: Vec<Node>,
    wires: Vec<(String, String)>,
    accepting: Vec<(String, Vec<String>)>,
    reserved: Vec<String>,
    meta_level: u32,
}

impl MachineBuilder {
    pub fn new(name: &str) -> Self {
        MachineBuilder { name: name.to_string(), ..Default::default() }
    }

    pub fn input(mut self, name: &str, ty: LegType) -> Self {
        self.inputs.push((name.to_string(), ty));
        self
    }

    pub fn node(mut self, name: &str, kind: NodeKind) -> Self {
        self.nodes.push(Node::new(name, kind));
        self
    }

    pub fn wire(mut self, from: &str, to: &str) -> Self {
        self.wires.push((from.to_string(), to.to_string()));
        self
    }

    pub fn accept(mut self, output: &str, states: &[&str]) -> Self {
        self.accepting.push((output.to_string(), states.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn reserve(mut self, generator: &str) -> Self {
        self.reserved.push(generator.to_string());
        self
    }

    pub fn meta_level(mut self, level: u32) -> Self {
        self.meta_level = level;
        self
    }

    pub fn build(self) -> Result<StringMachine> {
        let MachineBuilder { name, inputs, nodes, wires, accepting, reserved, meta_level } = self;
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        for n in &nodes {
            if n.name == "in" || n.name == "out" || n.name.is_empty() || n.name.contains(['.', ' ']) {
                return Err(Error::Wiring(format!("`{}` is not a usable node name", n.name)));
            }
        }
        let split = |end: &str| -> Result<(String, String)> {
            end.split_once('.')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Wiring(format!("endpoint `{end}` is not of the form node.leg")))
        };
        let mut table: Vec<Vec<Option<Source>>> = nodes.iter().map(|n| vec![None; n.input_legs().len()]).collect();
        let mut outputs = Vec::new();
        for (from, to) in &wires {
            let (fnode, fleg) = split(from)?;
            let source = if fnode == "in" {
                Source::Input(
                    inputs
                        .iter()
                        .position(|(n, _)| *n == fleg)
                        .ok_or_else(|| Error::Wiring(format!("no free input `{fleg}`")))?,
                )
            } else {
                let n = *index.get(fnode.as_str()).ok_or_else(|| Error::Wiring(format!("no node `{fnode}`")))?;
                let leg = nodes[n]
                    .output_index(&fleg)
                    .ok_or_else(|| Error::Wiring(format!("node `{fnode}` has no output leg `{fleg}`")))?;
                Source::Node(n, leg)
            };
            let (tnode, tleg) = split(to)?;
            if tnode == "out" {
                outputs.push((tleg, source));
                continue;
            }
            let n = *index.get(tnode.as_str()).ok_or_else(|| Error::Wiring(format!("no node `{tnode}`")))?;
            let leg = nodes[n]
                .input_index(&tleg)
                .ok_or_else(|| Error::Wiring(format!("node `{tnode}` has no input leg `{tleg}`")))?;
            if table[n][leg].replace(source).is_some() {
                return Err(Error::Wiring(format!("`{to}` has more than one incoming wire")));
            }
        }
        let accepting = accepting
            .into_iter()
            .map(|(out, states)| {
                let output = outputs
                    .iter()
                    .position(|(n, _)| *n == out)
                    .ok_or_else(|| Error::Wiring(format!("accepting condition on unknown output `{out}`")))?;
                Ok(Accepting { output, states: states.into_iter().collect() })
            })
            .collect::<Result<Vec<_>>>()?;
        StringMachine::assemble(MachineParts { name, inputs, nodes, wires: table, outputs, accepting, reserved, meta_level })
    }
}

/// Execution record of one node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTrace {
    pub node: String,
    pub kind: &'static str,
    /// Degree of the primary input, for transducer nodes.
    pub primary_degree: Option<Degree1>,
    /// Start and end state, for transducer nodes.
    pub states: Option<(String, String)>,
    /// Degrees of the morphism outputs.
    pub output_degrees: Vec<Degree1>,
    /// Trace of the machine run by a meta-vertex.
    pub inner: Option<Box<EvalTrace>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalTrace {
    pub nodes: Vec<NodeTrace>,
}

/// Total primary input degree over every transducer run, including those
/// inside meta-vertices.
pub fn ipd(trace: &EvalTrace) -> Degree1 {
    trace
        .nodes
        .iter()
        .map(|n| n.primary_degree.unwrap_or(0) + n.inner.as_ref().map_or(0, |t| ipd(t)))
        .sum()
}

/// Outputs of one machine run.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub outputs: Vec<Value>,
    pub trace: EvalTrace,
    /// `None` when the machine declares no accepting condition.
    pub accepted: Option<bool>,
}

impl StringMachine {
    /// Validates parts and computes the evaluation order.
    pub fn assemble(parts: MachineParts) -> Result<Self> {
        let MachineParts { name, inputs, nodes, wires, outputs, accepting, reserved, meta_level } = parts;
        let mut names = BTreeSet::new();
        for n in &nodes {
            if !names.insert(n.name.as_str()) {
                return Err(Error::Wiring(format!("duplicate node `{}`", n.name)));
            }
        }
        unique(inputs.iter().map(|(n, _)| n.as_str()), "free input")?;
        unique(outputs.iter().map(|(n, _)| n.as_str()), "free output")?;
        if wires.len() != nodes.len() {
            return Err(Error::Wiring("wire table does not match the node list".into()));
        }

        let source_type = |s: Source| -> Result<LegType> {
            match s {
                Source::Input(i) => {
                    inputs.get(i).map(|(_, t)| t.clone()).ok_or_else(|| Error::Wiring(format!("no free input {i}")))
                }
                Source::Node(n, leg) => nodes
                    .get(n)
                    .and_then(|node| node.output_legs().get(leg).map(|(_, t)| t.clone()))
                    .ok_or_else(|| Error::Wiring(format!("no output leg {leg} on node {n}"))),
            }
        };
        let describe = |s: Source| match s {
            Source::Input(i) => format!("in.{}", inputs[i].0),
            Source::Node(n, leg) => format!("{}.{}", nodes[n].name, nodes[n].output_legs()[leg].0),
        };
        let mut used = BTreeSet::new();
        for (n, node) in nodes.iter().enumerate() {
            let legs = node.input_legs();
            if wires[n].len() != legs.len() {
                return Err(Error::Wiring(format!("node `{}` has {} input legs", node.name, legs.len())));
            }
            for ((leg, ty), source) in legs.iter().zip(&wires[n]) {
                let Some(source) = *source else {
                    let optional = matches!(&node.kind, NodeKind::Transducer(t) if leg == "state" && t.initial_state().is_some());
                    if optional {
                        continue;
                    }
                    return Err(Error::Wiring(format!("`{}.{leg}` is not connected", node.name)));
                };
                let found = source_type(source)?;
                if &found != ty {
                    return Err(Error::Wiring(format!(
                        "`{}` of type {found} cannot feed `{}.{leg}` of type {ty}",
                        describe(source),
                        node.name
                    )));
                }
                if !used.insert(source) {
                    return Err(Error::Wiring(format!("`{}` feeds more than one leg; use a copy node", describe(source))));
                }
            }
        }
        for (out, source) in &outputs {
            source_type(*source)?;
            if !used.insert(*source) {
                return Err(Error::Wiring(format!("`{}` feeds more than one leg (free output `{out}`)", describe(*source))));
            }
        }
        for a in &accepting {
            let Some((out, source)) = outputs.get(a.output) else {
                return Err(Error::Wiring(format!("accepting condition on missing output {}", a.output)));
            };
            match source_type(*source)? {
                LegType::State(space) => {
                    if let Some(s) = a.states.iter().find(|s| !space.contains(s)) {
                        return Err(Error::UnknownState(s.clone()));
                    }
                }
                LegType::Morphism(_) => {
                    return Err(Error::Wiring(format!("accepting condition on morphism output `{out}`")));
                }
            }
        }

        for node in &nodes {
            match &node.kind {
                NodeKind::Meta { level, .. } if *level > meta_level => {
                    return Err(Error::MetaLevelTooSmall {
                        declared: meta_level,
                        reason: format!("meta-vertex `{}` has level {level}", node.name),
                    })
                }
                NodeKind::Const(Value::Morphism(Morphism::Machine(m)), ty) => {
                    if m.meta_level() >= meta_level {
                        return Err(Error::MetaLevelTooSmall {
                            declared: meta_level,
                            reason: format!("constant `{}` holds a machine of level {}", node.name, m.meta_level()),
                        });
                    }
                    if *ty != LegType::Morphism(m.signature()) {
                        return Err(Error::Wiring(format!("constant `{}` does not have type {ty}", node.name)));
                    }
                }
                NodeKind::Const(Value::State(s), ty) => {
                    if !matches!(ty, LegType::State(space) if space.contains(s)) {
                        return Err(Error::Wiring(format!("constant `{}` does not have type {ty}", node.name)));
                    }
                }
                NodeKind::Const(Value::Morphism(_), LegType::State(_)) => {
                    return Err(Error::Wiring(format!("constant `{}` is not a state", node.name)));
                }
                _ => {}
            }
        }

        let order = topological_order(&nodes, &wires)?;
        Ok(StringMachine { name, inputs, nodes, wires, outputs, accepting, reserved, meta_level, order })
    }

    pub fn parts(&self) -> MachineParts {
        MachineParts {
            name: self.name.clone(),
            inputs: self.inputs.clone(),
            nodes: self.nodes.clone(),
            wires: self.wires.clone(),
            outputs: self.outputs.clone(),
            accepting: self.accepting.clone(),
            reserved: self.reserved.clone(),
            meta_level: self.meta_level,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn meta_level(&self) -> u32 {
        self.meta_level
    }

    pub fn inputs(&self) -> &[(String, LegType)] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[(String, Source)] {
        &self.outputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn wires(&self) -> &[Vec<Option<Source>>] {
        &self.wires
    }

    pub fn accepting(&self) -> &[Accepting] {
        &self.accepting
    }

    pub fn reserved(&self) -> &[String] {
        &self.reserved
    }

    /// Node indices in evaluation order: topological, ties broken by name.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn dom(&self) -> MachineObject {
        MachineObject(self.inputs.iter().map(|(_, t)| t.clone()).collect())
    }

    pub fn cod(&self) -> MachineObject {
        MachineObject(self.outputs.iter().map(|(_, s)| self.source_type(*s)).collect())
    }

    pub fn signature(&self) -> Signature {
        Signature::machines(self.dom(), self.cod())
    }

    pub fn source_type(&self, s: Source) -> LegType {
        match s {
            Source::Input(i) => self.inputs[i].1.clone(),
            Source::Node(n, leg) => self.nodes[n].output_legs()[leg].1.clone(),
        }
    }

    /// Printable `node.leg` form of a source.
    pub fn describe_source(&self, s: Source) -> String {
        match s {
            Source::Input(i) => format!("in.{}", self.inputs[i].0),
            Source::Node(n, leg) => format!("{}.{}", self.nodes[n].name, self.nodes[n].output_legs()[leg].0),
        }
    }

    /// Number of top-level transducer nodes; the degree of the machine as
    /// a morphism.
    pub fn transducer_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Transducer(_))).count()
    }

    pub fn has_meta_node(&self) -> Option<&str> {
        self.nodes.iter().find(|n| matches!(n.kind, NodeKind::Meta { .. })).map(|n| n.name.as_str())
    }

    /// Serial composite: outputs of `self` feed the inputs of `next`.
    /// Accepting conditions of `self` are dropped, since its outputs are
    /// consumed.
    pub fn then(&self, next: &StringMachine) -> Result<StringMachine> {
        if self.cod() != next.dom() {
            return Err(Error::ObjectMismatch(format!(
                "cannot compose `{}` with `{}`: {} is not {}",
                self.name,
                next.name,
                self.cod(),
                next.dom()
            )));
        }
        let offset = self.nodes.len();
        let feed = |s: Source| match s {
            Source::Input(i) => self.outputs[i].1,
            Source::Node(n, leg) => Source::Node(n + offset, leg),
        };
        let mut nodes = self.nodes.clone();
        nodes.extend(renamed(&self.nodes, &next.nodes));
        let mut wires = self.wires.clone();
        wires.extend(next.wires.iter().map(|row| row.iter().map(|s| s.map(feed)).collect()));
        StringMachine::assemble(MachineParts {
            name: format!("({} ; {})", self.name, next.name),
            inputs: self.inputs.clone(),
            nodes,
            wires,
            outputs: next.outputs.iter().map(|(n, s)| (n.clone(), feed(*s))).collect(),
            accepting: next.accepting.clone(),
            reserved: union(&self.reserved, &next.reserved),
            meta_level: self.meta_level.max(next.meta_level),
        })
    }

    /// Monoidal product: disjoint union of the two machines.
    pub fn beside(&self, other: &StringMachine) -> StringMachine {
        let (noff, ioff, ooff) = (self.nodes.len(), self.inputs.len(), self.outputs.len());
        let shift = |s: Source| match s {
            Source::Input(i) => Source::Input(i + ioff),
            Source::Node(n, leg) => Source::Node(n + noff, leg),
        };
        let mut nodes = self.nodes.clone();
        nodes.extend(renamed(&self.nodes, &other.nodes));
        let mut wires = self.wires.clone();
        wires.extend(other.wires.iter().map(|row| row.iter().map(|s| s.map(shift)).collect()));
        let mut inputs = self.inputs.clone();
        inputs.extend(fresh_names(&self.inputs, &other.inputs));
        let mut outputs = self.outputs.clone();
        let other_outputs: Vec<(String, Source)> = other.outputs.iter().map(|(n, s)| (n.clone(), shift(*s))).collect();
        outputs.extend(fresh_names(&self.outputs, &other_outputs));
        let mut accepting = self.accepting.clone();
        accepting.extend(
            other.accepting.iter().map(|a| Accepting { output: a.output + ooff, states: a.states.clone() }),
        );
        StringMachine::assemble(MachineParts {
            name: format!("({} * {})", self.name, other.name),
            inputs,
            nodes,
            wires,
            outputs,
            accepting,
            reserved: union(&self.reserved, &other.reserved),
            meta_level: self.meta_level.max(other.meta_level),
        })
        .expect("disjoint union of valid machines is valid")
    }

    /// Connects free output `o` to free input `i` for every pair `(o, i)`;
    /// both legs disappear from the interface.
    pub fn contract(&self, pairs: &[(usize, usize)]) -> Result<StringMachine> {
        let mut feed: BTreeMap<usize, Source> = BTreeMap::new();
        let mut dropped_outputs = BTreeSet::new();
        for (index, &(o, i)) in pairs.iter().enumerate() {
            let (Some((_, source)), Some((_, ty))) = (self.outputs.get(o), self.inputs.get(i)) else {
                return Err(Error::Wiring(format!("pairing ({o}, {i}) refers to a missing leg")));
            };
            let found = self.source_type(*source);
            if &found != ty {
                return Err(Error::SignatureMismatch { index, expected: ty.to_string(), found: found.to_string() });
            }
            if feed.insert(i, *source).is_some() || !dropped_outputs.insert(o) {
                return Err(Error::Wiring(format!("leg used twice in pairing ({o}, {i})")));
            }
        }
        // Follow chains of contracted inputs; a chain that returns to its
        // start is a cycle.
        let resolve = |s: Source| -> Result<Source> {
            let mut s = s;
            let mut seen = BTreeSet::new();
            while let Source::Input(i) = s {
                let Some(next) = feed.get(&i) else { break };
                if !seen.insert(i) {
                    return Err(Error::CycleDetected(format!("in.{}", self.inputs[i].0)));
                }
                s = *next;
            }
            Ok(s)
        };
        let kept_inputs: Vec<usize> = (0..self.inputs.len()).filter(|i| !feed.contains_key(i)).collect();
        let reindex = |s: Source| -> Result<Source> {
            Ok(match resolve(s)? {
                Source::Input(i) => Source::Input(kept_inputs.iter().position(|&k| k == i).expect("kept input")),
                other => other,
            })
        };
        let wires = self
            .wires
            .iter()
            .map(|row| row.iter().map(|s| s.map(reindex).transpose()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut outputs = Vec::new();
        let mut remap = HashMap::new();
        for (o, (n, s)) in self.outputs.iter().enumerate() {
            if !dropped_outputs.contains(&o) {
                remap.insert(o, outputs.len());
                outputs.push((n.clone(), reindex(*s)?));
            }
        }
        let accepting = self
            .accepting
            .iter()
            .filter_map(|a| remap.get(&a.output).map(|&output| Accepting { output, states: a.states.clone() }))
            .collect();
        StringMachine::assemble(MachineParts {
            name: self.name.clone(),
            inputs: kept_inputs.iter().map(|&i| self.inputs[i].clone()).collect(),
            nodes: self.nodes.clone(),
            wires,
            outputs,
            accepting,
            reserved: self.reserved.clone(),
            meta_level: self.meta_level,
        })
    }

    /// Runs the machine on values for its free inputs.
    pub fn evaluate(&self, inputs: &[Value]) -> Result<Evaluation> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::Wiring(format!(
                "machine `{}` takes {} inputs, got {}",
                self.name,
                self.inputs.len(),
                inputs.len()
            )));
        }
        for ((leg, ty), value) in self.inputs.iter().zip(inputs) {
            match (ty, value) {
                (LegType::State(space), Value::State(s)) => {
                    if !space.contains(s) {
                        return Err(Error::UnknownState(s.clone()));
                    }
                }
                (LegType::Morphism(_), Value::Morphism(m)) => {
                    if let Morphism::Tape(t) = m {
                        if let Some(r) = self.reserved.iter().find(|r| t.mentions(r)) {
                            return Err(Error::ReservedCharacterInInput(r.clone()));
                        }
                    }
                }
                (LegType::State(_), _) => return Err(Error::ValueKind { leg: leg.clone(), expected: "a state".into() }),
                (LegType::Morphism(_), _) => {
                    return Err(Error::ValueKind { leg: leg.clone(), expected: "a morphism".into() })
                }
            }
        }
        crate::deep(|| self.run(inputs))
    }

    fn run(&self, inputs: &[Value]) -> Result<Evaluation> {
        let mut values: Vec<Vec<Option<Value>>> =
            self.nodes.iter().map(|n| vec![None; n.output_legs().len()]).collect();
        let mut trace = EvalTrace::default();
        let take = |values: &mut Vec<Vec<Option<Value>>>, s: Source| -> Value {
            match s {
                Source::Input(i) => inputs[i].clone(),
                Source::Node(n, leg) => values[n][leg].take().expect("sources are evaluated before consumers"),
            }
        };
        for &n in &self.order {
            let node = &self.nodes[n];
            let legs = node.input_legs();
            let args: Vec<Option<Value>> = self.wires[n].iter().map(|s| s.map(|s| take(&mut values, s))).collect();
            let (outs, record) = self.run_node(node, &legs, args)?;
            values[n] = outs.into_iter().map(Some).collect();
            trace.nodes.push(record);
        }
        let outputs: Vec<Value> = self.outputs.iter().map(|(_, s)| take(&mut values, *s)).collect();
        let accepted = (!self.accepting.is_empty()).then(|| {
            self.accepting
                .iter()
                .all(|a| matches!(&outputs[a.output], Value::State(s) if a.states.contains(s)))
        });
        Ok(Evaluation { outputs, trace, accepted })
    }

    fn run_node(
        &self,
        node: &Node,
        legs: &[(String, LegType)],
        args: Vec<Option<Value>>,
    ) -> Result<(Vec<Value>, NodeTrace)> {
        let morphism = |i: usize, v: Option<Value>| -> Result<Morphism> {
            match v {
                Some(Value::Morphism(m)) => Ok(m),
                _ => Err(Error::ValueKind { leg: format!("{}.{}", node.name, legs[i].0), expected: "a morphism".into() }),
            }
        };
        let mut record = NodeTrace {
            node: node.name.clone(),
            kind: "",
            primary_degree: None,
            states: None,
            output_degrees: Vec::new(),
            inner: None,
        };
        let outs = match &node.kind {
            NodeKind::Transducer(t) => {
                record.kind = "transducer";
                let mut args = args.into_iter();
                let start = match args.next().flatten() {
                    Some(Value::State(s)) => s,
                    None => t.initial_state().expect("checked at assembly").to_string(),
                    Some(_) => {
                        return Err(Error::ValueKind { leg: format!("{}.state", node.name), expected: "a state".into() })
                    }
                };
                let primary = morphism(1, args.next().flatten())?;
                let Morphism::Tape(primary) = primary else {
                    return Err(Error::ValueKind { leg: format!("{}.primary", node.name), expected: "a tape term".into() });
                };
                let aux = args.enumerate().map(|(i, v)| morphism(i + 2, v)).collect::<Result<Vec<_>>>()?;
                let result = t.evaluate(&start, &primary, &aux).map_err(|e| e.at(format!("node `{}`", node.name)))?;
                record.primary_degree = Some(result.primary_degree_consumed);
                record.output_degrees = result
                    .outputs
                    .iter()
                    .map(|m| t.output_cat().degree_of(m))
                    .collect::<Result<Vec<_>>>()?;
                record.states = Some((start, result.output_state.clone()));
                let mut outs = vec![Value::State(result.output_state)];
                outs.extend(result.outputs.into_iter().map(Value::Morphism));
                outs
            }
            NodeKind::Copy(_) => {
                record.kind = "copy";
                let vals: Vec<Value> = args.into_iter().map(|v| v.expect("copy inputs are connected")).collect();
                [vals.clone(), vals].concat()
            }
            NodeKind::Meta { dom, cod, level } => {
                record.kind = "meta";
                let mut args = args.into_iter();
                let machine = match morphism(0, args.next().flatten())? {
                    Morphism::Machine(m) => m,
                    Morphism::Tape(_) => {
                        return Err(Error::ValueKind { leg: format!("{}.machine", node.name), expected: "a machine".into() })
                    }
                };
                if machine.meta_level() >= *level {
                    return Err(Error::MetaLevelViolation {
                        node: node.name.clone(),
                        limit: *level,
                        found: machine.meta_level(),
                    });
                }
                if machine.dom() != *dom || machine.cod() != *cod {
                    return Err(Error::ValueKind {
                        leg: format!("{}.machine", node.name),
                        expected: format!("a machine {dom} -> {cod}"),
                    });
                }
                let inner_inputs: Vec<Value> = args.map(|v| v.expect("meta inputs are connected")).collect();
                let inner = machine.evaluate(&inner_inputs).map_err(|e| e.at(format!("inside `{}`", node.name)))?;
                record.inner = Some(Box::new(inner.trace));
                inner.outputs
            }
            NodeKind::Const(v, _) => {
                record.kind = "const";
                vec![v.clone()]
            }
        };
        Ok((outs, record))
    }
}

impl fmt::Display for StringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Runs a machine on tape inputs, wiring values in order.
pub fn evaluate_machine(m: &StringMachine, inputs: &[Value]) -> Result<Evaluation> {
    m.evaluate(inputs)
}

/// Joins two machines, feeding free output `o` of `f` into free input `i`
/// of `g` for every `(o, i)` in `pairing`. An empty pairing gives the
/// monoidal product.
pub fn wire_machines(f: &StringMachine, g: &StringMachine, pairing: &[(usize, usize)]) -> Result<StringMachine> {
    let ioff = f.inputs.len();
    let pairs: Vec<(usize, usize)> = pairing.iter().map(|&(o, i)| (o, i + ioff)).collect();
    for (index, &(o, i)) in pairing.iter().enumerate() {
        if let (Some((_, s)), Some((_, ty))) = (f.outputs.get(o), g.inputs.get(i)) {
            let found = f.source_type(*s);
            if &found != ty {
                return Err(Error::SignatureMismatch { index, expected: ty.to_string(), found: found.to_string() });
            }
        }
    }
    f.beside(g).contract(&pairs)
}

fn unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Wiring(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

fn union(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    out.extend(b.iter().filter(|r| !a.contains(r)).cloned());
    out
}

/// `extra` with names changed to avoid `taken`, by appending `_k`.
fn fresh_names<T: Clone>(taken: &[(String, T)], extra: &[(String, T)]) -> Vec<(String, T)> {
    let mut used: BTreeSet<String> = taken.iter().map(|(n, _)| n.clone()).collect();
    extra
        .iter()
        .map(|(n, v)| {
            let name = fresh(n, &used);
            used.insert(name.clone());
            (name, v.clone())
        })
        .collect()
}

fn renamed(taken: &[Node], extra: &[Node]) -> Vec<Node> {
    let mut used: BTreeSet<String> = taken.iter().map(|n| n.name.clone()).collect();
    used.extend(extra.iter().map(|n| n.name.clone()));
    let taken_names: BTreeSet<&str> = taken.iter().map(|n| n.name.as_str()).collect();
    extra
        .iter()
        .map(|n| {
            if !taken_names.contains(n.name.as_str()) {
                return n.clone();
            }
            let name = fresh(&n.name, &used);
            used.insert(name.clone());
            Node { name, kind: n.kind.clone() }
        })
        .collect()
}

fn fresh(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    (2..).map(|k| format!("{base}_{k}")).find(|c| !used.contains(c)).expect("some suffix is free")
}

fn topological_order(nodes: &[Node], wires: &[Vec<Option<Source>>]) -> Result<Vec<usize>> {
    let mut pending: Vec<usize> = vec![0; nodes.len()];
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (n, row) in wires.iter().enumerate() {
        for s in row.iter().flatten() {
            if let Source::Node(p, _) = s {
                pending[n] += 1;
                consumers[*p].push(n);
            }
        }
    }
    let mut ready: BTreeSet<(&str, usize)> =
        (0..nodes.len()).filter(|&n| pending[n] == 0).map(|n| (nodes[n].name.as_str(), n)).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some((_, n)) = ready.pop_first() {
        order.push(n);
        for &c in &consumers[n] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.insert((nodes[c].name.as_str(), c));
            }
        }
    }
    if order.len() < nodes.len() {
        let stuck = (0..nodes.len()).filter(|&n| pending[n] > 0).map(|n| nodes[n].name.as_str()).min().unwrap_or("?");
        return Err(Error::CycleDetected(stuck.to_string()));
    }
    Ok(order)
}
