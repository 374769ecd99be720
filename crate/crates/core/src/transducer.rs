//! Filtered deterministic transducers.
//!
//! A transducer is a strong monoidal functor `F` from a tape category into
//! the filtered state category of its output category. It is stored as the
//! image `F(X)` of the generating object and the images of the generators;
//! the image of any other term is computed by [`Transducer::functor_image`].

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::degrees::Degree1;
use crate::error::{Error, Result};
use crate::freecat::{BaseCategory, FreeTerm, Morphism, Signature};
use crate::statecat::{self, StateMorphism, StateObject, VarStore};
use crate::tape::{TapeCategory, TapeTerm};

/// Image of one generator, keyed by state names.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageSpec {
    pub degree: Degree1,
    /// `(source state, target state, output terms)` for every state of
    /// `F(X^m)`, where the generator is `X^m → X^n`.
    pub rows: Vec<(String, String, Vec<FreeTerm>)>,
}

impl ImageSpec {
    pub fn new(degree: Degree1) -> Self {
        ImageSpec { degree, rows: Vec::new() }
    }

    pub fn row(mut self, from: &str, to: &str, outputs: Vec<FreeTerm>) -> Self {
        self.rows.push((from.to_string(), to.to_string(), outputs));
        self
    }
}

/// Everything needed to build a [`Transducer`].
#[derive(Clone, Debug)]
pub struct TransducerSpec {
    pub name: String,
    pub input_cat: Arc<TapeCategory>,
    pub output_cat: BaseCategory,
    pub primary: (usize, usize),
    pub aux: Vec<Signature>,
    pub outputs: Vec<Signature>,
    pub state_image: StateObject,
    pub images: Vec<(String, ImageSpec)>,
    pub initial_state: Option<String>,
}

/// A problem found by [`Transducer::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransducerViolation {
    MissingImage(String),
    UnknownGenerator(String),
    Image { generator: String, message: String },
    FilteredFunctor { generator: String, image_degree: Degree1, generator_degree: Degree1 },
    InputPrefix { state: String, message: String },
    OutputPrefix { state: String, message: String },
    ForeignSignature(String),
    InitialState(String),
}

impl fmt::Display for TransducerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransducerViolation::MissingImage(g) => write!(f, "no image for generator `{g}`"),
            TransducerViolation::UnknownGenerator(g) => write!(f, "image given for unknown generator `{g}`"),
            TransducerViolation::Image { generator, message } => write!(f, "image of `{generator}`: {message}"),
            TransducerViolation::FilteredFunctor { generator, image_degree, generator_degree } => write!(
                f,
                "filtered functor violation: image of `{generator}` has degree {image_degree} > generator degree {generator_degree}"
            ),
            TransducerViolation::InputPrefix { state, message } => {
                write!(f, "input prefix violation at `{state}`: {message}")
            }
            TransducerViolation::OutputPrefix { state, message } => {
                write!(f, "output prefix violation at `{state}`: {message}")
            }
            TransducerViolation::ForeignSignature(s) => write!(f, "signature {s} is not in the output category"),
            TransducerViolation::InitialState(s) => write!(f, "initial state `{s}` is not an input state"),
        }
    }
}

/// The generator image, or the reason it could not be built.
#[derive(Clone, Debug, PartialEq)]
enum Image {
    Built(StateMorphism),
    Broken(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transducer {
    name: String,
    input_cat: Arc<TapeCategory>,
    output_cat: BaseCategory,
    primary: (usize, usize),
    aux: Vec<Signature>,
    outputs: Vec<Signature>,
    state_image: Arc<StateObject>,
    /// `F(X)^{⊗k}` for every `k` up to the largest arity in use.
    powers: Vec<Arc<StateObject>>,
    images: IndexMap<String, Image>,
    unknown_images: Vec<String>,
    initial_state: Option<String>,
}

/// Result of one transducer run.
#[derive(Clone, Debug, PartialEq)]
pub struct TransducerResult {
    pub output_state: String,
    pub outputs: Vec<Morphism>,
    pub primary_degree_consumed: Degree1,
}

impl Transducer {
    /// Builds and validates a transducer.
    pub fn new(spec: TransducerSpec) -> Result<Self> {
        let t = Self::build(spec);
        let violations = t.validate();
        if violations.is_empty() {
            Ok(t)
        } else {
            Err(Error::InvalidTransducer { name: t.name.clone(), violations })
        }
    }

    /// Builds without validating; see [`Transducer::validate`].
    pub fn build(spec: TransducerSpec) -> Self {
        let TransducerSpec { name, input_cat, output_cat, primary, aux, outputs, state_image, images, initial_state } =
            spec;
        let max_arity = input_cat
            .generators()
            .iter()
            .flat_map(|g| [g.arity_in, g.arity_out])
            .chain([primary.0, primary.1, 2])
            .max()
            .unwrap_or(2);
        let state_image = Arc::new(state_image);
        let powers: Vec<Arc<StateObject>> = (0..=max_arity).map(|k| Arc::new(state_image.power(k))).collect();

        let mut table = IndexMap::new();
        let mut unknown_images = Vec::new();
        let mut given: IndexMap<String, ImageSpec> = images.into_iter().collect();
        for g in input_cat.generators() {
            let Some(spec) = given.shift_remove(&g.name) else { continue };
            let rows: Vec<(&str, &str, Vec<FreeTerm>)> =
                spec.rows.iter().map(|(a, b, t)| (a.as_str(), b.as_str(), t.clone())).collect();
            let image = StateMorphism::from_table_unchecked(
                output_cat.clone(),
                powers[g.arity_in].clone(),
                powers[g.arity_out].clone(),
                spec.degree,
                &rows,
            );
            table.insert(
                g.name.clone(),
                match image {
                    Ok(m) => Image::Built(m),
                    Err(e) => Image::Broken(e.to_string()),
                },
            );
        }
        unknown_images.extend(given.into_keys());
        Transducer {
            name,
            input_cat,
            output_cat,
            primary,
            aux,
            outputs,
            state_image,
            powers,
            images: table,
            unknown_images,
            initial_state,
        }
    }

    /// Checks the filtered-functor bound, both prefix conditions, and every
    /// generator image.
    pub fn validate(&self) -> Vec<TransducerViolation> {
        let mut report = Vec::new();
        for sig in self.aux.iter().chain(&self.outputs) {
            if !self.output_cat.owns(sig) {
                report.push(TransducerViolation::ForeignSignature(sig.to_string()));
            }
        }
        for (_, decl) in self.state_image.all_vars() {
            if !self.output_cat.owns(&decl.signature) {
                report.push(TransducerViolation::ForeignSignature(decl.signature.to_string()));
            }
        }
        for name in &self.unknown_images {
            report.push(TransducerViolation::UnknownGenerator(name.clone()));
        }
        for g in self.input_cat.generators() {
            match self.images.get(&g.name) {
                None => report.push(TransducerViolation::MissingImage(g.name.clone())),
                Some(Image::Broken(message)) => {
                    report.push(TransducerViolation::Image { generator: g.name.clone(), message: message.clone() })
                }
                Some(Image::Built(m)) => {
                    if m.degree() > g.degree {
                        report.push(TransducerViolation::FilteredFunctor {
                            generator: g.name.clone(),
                            image_degree: m.degree(),
                            generator_degree: g.degree,
                        });
                    }
                    for v in m.validate() {
                        report.push(TransducerViolation::Image { generator: g.name.clone(), message: v.to_string() });
                    }
                }
            }
        }

        let input = self.input_states();
        for x in 0..input.len() {
            let vars = input.vars(x);
            let message = if vars.len() > self.aux.len() {
                Some(format!("{} variables but only {} auxiliary inputs", vars.len(), self.aux.len()))
            } else {
                vars.iter()
                    .zip(&self.aux)
                    .position(|(v, s)| &v.signature != s)
                    .map(|i| format!("variable {i} has signature {}, auxiliary input {i} is {}", vars[i].signature, self.aux[i]))
            };
            if let Some(message) = message {
                report.push(TransducerViolation::InputPrefix { state: input.state(x).to_string(), message });
            }
        }
        let output = self.output_states();
        for y in 0..output.len() {
            let vars = output.vars(y);
            let message = if vars.len() < self.outputs.len() {
                Some(format!("{} variables but {} outputs", vars.len(), self.outputs.len()))
            } else {
                vars.iter()
                    .zip(&self.outputs)
                    .position(|(v, s)| &v.signature != s)
                    .map(|i| format!("variable {i} has signature {}, output {i} is {}", vars[i].signature, self.outputs[i]))
            };
            if let Some(message) = message {
                report.push(TransducerViolation::OutputPrefix { state: output.state(y).to_string(), message });
            }
        }
        if let Some(s) = &self.initial_state {
            if input.state_index(s).is_err() {
                report.push(TransducerViolation::InitialState(s.clone()));
            }
        }
        report
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_cat(&self) -> &Arc<TapeCategory> {
        &self.input_cat
    }

    pub fn output_cat(&self) -> &BaseCategory {
        &self.output_cat
    }

    pub fn primary(&self) -> (usize, usize) {
        self.primary
    }

    pub fn primary_signature(&self) -> Signature {
        Signature::tape(self.input_cat.name(), self.primary.0, self.primary.1)
    }

    pub fn aux(&self) -> &[Signature] {
        &self.aux
    }

    pub fn outputs(&self) -> &[Signature] {
        &self.outputs
    }

    pub fn state_image(&self) -> &Arc<StateObject> {
        &self.state_image
    }

    pub fn initial_state(&self) -> Option<&str> {
        self.initial_state.as_deref()
    }

    /// `F(X)^{⊗k}`.
    pub fn power(&self, k: usize) -> Arc<StateObject> {
        self.powers.get(k).cloned().unwrap_or_else(|| Arc::new(self.state_image.power(k)))
    }

    /// Input state space `F(X^m)`.
    pub fn input_states(&self) -> Arc<StateObject> {
        self.power(self.primary.0)
    }

    /// Output state space `F(X^n)`.
    pub fn output_states(&self) -> Arc<StateObject> {
        self.power(self.primary.1)
    }

    pub fn image(&self, generator: &str) -> Result<&StateMorphism> {
        match self.images.get(generator) {
            Some(Image::Built(m)) => Ok(m),
            _ => Err(Error::MissingGeneratorImage(self.name.clone(), generator.to_string())),
        }
    }

    /// `F(t)`, by structural recursion over the term.
    pub fn functor_image(&self, t: &TapeTerm) -> Result<StateMorphism> {
        crate::deep(|| {
            let base = || self.output_cat.clone();
            Ok(match t {
                TapeTerm::Gen(g) => self.image(g)?.clone(),
                TapeTerm::Id(k) => StateMorphism::identity(base(), self.power(*k)),
                TapeTerm::Copy => StateMorphism::copy(base(), self.power(1)),
                TapeTerm::Discard => StateMorphism::discard(base(), self.power(1)),
                TapeTerm::Swap => StateMorphism::swap(base(), self.power(1), self.power(1)),
                TapeTerm::Seq(f, g) => statecat::compose(&self.functor_image(g)?, &self.functor_image(f)?)?,
                TapeTerm::Par(f, g) => statecat::tensor(&self.functor_image(f)?, &self.functor_image(g)?)?,
            })
        })
    }

    /// Runs the transducer from `start` on a primary input, with auxiliary
    /// inputs loaded into the start state's variables. Extra auxiliary
    /// inputs beyond the start state's variable list are ignored.
    pub fn evaluate(&self, start: &str, primary: &TapeTerm, aux: &[Morphism]) -> Result<TransducerResult> {
        let sig = primary.signature(&self.input_cat)?;
        if sig != self.primary {
            return Err(Error::IllTyped(format!(
                "primary input of `{}` must be {:?}, got {:?}",
                self.name, self.primary, sig
            )));
        }
        let consumed = primary.degree(&self.input_cat)?;
        let input = self.input_states();
        let k = input.vars_of(start)?.len();
        if aux.len() < k {
            return Err(Error::StoreMismatch(format!(
                "state `{start}` of `{}` needs {k} auxiliary inputs, got {}",
                self.name,
                aux.len()
            )));
        }
        let image = self.functor_image(primary)?;
        let out = image.apply(&VarStore::new(start, aux[..k].to_vec()))?;
        let mut values = out.values;
        values.truncate(self.outputs.len());
        Ok(TransducerResult { output_state: out.state, outputs: values, primary_degree_consumed: consumed })
    }

    /// Runs one generator at a time on a variable store, without building
    /// the functor image of the whole word. Only defined for words.
    pub fn run_word(&self, store: VarStore, word: &[impl AsRef<str>]) -> Result<VarStore> {
        word.iter().try_fold(store, |s, g| self.image(g.as_ref())?.apply(&s))
    }
}
