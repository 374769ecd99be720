use thiserror::Error;

use crate::statecat::MorphismViolation;
use crate::transducer::TransducerViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree arithmetic overflowed")]
    DegreeOverflow,

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{0}` has degree zero; generators must have positive degree")]
    ZeroDegreeGenerator(String),
    #[error("`{0}` is not a usable name")]
    InvalidName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("character {0:?} does not name an endomorphism generator")]
    NonEndomorphismCharacter(char),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("term syntax error at offset {position}: {message}")]
    TermSyntax { position: usize, message: String },

    #[error("variable {index} is not declared in a context of length {len}")]
    VarOutOfRange { index: usize, len: usize },
    #[error("substitution for variable {index} has signature {found}, expected {expected}")]
    SignatureMismatch { index: usize, expected: String, found: String },
    #[error("substitution arity mismatch: {0}")]
    ContextMismatch(String),

    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("base category mismatch: {0}")]
    BaseCategoryMismatch(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("variable store does not match: {0}")]
    StoreMismatch(String),
    #[error("invalid state morphism: {}", join(.0))]
    InvalidStateMorphism(Vec<MorphismViolation>),

    #[error("invalid transducer `{name}`: {}", join(.violations))]
    InvalidTransducer { name: String, violations: Vec<TransducerViolation> },
    #[error("transducer `{0}` has no generator image for `{1}`")]
    MissingGeneratorImage(String, String),

    #[error("wiring error: {0}")]
    Wiring(String),
    #[error("wiring contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("meta-vertex `{node}` of level {limit} received a machine of level {found}")]
    MetaLevelViolation { node: String, limit: u32, found: u32 },
    #[error("machine meta level {declared} is too small: {reason}")]
    MetaLevelTooSmall { declared: u32, reason: String },
    #[error("input contains the reserved generator `{0}`")]
    ReservedCharacterInInput(String),
    #[error("value of the wrong kind on `{leg}`: expected {expected}")]
    ValueKind { leg: String, expected: String },

    #[error("transition is not defined for state `{state}` on `{letter}`")]
    PartialTransition { state: String, letter: String },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("input state variable `{0}` has zero linear degree")]
    ZeroLinearInputVariable(String),
    #[error("generator placeholder occurs {0} times; at most one occurrence is allowed")]
    MultipleGeneratorOccurrences(usize),
    #[error("declared parameters {declared} for N={n} do not dominate computed {computed}")]
    DeclaredParametersTooSmall { n: usize, declared: String, computed: String },
    #[error("machine contains a meta-vertex (`{0}`)")]
    HasMetaNode(String),
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    DocumentSyntax { line: usize, column: usize, message: String },
    #[error("cannot resolve `{0}`")]
    Resolution(String),
    #[error("{location}: {source}")]
    AtLocation {
        location: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, location: impl Into<String>) -> Error {
        Error::AtLocation { location: location.into(), source: Box::new(self) }
    }

    /// Strips location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLocation { source, .. } => source.root(),
            e => e,
        }
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
