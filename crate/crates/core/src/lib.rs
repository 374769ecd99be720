//! An executable engine for deterministic string machines.
//!
//! Transducers are strong monoidal functors from a freely generated tape
//! category into a filtered state category over some output category. They
//! are described only by the images of the input category's generators, and
//! the image of an arbitrary term is computed by structural recursion.
//! Transducers are wired into acyclic string machines, which may contain
//! meta-vertices that run string machines produced by other transducers.
//!
//! Module map:
//!
//! * [`degrees`]: ℕ and ℕ² degree arithmetic.
//! * [`tape`]: tape categories and their string-diagram terms.
//! * [`freecat`]: terms with numbered variable generators, and substitution.
//! * [`statecat`]: the filtered state category.
//! * [`transducer`]: filtered deterministic transducers.
//! * [`machine`]: string machines, meta-vertices and IPD accounting.
//! * [`analysis`]: output-degree triples, bound checks, growth harnesses.
//! * [`document`]: the JSON definition document format.
//! * [`oracles`]: naive reference implementations used by tests.

pub mod analysis;
pub mod degrees;
pub mod document;
pub mod error;
pub mod freecat;
pub mod machine;
pub mod oracles;
pub mod statecat;
pub mod tape;
pub mod transducer;

pub use degrees::{Degree1, Degree2};
pub use error::{Error, Result};

/// Red zone and growth increment for recursion over deep terms. Words are
/// left-nested composition chains, so tree depth grows with word length.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}
