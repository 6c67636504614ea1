//! Branching and merging spaces, and branching/merging homology, of finite
//! cellular multipointed d-spaces.
//!
//! The pipeline is: a [`PrecubicalSet`] (or a hand-written
//! [`GlobularComplex`]) is realized as a globular complex; the branching space
//! at each state is assembled as a finite CW complex ([`branching`]); integer
//! homology is computed by Smith normal form ([`homology`]). The
//! [`flowcat`] module recomputes the branching spaces through the associated
//! flow as an independent check, and [`subdivision`] applies elementary
//! globular subdivisions and compares invariants before and after.

pub mod branching;
pub mod error;
pub mod flowcat;
pub mod fuzz;
pub mod globular;
pub mod homology;
pub mod matrix;
pub mod precubical;
pub mod subdivision;
mod unionfind;

pub use branching::{branching_space, merging_space, pi0, CWComplexData, ComponentMap};
pub use error::{Error, Result};
pub use globular::{globe, op, realize, GlobularCell, GlobularComplex};
pub use homology::{
    branching_homology, homology, merging_homology, snf, ChainComplex, HomologyGroup, SnfResult,
};
pub use matrix::IntMatrix;
pub use precubical::{gen_cube, gen_example, PrecubicalSet};

// The guide in book/ is compiled here so its snippets run with the doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/precubical.md")]
    mod precubical {}
    #[doc = include_str!("../../../book/src/globular.md")]
    mod globular {}
    #[doc = include_str!("../../../book/src/branching.md")]
    mod branching {}
    #[doc = include_str!("../../../book/src/homology.md")]
    mod homology {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/subdivision.md")]
    mod subdivision {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
