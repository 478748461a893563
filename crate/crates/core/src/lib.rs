//! Exact construction and certification of a family of symmetric
//! association schemes on (q+2) q^2 points, q = 2^m, built from the
//! multiplication table of GF(2^m) (a generalized Hadamard matrix) and a
//! symmetric Latin square with constant diagonal.
//!
//! For every m the construction decomposes the complete graph into q
//! strongly regular design graphs and a disjoint-clique block, refines that
//! decomposition into a symmetric association scheme with 2^{m+2} - 2
//! classes, and certifies everything in exact integer and rational
//! arithmetic: scheme axioms, strongly regular parameters, the full
//! intersection tensor, the primitive idempotents, both eigenmatrices with
//! duality, the Krein tensor, and the sigma-parameterized fusions with
//! their eigenmatrices. There are no tolerances anywhere; every check is an
//! exact identity.
//!
//! Modules: [`field`] (GF(2^m), characters, PAut search), [`matrix`] (exact
//! integer and rational kernels), [`latin`] (1-factorization and Latin
//! squares), [`construct`] (scheme assembly), [`verify`] (axioms and
//! intersection numbers), [`spectra`] (idempotents, eigenmatrices, Krein),
//! [`fusion`] (sigma-fusions), [`pipeline`] (certification drivers).

pub mod construct;
pub mod error;
pub mod field;
pub mod fusion;
pub mod latin;
pub mod matrix;
pub mod pipeline;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
