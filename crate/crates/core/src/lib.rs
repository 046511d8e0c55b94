//! Generalized hypergeometric coherent states labelled by singular 2×2
//! diagonal matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: gamma/Pochhammer kernels, the ₚFq series, the Meijer-G
//!   measure weight (numerical Mellin–Barnes plus a closed-form catalog) and
//!   the moment quadrature built on it.
//! - [`algebra`]: structure functions and the deformed ladder operators on a
//!   truncated Fock space, including the displacement-operator construction.
//! - [`states`]: scalar-label coherent states, overlaps and diagonal
//!   expectation values.
//! - [`matrixstates`]: projector matrices `u_n`, diagonal labels
//!   `Z = z·u₀ + σ·u₁`, slotwise function application and matrix-label states.
//! - [`thermal`]: thermal density operators, Husimi Q, the linear-spectrum P
//!   function and its moment check, the complex-matrix qubit and entropy.
//! - [`suites`]: named verification suites selectable at runtime.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod matrixstates;
pub mod specfun;
pub mod states;
pub mod suites;
pub mod thermal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
