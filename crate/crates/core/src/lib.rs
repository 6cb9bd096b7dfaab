//! Numerical toolkit for complete Nevanlinna–Pick kernels.
//!
//! * [`linalg`]: Hermitian matrices, PSD certification, low-rank factors.
//! * [`kernels`]: Szegő, Drury–Arveson, embedding-induced and raw Gram kernels;
//!   normalization and the pseudo-metric `d_k`.
//! * [`pick`]: Pick matrices, feasibility, minimal multiplier norms, the
//!   two-point extremal problem.
//! * [`realization`]: finite-sample embeddings into the Drury–Arveson ball.
//! * [`disk`]: Möbius distances, Blaschke sums/products, dominating ratios.
//! * [`capacity`]: analytic capacity closed forms and puncture experiments.
//!
//! Data-parallel sweeps take an [`Exec`]; see [`exec`].

// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod disk;
pub mod error;
pub mod exec;
pub mod kernels;
pub mod linalg;
pub mod pick;
pub mod realization;
pub mod report;

pub use error::{Error, Result};
pub use exec::Exec;
/// Re-exported because block targets are `nalgebra` matrices.
pub use nalgebra;
pub use num_complex::Complex64;
