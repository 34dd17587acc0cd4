//! Numerical laboratory for Liouville-type criteria of higher-order
//! differential inequalities `Σ (-1)^{|α|} ∂^α a_α(x, u) ≥ b(x) |u|^λ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexample;
pub mod criterion;
pub mod error;
pub mod fit;
pub mod presets;
pub mod problem;
pub mod profiles;
pub mod proofsim;
pub mod quadrature;
pub mod radial;
pub mod sampling;
pub mod special;
pub mod stencil;
pub mod tabulated;
pub mod weakform;

pub use criterion::{CriterionReport, Method, Verdict};
pub use error::{Error, Result};
pub use problem::ProblemSpec;
pub use profiles::RadialProfile;
pub use radial::RadialFn;
pub use tabulated::{LogGrid, TabulatedRadialFunction};
