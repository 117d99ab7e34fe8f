//! Series solutions of fractional quasi-Bessel equations
//!
//! ```text
//! Σ d_i x^(α_i+p_i) D^(α_i) u + (x^β − ν²) u = 0
//! ```
//!
//! with Caputo or Riemann–Liouville derivatives, as power series
//! `Σ c_n x^(γ+sn)`.

// `!(x > y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristic;
pub mod cli;
pub mod equation;
pub mod gamma;
pub mod rational;
pub mod series;
pub mod specialfn;
