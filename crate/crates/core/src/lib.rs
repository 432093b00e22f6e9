//! Polarization tensors of small two-dimensional acoustic inclusions.
//!
//! The crate computes frequency-dependent polarization tensors (FDPTs) from
//! boundary integral equations on a smooth closed curve, aggregates them into
//! truncated time-dependent tensors (TDPTs), synthesizes multi-static response
//! (MSR) data with a Nyström boundary element solver, and inverts such data for
//! the size, contrast, equivalent ellipse and fine boundary shape of the
//! inclusion.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! command-line runner and parallel drivers live in the companion `tdpt` crate.
//!
//! Sign convention: every layer potential, incident field and boundary system
//! uses the kernel `G_ω(x) = −(i/4) H₀⁽¹⁾(ω|x|)`, which satisfies
//! `(Δ + ω²) G_ω = δ₀` and reduces to the Laplace kernel `(1/2π) ln|x|` plus the
//! constant `β_ω` as `ω → 0`. [`special::gamma_helmholtz`] keeps the
//! `(i/4) H₀⁽¹⁾` normalization; the two agree in every bilinear expression
//! (asymptotic expansions, Green's row vectors).
#![no_std]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod forward;
pub mod geometry;
pub mod layer;
pub mod linalg;
pub mod multi_index;
pub mod reconstruction;
pub mod special;
pub mod spectral;
pub mod tensors;

pub use error::{Error, Result};
pub use multi_index::MultiIndex;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// 2D point or vector.
pub type Point = [f64; 2];
