//! Inversion of MSR data for tensors, size, contrast, equivalent ellipse and shape.

pub mod estimates;
pub mod lsq;
pub mod shape;

pub use estimates::{
    equivalent_ellipse, estimate_all, estimate_contrast, estimate_size, measured_first_order,
    Aggregate, SizeContrastEstimate,
};
pub use lsq::{reconstruct_fdpt, reconstruct_tdpt, tdpt_variance};
pub use shape::{
    harmonic_coefficients, optimize_shape, optimize_shape_observed, phi_hf, shape_gradient_step,
    HarmonicPolynomial, Schedule, ShapeProblem, ShapeReconstruction, ShapeState,
};
