//! Approximation experiments: mollified data, Cauchy and uniqueness
//! studies over decreasing radii, cone planning, and random ensembles.

pub mod ensemble;
mod mollify;
mod plan;
mod study;

pub use ensemble::{perturbed, random_smooth_datum, EnsembleSpec};
pub use mollify::{mollify, mollify_with, Kernel};
pub use plan::{c0_for, plan_cones, ConePlan};
pub use study::{convergence_study, uniqueness_probe, Comparison, ConvergenceTable};
