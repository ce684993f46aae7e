#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated checks also reject NaN

//! Light-cone lattice solver for the cubic nonlinear Dirac system in 1+1
//! dimensions, with an audit engine for the a-priori estimates of its
//! global L² theory and a harness for mollified approximation studies.
//!
//! The system is
//!
//! ```text
//! i(u_t + u_x) = -m v + N1(u, v)
//! i(v_t - v_x) = -m u + N2(u, v)
//! ```
//!
//! with `N1`, `N2` the Wirtinger derivatives of
//! `W = alpha |u|^2 |v|^2 + beta (conj(u) v + u conj(v))^2`.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the double-precision instantiation used by the
//! audits and the command-line driver.
//!
//! * [`field`]: lattice, spinor snapshots, initial data, cone domains
//! * [`model`]: nonlinearity, estimate constants, algebraic bound checks
//! * [`solver`]: characteristic splitting stepper and exact oracles
//! * [`functionals`]: cone functionals and the inequality audits
//! * [`harness`]: mollified data, Cauchy and uniqueness studies, cone plans
//!
//! ```
//! use dirac_lattice::{evolve, make_grid, sample_initial, Boundary, Complex64, Datum, Params, Profile, SolverConfig};
//!
//! let grid = make_grid(-8.0, 8.0, 256, Boundary::ZeroInflow).unwrap();
//! let datum = Datum::new(Profile::gaussian(0.0, 1.0, Complex64::new(0.3, 0.0)), Profile::Zero);
//! let f0 = sample_initial(&datum, &grid).unwrap();
//! let run = evolve(&f0, &Params::gross_neveu(1.0), &SolverConfig::default(), 1.0).unwrap();
//! // charge is conserved up to a small discretization drift
//! assert!((run.last().charge() / f0.charge() - 1.0).abs() < 1e-4);
//! ```

pub mod error;
pub mod field;
pub mod functionals;
pub mod harness;
pub mod model;
pub mod report;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use field::{make_grid, sample_initial, Boundary, InitialDatum, Profile};
pub use functionals::{AuditTolerance, Domain};
pub use model::{ConstantOverrides, DifferenceTerms, Nonlinearity};
pub use report::{AuditReport, Witness};
pub use scalar::{Cplx, Real};
pub use solver::{evolve, SolverConfig};

/// Double-precision lattice.
pub type Grid = field::GridSpec<f64>;
/// Double-precision field snapshot.
pub type Field = field::SpinorField<f64>;
pub type Field32 = field::SpinorField<f32>;
pub type Triangle = field::TriangleDomain<f64>;
pub type Datum = field::InitialDatum<f64>;
pub type Params = model::ModelParams<f64>;
pub type Constants = model::EstimateConstants<f64>;
pub type Complex64 = Cplx<f64>;
