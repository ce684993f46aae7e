//! Time stepping on the light-cone lattice.
//!
//! With `dt = dx` the transport part of the system is an exact shift:
//! `u` moves one cell right, `v` one cell left. The remaining pointwise ODE
//!
//! ```text
//! u' = i(m v - N1 + F1),   v' = i(m u - N2 + F2)
//! ```
//!
//! is integrated with the explicit midpoint rule. The two parts are
//! composed symmetrically (half source, shift, half source), which keeps
//! the step second order; a plain shift-then-source composition is only
//! first order because the source sees `v` at the wrong end of the step.

mod exact;
mod residual;
mod soliton;

pub use exact::{ExactSolution, ManufacturedForcing, Rates};
pub use residual::{pde_residual, FieldProvider};
pub use soliton::{thirring_soliton, OracleStatus, SolitonOracle, SolitonVariant, ThirringSoliton, ACCEPT_ORDER};

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Boundary, GridSpec, SpinorField};
use crate::model::{nonlinear_terms, ModelParams};
use crate::scalar::{cplx, is_finite_c, Cplx, Real};

/// External forcing `(F1, F2)` entering as `i(u_t + u_x) = -m v + N1 - F1`.
pub trait Forcing<T>: Send + Sync {
    fn eval(&self, x: T, t: T) -> (Cplx<T>, Cplx<T>);
}

impl<T, F> Forcing<T> for F
where
    F: Fn(T, T) -> (Cplx<T>, Cplx<T>) + Send + Sync,
{
    fn eval(&self, x: T, t: T) -> (Cplx<T>, Cplx<T>) {
        self(x, t)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    /// Exact characteristic shift with explicit-midpoint source substeps.
    #[default]
    TransportRk2Source,
}

#[derive(Clone)]
pub struct SolverConfig<T> {
    pub scheme: Scheme,
    pub forcing: Option<Arc<dyn Forcing<T>>>,
    pub record_every: usize,
}

impl<T> fmt::Debug for SolverConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("scheme", &self.scheme)
            .field("forcing", &self.forcing.as_ref().map(|_| "<fn>"))
            .field("record_every", &self.record_every)
            .finish()
    }
}

impl<T> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            scheme: Scheme::TransportRk2Source,
            forcing: None,
            record_every: 1,
        }
    }
}

impl<T> SolverConfig<T> {
    pub fn recording_every(record_every: usize) -> Self {
        Self {
            record_every,
            ..Self::default()
        }
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing<T>>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

const PAR_MIN_LEN: usize = 512;

#[inline]
fn source_rhs<T: Real>(
    u: Cplx<T>,
    v: Cplx<T>,
    p: &ModelParams<T>,
    forcing: Option<(Cplx<T>, Cplx<T>)>,
) -> (Cplx<T>, Cplx<T>) {
    let i = cplx(T::zero(), T::one());
    let (n1, n2) = nonlinear_terms(u, v, p);
    let (mut a, mut b) = (v * p.m - n1, u * p.m - n2);
    if let Some((f1, f2)) = forcing {
        a += f1;
        b += f2;
    }
    (i * a, i * b)
}

/// Explicit midpoint over `[t, t + h]` at every site.
fn source_substep<T: Real>(
    grid: &GridSpec<T>,
    u: &mut [Cplx<T>],
    v: &mut [Cplx<T>],
    t: T,
    h: T,
    p: &ModelParams<T>,
    forcing: Option<&dyn Forcing<T>>,
) {
    let half = h / T::lit(2.0);
    u.par_iter_mut()
        .zip(v.par_iter_mut())
        .enumerate()
        .with_min_len(PAR_MIN_LEN)
        .for_each(|(i, (ui, vi))| {
            let x = grid.x(i);
            let (u0, v0) = (*ui, *vi);
            let (ku, kv) = source_rhs(u0, v0, p, forcing.map(|f| f.eval(x, t)));
            let (um, vm) = (u0 + ku * half, v0 + kv * half);
            let (ku, kv) = source_rhs(um, vm, p, forcing.map(|f| f.eval(x, t + half)));
            *ui = u0 + ku * h;
            *vi = v0 + kv * h;
        });
}

/// Shifts `u` one cell right and `v` one cell left.
fn transport<T: Real>(boundary: Boundary, u: &mut [Cplx<T>], v: &mut [Cplx<T>]) {
    u.rotate_right(1);
    v.rotate_left(1);
    if boundary == Boundary::ZeroInflow {
        let z = Cplx::new(T::zero(), T::zero());
        u[0] = z;
        let last = v.len() - 1;
        v[last] = z;
    }
}

/// Advances `f` by one step `dt = dx`.
pub fn step<T: Real>(f: &SpinorField<T>, p: &ModelParams<T>, cfg: &SolverConfig<T>) -> Result<SpinorField<T>> {
    let mut next = f.clone();
    step_in_place(&mut next, p, cfg)?;
    Ok(next)
}

fn step_in_place<T: Real>(f: &mut SpinorField<T>, p: &ModelParams<T>, cfg: &SolverConfig<T>) -> Result<()> {
    let grid = f.grid;
    assert!(grid.dt() == grid.dx, "light-cone lattice requires dt = dx");
    let h = grid.dt();
    let half = h / T::lit(2.0);
    let forcing = cfg.forcing.as_deref();
    source_substep(&grid, &mut f.u, &mut f.v, f.t, half, p, forcing);
    transport(grid.boundary, &mut f.u, &mut f.v);
    source_substep(&grid, &mut f.u, &mut f.v, f.t + half, half, p, forcing);
    let t_new = f.t + h;
    if let Some(site) =
        f.u.iter()
            .zip(&f.v)
            .position(|(a, b)| !(is_finite_c(*a) && is_finite_c(*b)))
    {
        return Err(Error::BlowUp {
            site,
            x: grid.x(site).as_f64(),
            t: t_new.as_f64(),
        });
    }
    f.t = t_new;
    Ok(())
}

/// Snapshots of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub snapshots: Vec<SpinorField<T>>,
    /// Steps actually taken.
    pub steps: usize,
    pub requested_horizon: T,
    /// `true` when the horizon was not a whole number of steps and was
    /// rounded down.
    pub rounded_down: bool,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &SpinorField<T> {
        self.snapshots
            .last()
            .expect("a trajectory holds at least the initial field")
    }

    pub fn final_time(&self) -> T {
        self.last().t
    }
}

/// Blow-up (or bad input) during [`evolve`], with everything recorded so far.
#[derive(Clone, Debug)]
pub struct EvolveError<T> {
    pub error: Error,
    pub partial: Trajectory<T>,
}

impl<T> fmt::Display for EvolveError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} steps)", self.error, self.partial.steps)
    }
}

impl<T: fmt::Debug> std::error::Error for EvolveError<T> {}

impl<T> From<EvolveError<T>> for Error {
    fn from(e: EvolveError<T>) -> Self {
        e.error
    }
}

/// Whole steps in `horizon`, tolerating `1e-12` relative rounding.
pub fn steps_for<T: Real>(grid: &GridSpec<T>, horizon: T) -> Result<(usize, bool)> {
    if !(horizon >= T::zero()) || !horizon.is_finite() {
        return Err(Error::Config(format!("horizon must be finite and >= 0, got {horizon}")));
    }
    let s = (horizon / grid.dt()).as_f64();
    let r = s.round();
    if (s - r).abs() <= 1e-12 * s.max(1.0) {
        Ok((r as usize, false))
    } else {
        Ok((s.floor() as usize, true))
    }
}

/// Steps a field forward one `dt` at a time; times are set as
/// `t0 + n dt` so they do not accumulate rounding.
pub struct Stepper<'a, T: Real> {
    field: SpinorField<T>,
    params: &'a ModelParams<T>,
    cfg: &'a SolverConfig<T>,
    t0: T,
    n: usize,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(f0: SpinorField<T>, params: &'a ModelParams<T>, cfg: &'a SolverConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            t0: f0.t,
            field: f0,
            params,
            cfg,
            n: 0,
        })
    }

    pub fn field(&self) -> &SpinorField<T> {
        &self.field
    }

    pub fn steps_taken(&self) -> usize {
        self.n
    }

    pub fn advance(&mut self) -> Result<&SpinorField<T>> {
        step_in_place(&mut self.field, self.params, self.cfg)?;
        self.n += 1;
        self.field.t = self.t0 + T::from_count(self.n) * self.field.grid.dt();
        Ok(&self.field)
    }

    pub fn into_field(self) -> SpinorField<T> {
        self.field
    }
}

/// Runs to `horizon`, recording the initial field, every
/// `cfg.record_every`-th step, and the final step.
pub fn evolve<T: Real>(
    f0: &SpinorField<T>,
    p: &ModelParams<T>,
    cfg: &SolverConfig<T>,
    horizon: T,
) -> Result<Trajectory<T>, EvolveError<T>> {
    let mut traj = Trajectory {
        snapshots: vec![f0.clone()],
        steps: 0,
        requested_horizon: horizon,
        rounded_down: false,
    };
    let fail = |error: Error, traj: Trajectory<T>| EvolveError { error, partial: traj };
    let (steps, rounded) = match steps_for(&f0.grid, horizon) {
        Ok(s) => s,
        Err(e) => return Err(fail(e, traj)),
    };
    traj.rounded_down = rounded;
    let mut stepper = match Stepper::new(f0.clone(), p, cfg) {
        Ok(s) => s,
        Err(e) => return Err(fail(e, traj)),
    };
    for n in 1..=steps {
        match stepper.advance() {
            Ok(f) => {
                if n % cfg.record_every == 0 || n == steps {
                    traj.snapshots.push(f.clone());
                }
            }
            Err(e) => return Err(fail(e, traj)),
        }
        traj.steps = n;
    }
    Ok(traj)
}
