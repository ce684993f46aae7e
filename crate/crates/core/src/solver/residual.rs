use crate::error::Result;
use crate::field::GridSpec;
use crate::model::{nonlinear_terms, ModelParams};
use crate::scalar::{cplx, Cplx, Real};
use crate::solver::steps_for;

/// A field given as a function of `(x, t)`.
pub trait FieldProvider<T>: Sync {
    fn eval(&self, x: T, t: T) -> (Cplx<T>, Cplx<T>);
}

impl<T, F> FieldProvider<T> for F
where
    F: Fn(T, T) -> (Cplx<T>, Cplx<T>) + Sync,
{
    fn eval(&self, x: T, t: T) -> (Cplx<T>, Cplx<T>) {
        self(x, t)
    }
}

/// Space-time L² norms of the unforced equations' residuals,
///
/// ```text
/// i(u_t + u_x) + m v - N1,   i(v_t - v_x) + m u - N2,
/// ```
///
/// with the transport derivatives taken as centred differences along the
/// characteristics through each lattice point, e.g.
/// `(u(x+dx, t+dt) - u(x-dx, t-dt)) / (2 dt)`. Interior lattice times of
/// `[0, horizon]` are used.
pub fn pde_residual<T: Real, P: FieldProvider<T> + ?Sized>(
    candidate: &P,
    p: &ModelParams<T>,
    grid: &GridSpec<T>,
    horizon: T,
) -> Result<(T, T)> {
    let (steps, _) = steps_for(grid, horizon)?;
    let h = grid.dt();
    let i_unit = cplx(T::zero(), T::one());
    let inv_2h = T::one() / (T::lit(2.0) * h);
    let (mut su, mut sv) = (T::zero(), T::zero());
    for n in 1..steps {
        let t = T::from_count(n) * h;
        for j in 0..grid.n_points {
            let x = grid.x(j);
            let (u, v) = candidate.eval(x, t);
            let (u_fwd, _) = candidate.eval(x + h, t + h);
            let (u_bwd, _) = candidate.eval(x - h, t - h);
            let (_, v_fwd) = candidate.eval(x - h, t + h);
            let (_, v_bwd) = candidate.eval(x + h, t - h);
            let (n1, n2) = nonlinear_terms(u, v, p);
            let ru = i_unit * (u_fwd - u_bwd) * inv_2h + v * p.m - n1;
            let rv = i_unit * (v_fwd - v_bwd) * inv_2h + u * p.m - n2;
            su += ru.norm_sqr();
            sv += rv.norm_sqr();
        }
    }
    let w = grid.dx * h;
    Ok(((su * w).sqrt(), (sv * w).sqrt()))
}
