use crate::model::{nonlinear_terms, ModelParams};
use crate::scalar::{cplx, Cplx, Real};
use crate::solver::{FieldProvider, Forcing};

/// First derivatives of a prescribed pair `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates<T> {
    pub u_t: Cplx<T>,
    pub u_x: Cplx<T>,
    pub v_t: Cplx<T>,
    pub v_x: Cplx<T>,
}

/// A smooth pair with known derivatives, used to manufacture forcing.
pub trait ExactSolution<T>: FieldProvider<T> + Send {
    fn rates(&self, x: T, t: T) -> Rates<T>;
}

/// Forcing that makes a prescribed pair an exact solution:
///
/// ```text
/// F1 = -m v + N1(u, v) - i(u_t + u_x)
/// F2 = -m u + N2(u, v) - i(v_t - v_x)
/// ```
pub struct ManufacturedForcing<S, T> {
    pub solution: S,
    pub params: ModelParams<T>,
}

impl<S, T> ManufacturedForcing<S, T> {
    pub fn new(solution: S, params: ModelParams<T>) -> Self {
        Self { solution, params }
    }
}

impl<T: Real, S: ExactSolution<T>> Forcing<T> for ManufacturedForcing<S, T> {
    fn eval(&self, x: T, t: T) -> (Cplx<T>, Cplx<T>) {
        let i = cplx(T::zero(), T::one());
        let p = &self.params;
        let (u, v) = self.solution.eval(x, t);
        let r = self.solution.rates(x, t);
        let (n1, n2) = nonlinear_terms(u, v, p);
        (n1 - v * p.m - i * (r.u_t + r.u_x), n2 - u * p.m - i * (r.v_t - r.v_x))
    }
}
