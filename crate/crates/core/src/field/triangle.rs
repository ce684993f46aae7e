use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::scalar::Real;

/// Backward light cone over `[a, b]` starting at time `t0`.
///
/// At time `t` in `[t0, t0 + (b - a)/2]` its cross-section is the interval
/// `(a - t0 + t, b + t0 - t)`; the apex sits at `((a + b)/2, t0 + (b - a)/2)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TriangleDomain<T> {
    pub a: T,
    pub b: T,
    pub t0: T,
}

/// Lattice indices of a triangle: base corners and starting step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeTriangle {
    pub ia: usize,
    pub ib: usize,
    pub n0: usize,
}

impl LatticeTriangle {
    /// Inclusive site range of the cross-section `n` steps after the base,
    /// or `None` once the cone has closed.
    pub fn section(&self, n: usize) -> Option<(usize, usize)> {
        let lo = self.ia + n;
        let hi = self.ib.checked_sub(n)?;
        (lo <= hi).then_some((lo, hi))
    }

    /// Number of steps from the base to the apex (floor when the apex is
    /// not a lattice time).
    pub fn height_steps(&self) -> usize {
        (self.ib - self.ia) / 2
    }
}

impl<T: Real> TriangleDomain<T> {
    pub fn new(a: T, b: T, t0: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && t0.is_finite()) {
            return Err(Error::Config("triangle corners must be finite".into()));
        }
        if a >= b {
            return Err(Error::Config(format!("triangle needs a < b (a = {a}, b = {b})")));
        }
        if t0 < T::zero() {
            return Err(Error::Config(format!("triangle needs t0 >= 0, got {t0}")));
        }
        Ok(Self { a, b, t0 })
    }

    pub fn apex_time(&self) -> T {
        self.t0 + (self.b - self.a) / T::lit(2.0)
    }

    /// Continuum cross-section at time `t`, or `None` outside the time span.
    pub fn interval_at(&self, t: T) -> Option<(T, T)> {
        if t < self.t0 || t > self.apex_time() {
            return None;
        }
        Some((self.a - self.t0 + t, self.b + self.t0 - t))
    }

    /// Snaps the corners onto `grid`; corners must be lattice points inside
    /// the window.
    pub fn on_lattice(&self, grid: &GridSpec<T>) -> Result<LatticeTriangle> {
        let ia = grid
            .site_index(self.a)
            .ok_or_else(|| Error::Usage(format!("triangle corner a = {} is not a lattice site", self.a)))?;
        let ib = grid
            .site_index(self.b)
            .ok_or_else(|| Error::Usage(format!("triangle corner b = {} is not a lattice site", self.b)))?;
        let n0 = grid
            .step_count(self.t0)
            .ok_or_else(|| Error::Usage(format!("triangle start t0 = {} is not a lattice time", self.t0)))?;
        Ok(LatticeTriangle { ia, ib, n0 })
    }
}
