//! Lattice, spinor field and initial-datum representations.
//!
//! Every reduction in this module sums left to right over lattice sites so
//! results do not depend on thread count.

mod datum;
mod grid;
mod triangle;

pub use datum::{sample_initial, InitialDatum, Profile};
pub use grid::{make_grid, Boundary, GridSpec};
pub use triangle::{LatticeTriangle, TriangleDomain};

use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Cplx, Real};

/// The pair `(u, v)` on a lattice at one time level. `u` rides the
/// right-moving characteristic, `v` the left-moving one.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField<T> {
    pub grid: GridSpec<T>,
    pub t: T,
    pub u: Vec<Cplx<T>>,
    pub v: Vec<Cplx<T>>,
}

impl<T: Real> SpinorField<T> {
    pub fn new(grid: GridSpec<T>, t: T, u: Vec<Cplx<T>>, v: Vec<Cplx<T>>) -> Result<Self> {
        if u.len() != grid.n_points || v.len() != grid.n_points {
            return Err(Error::Config(format!(
                "field components have lengths ({}, {}) but the grid has {} points",
                u.len(),
                v.len(),
                grid.n_points
            )));
        }
        if let Some(i) = u
            .iter()
            .zip(&v)
            .position(|(a, b)| !(is_finite_c(*a) && is_finite_c(*b)))
        {
            return Err(Error::Config(format!("non-finite field value at site {i}")));
        }
        if !t.is_finite() {
            return Err(Error::Config("field time must be finite".into()));
        }
        Ok(Self { grid, t, u, v })
    }

    pub fn zeros(grid: GridSpec<T>, t: T) -> Self {
        let z = vec![Cplx::new(T::zero(), T::zero()); grid.n_points];
        Self {
            grid,
            t,
            u: z.clone(),
            v: z,
        }
    }

    /// `|u_i|^2 + |v_i|^2`.
    #[inline]
    pub fn density(&self, i: usize) -> T {
        self.u[i].norm_sqr() + self.v[i].norm_sqr()
    }

    /// Total charge `sum (|u|^2 + |v|^2) dx`.
    pub fn charge(&self) -> T {
        self.charge_on(0, self.grid.n_points - 1)
    }

    /// Charge on the inclusive site range `[lo, hi]`.
    pub fn charge_on(&self, lo: usize, hi: usize) -> T {
        let mut s = T::zero();
        for i in lo..=hi {
            s += self.density(i);
        }
        s * self.grid.dx
    }

    pub fn max_abs_u(&self) -> T {
        self.u.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_v(&self) -> T {
        self.v.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Multiplies both components by `z`.
    pub fn scaled(&self, z: Cplx<T>) -> Self {
        Self {
            grid: self.grid,
            t: self.t,
            u: self.u.iter().map(|a| *a * z).collect(),
            v: self.v.iter().map(|a| *a * z).collect(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.same_lattice(&other.grid) {
            return Err(Error::Usage("fields live on different grids".into()));
        }
        if (self.t - other.t).abs() > T::lit(1e-9) * self.grid.dt() {
            return Err(Error::Usage(format!(
                "fields are at different times ({} vs {})",
                self.t, other.t
            )));
        }
        Ok(())
    }
}

/// Sum of `|uA - uB|^2 + |vA - vB|^2` over `[lo, hi]`, times `dx`.
pub(crate) fn squared_distance_on<T: Real>(a: &SpinorField<T>, b: &SpinorField<T>, lo: usize, hi: usize) -> T {
    let mut s = T::zero();
    for i in lo..=hi {
        s += (a.u[i] - b.u[i]).norm_sqr() + (a.v[i] - b.v[i]).norm_sqr();
    }
    s * a.grid.dx
}

/// Discrete L² distance between two fields on the same grid at the same
/// time, optionally restricted to a triangle's cross-section at that time.
pub fn l2_distance<T: Real>(a: &SpinorField<T>, b: &SpinorField<T>, window: Option<&TriangleDomain<T>>) -> Result<T> {
    a.check_compatible(b)?;
    let (lo, hi) = match window {
        None => (0, a.grid.n_points - 1),
        Some(dom) => match section_of(dom, &a.grid, a.t)? {
            Some(r) => r,
            None => return Ok(T::zero()),
        },
    };
    Ok(squared_distance_on(a, b, lo, hi).sqrt())
}

/// Cross-section of `dom` at lattice time `t` as an inclusive site range.
pub(crate) fn section_of<T: Real>(dom: &TriangleDomain<T>, grid: &GridSpec<T>, t: T) -> Result<Option<(usize, usize)>> {
    let lt = dom.on_lattice(grid)?;
    let n = grid
        .step_count(t)
        .ok_or_else(|| Error::Usage(format!("time {t} is not a lattice time")))?;
    if n < lt.n0 || t > dom.apex_time() + T::lit(1e-9) * grid.dt() {
        return Err(Error::Usage(format!(
            "time {t} is outside the triangle's span [{}, {}]",
            dom.t0,
            dom.apex_time()
        )));
    }
    Ok(lt.section(n - lt.n0))
}
