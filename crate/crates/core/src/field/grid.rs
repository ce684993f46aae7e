use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the lattice window treats values that leave it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Values leaving one end re-enter at the other.
    Periodic,
    /// Values leaving the window are dropped; cells shifted in are zero.
    ZeroInflow,
}

/// Uniform lattice `x_i = x_min + i dx`, `i in 0..n_points`.
///
/// The time step is locked to the spacing: both characteristic families
/// `x ± t = const` then pass through lattice points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_points: usize,
    pub dx: T,
    pub boundary: Boundary,
}

impl<T: Real> GridSpec<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize, boundary: Boundary) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config("grid extent must be finite".into()));
        }
        if x_max <= x_min {
            return Err(Error::Config(format!(
                "grid extent must be positive (x_min = {x_min}, x_max = {x_max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n_points}")));
        }
        let dx = (x_max - x_min) / T::from_count(n_points);
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx,
            boundary,
        })
    }

    /// Time step; always exactly `dx`.
    #[inline]
    pub fn dt(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x_min + T::from_count(i) * self.dx
    }

    /// Lattice coordinates `x_0 .. x_{n-1}`.
    pub fn sites(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Index of `x` if it lies on a lattice site (within `1e-6` cells).
    pub fn site_index(&self, x: T) -> Option<usize> {
        let s = (x - self.x_min) / self.dx;
        let r = s.round();
        if (s - r).abs() > T::lit(1e-6) || r < T::zero() {
            return None;
        }
        let i = r.to_usize()?;
        (i < self.n_points).then_some(i)
    }

    /// Number of whole steps in `t`, if `t` is a lattice time.
    pub fn step_count(&self, t: T) -> Option<usize> {
        let s = t / self.dt();
        let r = s.round();
        if (s - r).abs() > T::lit(1e-6) || r < T::zero() {
            return None;
        }
        r.to_usize()
    }

    /// Same window with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Self {
        Self::new(self.x_min, self.x_max, self.n_points * factor, self.boundary)
            .expect("refining a valid grid stays valid")
    }

    pub(crate) fn same_lattice(&self, other: &Self) -> bool {
        self.n_points == other.n_points
            && self.boundary == other.boundary
            && self.x_min == other.x_min
            && self.x_max == other.x_max
    }
}

/// Builds a grid; see [`GridSpec::new`].
pub fn make_grid<T: Real>(x_min: T, x_max: T, n_points: usize, boundary: Boundary) -> Result<GridSpec<T>> {
    GridSpec::new(x_min, x_max, n_points, boundary)
}
