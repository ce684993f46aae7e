use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sample_initial, Boundary, GridSpec, InitialDatum, SpinorField};
use crate::scalar::{Cplx, Real};

/// Compactly supported smoothing kernel on `|s| < 1`, normalized after
/// discretization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `exp(-1 / (1 - s^2))`.
    #[default]
    Bump,
    /// `1 - |s|`.
    Triangle,
}

impl Kernel {
    pub fn profile<T: Real>(self, s: T) -> T {
        let a = s.abs();
        if a >= T::one() {
            return T::zero();
        }
        match self {
            Kernel::Bump => (-T::one() / (T::one() - a * a)).exp(),
            Kernel::Triangle => T::one() - a,
        }
    }

    /// Discrete weights `w_{-J..=J}` summing to one.
    pub fn weights<T: Real>(self, epsilon: T, dx: T) -> Vec<T> {
        let half = (epsilon / dx).ceil().to_usize().unwrap_or(0);
        let raw: Vec<T> = (0..=2 * half)
            .map(|j| {
                let offset = T::from_count(j) - T::from_count(half);
                self.profile(offset * dx / epsilon)
            })
            .collect();
        let mut total = T::zero();
        for w in &raw {
            total += *w;
        }
        raw.into_iter().map(|w| w / total).collect()
    }
}

/// Point-samples `datum` and smooths it with the bump kernel of radius
/// `epsilon`.
pub fn mollify<T: Real>(datum: &InitialDatum<T>, epsilon: T, grid: &GridSpec<T>) -> Result<SpinorField<T>> {
    mollify_with(datum, epsilon, grid, Kernel::Bump)
}

/// [`mollify`] with a chosen kernel. Outside the window the datum is taken
/// as zero, or wrapped on periodic grids.
pub fn mollify_with<T: Real>(
    datum: &InitialDatum<T>,
    epsilon: T,
    grid: &GridSpec<T>,
    kernel: Kernel,
) -> Result<SpinorField<T>> {
    if !(epsilon >= T::lit(2.0) * grid.dx * (T::one() - T::lit(1e-12))) {
        return Err(Error::Resolution(format!(
            "mollifier radius {epsilon} is below two grid cells (dx = {})",
            grid.dx
        )));
    }
    let raw = sample_initial(datum, grid)?;
    let w = kernel.weights(epsilon, grid.dx);
    let half = (w.len() - 1) / 2;
    let n = grid.n_points;
    let conv = |src: &[Cplx<T>]| -> Vec<Cplx<T>> {
        (0..n)
            .map(|i| {
                let mut acc = Cplx::new(T::zero(), T::zero());
                for (j, wj) in w.iter().enumerate() {
                    // source site i + half - j
                    let k = i as isize + half as isize - j as isize;
                    let val = match grid.boundary {
                        Boundary::Periodic => src[k.rem_euclid(n as isize) as usize],
                        Boundary::ZeroInflow if k >= 0 && (k as usize) < n => src[k as usize],
                        Boundary::ZeroInflow => continue,
                    };
                    acc += val * *wj;
                }
                acc
            })
            .collect()
    };
    SpinorField::new(*grid, T::zero(), conv(&raw.u), conv(&raw.v))
}
