use crate::error::{Error, Result};
use crate::field::{GridSpec, SpinorField};
use crate::scalar::{cplx, Cplx, Real};

/// Shape of one component of the initial datum.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile<T> {
    Zero,
    Uniform {
        value: Cplx<T>,
    },
    /// `amplitude * exp(-((x - center)/width)^2) * exp(i wavenumber x)`.
    Gaussian {
        center: T,
        width: T,
        amplitude: Cplx<T>,
        wavenumber: T,
    },
    /// `amplitude` on the half-open interval `[left, right)`, zero elsewhere.
    Indicator {
        left: T,
        right: T,
        amplitude: Cplx<T>,
    },
    /// `amplitude * |x - center|^(-exponent)` for `|x - center| < radius`.
    ///
    /// Square integrable for `exponent < 1/2`. The singular site is evaluated
    /// at distance `dx/2`, the closest a cell midpoint can get.
    PowerSingularity {
        center: T,
        exponent: T,
        radius: T,
        amplitude: Cplx<T>,
    },
    /// Values given directly at the lattice sites.
    Sampled(Vec<Cplx<T>>),
    /// Pointwise sum of profiles.
    Sum(Vec<Profile<T>>),
}

impl<T: Real> Profile<T> {
    pub fn gaussian(center: T, width: T, amplitude: Cplx<T>) -> Self {
        Profile::Gaussian {
            center,
            width,
            amplitude,
            wavenumber: T::zero(),
        }
    }

    pub fn indicator(left: T, right: T, amplitude: T) -> Self {
        Profile::Indicator {
            left,
            right,
            amplitude: cplx(amplitude, T::zero()),
        }
    }

    fn validate(&self, grid: &GridSpec<T>) -> Result<()> {
        let finite = |z: &Cplx<T>| z.re.is_finite() && z.im.is_finite();
        match self {
            Profile::Zero => Ok(()),
            Profile::Uniform { value } if finite(value) => Ok(()),
            Profile::Gaussian {
                center,
                width,
                amplitude,
                wavenumber,
            } if center.is_finite()
                && *width > T::zero()
                && width.is_finite()
                && wavenumber.is_finite()
                && finite(amplitude) =>
            {
                Ok(())
            }
            Profile::Indicator { left, right, amplitude }
                if left.is_finite() && right.is_finite() && left < right && finite(amplitude) =>
            {
                Ok(())
            }
            Profile::PowerSingularity {
                center,
                exponent,
                radius,
                amplitude,
            } => {
                if !(*exponent > T::zero() && *exponent < T::lit(0.5)) {
                    return Err(Error::Config(format!(
                        "power singularity exponent must lie in (0, 1/2) for square integrability, got {exponent}"
                    )));
                }
                if !(center.is_finite() && *radius > T::zero() && finite(amplitude)) {
                    return Err(Error::Config("invalid power singularity parameters".into()));
                }
                Ok(())
            }
            Profile::Sampled(values) => {
                if values.len() != grid.n_points {
                    return Err(Error::Config(format!(
                        "sampled datum has {} values but the grid has {} points",
                        values.len(),
                        grid.n_points
                    )));
                }
                if values.iter().all(finite) {
                    Ok(())
                } else {
                    Err(Error::Config("sampled datum contains non-finite values".into()))
                }
            }
            Profile::Sum(parts) => parts.iter().try_for_each(|q| q.validate(grid)),
            other => Err(Error::Config(format!("invalid profile parameters: {other:?}"))),
        }
    }

    /// Value at lattice site `i` of `grid`.
    pub fn value_at(&self, grid: &GridSpec<T>, i: usize) -> Cplx<T> {
        let x = grid.x(i);
        match self {
            Profile::Zero => Cplx::new(T::zero(), T::zero()),
            Profile::Uniform { value } => *value,
            Profile::Gaussian {
                center,
                width,
                amplitude,
                wavenumber,
            } => {
                let s = (x - *center) / *width;
                let phase = *wavenumber * x;
                *amplitude * (-(s * s)).exp() * cplx(phase.cos(), phase.sin())
            }
            Profile::Indicator { left, right, amplitude } => {
                if x >= *left && x < *right {
                    *amplitude
                } else {
                    Cplx::new(T::zero(), T::zero())
                }
            }
            Profile::PowerSingularity {
                center,
                exponent,
                radius,
                amplitude,
            } => {
                let r = (x - *center).abs();
                if r >= *radius {
                    Cplx::new(T::zero(), T::zero())
                } else {
                    let r = r.max(grid.dx / T::lit(2.0));
                    *amplitude * r.powf(-*exponent)
                }
            }
            Profile::Sampled(values) => values[i],
            Profile::Sum(parts) => parts
                .iter()
                .fold(Cplx::new(T::zero(), T::zero()), |acc, q| acc + q.value_at(grid, i)),
        }
    }
}

/// Initial data `(u0, v0)`, one profile per component.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialDatum<T> {
    pub u: Profile<T>,
    pub v: Profile<T>,
}

impl<T: Real> InitialDatum<T> {
    pub fn zero() -> Self {
        Self {
            u: Profile::Zero,
            v: Profile::Zero,
        }
    }

    pub fn new(u: Profile<T>, v: Profile<T>) -> Self {
        Self { u, v }
    }
}

/// Point-samples `datum` at the lattice sites, giving the field at `t = 0`.
pub fn sample_initial<T: Real>(datum: &InitialDatum<T>, grid: &GridSpec<T>) -> Result<SpinorField<T>> {
    datum.u.validate(grid)?;
    datum.v.validate(grid)?;
    let u = (0..grid.n_points).map(|i| datum.u.value_at(grid, i)).collect();
    let v = (0..grid.n_points).map(|i| datum.v.value_at(grid, i)).collect();
    SpinorField::new(*grid, T::zero(), u, v)
}
