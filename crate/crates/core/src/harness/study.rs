use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{squared_distance_on, GridSpec, InitialDatum, SpinorField};
use crate::harness::{mollify_with, Kernel};
use crate::model::ModelParams;
use crate::scalar::Real;
use crate::solver::{steps_for, SolverConfig, Stepper};

/// What the distances in a [`ConvergenceTable`] compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Level `j` against level `j + 1` of one mollifier family.
    Consecutive,
    /// Level `j` of one family against level `j` of another.
    CrossFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub comparison: Comparison,
    pub epsilons: Vec<f64>,
    /// Max over recorded times of the L² field distance.
    pub pair_distances: Vec<f64>,
    /// Space-time L² distance of the products `u v`.
    pub product_distances: Vec<f64>,
    /// Level `j` against `j + 2` (consecutive studies only), for checking
    /// the triangle inequality.
    pub skip_distances: Vec<f64>,
}

fn check_epsilons<T: Real>(eps: &[T], grid: &GridSpec<T>) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Config("at least one mollifier radius is required".into()));
    }
    if eps.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Config("mollifier radii must be non-increasing".into()));
    }
    if let Some(e) = eps
        .iter()
        .find(|e| **e < T::lit(2.0) * grid.dx * (T::one() - T::lit(1e-12)))
    {
        return Err(Error::Resolution(format!(
            "mollifier radius {e} is below two grid cells (dx = {})",
            grid.dx
        )));
    }
    Ok(())
}

/// `sum |uA vA - uB vB|^2 dx` at one time.
fn product_gap<T: Real>(a: &SpinorField<T>, b: &SpinorField<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.grid.n_points {
        s += (a.u[i] * a.v[i] - b.u[i] * b.v[i]).norm_sqr();
    }
    s * a.grid.dx
}

/// Evolves every field in lockstep and folds a per-step measurement over
/// the given index pairs: the max of the L² distance and the trapezoid
/// time integral of the product gap.
fn lockstep<T: Real>(
    fields: Vec<SpinorField<T>>,
    pairs: &[(usize, usize)],
    p: &ModelParams<T>,
    horizon: T,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = fields[0].grid;
    let (steps, _) = steps_for(&grid, horizon)?;
    let cfg = SolverConfig::default();
    let mut steppers = fields
        .into_iter()
        .map(|f| Stepper::new(f, p, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let n_all = grid.n_points - 1;
    let dt = grid.dt().as_f64();
    let mut dist = vec![0.0f64; pairs.len()];
    let mut prod = vec![0.0f64; pairs.len()];
    let mut prev_gap = vec![0.0f64; pairs.len()];
    for n in 0..=steps {
        if n > 0 {
            let results: Vec<Result<()>> = steppers.par_iter_mut().map(|s| s.advance().map(|_| ())).collect();
            for (level, r) in results.into_iter().enumerate() {
                r.map_err(|e| Error::Level {
                    level,
                    source: Box::new(e),
                })?;
            }
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let (a, b) = (steppers[i].field(), steppers[j].field());
            let d = squared_distance_on(a, b, 0, n_all).sqrt().as_f64();
            dist[k] = dist[k].max(d);
            let g = product_gap(a, b).as_f64();
            if n > 0 {
                prod[k] += 0.5 * dt * (prev_gap[k] + g);
            }
            prev_gap[k] = g;
        }
    }
    Ok((dist, prod.into_iter().map(f64::sqrt).collect()))
}

/// Evolves the mollified data at each radius and measures how consecutive
/// levels approach each other.
pub fn convergence_study<T: Real>(
    datum: &InitialDatum<T>,
    epsilons: &[T],
    kernel: Kernel,
    p: &ModelParams<T>,
    horizon: T,
    grid: &GridSpec<T>,
) -> Result<ConvergenceTable> {
    check_epsilons(epsilons, grid)?;
    let fields = epsilons
        .iter()
        .map(|e| mollify_with(datum, *e, grid, kernel))
        .collect::<Result<Vec<_>>>()?;
    let l = fields.len();
    let mut pairs: Vec<(usize, usize)> = (0..l.saturating_sub(1)).map(|j| (j, j + 1)).collect();
    pairs.extend((0..l.saturating_sub(2)).map(|j| (j, j + 2)));
    let (dist, prod) = lockstep(fields, &pairs, p, horizon)?;
    let split = l.saturating_sub(1);
    Ok(ConvergenceTable {
        comparison: Comparison::Consecutive,
        epsilons: epsilons.iter().map(|e| e.as_f64()).collect(),
        pair_distances: dist[..split].to_vec(),
        product_distances: prod[..split].to_vec(),
        skip_distances: dist[split..].to_vec(),
    })
}

/// Evolves two mollifier families side by side and measures the distance
/// between them at each radius.
pub fn uniqueness_probe<T: Real>(
    datum: &InitialDatum<T>,
    family_a: Kernel,
    family_b: Kernel,
    epsilons: &[T],
    p: &ModelParams<T>,
    horizon: T,
    grid: &GridSpec<T>,
) -> Result<ConvergenceTable> {
    check_epsilons(epsilons, grid)?;
    let l = epsilons.len();
    let mut fields = Vec::with_capacity(2 * l);
    for kernel in [family_a, family_b] {
        for e in epsilons {
            fields.push(mollify_with(datum, *e, grid, kernel)?);
        }
    }
    let pairs: Vec<(usize, usize)> = (0..l).map(|j| (j, l + j)).collect();
    let (dist, prod) = lockstep(fields, &pairs, p, horizon)?;
    Ok(ConvergenceTable {
        comparison: Comparison::CrossFamily,
        epsilons: epsilons.iter().map(|e| e.as_f64()).collect(),
        pair_distances: dist,
        product_distances: prod,
        skip_distances: Vec::new(),
    })
}
