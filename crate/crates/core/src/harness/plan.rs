//! Cone decomposition for the approximation argument: a tail cutoff `B`,
//! a small length `r` with `B + 2T = 2 N r`, and the lattice of triangles
//! `Delta(m r, (m + 4) r, j r)` used to propagate smallness upward in time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{SpinorField, TriangleDomain};
use crate::model::{EstimateConstants, ModelParams};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePlan {
    /// Tail cutoff.
    pub b: f64,
    /// Small-interval length.
    pub r: f64,
    /// `N` in `B + 2T = 2 N r`.
    pub n_tri: usize,
    pub horizon: f64,
    pub c0: f64,
    pub delta: f64,
    /// Charge of the limit datum outside `[-B, B]`.
    pub limit_tail: f64,
    /// Largest member charge outside `[-B, B]`.
    pub member_tail: f64,
    /// Largest weighted `4r`-window quantity for the limit datum.
    pub limit_window: f64,
    /// Largest weighted `4r`-window quantity over the members.
    pub member_window: f64,
}

impl ConePlan {
    /// Number of triangle rows `j = 0, 1, ...` needed to reach the horizon.
    pub fn levels(&self) -> usize {
        (self.horizon / self.r - 1e-9).ceil().max(0.0) as usize
    }

    /// `Delta(m r, (m + 4) r, j r)` for `-2N + j <= m <= 2N - 4 - j`, row by
    /// row. Generated lazily; fine data can need millions of triangles.
    pub fn triangles(&self) -> impl Iterator<Item = TriangleDomain<f64>> + '_ {
        let n = self.n_tri as i64;
        (0..self.levels() as i64).flat_map(move |j| {
            (-2 * n + j..=2 * n - 4 - j).map(move |m| {
                let r = self.r;
                TriangleDomain {
                    a: m as f64 * r,
                    b: (m + 4) as f64 * r,
                    t0: j as f64 * r,
                }
            })
        })
    }

    pub fn triangle_count(&self) -> usize {
        let n = self.n_tri as i64;
        (0..self.levels() as i64)
            .map(|j| (4 * n - 3 - 2 * j).max(0) as usize)
            .sum()
    }
}

/// `C0 = 1 + sup_k charge(member k) + charge(limit)`.
pub fn c0_for<T: Real>(limit: &SpinorField<T>, members: &[SpinorField<T>]) -> T {
    let sup = members.iter().fold(T::zero(), |m, f| m.max(f.charge()));
    T::one() + sup + limit.charge()
}

/// Prefix sums of the charge density, `P[i] = sum_{j < i} rho_j dx`.
fn prefix_charge<T: Real>(f: &SpinorField<T>) -> Vec<f64> {
    let dx = f.grid.dx.as_f64();
    let mut out = Vec::with_capacity(f.grid.n_points + 1);
    let mut acc = 0.0;
    out.push(acc);
    for i in 0..f.grid.n_points {
        acc += f.density(i).as_f64() * dx;
        out.push(acc);
    }
    out
}

/// Largest sum over `span` consecutive sites inside `[lo, hi]`.
fn max_window(prefix: &[f64], lo: usize, hi: usize, span: usize) -> f64 {
    let span = span.min(hi - lo + 1);
    (lo..=hi + 1 - span)
        .map(|i| prefix[i + span] - prefix[i])
        .fold(0.0, f64::max)
}

const MAX_N: usize = 1 << 40;

/// Chooses `B` (smallest lattice value with limit tail `< delta/4` and every
/// member tail `< delta/3`) and then the largest `r = (B + 2T)/(2N)` for which
/// every interval of length `<= 4r` inside `[-B - 4T, B + 4T]` satisfies
///
/// ```text
/// e^{2|beta| C0 + m T} (charge on the interval + m C0 |interval|) < delta/8
/// ```
///
/// for the limit datum and `< delta/4` for every member.
pub fn plan_cones<T: Real>(
    limit: &SpinorField<T>,
    members: &[SpinorField<T>],
    horizon: T,
    k: &EstimateConstants<T>,
    c0: T,
    p: &ModelParams<T>,
) -> Result<ConePlan> {
    let grid = limit.grid;
    if members.iter().any(|f| !f.grid.same_lattice(&grid)) {
        return Err(Error::Usage("cone planning needs every datum on the same grid".into()));
    }
    if !(horizon > T::zero()) {
        return Err(Error::Config(format!(
            "planning horizon must be positive, got {horizon}"
        )));
    }
    let (t, dx, delta) = (horizon.as_f64(), grid.dx.as_f64(), k.delta.as_f64());
    let (x_min, x_max) = (grid.x_min.as_f64(), grid.x(grid.n_points - 1).as_f64());
    let reach = (-x_min).min(x_max);
    let limit_prefix = prefix_charge(limit);
    let member_prefix: Vec<Vec<f64>> = members.iter().map(prefix_charge).collect();
    let total = |pr: &[f64]| pr[pr.len() - 1];
    let site_range = |half: f64| -> Result<(usize, usize)> {
        let lo = ((-half - x_min) / dx - 1e-9).ceil();
        let hi = ((half - x_min) / dx + 1e-9).floor();
        if lo < 0.0 || hi as usize >= grid.n_points {
            return Err(Error::Planning(format!(
                "[-{half}, {half}] does not fit in the grid window [{x_min}, {x_max}]; use a larger window or a smaller horizon"
            )));
        }
        Ok((lo as usize, hi as usize))
    };
    let tail = |pr: &[f64], lo: usize, hi: usize| (total(pr) - (pr[hi + 1] - pr[lo])).max(0.0);

    let mut j = 0usize;
    let (b, limit_tail, member_tail) = loop {
        let b = j as f64 * dx;
        if b + 4.0 * t > reach + 1e-9 * dx {
            return Err(Error::Planning(format!(
                "no tail cutoff B with [-B - 4T, B + 4T] inside the window [{x_min}, {x_max}] meets the tail \
                 conditions; use a larger window or a smaller horizon"
            )));
        }
        let (lo, hi) = site_range(b)?;
        let lt = tail(&limit_prefix, lo, hi);
        let mt = member_prefix.iter().map(|pr| tail(pr, lo, hi)).fold(0.0, f64::max);
        if lt < delta / 4.0 && mt < delta / 3.0 {
            break (b, lt, mt);
        }
        j += 1;
    };

    let (ilo, ihi) = site_range(b + 4.0 * t)?;
    let (beta, m, c0f) = (p.beta.abs().as_f64(), p.m.as_f64(), c0.as_f64());
    let weight = (2.0 * beta * c0f + m * t).exp();
    let measure = |n: usize| -> (f64, f64, f64) {
        let r = (b + 2.0 * t) / (2.0 * n as f64);
        let span = (4.0 * r / dx + 1e-9).floor() as usize + 1;
        let mass = m * c0f * 4.0 * r;
        let lw = weight * (max_window(&limit_prefix, ilo, ihi, span) + mass);
        let mw = member_prefix
            .iter()
            .map(|pr| weight * (max_window(pr, ilo, ihi, span) + mass))
            .fold(0.0, f64::max);
        (r, lw, mw)
    };
    let ok = |n: usize| {
        let (_, lw, mw) = measure(n);
        lw < delta / 8.0 && mw < delta / 4.0
    };
    // the windowed quantities shrink as N grows: double, then bisect
    let mut hi_n = 1usize;
    while !ok(hi_n) {
        if hi_n >= MAX_N {
            return Err(Error::Planning(format!(
                "no small-interval length r satisfies the smallness conditions (delta = {delta}); some cell \
                 carries too much charge for this grid"
            )));
        }
        hi_n *= 2;
    }
    let mut lo_n = hi_n / 2;
    while lo_n + 1 < hi_n {
        let mid = lo_n + (hi_n - lo_n) / 2;
        if ok(mid) {
            hi_n = mid;
        } else {
            lo_n = mid;
        }
    }
    let n_tri = if lo_n >= 1 && ok(lo_n) { lo_n } else { hi_n };
    let (r, limit_window, member_window) = measure(n_tri);
    Ok(ConePlan {
        b,
        r,
        n_tri,
        horizon: t,
        c0: c0f,
        delta,
        limit_tail,
        member_tail,
        limit_window,
        member_window,
    })
}
