//! Charge, dissipation and interaction functionals on cone cross-sections,
//! and audits of the inequalities they satisfy.
//!
//! For a cross-section `I` (inclusive lattice sites) of one field:
//!
//! ```text
//! L0 = sum_I (|u|^2 + |v|^2) dx
//! D0 = sum_I |u|^2 |v|^2 dx
//! Q0 = sum_{i<j in I} |u_i|^2 |v_j|^2 dx^2
//! ```
//!
//! and for a pair with `U = uA - uB`, `V = vA - vB`:
//!
//! ```text
//! L1 = sum_I (|U|^2 + |V|^2) dx
//! D1 = sum_I r2(i, i) dx
//! Q1 = sum_{i<j in I} r2(i, j) dx^2
//! ```
//!
//! The double sums are evaluated in one right-to-left pass with suffix sums;
//! `*_naive` variants keep the quadratic double loop for cross-checking.

mod audit;

pub use audit::{
    bony_decay_audit, charge_audit, gronwall_audit, pointwise_audit, triangle_charge_audit, AuditTolerance,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{section_of, SpinorField, TriangleDomain};
use crate::model::{r2_two_point, EstimateConstants};
use crate::scalar::Real;

/// Where functionals are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain<T> {
    FullLine,
    Triangle(TriangleDomain<T>),
}

impl<T: Real> Domain<T> {
    /// Inclusive site range at the field's time; `None` for an empty
    /// cross-section.
    pub fn section(&self, f: &SpinorField<T>) -> Result<Option<(usize, usize)>> {
        match self {
            Domain::FullLine => Ok(Some((0, f.grid.n_points - 1))),
            Domain::Triangle(dom) => section_of(dom, &f.grid, f.t),
        }
    }

    /// Whether `t` lies in the domain's time span.
    pub fn covers(&self, t: T, dt: T) -> bool {
        match self {
            Domain::FullLine => true,
            Domain::Triangle(d) => {
                let eps = T::lit(1e-9) * dt;
                t >= d.t0 - eps && t <= d.apex_time() + eps
            }
        }
    }

    pub fn start_time(&self) -> Option<T> {
        match self {
            Domain::FullLine => None,
            Domain::Triangle(d) => Some(d.t0),
        }
    }
}

/// `(L, D, Q)` on one cross-section. `degenerate` marks an empty section.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Functionals<T> {
    pub l: T,
    pub d: T,
    pub q: T,
    pub degenerate: bool,
}

impl<T: Real> Functionals<T> {
    fn empty() -> Self {
        Self {
            l: T::zero(),
            d: T::zero(),
            q: T::zero(),
            degenerate: true,
        }
    }
}

/// `(L0, D0, Q0)` of `f` on `dom`.
pub fn base_functionals<T: Real>(f: &SpinorField<T>, dom: &Domain<T>) -> Result<Functionals<T>> {
    let Some((lo, hi)) = dom.section(f)? else {
        return Ok(Functionals::empty());
    };
    let dx = f.grid.dx;
    let (mut l, mut d, mut q, mut suffix_v) = (T::zero(), T::zero(), T::zero(), T::zero());
    for i in (lo..=hi).rev() {
        let (uu, vv) = (f.u[i].norm_sqr(), f.v[i].norm_sqr());
        l += uu + vv;
        d += uu * vv;
        q += uu * suffix_v;
        suffix_v += vv;
    }
    Ok(Functionals {
        l: l * dx,
        d: d * dx,
        q: q * dx * dx,
        degenerate: false,
    })
}

/// Quadratic-time reference for [`base_functionals`].
pub fn base_functionals_naive<T: Real>(f: &SpinorField<T>, dom: &Domain<T>) -> Result<Functionals<T>> {
    let Some((lo, hi)) = dom.section(f)? else {
        return Ok(Functionals::empty());
    };
    let dx = f.grid.dx;
    let (mut l, mut d, mut q) = (T::zero(), T::zero(), T::zero());
    for i in lo..=hi {
        let (uu, vv) = (f.u[i].norm_sqr(), f.v[i].norm_sqr());
        l += uu + vv;
        d += uu * vv;
        for j in i + 1..=hi {
            q += uu * f.v[j].norm_sqr();
        }
    }
    Ok(Functionals {
        l: l * dx,
        d: d * dx,
        q: q * dx * dx,
        degenerate: false,
    })
}

/// `(L1, D1, Q1)` of the pair `(a, b)` on `dom`.
pub fn difference_functionals<T: Real>(
    a: &SpinorField<T>,
    b: &SpinorField<T>,
    dom: &Domain<T>,
) -> Result<Functionals<T>> {
    a.check_compatible(b)?;
    let Some((lo, hi)) = dom.section(a)? else {
        return Ok(Functionals::empty());
    };
    let dx = a.grid.dx;
    let (mut l, mut d, mut q) = (T::zero(), T::zero(), T::zero());
    // suffix sums of |vA|^2 + |vB|^2 and |V|^2 over sites right of i
    let (mut s_vv, mut s_dv) = (T::zero(), T::zero());
    for i in (lo..=hi).rev() {
        let du = (a.u[i] - b.u[i]).norm_sqr();
        let dv = (a.v[i] - b.v[i]).norm_sqr();
        let uu = a.u[i].norm_sqr() + b.u[i].norm_sqr();
        let vv = a.v[i].norm_sqr() + b.v[i].norm_sqr();
        l += du + dv;
        d += du * vv + uu * dv;
        q += du * s_vv + uu * s_dv;
        s_vv += vv;
        s_dv += dv;
    }
    Ok(Functionals {
        l: l * dx,
        d: d * dx,
        q: q * dx * dx,
        degenerate: false,
    })
}

/// Quadratic-time reference for [`difference_functionals`], summing `r2`
/// point pair by point pair.
pub fn difference_functionals_naive<T: Real>(
    a: &SpinorField<T>,
    b: &SpinorField<T>,
    dom: &Domain<T>,
) -> Result<Functionals<T>> {
    a.check_compatible(b)?;
    let Some((lo, hi)) = dom.section(a)? else {
        return Ok(Functionals::empty());
    };
    let dx = a.grid.dx;
    let (mut l, mut d, mut q) = (T::zero(), T::zero(), T::zero());
    for i in lo..=hi {
        let du = a.u[i] - b.u[i];
        l += du.norm_sqr() + (a.v[i] - b.v[i]).norm_sqr();
        d += r2_two_point(du, a.u[i], b.u[i], a.v[i], b.v[i]);
        for j in i + 1..=hi {
            q += r2_two_point(du, a.u[i], b.u[i], a.v[j], b.v[j]);
        }
    }
    Ok(Functionals {
        l: l * dx,
        d: d * dx,
        q: q * dx * dx,
        degenerate: false,
    })
}

/// Running trapezoid integral of `y` over `t`, starting at zero.
pub(crate) fn cumulative_trapezoid<T: Real>(t: &[T], y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = T::zero();
    for k in 0..y.len() {
        if k > 0 {
            acc += (t[k] - t[k - 1]) * (y[k] + y[k - 1]) / T::lit(2.0);
        }
        out.push(acc);
    }
    out
}

/// Difference functionals along a pair of runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceTrace<T> {
    pub l1: Vec<T>,
    pub d1: Vec<T>,
    pub q1: Vec<T>,
    pub cum_d1: Vec<T>,
}

/// Functionals at every snapshot inside the domain's time span.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalTrace<T> {
    pub domain: Domain<T>,
    pub times: Vec<T>,
    pub l0: Vec<T>,
    pub d0: Vec<T>,
    pub q0: Vec<T>,
    pub cum_d0: Vec<T>,
    pub difference: Option<DifferenceTrace<T>>,
}

impl<T: Real> FunctionalTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn in_span<'a, T: Real>(snaps: &'a [SpinorField<T>], dom: &Domain<T>) -> Vec<&'a SpinorField<T>> {
    snaps.iter().filter(|s| dom.covers(s.t, s.grid.dt())).collect()
}

/// Base functionals of each snapshot that falls in `dom`'s time span.
pub fn functional_trace<T: Real>(snaps: &[SpinorField<T>], dom: &Domain<T>) -> Result<FunctionalTrace<T>> {
    let kept = in_span(snaps, dom);
    let mut tr = FunctionalTrace {
        domain: *dom,
        times: Vec::with_capacity(kept.len()),
        l0: Vec::with_capacity(kept.len()),
        d0: Vec::with_capacity(kept.len()),
        q0: Vec::with_capacity(kept.len()),
        cum_d0: Vec::new(),
        difference: None,
    };
    for s in kept {
        let f = base_functionals(s, dom)?;
        tr.times.push(s.t);
        tr.l0.push(f.l);
        tr.d0.push(f.d);
        tr.q0.push(f.q);
    }
    tr.cum_d0 = cumulative_trapezoid(&tr.times, &tr.d0);
    Ok(tr)
}

/// Traces of both runs of a pair plus their difference functionals. The
/// runs must have been recorded at the same times.
pub fn pair_trace<T: Real>(
    a: &[SpinorField<T>],
    b: &[SpinorField<T>],
    dom: &Domain<T>,
) -> Result<(FunctionalTrace<T>, FunctionalTrace<T>)> {
    let (ka, kb) = (in_span(a, dom), in_span(b, dom));
    if ka.len() != kb.len() {
        return Err(Error::Usage(format!(
            "paired runs have {} and {} snapshots in the domain",
            ka.len(),
            kb.len()
        )));
    }
    let mut ta = functional_trace(a, dom)?;
    let tb = functional_trace(b, dom)?;
    let mut diff = DifferenceTrace {
        l1: Vec::with_capacity(ka.len()),
        d1: Vec::with_capacity(ka.len()),
        q1: Vec::with_capacity(ka.len()),
        cum_d1: Vec::new(),
    };
    for (sa, sb) in ka.into_iter().zip(kb) {
        let f = difference_functionals(sa, sb, dom)?;
        diff.l1.push(f.l);
        diff.d1.push(f.d);
        diff.q1.push(f.q);
    }
    diff.cum_d1 = cumulative_trapezoid(&ta.times, &diff.d1);
    ta.difference = Some(diff);
    Ok((ta, tb))
}

/// `L1 + K Q1` at every trace time.
pub fn glimm_functional<T: Real>(tr: &FunctionalTrace<T>, k: &EstimateConstants<T>) -> Option<Vec<T>> {
    let d = tr.difference.as_ref()?;
    Some(d.l1.iter().zip(&d.q1).map(|(l, q)| *l + k.k * *q).collect())
}
