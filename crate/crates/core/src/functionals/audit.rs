//! Inequality audits over recorded runs.
//!
//! Each audit measures `lhs - rhs` at every recorded lattice point or time
//! and passes when the worst excess stays within
//! `c_tol * dx * (floor + scale)`, where `scale` is the natural size of
//! the audited quantity: an initial charge, its square for the
//! interaction functional, and a multiple of the initial Glimm functional
//! for the difference estimates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Boundary, GridSpec, LatticeTriangle, SpinorField, TriangleDomain};
use crate::functionals::{functional_trace, glimm_functional, pair_trace, Domain, FunctionalTrace};
use crate::model::{EstimateConstants, ModelParams};
use crate::report::{AuditReport, Witness};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditTolerance {
    pub c_tol: f64,
    /// Additive floor on the scale. `1` makes the budget absolute for tiny
    /// data; `0` keeps it purely relative.
    pub floor: f64,
}

impl Default for AuditTolerance {
    fn default() -> Self {
        Self {
            c_tol: 10.0,
            floor: 1.0,
        }
    }
}

impl AuditTolerance {
    pub fn budget(&self, dx: f64, scale: f64) -> f64 {
        self.c_tol * dx * (self.floor + scale)
    }
}

/// Relative rounding allowance for inequalities that hold exactly in
/// discrete arithmetic.
const EXACT_SLACK: f64 = 1e-12;

fn grid_of<T: Real>(snaps: &[SpinorField<T>]) -> Result<GridSpec<T>> {
    snaps
        .first()
        .map(|s| s.grid)
        .ok_or_else(|| Error::Usage("no snapshots to audit".into()))
}

/// Snapshots of a triangle's time span keyed by steps since its base.
fn steps_in_triangle<'a, T: Real>(
    snaps: &'a [SpinorField<T>],
    lt: &LatticeTriangle,
) -> Result<BTreeMap<usize, &'a SpinorField<T>>> {
    let mut out = BTreeMap::new();
    for s in snaps {
        let n = s
            .grid
            .step_count(s.t)
            .ok_or_else(|| Error::Usage(format!("snapshot time {} is not a lattice time", s.t)))?;
        if n >= lt.n0 && n - lt.n0 <= lt.height_steps() {
            out.insert(n - lt.n0, s);
        }
    }
    if !out.contains_key(&0) {
        return Err(Error::Usage("snapshots do not include the triangle's base time".into()));
    }
    Ok(out)
}

/// Trapezoid integral of `g` over the sites `[lo, hi]`.
fn trapezoid_sites<T: Real>(lo: usize, hi: usize, dx: T, g: impl Fn(usize) -> T) -> T {
    if lo >= hi {
        return T::zero();
    }
    let mut s = (g(lo) + g(hi)) / T::lit(2.0);
    for i in lo + 1..hi {
        s += g(i);
    }
    s * dx
}

/// Checks the charge balance on a backward cone: the charge left inside at
/// `tau` plus twice the flux through both edges equals the base charge.
///
/// Needs a snapshot at every step of `[t0, tau]`. Edge fluxes and
/// cross-section charges use the trapezoid rule so the discrete balance is
/// second-order accurate.
pub fn triangle_charge_audit<T: Real>(
    snaps: &[SpinorField<T>],
    dom: &TriangleDomain<T>,
    tau: T,
    tol: &AuditTolerance,
) -> Result<AuditReport> {
    let grid = grid_of(snaps)?;
    let lt = dom.on_lattice(&grid)?;
    if tau < dom.t0 || tau > dom.apex_time() + T::lit(1e-9) * grid.dt() {
        return Err(Error::Usage(format!(
            "tau = {tau} outside the triangle's span [{}, {}]",
            dom.t0,
            dom.apex_time()
        )));
    }
    let n_tau = grid
        .step_count(tau)
        .ok_or_else(|| Error::Usage(format!("tau = {tau} is not a lattice time")))?
        - lt.n0;
    let by_step = steps_in_triangle(snaps, &lt)?;
    let mut fields = Vec::with_capacity(n_tau + 1);
    for n in 0..=n_tau {
        let f = by_step.get(&n).ok_or_else(|| {
            Error::Usage(format!(
                "triangle audit needs a snapshot at every step; none at t = {}",
                dom.t0 + T::from_count(n) * grid.dt()
            ))
        })?;
        fields.push(*f);
    }
    let dx = grid.dx;
    let section_charge = |k: usize| match lt.section(k) {
        Some((lo, hi)) => trapezoid_sites(lo, hi, dx, |i| fields[k].density(i)),
        None => T::zero(),
    };
    let initial = section_charge(0);
    let interior = section_charge(n_tau);
    let mut flux = T::zero();
    let edge = |k: usize| fields[k].u[lt.ib - k].norm_sqr() + fields[k].v[lt.ia + k].norm_sqr();
    for k in 1..=n_tau {
        flux += (edge(k - 1) + edge(k)) / T::lit(2.0);
    }
    flux = T::lit(2.0) * flux * grid.dt();
    let residual = (interior + flux - initial).abs().as_f64();

    let mut r = AuditReport::new(
        "triangle_charge_identity",
        tol.budget(dx.as_f64(), initial.as_f64()),
        None,
    )
    .with_info("initial_charge", initial.as_f64())
    .with_info("interior_charge", interior.as_f64())
    .with_info("boundary_flux", flux.as_f64())
    .with_info("residual", residual);
    r.observe(
        residual,
        Some(Witness {
            t: tau.as_f64(),
            x: ((dom.a + dom.b) / T::lit(2.0)).as_f64(),
        }),
    );
    Ok(r.finish())
}

/// Splits `[lo, hi]` into `parts` contiguous site ranges sharing endpoints.
fn pieces(lo: usize, hi: usize, parts: usize) -> Vec<(usize, usize)> {
    let w = hi - lo;
    let mut cuts: Vec<usize> = (0..=parts).map(|j| lo + (j * w + parts / 2) / parts).collect();
    cuts.dedup();
    cuts.windows(2).map(|c| (c[0], c[1])).collect()
}

/// Audits the pointwise growth bounds
///
/// ```text
/// |u(x,t)|^2 <= e^{2|beta| C0 + m t} (|u0(x - t)|^2 + m C0)
/// |v(x,t)|^2 <= e^{2|beta| C0 + m t} (|v0(x + t)|^2 + m C0)
/// ```
///
/// on every lattice point of the cone, with `t` measured from its base,
/// and their integrated forms over the whole cross-section and over its
/// quarters and sixteenths. Returns one report per inequality family.
pub fn pointwise_audit<T: Real>(
    snaps: &[SpinorField<T>],
    dom: &TriangleDomain<T>,
    c0: T,
    p: &ModelParams<T>,
    tol: &AuditTolerance,
) -> Result<Vec<AuditReport>> {
    let grid = grid_of(snaps)?;
    let lt = dom.on_lattice(&grid)?;
    let by_step = steps_in_triangle(snaps, &lt)?;
    let f0 = by_step[&0];
    let base_charge = f0.charge_on(lt.ia, lt.ib);
    if !(base_charge < c0) {
        return Err(Error::Precondition(format!(
            "charge of the datum on [{}, {}] is {base_charge}, not below C0 = {c0}",
            dom.a, dom.b
        )));
    }
    let dx = grid.dx;
    let budget = tol.budget(dx.as_f64(), base_charge.as_f64());
    let mut reports: Vec<AuditReport> = [
        "pointwise_u",
        "pointwise_v",
        "pointwise_interval_u",
        "pointwise_interval_v",
    ]
    .into_iter()
    .map(|name| AuditReport::new(name, budget, None).with_info("C0", c0.as_f64()))
    .collect();
    let two_beta_c0 = T::lit(2.0) * p.beta.abs() * c0;
    let m_c0 = p.m * c0;
    for (&k, f) in &by_step {
        let Some((lo, hi)) = lt.section(k) else { continue };
        let t_rel = T::from_count(k) * grid.dt();
        let growth = (two_beta_c0 + p.m * t_rel).exp();
        let wit = |i: usize| {
            Some(Witness {
                t: f.t.as_f64(),
                x: grid.x(i).as_f64(),
            })
        };
        for i in lo..=hi {
            let eu = f.u[i].norm_sqr() - growth * (f0.u[i - k].norm_sqr() + m_c0);
            let ev = f.v[i].norm_sqr() - growth * (f0.v[i + k].norm_sqr() + m_c0);
            reports[0].observe(eu.as_f64(), wit(i));
            reports[1].observe(ev.as_f64(), wit(i));
        }
        for parts in [1, 4, 16] {
            for (d1, d2) in pieces(lo, hi, parts) {
                let width = T::from_count(d2 - d1) * dx;
                let lu = trapezoid_sites(d1, d2, dx, |i| f.u[i].norm_sqr());
                let ru = trapezoid_sites(d1 - k, d2 - k, dx, |i| f0.u[i].norm_sqr());
                let lv = trapezoid_sites(d1, d2, dx, |i| f.v[i].norm_sqr());
                let rv = trapezoid_sites(d1 + k, d2 + k, dx, |i| f0.v[i].norm_sqr());
                reports[2].observe((lu - growth * (ru + m_c0 * width)).as_f64(), wit(d1));
                reports[3].observe((lv - growth * (rv + m_c0 * width)).as_f64(), wit(d1));
            }
        }
    }
    Ok(reports.into_iter().map(AuditReport::finish).collect())
}

fn triangle_trace<T: Real>(snaps: &[SpinorField<T>], dom: &TriangleDomain<T>) -> Result<FunctionalTrace<T>> {
    let tr = functional_trace(snaps, &Domain::Triangle(*dom))?;
    check_starts_at_base(&tr, dom, snaps)?;
    Ok(tr)
}

fn check_starts_at_base<T: Real>(
    tr: &FunctionalTrace<T>,
    dom: &TriangleDomain<T>,
    snaps: &[SpinorField<T>],
) -> Result<()> {
    let dt = grid_of(snaps)?.dt();
    match tr.times.first() {
        Some(t) if (*t - dom.t0).abs() <= T::lit(1e-9) * dt => Ok(()),
        _ => Err(Error::Usage("snapshots do not include the triangle's base time".into())),
    }
}

/// Audits the interaction-functional decay
///
/// ```text
/// Q0(t) + int_{t0}^t D0 <= 2 m L0(t0)^2 (t - t0) + Q0(t0)
/// ```
///
/// at every recorded time, plus `Q0(t0) <= L0(t0)^2` and the product bound
/// `Q0(t) <= L0(t)^2 / 4`. Requires `L0(t0) <= delta0`.
pub fn bony_decay_audit<T: Real>(
    snaps: &[SpinorField<T>],
    dom: &TriangleDomain<T>,
    k: &EstimateConstants<T>,
    p: &ModelParams<T>,
    tol: &AuditTolerance,
) -> Result<Vec<AuditReport>> {
    let tr = triangle_trace(snaps, dom)?;
    let (l00, q00) = (tr.l0[0], tr.q0[0]);
    if !(l00 <= k.delta0) {
        return Err(Error::Precondition(format!(
            "L0(t0) = {l00} on the cone exceeds delta0 = {}",
            k.delta0
        )));
    }
    let consts = Some(k.to_f64());
    let dx = grid_of(snaps)?.dx.as_f64();
    let x_mid = ((dom.a + dom.b) / T::lit(2.0)).as_f64();
    let wit = |t: T| {
        Some(Witness {
            t: t.as_f64(),
            x: x_mid,
        })
    };

    // Q0 is quadratic in the charge, so its budget scales with L0^2
    let mut decay = AuditReport::new("bony_decay", tol.budget(dx, (l00 * l00).as_f64()), consts);
    let two_m_l2 = T::lit(2.0) * p.m * l00 * l00;
    for j in 0..tr.len() {
        let lhs = tr.q0[j] + tr.cum_d0[j];
        let rhs = two_m_l2 * (tr.times[j] - dom.t0) + q00;
        decay.observe((lhs - rhs).as_f64(), wit(tr.times[j]));
    }

    let l2 = (l00 * l00).as_f64();
    let mut initial = AuditReport::new("bony_initial_product", EXACT_SLACK * l2, consts)
        .with_info("q0_over_l0_squared", if l2 > 0.0 { q00.as_f64() / l2 } else { 0.0 });
    initial.observe((q00 - l00 * l00).as_f64(), wit(dom.t0));

    let max_l = tr.l0.iter().fold(T::zero(), |a, b| a.max(*b)).as_f64();
    let mut product = AuditReport::new("bony_product_bound", EXACT_SLACK * max_l * max_l, consts);
    for j in 0..tr.len() {
        let excess = tr.q0[j] - tr.l0[j] * tr.l0[j] / T::lit(4.0);
        product.observe(excess.as_f64(), wit(tr.times[j]));
    }
    Ok(vec![decay.finish(), initial.finish(), product.finish()])
}

/// Audits the difference estimates for two runs on one cone:
///
/// ```text
/// L1 + K Q1 <= E0 exp(h3(t))
/// int D1   <= E0 ((4 m delta + 4 m delta^2 c)(t - t0) + 2 c delta^2 + 1) exp(h3(t))
/// h3(t)    <= 4 m (delta + delta^2)(t - t0) + 2 delta^2
/// ```
///
/// with `E0 = L1(t0) + K Q1(t0)` and
/// `h3(t) = 2 m (L0(t0) + L0'(t0))(t - t0) + c int (D0 + D0')`, all measured.
/// Requires `L0(t0) < delta` and `L0'(t0) < delta`. The first two budgets
/// are scaled by `E0`, since both sides vanish with the initial difference.
pub fn gronwall_audit<T: Real>(
    a: &[SpinorField<T>],
    b: &[SpinorField<T>],
    dom: &TriangleDomain<T>,
    k: &EstimateConstants<T>,
    p: &ModelParams<T>,
    tol: &AuditTolerance,
) -> Result<Vec<AuditReport>> {
    let (ta, tb) = pair_trace(a, b, &Domain::Triangle(*dom))?;
    check_starts_at_base(&ta, dom, a)?;
    let (la, lb) = (ta.l0[0], tb.l0[0]);
    if !(la < k.delta && lb < k.delta) {
        return Err(Error::Precondition(format!(
            "L0(t0) = {la} and L0'(t0) = {lb} on the cone must both be below delta = {}",
            k.delta
        )));
    }
    let diff = ta.difference.as_ref().expect("pair trace carries differences");
    let glimm = glimm_functional(&ta, k).expect("pair trace carries differences");
    let e0 = glimm[0];
    let consts = Some(k.to_f64());
    let dx = grid_of(a)?.dx.as_f64();
    let scale = (la + lb).as_f64();
    let x_mid = ((dom.a + dom.b) / T::lit(2.0)).as_f64();
    let wit = |t: T| {
        Some(Witness {
            t: t.as_f64(),
            x: x_mid,
        })
    };

    let (m, c, delta) = (p.m, k.c, k.delta);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let mut envelope =
        AuditReport::new("gronwall_envelope", tol.budget(dx, scale) * e0.as_f64(), consts).with_info("E0", e0.as_f64());
    let mut dissipation = AuditReport::new("gronwall_dissipation", tol.budget(dx, scale) * e0.as_f64(), consts);
    let mut ceiling = AuditReport::new("h3_ceiling", tol.budget(dx, scale), consts);
    let mut max_ratio = 0.0f64;
    let mut max_h3 = 0.0f64;
    for (j, g) in glimm.iter().enumerate() {
        let s = ta.times[j] - dom.t0;
        let h3 = two * m * (la + lb) * s + c * (ta.cum_d0[j] + tb.cum_d0[j]);
        let grow = h3.exp();
        envelope.observe((*g - e0 * grow).as_f64(), wit(ta.times[j]));
        let dis_rhs =
            e0 * ((four * m * delta + four * m * delta * delta * c) * s + two * c * delta * delta + T::one()) * grow;
        dissipation.observe((diff.cum_d1[j] - dis_rhs).as_f64(), wit(ta.times[j]));
        let cap = four * m * (delta + delta * delta) * s + two * delta * delta;
        ceiling.observe((h3 - cap).as_f64(), wit(ta.times[j]));
        if e0 > T::zero() {
            max_ratio = max_ratio.max((*g / (e0 * grow)).as_f64());
        }
        max_h3 = max_h3.max(h3.as_f64());
    }
    let envelope = envelope.with_info("max_ratio_to_envelope", max_ratio);
    let ceiling = ceiling.with_info("max_h3", max_h3);
    Ok(vec![envelope.finish(), dissipation.finish(), ceiling.finish()])
}

/// Audits total charge against its initial value: conserved on periodic
/// grids, non-increasing with zero inflow (charge may only leave).
pub fn charge_audit<T: Real>(snaps: &[SpinorField<T>], tol: &AuditTolerance) -> Result<AuditReport> {
    let grid = grid_of(snaps)?;
    let q0 = snaps[0].charge();
    let mut r = AuditReport::new("charge_conservation", tol.budget(grid.dx.as_f64(), q0.as_f64()), None);
    let mut max_rel = 0.0f64;
    for s in snaps {
        let d = s.charge() - q0;
        let excess = match grid.boundary {
            Boundary::Periodic => d.abs(),
            Boundary::ZeroInflow => d,
        };
        r.observe(
            excess.as_f64(),
            Some(Witness {
                t: s.t.as_f64(),
                x: grid.x_min.as_f64(),
            }),
        );
        if q0 > T::zero() {
            max_rel = max_rel.max((d.abs() / q0).as_f64());
        }
    }
    Ok(r.with_info("max_relative_drift", max_rel).finish())
}
