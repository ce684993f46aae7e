//! The cubic nonlinearity and the pointwise algebra behind the estimates.
//!
//! The potential is `W(u, v) = alpha |u|^2 |v|^2 + beta (conj(u) v + u conj(v))^2`
//! and the nonlinear terms are its Wirtinger derivatives
//! `N1 = dW/d(conj u)`, `N2 = dW/d(conj v)`. `alpha = 1, beta = 0` is the
//! Thirring model, `alpha = 0, beta = 1/4` the Gross-Neveu model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::AuditReport;
use crate::scalar::{cplx, Cplx, Real};

/// Mass and coupling constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub m: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(m: T, alpha: T, beta: T) -> Result<Self> {
        if !(m.is_finite() && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        if m < T::zero() {
            return Err(Error::Config(format!("mass must satisfy m >= 0, got {m}")));
        }
        Ok(Self { m, alpha, beta })
    }

    pub fn thirring(m: T) -> Self {
        Self {
            m,
            alpha: T::one(),
            beta: T::zero(),
        }
    }

    pub fn gross_neveu(m: T) -> Self {
        Self {
            m,
            alpha: T::zero(),
            beta: T::lit(0.25),
        }
    }

    /// Free massive Dirac system.
    pub fn linear(m: T) -> Self {
        Self {
            m,
            alpha: T::zero(),
            beta: T::zero(),
        }
    }
}

/// Constants the estimates are stated with.
///
/// `c = 8|beta|` is fixed; the others are only required to satisfy
///
/// * `-2 + 2 delta0 c < -1`
/// * `-2 + 2 c_star delta < -1`
/// * `-K + 2 c_star < -1`
/// * `0 < delta <= delta0`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConstants<T> {
    pub c: T,
    pub delta0: T,
    pub c_star: T,
    #[serde(rename = "K")]
    pub k: T,
    pub delta: T,
}

/// Optional replacements for the default constants.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstantOverrides<T> {
    pub delta0: Option<T>,
    pub c_star: Option<T>,
    pub k: Option<T>,
    pub delta: Option<T>,
}

/// Stand-in for "no smallness constraint" when `c = 0`.
pub const UNCONSTRAINED_DELTA0: f64 = 1e6;

impl<T: Real> EstimateConstants<T> {
    /// `c* = 16(|alpha| + 4|beta|)`, `K = 2c* + 2`, `delta0 = 1/(4c)`,
    /// `delta = min(delta0, 1/(4c*))`.
    pub fn defaults(p: &ModelParams<T>) -> Self {
        Self::with_overrides(p, &ConstantOverrides::default()).expect("default constants satisfy their inequalities")
    }

    pub fn with_overrides(p: &ModelParams<T>, o: &ConstantOverrides<T>) -> Result<Self> {
        let four = T::lit(4.0);
        let c = T::lit(8.0) * p.beta.abs();
        let delta0 = o.delta0.unwrap_or_else(|| {
            if c > T::zero() {
                T::one() / (four * c)
            } else {
                T::lit(UNCONSTRAINED_DELTA0)
            }
        });
        let c_star = o
            .c_star
            .unwrap_or_else(|| T::lit(16.0) * (p.alpha.abs() + four * p.beta.abs()));
        let k = o.k.unwrap_or(T::lit(2.0) * c_star + T::lit(2.0));
        let delta = o.delta.unwrap_or_else(|| {
            if c_star > T::zero() {
                delta0.min(T::one() / (four * c_star))
            } else {
                delta0
            }
        });
        let k = Self {
            c,
            delta0,
            c_star,
            k,
            delta,
        };
        k.validate()?;
        Ok(k)
    }

    /// Checks the strict inequalities; the error names the one that fails.
    pub fn validate(&self) -> Result<()> {
        let two = T::lit(2.0);
        let all = [self.c, self.delta0, self.c_star, self.k, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("estimate constants must be finite".into()));
        }
        if self.delta0 <= T::zero() {
            return Err(Error::Config("delta0 > 0 violated".into()));
        }
        if self.c_star < T::zero() {
            return Err(Error::Config("c_* >= 0 violated".into()));
        }
        if self.k <= T::zero() {
            return Err(Error::Config("K > 0 violated".into()));
        }
        if -two + two * self.delta0 * self.c >= -T::one() {
            return Err(Error::Config(format!(
                "-2+2\\delta_0 c<-1 violated (delta0 = {}, c = {})",
                self.delta0, self.c
            )));
        }
        if !(self.delta > T::zero() && self.delta <= self.delta0) {
            return Err(Error::Config(format!(
                "0<\\delta<=\\delta_0 violated (delta = {}, delta0 = {})",
                self.delta, self.delta0
            )));
        }
        if -two + two * self.c_star * self.delta >= -T::one() {
            return Err(Error::Config(format!(
                "-2+2c_*\\delta<-1 violated (c_* = {}, delta = {})",
                self.c_star, self.delta
            )));
        }
        if -self.k + two * self.c_star >= -T::one() {
            return Err(Error::Config(format!(
                "-K+2c_*<-1 violated (K = {}, c_* = {})",
                self.k, self.c_star
            )));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> EstimateConstants<f64> {
        EstimateConstants {
            c: self.c.as_f64(),
            delta0: self.delta0.as_f64(),
            c_star: self.c_star.as_f64(),
            k: self.k.as_f64(),
            delta: self.delta.as_f64(),
        }
    }
}

/// `W`, `N1`, `N2` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nonlinearity<T> {
    pub w: T,
    pub n1: Cplx<T>,
    pub n2: Cplx<T>,
}

/// `N1 = alpha u |v|^2 + 2 beta s v`, `N2 = alpha v |u|^2 + 2 beta s u`
/// with `s = conj(u) v + u conj(v) = 2 Re(conj(u) v)`.
#[inline]
pub fn nonlinear_terms<T: Real>(u: Cplx<T>, v: Cplx<T>, p: &ModelParams<T>) -> (Cplx<T>, Cplx<T>) {
    let two = T::lit(2.0);
    let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
    let s = two * (u.re * v.re + u.im * v.im);
    let bs = two * p.beta * s;
    (u * (p.alpha * vv) + v * bs, v * (p.alpha * uu) + u * bs)
}

pub fn eval_nonlinearity<T: Real>(u: Cplx<T>, v: Cplx<T>, p: &ModelParams<T>) -> Nonlinearity<T> {
    let two = T::lit(2.0);
    let s = two * (u.re * v.re + u.im * v.im);
    let w = p.alpha * u.norm_sqr() * v.norm_sqr() + p.beta * s * s;
    let (n1, n2) = nonlinear_terms(u, v, p);
    Nonlinearity { w, n1, n2 }
}

/// `r0 = m(|u|^2 + |v|^2) + c |u|^2 |v|^2`.
pub fn eval_r0<T: Real>(u: Cplx<T>, v: Cplx<T>, p: &ModelParams<T>, k: &EstimateConstants<T>) -> T {
    let (uu, vv) = (u.norm_sqr(), v.norm_sqr());
    p.m * (uu + vv) + k.c * uu * vv
}

/// Quantities for the difference of two solutions at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferenceTerms<T> {
    pub u_diff: Cplx<T>,
    pub v_diff: Cplx<T>,
    pub r2: T,
    pub r1: T,
}

/// `r2(x, y) = |U(x)|^2 (|vA(y)|^2 + |vB(y)|^2) + (|uA(x)|^2 + |uB(x)|^2) |V(y)|^2`.
#[inline]
pub fn r2_two_point<T: Real>(u_diff_x: Cplx<T>, ua_x: Cplx<T>, ub_x: Cplx<T>, va_y: Cplx<T>, vb_y: Cplx<T>) -> T {
    let v_diff_y = va_y - vb_y;
    u_diff_x.norm_sqr() * (va_y.norm_sqr() + vb_y.norm_sqr())
        + (ua_x.norm_sqr() + ub_x.norm_sqr()) * v_diff_y.norm_sqr()
}

/// `U = uA - uB`, `V = vA - vB`, `r2` (at `y = x` unless the second-point
/// values `(vA(y), vB(y))` are given) and `r1 = m(|U|^2 + |V|^2) + c* r2(x, x)`.
pub fn eval_difference_terms<T: Real>(
    a: (Cplx<T>, Cplx<T>),
    b: (Cplx<T>, Cplx<T>),
    v_at_y: Option<(Cplx<T>, Cplx<T>)>,
    p: &ModelParams<T>,
    k: &EstimateConstants<T>,
) -> DifferenceTerms<T> {
    let (ua, va) = a;
    let (ub, vb) = b;
    let u_diff = ua - ub;
    let v_diff = va - vb;
    let r2_diag = r2_two_point(u_diff, ua, ub, va, vb);
    let r2 = match v_at_y {
        Some((vay, vby)) => r2_two_point(u_diff, ua, ub, vay, vby),
        None => r2_diag,
    };
    let r1 = p.m * (u_diff.norm_sqr() + v_diff.norm_sqr()) + k.c_star * r2_diag;
    DifferenceTerms { u_diff, v_diff, r2, r1 }
}

/// Multiplicative slack on the exact algebraic bounds.
pub const ALGEBRAIC_SLACK: f64 = 1e-12;

#[derive(Clone, Copy)]
struct BoundSample {
    /// `(lhs - rhs) / scale`, where `scale` covers rounding in both sides.
    rel_excess: f64,
    ratio: f64,
}

impl BoundSample {
    fn new(lhs: f64, rhs: f64, rounding_scale: f64) -> Self {
        let scale = rhs + rounding_scale;
        let rel_excess = if scale > 0.0 { (lhs - rhs) / scale } else { lhs - rhs };
        let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        Self { rel_excess, ratio }
    }
}

struct BoundStats {
    worst: f64,
    max_ratio: f64,
    witness: Option<[f64; 8]>,
}

impl BoundStats {
    fn empty() -> Self {
        Self {
            worst: f64::NEG_INFINITY,
            max_ratio: 0.0,
            witness: None,
        }
    }

    fn push(&mut self, s: BoundSample, tuple: [f64; 8]) {
        if s.rel_excess > self.worst {
            self.worst = s.rel_excess;
            self.witness = Some(tuple);
        }
        self.max_ratio = self.max_ratio.max(s.ratio);
    }

    fn merge(mut self, other: Self) -> Self {
        if other.worst > self.worst {
            self.worst = other.worst;
            self.witness = other.witness;
        }
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self
    }
}

/// The three bounds at one tuple `(u, v, u', v')`.
fn bound_samples<T: Real>(
    ua: Cplx<T>,
    va: Cplx<T>,
    ub: Cplx<T>,
    vb: Cplx<T>,
    p: &ModelParams<T>,
    k: &EstimateConstants<T>,
) -> [BoundSample; 3] {
    let i = cplx(T::zero(), T::one());
    let two = T::lit(2.0);
    let (n1a, n2a) = nonlinear_terms(ua, va, p);
    let (n1b, n2b) = nonlinear_terms(ub, vb, p);

    // (a) |2Re(i conj(N1) u)| + |2Re(i conj(N2) v)| <= 8|beta| |u|^2 |v|^2
    let a_lhs = (two * (i * n1a.conj() * ua).re).abs() + (two * (i * n2a.conj() * va).re).abs();
    let a_rhs = T::lit(8.0) * p.beta.abs() * ua.norm_sqr() * va.norm_sqr();
    let a_round = n1a.norm() * ua.norm() + n2a.norm() * va.norm();

    // (b) |uv - u'v'|^2 <= 2 r2(x, x)
    let d = eval_difference_terms((ua, va), (ub, vb), None, p, k);
    let b_lhs = (ua * va - ub * vb).norm_sqr();
    let b_rhs = two * d.r2;
    let b_round = (ua * va).norm_sqr() + (ub * vb).norm_sqr();

    // (c) |dN1 conj(U)| + |dN2 conj(V)| <= (c*/2) r2(x, x)
    let c_lhs = ((n1a - n1b) * d.u_diff.conj()).norm() + ((n2a - n2b) * d.v_diff.conj()).norm();
    let c_rhs = k.c_star / two * d.r2;
    let c_round = (n1a.norm() + n1b.norm()) * d.u_diff.norm() + (n2a.norm() + n2b.norm()) * d.v_diff.norm();

    [
        BoundSample::new(a_lhs.as_f64(), a_rhs.as_f64(), a_round.as_f64()),
        BoundSample::new(b_lhs.as_f64(), b_rhs.as_f64(), b_round.as_f64()),
        BoundSample::new(c_lhs.as_f64(), c_rhs.as_f64(), c_round.as_f64()),
    ]
}

/// Uniform sample in the complex unit disk.
fn unit_disk<T: Real>(rng: &mut ChaCha8Rng) -> Cplx<T> {
    let r: f64 = rng.gen::<f64>().sqrt();
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    cplx(T::lit(r * th.cos()), T::lit(r * th.sin()))
}

const BOUND_NAMES: [&str; 3] = [
    "algebraic_source_bound",
    "algebraic_product_difference",
    "algebraic_difference_source",
];
const CHUNK: usize = 4096;

/// Samples `samples` random tuples `(u, v, u', v')` in the unit disk and
/// checks the three pointwise bounds the estimates rely on:
///
/// * (a) `|2Re(i conj(N1) u)| + |2Re(i conj(N2) v)| <= 8|beta| |u|^2 |v|^2`
/// * (b) `|uv - u'v'|^2 <= 2 r2(x, x)`
/// * (c) `|dN1 conj(U)| + |dN2 conj(V)| <= (c*/2) r2(x, x)`
///
/// Each report's `max_violation` is the worst excess relative to the right
/// side plus a rounding scale; the budget is [`ALGEBRAIC_SLACK`]. Chunks are
/// seeded from `seed` and their index, so the result does not depend on the
/// number of worker threads.
pub fn check_algebraic_bounds<T: Real>(
    samples: usize,
    p: &ModelParams<T>,
    k: &EstimateConstants<T>,
    seed: u64,
) -> Result<Vec<AuditReport>> {
    if samples == 0 {
        return Err(Error::Config("algebraic bound check needs at least one sample".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let per_chunk: Vec<[BoundStats; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut stats = [BoundStats::empty(), BoundStats::empty(), BoundStats::empty()];
            let n = CHUNK.min(samples - c * CHUNK);
            for _ in 0..n {
                let (ua, va, ub, vb) = (
                    unit_disk::<T>(&mut rng),
                    unit_disk(&mut rng),
                    unit_disk(&mut rng),
                    unit_disk(&mut rng),
                );
                let tuple = [ua.re, ua.im, va.re, va.im, ub.re, ub.im, vb.re, vb.im].map(|x| x.as_f64());
                for (s, b) in stats.iter_mut().zip(bound_samples(ua, va, ub, vb, p, k)) {
                    s.push(b, tuple);
                }
            }
            stats
        })
        .collect();
    let mut totals = [BoundStats::empty(), BoundStats::empty(), BoundStats::empty()];
    for chunk in per_chunk {
        for (t, s) in totals.iter_mut().zip(chunk) {
            *t = std::mem::replace(t, BoundStats::empty()).merge(s);
        }
    }
    Ok(totals
        .into_iter()
        .zip(BOUND_NAMES)
        .map(|(s, name)| {
            let mut r = AuditReport::new(name, ALGEBRAIC_SLACK, Some(k.to_f64()));
            r.observe(s.worst, None);
            let mut r = r
                .with_info("max_ratio", s.max_ratio)
                .with_info("samples", samples as f64);
            if let Some(w) = s.witness {
                for (key, val) in ["u_re", "u_im", "v_re", "v_im", "u2_re", "u2_im", "v2_re", "v2_im"]
                    .iter()
                    .zip(w)
                {
                    r = r.with_info(&format!("witness_{key}"), val);
                }
            }
            r.finish()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cplx<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn zero_u_gives_zero_everything() {
        for p in [
            ModelParams::thirring(1.0),
            ModelParams::gross_neveu(0.5),
            ModelParams::new(1.0, -2.0, 3.0).unwrap(),
        ] {
            let nl = eval_nonlinearity(c(0.0, 0.0), c(0.3, -1.2), &p);
            assert_eq!(nl.w, 0.0);
            assert_eq!(nl.n1, c(0.0, 0.0));
            assert_eq!(nl.n2, c(0.0, 0.0));
        }
    }

    #[test]
    fn gross_neveu_phase_orthogonal_point() {
        let nl = eval_nonlinearity(c(1.0, 0.0), c(0.0, 1.0), &ModelParams::gross_neveu(2.0));
        assert_eq!((nl.w, nl.n1, nl.n2), (0.0, c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn thirring_reference_point() {
        let nl = eval_nonlinearity(c(1.0, 1.0), c(2.0, 0.0), &ModelParams::thirring(0.0));
        assert_eq!(nl.n1, c(4.0, 4.0));
        assert_eq!(nl.n2, c(4.0, 0.0));
        assert_eq!(nl.w, 8.0);
    }

    #[test]
    fn r0_examples() {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let p = ModelParams::linear(1.0);
        let k = EstimateConstants::defaults(&p);
        assert_eq!(eval_r0(z, z, &p, &k), 0.0);
        assert_eq!(eval_r0(one, one, &p, &k), 2.0);
        let p = ModelParams::new(1.0, 0.0, 0.25).unwrap();
        let k = EstimateConstants::defaults(&p);
        assert_eq!(k.c, 2.0);
        assert_eq!(eval_r0(one, one, &p, &k), 4.0);
    }

    #[test]
    fn difference_term_examples() {
        let p = ModelParams::new(0.0, 1.0, 0.25).unwrap();
        let k = EstimateConstants::defaults(&p);
        let a = (c(0.3, 0.1), c(-0.2, 0.9));
        let d = eval_difference_terms(a, a, None, &p, &k);
        assert_eq!((d.u_diff, d.v_diff, d.r2, d.r1), (c(0.0, 0.0), c(0.0, 0.0), 0.0, 0.0));

        let d = eval_difference_terms((c(1.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)), None, &p, &k);
        assert_eq!(d.u_diff, c(1.0, 0.0));
        assert_eq!(d.v_diff, c(0.0, 0.0));
        assert_eq!(d.r2, 2.0);
        assert_eq!(d.r1, 2.0 * k.c_star);

        // two-point form picks up v at y
        let d = eval_difference_terms(
            (c(1.0, 0.0), c(1.0, 0.0)),
            (c(0.0, 0.0), c(1.0, 0.0)),
            Some((c(2.0, 0.0), c(0.0, 0.0))),
            &p,
            &k,
        );
        assert_eq!(d.r2, 4.0 + 1.0 * 4.0);
    }

    #[test]
    fn default_constants() {
        let k = EstimateConstants::defaults(&ModelParams::gross_neveu(1.0));
        assert_eq!(k.c, 2.0);
        assert_eq!(k.delta0, 0.125);
        assert_eq!(k.c_star, 16.0);
        assert_eq!(k.k, 34.0);
        assert_eq!(k.delta, 1.0 / 64.0);
        let k = EstimateConstants::defaults(&ModelParams::thirring(1.0));
        assert_eq!(k.delta0, UNCONSTRAINED_DELTA0);
        assert_eq!(k.delta, 1.0 / 64.0);
        let k = EstimateConstants::defaults(&ModelParams::linear(1.0));
        assert_eq!((k.c_star, k.k), (0.0, 2.0));
    }

    #[test]
    fn override_violations_name_the_inequality() {
        let p = ModelParams::gross_neveu(1.0);
        let o = ConstantOverrides {
            k: Some(1.0),
            c_star: Some(16.0),
            ..Default::default()
        };
        let err = EstimateConstants::with_overrides(&p, &o).unwrap_err().to_string();
        assert!(err.contains("-K+2c_*<-1"), "{err}");
        let o = ConstantOverrides {
            delta0: Some(0.25),
            ..Default::default()
        };
        let err = EstimateConstants::with_overrides(&p, &o).unwrap_err().to_string();
        assert!(err.contains("-2+2\\delta_0 c<-1"), "{err}");
        let o = ConstantOverrides {
            delta: Some(0.1),
            ..Default::default()
        };
        assert!(EstimateConstants::with_overrides(&p, &o).is_err());
    }

    #[test]
    fn charge_neutrality_of_the_source() {
        // conj(N1) u + conj(N2) v is real, so the two source terms cancel.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = ModelParams::new(0.7, 1.3, -0.4).unwrap();
        for _ in 0..10_000 {
            let (u, v) = (unit_disk::<f64>(&mut rng), unit_disk::<f64>(&mut rng));
            let (n1, n2) = nonlinear_terms(u, v, &p);
            let i = c(0.0, 1.0);
            let total = (i * n1.conj() * u).re + (i * n2.conj() * v).re;
            assert!(total.abs() < 1e-12);
        }
    }

    #[test]
    fn thirring_source_bound_is_rounding_only() {
        let p = ModelParams::thirring(1.0);
        let k = EstimateConstants::defaults(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let (u, v) = (unit_disk::<f64>(&mut rng), unit_disk::<f64>(&mut rng));
            let [a, _, _] = bound_samples(u, v, u, v, &p, &k);
            assert!(a.rel_excess.abs() < 1e-14, "{}", a.rel_excess);
        }
    }

    #[test]
    fn zero_tuple_passes_exactly() {
        let p = ModelParams::gross_neveu(1.0);
        let k = EstimateConstants::defaults(&p);
        let z = c(0.0, 0.0);
        for s in bound_samples(z, z, z, z, &p, &k) {
            assert_eq!(s.rel_excess, 0.0);
        }
    }

    #[test]
    fn algebraic_bounds_hold_and_are_thread_independent() {
        let p = ModelParams::gross_neveu(1.0);
        let k = EstimateConstants::defaults(&p);
        let reports = check_algebraic_bounds(20_000, &p, &k, 5).unwrap();
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
        // bound (a) is attained at phase pi/4, so random sampling gets close
        assert!(reports[0].info_value("max_ratio").unwrap() > 0.99);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let again = single.install(|| check_algebraic_bounds(20_000, &p, &k, 5).unwrap());
        assert_eq!(reports, again);
    }

    #[test]
    fn tight_constant_is_caught() {
        // c* far below the analytic requirement must fail bound (c)
        let p = ModelParams::gross_neveu(1.0);
        let mut k = EstimateConstants::defaults(&p);
        k.c_star = 1.0;
        let reports = check_algebraic_bounds(20_000, &p, &k, 9).unwrap();
        assert!(!reports[2].passed);
        assert!(reports[0].passed && reports[1].passed);
    }
}
