//! Reproducible random smooth data for audit ensembles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{InitialDatum, Profile};
use crate::scalar::{cplx, Real};

/// Shape of the random data: each component is a sum of `bumps` Gaussians
/// with centres in `centers`, widths in `widths` and moduli up to
/// `amplitude`, with uniformly random phases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub bumps: usize,
    pub amplitude: f64,
    pub centers: (f64, f64),
    pub widths: (f64, f64),
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            bumps: 3,
            amplitude: 0.5,
            centers: (-1.0, 1.0),
            widths: (0.25, 0.5),
        }
    }
}

fn component<T: Real>(rng: &mut ChaCha8Rng, spec: &EnsembleSpec) -> Profile<T> {
    let parts = (0..spec.bumps)
        .map(|_| {
            let center = rng.gen_range(spec.centers.0..=spec.centers.1);
            let width = rng.gen_range(spec.widths.0..=spec.widths.1);
            let modulus = spec.amplitude * rng.gen_range(0.2..=1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Profile::gaussian(
                T::lit(center),
                T::lit(width),
                cplx(T::lit(modulus * phase.cos()), T::lit(modulus * phase.sin())),
            )
        })
        .collect();
    Profile::Sum(parts)
}

/// Ensemble member `seed`.
pub fn random_smooth_datum<T: Real>(seed: u64, spec: &EnsembleSpec) -> InitialDatum<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = component(&mut rng, spec);
    let v = component(&mut rng, spec);
    InitialDatum::new(u, v)
}

/// `datum` plus one extra Gaussian per component whose modulus is
/// `relative * spec.amplitude`.
pub fn perturbed<T: Real>(datum: &InitialDatum<T>, relative: f64, seed: u64, spec: &EnsembleSpec) -> InitialDatum<T> {
    let small = EnsembleSpec {
        bumps: 1,
        amplitude: relative * spec.amplitude,
        ..*spec
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_d1ff);
    let add = |base: &Profile<T>, rng: &mut ChaCha8Rng| Profile::Sum(vec![base.clone(), component(rng, &small)]);
    let u = add(&datum.u, &mut rng);
    let v = add(&datum.v, &mut rng);
    InitialDatum::new(u, v)
}
