use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cauchy::CauchyParams;
use crate::error::{Error, Result};
use crate::orbit::{boole_transform_guarded, Alpha, DEFAULT_POLE_EPSILON};

use super::fit::{fit_cauchy, FitMethod};

/// Points per RNG stream. Fixed, so the output does not depend on how many
/// threads rayon happens to use.
pub const SAMPLE_CHUNK: usize = 1 << 16;

/// A seeded draw from a Cauchy law.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub points: Vec<f64>,
}

impl SampleBatch {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn fit(&self, method: FitMethod) -> Result<CauchyParams> {
        fit_cauchy(&self.points, method)
    }
}

/// Inverse-CDF sampling. Chunk `k` of the output draws from the ChaCha8 stream
/// `k` under `seed`.
pub fn sample_cauchy(p: CauchyParams, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "sample size must be at least 1",
        });
    }
    let mut points = vec![0.0; n];
    points.par_chunks_mut(SAMPLE_CHUNK).enumerate().for_each(|(k, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for x in chunk {
            let u: f64 = rng.sample(Open01);
            *x = p.quantile_unchecked(u);
        }
    });
    Ok(SampleBatch { seed, points })
}

/// Applies the Boole transform `steps` times to every point. Points that fall
/// into the pole guard are removed; returns how many were.
pub fn push_forward(alpha: Alpha, points: &mut Vec<f64>, steps: usize) -> usize {
    points.par_iter_mut().for_each(|x| {
        for _ in 0..steps {
            match boole_transform_guarded(alpha, *x, DEFAULT_POLE_EPSILON) {
                Ok(next) if next.is_finite() => *x = next,
                _ => {
                    *x = f64::NAN;
                    break;
                }
            }
        }
    });
    let before = points.len();
    points.retain(|x| !x.is_nan());
    before - points.len()
}
