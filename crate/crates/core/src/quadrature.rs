//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

// the node and weight tables are quoted to more digits than an f64 holds
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [0, 1); the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Applies the 7/15 pair on `[a, b]`; `f` returns several integrands at once.
fn kronrod<const N: usize>(f: &impl Fn(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], [f64; N]) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    for k in 0..N {
        kron[k] = fc[k] * WGK[7];
        gauss[k] = fc[k] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..N {
            let sum = f1[k] + f2[k];
            kron[k] += WGK[j] * sum;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * sum;
            }
        }
    }
    let mut err = [0.0; N];
    for k in 0..N {
        kron[k] *= half;
        err[k] = (kron[k] - gauss[k] * half).abs();
    }
    (kron, err)
}

/// Integrates several functions over `[a, b]` sharing one adaptive mesh; the
/// mesh is refined until every component meets the tolerance.
pub fn integrate_many<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<[QuadResult; N]> {
    let mut segments: Vec<([f64; N], [f64; N], f64, f64)> = Vec::new();
    let (v, e) = kronrod(&f, a, b);
    segments.push((v, e, a, b));

    loop {
        let mut totals = [0.0; N];
        let mut errors = [0.0; N];
        for (v, e, _, _) in &segments {
            for k in 0..N {
                totals[k] += v[k];
                errors[k] += e[k];
            }
        }
        let done = (0..N).all(|k| errors[k] <= opts.abs_tol.max(opts.rel_tol * totals[k].abs()));
        if done {
            let n = segments.len();
            return Ok(std::array::from_fn(|k| QuadResult {
                value: totals[k],
                error: errors[k],
                intervals: n,
            }));
        }
        if segments.len() >= opts.max_intervals {
            let worst = errors.iter().copied().fold(0.0, f64::max);
            return Err(Error::Quadrature {
                error: worst,
                intervals: segments.len(),
            });
        }
        // split the segment with the largest error in any component
        let (idx, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.1.iter().copied().fold(0.0, f64::max)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let (_, _, lo, hi) = segments.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        segments.push((v1, e1, lo, mid));
        segments.push((v2, e2, mid, hi));
    }
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    let [r] = integrate_many(|x| [f(x)], a, b, opts)?;
    Ok(r)
}
