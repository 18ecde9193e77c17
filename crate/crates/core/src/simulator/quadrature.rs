// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
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

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal panels the range is split into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 20_000,
            initial_panels: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    /// `ε`-scaled Kronrod estimate of `∫|f|`.
    roundoff: f64,
}

fn panel<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut mass = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        let s = lo + hi;
        kronrod += s * WGK[j];
        mass += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * h;
    let raw = ((kronrod - gauss) * h).norm();
    // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
    let error = if raw > 0.0 {
        let scale = value.norm().max(f64::MIN_POSITIVE);
        raw.min(scale * (200.0 * raw / scale).powf(1.5))
            .max(50.0 * f64::EPSILON * scale)
    } else {
        0.0
    };
    let roundoff = 50.0 * f64::EPSILON * mass * h.abs();
    Panel {
        a,
        b,
        value,
        error,
        roundoff,
    }
}

/// `∫_a^b f(t) dt` to `max(abs_tol, rel_tol·|I|)`, or to the round-off floor
/// `50ε∫|f|` when that is larger.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let mut panels: Vec<Panel> = (0..n0)
        .map(|k| {
            let lo = a + (b - a) * k as f64 / n0 as f64;
            let hi = if k + 1 == n0 {
                b
            } else {
                a + (b - a) * (k + 1) as f64 / n0 as f64
            };
            panel(&mut f, lo, hi)
        })
        .collect();
    loop {
        let value: C64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let floor: f64 = panels.iter().map(|p| p.roundoff).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target.max(floor) {
            return Ok(QuadratureResult {
                value,
                error,
                intervals: panels.len(),
            });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                requested: target,
                achieved: error,
            });
        }
        let (worst, _) = panels.iter().enumerate().fold(
            (0, -1.0),
            |acc, (k, p)| if p.error > acc.1 { (k, p.error) } else { acc },
        );
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature {
                requested: target,
                achieved: error,
            });
        }
        panels.push(panel(&mut f, p.a, mid));
        panels.push(panel(&mut f, mid, p.b));
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Result<f64> {
    Ok(integrate(|t| C64::new(f(t), 0.0), a, b, opts)?.value.re)
}

/// Ordered double integral `∫_0^T outer(t') ∫_0^{t'} inner(t'') dt'' dt'`.
///
/// The inner integral is cached at the boundaries of `panels` equal
/// sub-intervals; each outer node then adds one short adaptive integral.
pub fn nested<F, G>(outer: F, inner: G, t_end: f64, panels: usize, opts: &QuadratureOptions) -> Result<C64>
where
    F: Fn(f64) -> C64,
    G: Fn(f64) -> C64,
{
    let panels = panels.max(1);
    let h = t_end / panels as f64;
    let mut cumulative = vec![C64::new(0.0, 0.0); panels + 1];
    let inner_opts = QuadratureOptions {
        initial_panels: 1,
        ..*opts
    };
    for k in 0..panels {
        let seg = integrate(&inner, k as f64 * h, (k + 1) as f64 * h, &inner_opts)?;
        cumulative[k + 1] = cumulative[k] + seg.value;
    }
    let mut failure = None;
    let outer_opts = QuadratureOptions {
        initial_panels: panels,
        ..*opts
    };
    let result = {
        let mut partial = |t: f64| -> C64 {
            let k = ((t / h).floor() as usize).min(panels - 1);
            let start = k as f64 * h;
            match integrate(&inner, start, t, &inner_opts) {
                Ok(r) => cumulative[k] + r.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        };
        integrate(|t| outer(t) * partial(t), 0.0, t_end, &outer_opts)?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(result.value)
}
