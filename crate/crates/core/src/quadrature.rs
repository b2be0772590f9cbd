//! Globally adaptive 21-point Gauss–Kronrod quadrature for vector-valued
//! integrands.
//!
//! Several master-equation coefficients share the same expensive integrand
//! factors, so the integrator works on `[f64; N]` outputs and refines the
//! interval whose worst component error (relative to that component's
//! tolerance) is largest.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1)`; the odd entries are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_814_142_810,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for `XGK[1], XGK[3], ..., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub tolerance: Tolerance,
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::default(),
            max_intervals: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

/// One 21-point Kronrod rule on `[a, b]` with the embedded Gauss error estimate.
fn gauss_kronrod<const N: usize, F>(f: &F, a: f64, b: f64) -> Segment<N>
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    let mut magnitude = [0.0; N];
    for k in 0..N {
        kronrod[k] = WGK[10] * fc[k];
        magnitude[k] = WGK[10] * fc[k].abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for k in 0..N {
            kronrod[k] += WGK[j] * (lo[k] + hi[k]);
            magnitude[k] += WGK[j] * (lo[k].abs() + hi[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * (lo[k] + hi[k]);
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        value[k] = kronrod[k] * half;
        let floor = 50.0 * f64::EPSILON * magnitude[k] * half.abs();
        error[k] = ((kronrod[k] - gauss[k]) * half).abs().max(floor);
    }
    Segment { a, b, value, error }
}

struct Keyed {
    key: f64,
    index: usize,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.key.total_cmp(&other.key) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Integrates `f` over `[points[0], points[last]]`, using every entry of
/// `points` as an initial breakpoint. `points` must be strictly increasing.
pub fn integrate<const N: usize, F>(f: F, points: &[f64], config: &QuadratureConfig) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    if points.len() < 2 {
        return Ok([0.0; N]);
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "quadrature breakpoints must be strictly increasing".into(),
        ));
    }

    let mut segments: Vec<Segment<N>> = points.windows(2).map(|w| gauss_kronrod(&f, w[0], w[1])).collect();

    let totals = |segments: &[Segment<N>]| {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for s in segments {
            for k in 0..N {
                value[k] += s.value[k];
                error[k] += s.error[k];
            }
        }
        (value, error)
    };

    let (value, error) = totals(&segments);
    let tol = config.tolerance;
    let target = |value: &[f64; N]| {
        let mut t = [0.0; N];
        for k in 0..N {
            t[k] = tol.abs.max(tol.rel * value[k].abs());
        }
        t
    };
    if (0..N).all(|k| error[k] <= target(&value)[k]) {
        return Ok(value);
    }

    // Scales for ranking segments are frozen after the first pass; the
    // convergence test itself always uses the current totals.
    let scale = target(&value);
    let key = |s: &Segment<N>| (0..N).map(|k| s.error[k] / scale[k]).fold(0.0, f64::max);

    let mut heap: BinaryHeap<Keyed> = segments
        .iter()
        .enumerate()
        .map(|(index, s)| Keyed { key: key(s), index })
        .collect();
    let (mut value, mut error) = (value, error);
    let mut iterations = 0usize;

    while let Some(Keyed { index, .. }) = heap.pop() {
        let worst = segments[index];
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Cannot split any further; the remaining error is roundoff.
            heap.push(Keyed { key: -1.0, index });
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        for k in 0..N {
            value[k] += left.value[k] + right.value[k] - worst.value[k];
            error[k] += left.error[k] + right.error[k] - worst.error[k];
        }
        segments[index] = left;
        segments.push(right);
        heap.push(Keyed { key: key(&left), index });
        heap.push(Keyed {
            key: key(&right),
            index: segments.len() - 1,
        });

        iterations += 1;
        if iterations % 64 == 0 {
            // Re-sum to keep running totals free of cancellation drift.
            (value, error) = totals(&segments);
        }
        let t = target(&value);
        if (0..N).all(|k| error[k] <= t[k]) {
            let (value, error) = totals(&segments);
            let t = target(&value);
            if (0..N).all(|k| error[k] <= t[k]) {
                return Ok(value);
            }
        }
        if segments.len() >= config.max_intervals {
            break;
        }
    }

    let (value, error) = totals(&segments);
    let t = target(&value);
    if (0..N).all(|k| error[k] <= t[k]) {
        return Ok(value);
    }
    let worst = (0..N).map(|k| error[k]).fold(0.0, f64::max);
    Err(Error::Quadrature {
        a: points[0],
        b: points[points.len() - 1],
        error: worst,
        intervals: segments.len(),
    })
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let [v] = integrate(|x| [f(x)], &[lo, hi], config)?;
    Ok(sign * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        for p in 0..=31 {
            let s = gauss_kronrod(&|x: f64| [x.powi(p)], 0.0, 1.0);
            let exact = 1.0 / (p as f64 + 1.0);
            assert!((s.value[0] - exact).abs() < 1e-14, "degree {p}");
        }
        // The embedded Gauss rule is exact through degree 19.
        let s = gauss_kronrod(&|x: f64| [x.powi(19)], 0.0, 1.0);
        assert!(s.error[0] < 1e-14);
    }

    #[test]
    fn smooth_and_singular_integrands() {
        let cfg = QuadratureConfig::default();
        let v = integrate_scalar(f64::exp, 0.0, 2.0, &cfg).unwrap();
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
        // Integrable endpoint singularity, within the requested relative tolerance.
        let v = integrate_scalar(|x| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 2e-8);
        // Reversed limits flip the sign.
        let v = integrate_scalar(f64::cos, 1.0, 0.0, &cfg).unwrap();
        assert!((v + 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_with_breakpoints() {
        let cfg = QuadratureConfig::default();
        let t = 200.0;
        let points: Vec<f64> = (0..=400).map(|i| i as f64 * 0.05).collect();
        let [c, s] = integrate(
            |x| [(x * t).cos() * (-x).exp(), (x * t).sin() * (-x).exp()],
            &points,
            &cfg,
        )
        .unwrap();
        // Closed form of ∫_0^20 e^{-x} e^{itx} dx.
        let z = num_complex::Complex64::new(-1.0, t);
        let exact = ((z * 20.0).exp() - 1.0) / z;
        assert!((c - exact.re).abs() < 1e-11);
        assert!((s - exact.im).abs() < 1e-11);
    }

    #[test]
    fn reports_failure_when_budget_is_exhausted() {
        let cfg = QuadratureConfig {
            tolerance: Tolerance { abs: 1e-15, rel: 1e-15 },
            max_intervals: 4,
        };
        let r = integrate_scalar(|x| (1000.0 * x).sin() / x.sqrt(), 0.0, 10.0, &cfg);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
