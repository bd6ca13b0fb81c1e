//! One-dimensional quadrature: Gauss–Legendre rules, adaptive
//! Gauss–Kronrod (G10/K21) panels and pairwise summation.
//!
//! Everything here is deterministic: panel nodes may be evaluated in
//! parallel, but partial sums are always combined in a fixed order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], positive half (QUADPACK qk21).
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
    0.123_491_976_262_065_851_077_600_525_452_912,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Sums with pairwise (cascade) reduction. Order of `values` is preserved,
/// so the result is bit-reproducible for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum_complex(lo) + pairwise_sum_complex(hi)
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|x| mid + half * x).collect(),
        w.iter().map(|w| half * w).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Equal-width panels before any refinement.
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            initial_panels: 1,
            max_panels: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod_panel<F>(f: &F, a: f64, b: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // 21 abscissae: center last, then ± pairs.
    let xs: Vec<f64> = (0..21)
        .map(|j| match j {
            20 => center,
            j if j % 2 == 0 => center - half * XGK[j / 2],
            j => center + half * XGK[j / 2],
        })
        .collect();
    let fx: Vec<Complex64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;

    let fc = fx[20];
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_k = fc.norm() * WGK[10];
    for k in 0..10 {
        let pair = fx[2 * k] + fx[2 * k + 1];
        kron += pair * WGK[k];
        abs_k += (fx[2 * k].norm() + fx[2 * k + 1].norm()) * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for k in 0..10 {
        asc += WGK[k] * ((fx[2 * k] - mean).norm() + (fx[2 * k + 1] - mean).norm());
    }

    let value = kron * half;
    let res_abs = abs_k * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
    })
}

/// Adaptive G10/K21 integration of a complex-valued function on [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInterval {
            lo: a,
            hi: b,
            reason: "bounds must be finite".into(),
        });
    }
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels = (0..n0)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == n0 { b } else { lo + width };
            kronrod_panel(&f, lo, hi)
        })
        .collect::<Result<Vec<_>>>()?;
    let finite = |p: &Panel| -> Result<()> {
        if p.value.re.is_finite() && p.value.im.is_finite() && p.error.is_finite() {
            Ok(())
        } else {
            Err(Error::NonConvergent {
                estimate: f64::INFINITY,
                target: opts.abs_tol,
            })
        }
    };
    panels.iter().try_for_each(finite)?;

    loop {
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = pairwise_sum_complex(&panels.iter().map(|p| p.value).collect::<Vec<_>>());
        let error = pairwise_sum(&panels.iter().map(|p| p.error).collect::<Vec<_>>());
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(Integral {
                value,
                error,
                evaluations: panels.len() * 21,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::NonConvergent {
                estimate: error,
                target,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::NonConvergent {
                estimate: error,
                target,
            });
        }
        for half in [kronrod_panel(&f, p.a, mid)?, kronrod_panel(&f, mid, p.b)?] {
            finite(&half)?;
            panels.push(half);
        }
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let r = integrate(|x| f(x).map(|v| Complex64::new(v, 0.0)), a, b, opts)?;
    Ok((r.value.re, r.error))
}
