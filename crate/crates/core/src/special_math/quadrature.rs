//! Adaptive Gauss–Kronrod quadrature, Gauss–Legendre rules and radial Fourier
//! (Hankel) transforms.

use super::{bessel_j, sphere_area};
use crate::error::{domain, MathError, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Tolerances and limits for the adaptive integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Length scale L of the map x = a + L·t/(1−t) used on semi-infinite domains.
    pub tail_cut: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 2000, tail_cut: 1.0 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions < 1 {
            return domain(format!("invalid quadrature config {self:?}"));
        }
        if !(self.tail_cut > 0.0) {
            return domain("tail_cut must be positive");
        }
        Ok(())
    }

    pub fn with_tol(self, rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..self }
    }

    pub fn with_tail(self, tail_cut: f64) -> Self {
        Self { tail_cut, ..self }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integration domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// [a, ∞)
    UpperHalf(f64),
    /// (−∞, a]
    LowerHalf(f64),
    Whole,
}

/// Result of an adaptive run, converged or not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadEstimate {
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(MathError::Accuracy { estimate: self.value, error_bound: self.error })
        }
    }
}

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
    0.123_491_976_262_065_851_077_208_643_474_496,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel: (value, error estimate).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hl = h.abs();
    let mut err = ((resk - resg) * h).abs();
    let resasc = resasc * hl;
    let resabs = resabs * hl;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (resk * h, err)
}

#[derive(Clone, Copy, Debug)]
struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err.total_cmp(&o.err) == Ordering::Equal
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive bisection over the given starting intervals.
fn adapt<F: Fn(f64) -> f64>(g: &F, starts: &[(f64, f64)], cfg: &QuadratureConfig) -> QuadEstimate {
    let mut heap = BinaryHeap::with_capacity(2 * starts.len() + 16);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut frozen_val = 0.0;
    let mut frozen_err = 0.0;
    let mut evals = 0usize;
    for &(a, b) in starts {
        if a == b {
            continue;
        }
        let (val, err) = gk21(g, a, b);
        evals += 21;
        total += val;
        total_err += err;
        heap.push(Seg { a, b, val, err });
    }
    let mut splits = 0usize;
    let mut since_resum = 0usize;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return QuadEstimate { value: total, error: f64::INFINITY, evaluations: evals, converged: false };
        }
        if total_err <= cfg.target(total) {
            return QuadEstimate { value: total, error: total_err, evaluations: evals, converged: true };
        }
        let Some(seg) = heap.pop() else {
            // every remaining segment is at machine resolution
            let ok = frozen_err <= 10.0 * cfg.target(total);
            return QuadEstimate { value: total, error: total_err, evaluations: evals, converged: ok };
        };
        if splits >= cfg.max_subdivisions {
            heap.push(seg);
            return QuadEstimate { value: total, error: total_err, evaluations: evals, converged: false };
        }
        let mid = 0.5 * (seg.a + seg.b);
        let width = (seg.b - seg.a).abs();
        if width <= 8.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) || mid == seg.a || mid == seg.b {
            frozen_val += seg.val;
            frozen_err += seg.err;
            continue;
        }
        let (v1, e1) = gk21(g, seg.a, mid);
        let (v2, e2) = gk21(g, mid, seg.b);
        evals += 42;
        splits += 1;
        total += v1 + v2 - seg.val;
        total_err += e1 + e2 - seg.err;
        heap.push(Seg { a: seg.a, b: mid, val: v1, err: e1 });
        heap.push(Seg { a: mid, b: seg.b, val: v2, err: e2 });
        since_resum += 1;
        if since_resum >= 64 {
            since_resum = 0;
            total = frozen_val + heap.iter().map(|s| s.val).sum::<f64>();
            total_err = frozen_err + heap.iter().map(|s| s.err).sum::<f64>();
        }
    }
}

/// Adaptive integral over `domain`, returning the estimate even when the
/// tolerance was not met.
pub fn integrate_estimate<F: Fn(f64) -> f64>(f: F, domain: Domain, cfg: &QuadratureConfig) -> QuadEstimate {
    let l = cfg.tail_cut;
    match domain {
        Domain::Finite(a, b) => {
            if a == b {
                return QuadEstimate { value: 0.0, error: 0.0, evaluations: 0, converged: true };
            }
            adapt(&f, &[(a, b)], cfg)
        }
        Domain::UpperHalf(a) => {
            let g = |t: f64| {
                let d = 1.0 - t;
                let x = a + l * t / d;
                if !x.is_finite() {
                    return 0.0;
                }
                let v = f(x);
                if v == 0.0 { 0.0 } else { v * l / (d * d) }
            };
            adapt(&g, &[(0.0, 0.5), (0.5, 1.0)], cfg)
        }
        Domain::LowerHalf(a) => {
            let g = |t: f64| {
                let d = 1.0 - t;
                let x = a - l * t / d;
                if !x.is_finite() {
                    return 0.0;
                }
                let v = f(x);
                if v == 0.0 { 0.0 } else { v * l / (d * d) }
            };
            adapt(&g, &[(0.0, 0.5), (0.5, 1.0)], cfg)
        }
        Domain::Whole => {
            let g = |t: f64| {
                let d = 1.0 - t * t;
                let x = l * t / d;
                if !x.is_finite() {
                    return 0.0;
                }
                let v = f(x);
                if v == 0.0 { 0.0 } else { v * l * (1.0 + t * t) / (d * d) }
            };
            adapt(&g, &[(-1.0, -0.5), (-0.5, 0.0), (0.0, 0.5), (0.5, 1.0)], cfg)
        }
    }
}

/// Adaptive integral; an accuracy error carries the best estimate.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, domain: Domain, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if let Domain::Finite(a, b) = domain {
        if !a.is_finite() || !b.is_finite() {
            return domain_err(a, b);
        }
    }
    integrate_estimate(f, domain, cfg).into_result()
}

fn domain_err<T>(a: f64, b: f64) -> Result<T> {
    domain(format!("finite domain needs finite endpoints, got [{a}, {b}]"))
}

/// Integral over [p₀, p_last] with forced breakpoints at `points`, optionally
/// followed by the tail [p_last, ∞).
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tail: bool, cfg: &QuadratureConfig) -> QuadEstimate {
    let mut starts: Vec<(f64, f64)> = points.windows(2).map(|w| (w[0], w[1])).collect();
    if !tail {
        return adapt(&f, &starts, cfg);
    }
    // finite panels in x, tail mapped onto (K, K+1) with K = last panel index
    let a = *points.last().expect("at least one breakpoint");
    let l = cfg.tail_cut;
    let k = starts.len() as f64;
    let pts = points.to_vec();
    let g = |u: f64| {
        if u < k {
            let i = (u.floor() as usize).min(pts.len() - 2);
            let (x0, x1) = (pts[i], pts[i + 1]);
            let x = x0 + (u - i as f64) * (x1 - x0);
            f(x) * (x1 - x0)
        } else {
            let t = u - k;
            let d = 1.0 - t;
            let x = a + l * t / d;
            if !x.is_finite() {
                return 0.0;
            }
            let v = f(x);
            if v == 0.0 { 0.0 } else { v * l / (d * d) }
        }
    };
    starts = (0..starts.len()).map(|i| (i as f64, i as f64 + 1.0)).collect();
    starts.push((k, k + 0.5));
    starts.push((k + 0.5, k + 1.0));
    adapt(&g, &starts, cfg)
}

/// ∫_lo^hi f(x) dx through x = e^y; `lo` may be 0 and `hi` may be +∞.
pub fn integrate_log_scale<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> QuadEstimate {
    assert!(lo >= 0.0 && hi > lo, "log-scale integration needs 0 <= lo < hi");
    let g = |y: f64| {
        // beyond e^{±300} the integrand cannot matter at double precision
        if y.abs() > 300.0 {
            return 0.0;
        }
        let x = y.exp();
        let v = f(x);
        if v == 0.0 { 0.0 } else { v * x }
    };
    let cfg = cfg.with_tail(cfg.tail_cut.max(1.0));
    match (lo == 0.0, hi.is_infinite()) {
        (true, true) => integrate_estimate(g, Domain::Whole, &cfg),
        (true, false) => integrate_estimate(g, Domain::LowerHalf(hi.ln()), &cfg),
        (false, true) => integrate_estimate(g, Domain::UpperHalf(lo.ln()), &cfg),
        (false, false) => integrate_estimate(g, Domain::Finite(lo.ln(), hi.ln()), &cfg),
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1);
    let mut x = vec![0.0; npts];
    let mut w = vec![0.0; npts];
    let nf = npts as f64;
    for i in 0..npts.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=npts {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if npts == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[npts - 1 - i] = z;
        w[i] = wi;
        w[npts - 1 - i] = wi;
    }
    (x, w)
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut best = *seq.last().expect("non-empty sequence");
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 || !d.is_finite() {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}

/// Inverse-normalized radial Fourier transform
/// (2π)^{−m} ∫_{ℝ^m} f(|x|) e^{−i x·ξ} dx at |ξ| = r.
pub fn hankel_transform<F: Fn(f64) -> f64>(f: F, m: usize, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if m == 0 || r < 0.0 {
        return domain(format!("hankel transform needs m >= 1 and r >= 0 (m = {m}, r = {r})"));
    }
    let two_pi_m = (2.0 * PI).powi(m as i32);
    if r == 0.0 {
        let area = sphere_area(m);
        let mm = m as i32 - 1;
        let v = integrate_1d(|p| f(p) * p.powi(mm), Domain::UpperHalf(0.0), cfg)?;
        return Ok(area * v / two_pi_m);
    }
    let kernel = |p: f64| -> f64 {
        let x = r * p;
        match m {
            1 => x.cos() / PI,
            2 => p * bessel_j(0.0, x) / (2.0 * PI),
            3 => {
                let sinc = if x < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                p * p * sinc / (2.0 * PI * PI)
            }
            _ => {
                let h = m as f64 / 2.0;
                (2.0 * PI).powf(-h) * r.powf(1.0 - h) * p.powf(h) * bessel_j(h - 1.0, x)
            }
        }
    };
    let g = |p: f64| {
        let v = f(p);
        if v == 0.0 { 0.0 } else { v * kernel(p) }
    };
    if r * cfg.tail_cut < 1.0 {
        if let Ok(v) = integrate_1d(&g, Domain::UpperHalf(0.0), cfg) {
            return Ok(v);
        }
    }
    // several half-periods per panel when the oscillation is fast on the decay scale
    let width = PI / r * (r * cfg.tail_cut / 32.0).floor().max(1.0);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    let mut quiet = 0;
    let mut partial: Vec<f64> = Vec::new();
    let mut last_ext = f64::NAN;
    let mut stable = 0;
    let panel_cfg = QuadratureConfig { rel_tol: cfg.rel_tol, abs_tol: 0.1 * cfg.abs_tol, ..*cfg };
    for i in 0..200_000usize {
        let a = i as f64 * width;
        let est = integrate_estimate(g, Domain::Finite(a, a + width), &panel_cfg);
        sum += est.value;
        abs_sum += est.value.abs();
        err += est.error;
        partial.push(sum);
        // cancellation between panels limits what is attainable
        let target = cfg.target(sum).max(64.0 * f64::EPSILON * abs_sum);
        if est.value.abs() <= 0.05 * target && a > cfg.tail_cut {
            quiet += 1;
            if quiet >= 3 {
                return if err <= target * 10.0 {
                    Ok(sum)
                } else {
                    Err(MathError::Accuracy { estimate: sum, error_bound: err })
                };
            }
        } else {
            quiet = 0;
        }
        // slowly decaying (algebraic) tails: extrapolate the alternating partial sums
        if a > cfg.tail_cut && partial.len() >= 12 {
            let tail = &partial[partial.len().saturating_sub(31)..];
            let ext = wynn_epsilon(tail);
            let target = cfg.target(ext).max(64.0 * f64::EPSILON * abs_sum);
            if (ext - last_ext).abs() <= target {
                stable += 1;
                if stable >= 3 && err <= 10.0 * target.max(cfg.target(abs_sum)) {
                    return Ok(ext);
                }
            } else {
                stable = 0;
            }
            last_ext = ext;
        }
    }
    Err(MathError::Accuracy { estimate: sum, error_bound: f64::INFINITY })
}
