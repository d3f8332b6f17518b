//! Energy of extension solutions and the Hardy-type inequalities built on it.
//!
//! The energy is ∫₀^∞∫_N |∇u|² ρ^{1−2s} with ∇u = (X_j u, ½ρZ_k u, ∂_ρ u), computed
//! mode by mode: on ℍⁿ the (λ, k) component of u(·, ρ) is Θ_k(λ, ρ) f̂(λ, k) and
//! Θ_k depends on ρ√λ only, so every λ reduces to one integral e_k in t = ρ√λ.

use crate::constants::{c2, dtn_constant, lemma_i};
use crate::error::{domain, MathError, Result};
use crate::extension::{ExtensionSolution, InitialData};
use crate::group_core::{haar_polar_integral, koranyi, BiRadial, GroupParams};
use crate::kernels::{big_d, weight_w};
use crate::report::CheckReport;
use crate::special_math::{integrate_log_scale, ln_gamma, QuadratureConfig};
use crate::spectral::{binom_weight, LaguerreSpectrum, SpectralConfig};
use std::f64::consts::{FRAC_PI_2, PI};

/// Weighted Dirichlet energy ∫|∇u|²ρ^{1−2s} of bi-radial extension solutions on ℍⁿ.
#[derive(Clone, Copy, Debug)]
pub struct EnergyFunctional {
    pub n: usize,
    pub s: f64,
    pub cfg: QuadratureConfig,
}

impl EnergyFunctional {
    pub fn new(group: &GroupParams, s: f64, cfg: &QuadratureConfig) -> Result<Self> {
        if group.m() != 1 {
            return domain("the energy is implemented for m = 1");
        }
        if !(s > 0.0 && s < 1.0) {
            return domain(format!("the energy needs 0 < s < 1, got {s}"));
        }
        Ok(Self { n: group.n(), s, cfg: *cfg })
    }

    /// e_k = ∫₀^∞ (θ_k′(t)² + (2k+n+¼t²)θ_k(t)²) t^{1−2s} dt with θ_k(t) = Θ_k(1, t).
    pub fn mode_energy(&self, k: usize) -> Result<f64> {
        let (n, s) = (self.n as f64, self.s);
        let kf = k as f64;
        let b = 0.5 * (2.0 * kf + n + 1.0 + s);
        // t = τ/√β puts the transition of θ_k near τ = 1
        let beta = 2.0 * kf + n + 1.0;
        let inner = self.cfg.with_tol((self.cfg.rel_tol * 1e-2).max(1e-10), 0.0);
        let integrand = |tau: f64| {
            let t = tau / beta.sqrt();
            match theta_with_derivative(b, s, t, &inner) {
                Ok((th, dth)) => {
                    let d_tau = dth / beta.sqrt();
                    (d_tau * d_tau + ((2.0 * kf + n) / beta + 0.25 * tau * tau / (beta * beta)) * th * th) * tau.powf(1.0 - 2.0 * s)
                }
                Err(_) => f64::NAN,
            }
        };
        // below τ = ε, θ = 1 − Aτ^{2s} + O(τ²) integrates in closed form
        const EPS: f64 = 1e-10;
        let (_, dth) = theta_with_derivative(b, s, EPS / beta.sqrt(), &inner)?;
        let d_eps = dth / beta.sqrt();
        let head = d_eps * d_eps * EPS.powf(2.0 - 2.0 * s) / (2.0 * s) + (2.0 * kf + n) / beta * EPS.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        let est = integrate_log_scale(integrand, EPS, f64::INFINITY, &self.cfg);
        if !est.value.is_finite() {
            return Err(MathError::Accuracy { estimate: est.value, error_bound: f64::INFINITY });
        }
        Ok(beta.powf(s) * (head + est.into_result()?))
    }

    /// e_k on a grid of k up to `k_max` (every k below 24, then geometric).
    pub fn mode_table(&self, k_max: usize) -> Result<ModeTable> {
        let mut ks: Vec<usize> = (0..24.min(k_max + 1)).collect();
        let mut k = 24.0f64;
        while (k as usize) < k_max {
            let next = k.round() as usize;
            if next > *ks.last().unwrap() {
                ks.push(next);
            }
            k *= 1.2;
        }
        if *ks.last().unwrap() < k_max {
            ks.push(k_max);
        }
        let vals: Vec<Result<f64>> = crate::par::map(&ks, |&k| self.mode_energy(k));
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ModeTable { x: ks.iter().map(|&k| (k as f64 + 1.0).ln()).collect(), y: vals.iter().map(|v| v.ln()).collect() })
    }

    /// 2(2π)^{−n−1}∫₀^∞ λ^{n+s} Σ_k (k+n−1 choose k) f̂(λ,k)² e_k dλ.
    pub fn of_spectrum(&self, spec: &LaguerreSpectrum) -> Result<f64> {
        if spec.n != self.n {
            return domain("spectrum and energy functional disagree on n");
        }
        let table = self.mode_table(spec.k_max().max(1))?;
        let n = self.n;
        let mut total = 0.0;
        for (i, &l) in spec.lambda.iter().enumerate() {
            let row: f64 = spec.coeffs[i].iter().enumerate().map(|(k, c)| binom_weight(n, k) * c * c * table.eval(k)).sum();
            total += spec.weights[i] * l.powf(n as f64 + self.s) * row;
        }
        Ok(2.0 * (2.0 * PI).powi(-(n as i32) - 1) * total)
    }

    pub fn of_solution(&self, u: &ExtensionSolution) -> Result<f64> {
        if (u.s - self.s).abs() > 0.0 || u.n() != self.n {
            return domain("solution and energy functional disagree on (n, s)");
        }
        self.of_spectrum(&u.data_spectrum()?)
    }
}

/// θ(t) = (2a)^s L(a, b, b−s)/Γ(s) and dθ/dt, a = t²/4.
fn theta_with_derivative(b: f64, s: f64, t: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let a = 0.25 * t * t;
    if a > 800.0 {
        // θ ≤ (2a)^s e^{−a}Γ(b)/Γ(s)·(2a)^{−b}-sized: below the smallest double
        return Ok((0.0, 0.0));
    }
    let c = b - s;
    let g = |x: f64| (-a * (2.0 * x + 1.0) + (b - 1.0) * x.ln() - c * x.ln_1p()).exp();
    let l = integrate_log_scale(g, 0.0, f64::INFINITY, cfg).into_result()?;
    // ∫ ∂ₓ(x g) = 0 turns ∂_a[(2a)^s L] into −(2a)^s (L + (c/a)∫ g/(1+x)),
    // which has no cancellation as a → 0
    let l1 = integrate_log_scale(|x| g(x) / (1.0 + x), 0.0, f64::INFINITY, cfg).into_result()?;
    let pre = (s * (2.0 * a).ln() - ln_gamma(s)).exp();
    let dth_da = -pre * (l + c / a * l1);
    Ok((pre * l, 0.5 * t * dth_da))
}

/// ln e_k sampled in ln(k+1), cubic interpolation in between.
#[derive(Clone, Debug)]
pub struct ModeTable {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl ModeTable {
    pub fn eval(&self, k: usize) -> f64 {
        let x = (k as f64 + 1.0).ln();
        let len = self.x.len();
        if len < 4 {
            let i = self.x.iter().position(|&v| (v - x).abs() < 1e-12).expect("small tables are exact");
            return self.y[i].exp();
        }
        let j = self.x.partition_point(|&v| v < x);
        if j < len && (self.x[j] - x).abs() < 1e-12 {
            return self.y[j].exp();
        }
        let lo = j.saturating_sub(2).min(len - 4);
        let mut acc = 0.0;
        for i in lo..lo + 4 {
            let mut w = 1.0;
            for q in lo..lo + 4 {
                if q != i {
                    w *= (x - self.x[q]) / (self.x[i] - self.x[q]);
                }
            }
            acc += w * self.y[i];
        }
        acc.exp()
    }
}

/// (ℒ_s f, f) from a spectrum of f.
pub fn ls_quadratic_form(spec: &LaguerreSpectrum, s: f64) -> Result<f64> {
    Ok(spec.apply_ls(s)?.inner_product(spec))
}

/// ∫_N f² D_δ^{−s}, D_δ = (δ²+|v|²)² + 16|z|².
fn weighted_square<F: BiRadial + ?Sized>(n: usize, m: usize, f: &F, s: f64, delta: f64, cfg: &QuadratureConfig) -> f64 {
    let g = |r: f64, z: f64| {
        let v = f.value(r, z);
        v * v * big_d(delta, r, z).powf(-s)
    };
    haar_polar_integral(n, m, &g, cfg)
}

/// Trace Hardy inequality with φ = φ_{−s,δ}, for which ℒ_sφ/φ = C2δ^{2s}D_δ^{−s}:
/// ∫|∇u|²ρ^{1−2s} ≥ dtn_constant(s)·C2δ^{2s}∫ u(·,0)² D_δ^{−s}.
/// The verdict is gap ≥ −tol·LHS; equality holds when u solves the extension
/// problem with initial value φ_{−s,δ}.
pub fn trace_hardy_gap(u: &ExtensionSolution, delta: f64, tol: f64) -> Result<CheckReport> {
    if !(delta > 0.0) {
        return domain("trace Hardy needs delta > 0");
    }
    let (n, s) = (u.n(), u.s);
    let energy = EnergyFunctional::new(&u.group, s, &u.qcfg)?;
    let lhs = energy.of_solution(u)?;
    let f = u.data.on(n, 1);
    let rhs = dtn_constant(s)? * c2(n, 1, s)? * delta.powf(2.0 * s) * weighted_square(n, 1, &f, s, delta, &u.qcfg);
    let gap = lhs - rhs;
    Ok(CheckReport::new("trace-hardy")
        .param("n", n)
        .param("s", s)
        .param("delta", delta)
        .at_least(lhs, rhs, 0.0)
        .verdict(gap >= -tol * lhs.abs())
        .note(format!("gap {gap:.6e}, gap/lhs {:.3e}", gap / lhs)))
}

/// (ℒ_s f, f) ≥ C2 δ^{2s} ∫ f² D_δ^{−s} on ℍⁿ. The report is an inequality
/// (lhs ≥ rhs within tol·rhs) and its notes record the ratio.
pub fn hardy_nonhomogeneous(
    n: usize,
    f: &InitialData,
    s: f64,
    delta: f64,
    tol: f64,
    scfg: &SpectralConfig,
    qcfg: &QuadratureConfig,
) -> Result<CheckReport> {
    if !(delta > 0.0) {
        return domain("Hardy inequality needs delta > 0");
    }
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("Hardy inequality needs 0 < s < 1, got {s}"));
    }
    let spec = f.spectrum(n, scfg, qcfg)?;
    let lhs = ls_quadratic_form(&spec, s)?;
    let rhs = c2(n, 1, s)? * delta.powf(2.0 * s) * weighted_square(n, 1, &f.on(n, 1), s, delta, qcfg);
    Ok(CheckReport::new("hardy-nonhomogeneous")
        .param("n", n)
        .param("s", s)
        .param("delta", delta)
        .at_least(lhs, rhs, tol)
        .note(format!("ratio {:.8}", lhs / rhs)))
}

/// C2 δ^{2s} ∫_N φ_{−s,δ}² D_δ^{−s}: both sides of the nonhomogeneous Hardy
/// inequality at its extremal, in closed form.
pub fn hardy_extremal_value(n: usize, m: usize, s: f64, delta: f64) -> Result<f64> {
    let q = (n + m) as f64;
    Ok(c2(n, m, s)? * delta.powf(2.0 * s - 2.0 * q) * lemma_i(n, m, 0.0, q)?)
}

/// w_s on ℍⁿ from its values on the unit gauge sphere and homogeneity −2s:
/// w_s(x) = |x|^{−2s} w(α) with r = |x|√cos α, ζ = ¼|x|² sin α.
#[derive(Clone, Debug)]
pub struct HardyWeightTable {
    pub n: usize,
    pub s: f64,
    angles: Vec<f64>,
    values: Vec<f64>,
}

impl HardyWeightTable {
    pub fn new(group: &GroupParams, s: f64, count: usize, cfg: &QuadratureConfig) -> Result<Self> {
        if count < 4 {
            return domain("the weight table needs at least 4 angles");
        }
        let angles: Vec<f64> = (0..count).map(|i| FRAC_PI_2 * i as f64 / (count - 1) as f64).collect();
        let vals: Vec<Result<f64>> = crate::par::map(&angles, |&al| {
            let x = group.biradial_point(al.cos().sqrt(), 0.25 * al.sin());
            weight_w(group, s, &x, cfg)
        });
        Ok(Self { n: group.n(), s, angles, values: vals.into_iter().collect::<Result<Vec<_>>>()? })
    }

    /// Sampled angles and w_s values on the unit sphere.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.angles.iter().copied().zip(self.values.iter().copied())
    }

    fn on_sphere(&self, alpha: f64) -> f64 {
        let len = self.angles.len();
        let h = self.angles[1];
        let j = ((alpha / h).floor() as usize).min(len - 2);
        let lo = j.saturating_sub(1).min(len - 4);
        let mut acc = 0.0;
        for i in lo..lo + 4 {
            let mut w = 1.0;
            for q in lo..lo + 4 {
                if q != i {
                    w *= (alpha - self.angles[q]) / (self.angles[i] - self.angles[q]);
                }
            }
            acc += w * self.values[i];
        }
        acc
    }
}

impl BiRadial for HardyWeightTable {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        let big_r = koranyi(r, zeta);
        let alpha = (4.0 * zeta).atan2(r * r);
        big_r.powf(-2.0 * self.s) * self.on_sphere(alpha)
    }
}

/// (ℒ_s f, f) ≥ C2 ∫ f² w_s on ℍⁿ.
pub fn hardy_homogeneous(
    f: &InitialData,
    weight: &HardyWeightTable,
    tol: f64,
    scfg: &SpectralConfig,
    qcfg: &QuadratureConfig,
) -> Result<CheckReport> {
    let (n, s) = (weight.n, weight.s);
    let spec = f.spectrum(n, scfg, qcfg)?;
    let lhs = ls_quadratic_form(&spec, s)?;
    let fb = f.on(n, 1);
    let g = |r: f64, z: f64| {
        let v = fb.value(r, z);
        if v == 0.0 { 0.0 } else { v * v * weight.value(r, z) }
    };
    let rhs = c2(n, 1, s)? * haar_polar_integral(n, 1, &g, qcfg);
    let report = CheckReport::new("hardy-homogeneous").param("n", n).param("s", s);
    if lhs == 0.0 && rhs == 0.0 {
        return Ok(report.absolute(0.0, 0.0, 0.0).note("zero data"));
    }
    Ok(report.at_least(lhs, rhs, tol).note(format!("ratio {:.8}", lhs / rhs)))
}

/// Σ_{j≥0} Γ(a+j)/Γ(a+1+s+j) against Γ(s)Γ(a)/(Γ(1+s)Γ(a+s)). The first
/// `k_terms` terms are summed and the rest estimated by Euler–Maclaurin.
pub fn isometry_sum(a: f64, s: f64, k_terms: usize) -> Result<CheckReport> {
    if !(a > 0.0 && s > 0.0) {
        return domain("the summation identity needs a, s > 0");
    }
    if k_terms < 10 {
        return domain("the summation identity needs at least 10 explicit terms");
    }
    let term = |x: f64| ln_gamma_difference(a + x, 1.0 + s).exp();
    let partial: f64 = (0..k_terms).rev().map(|j| term(j as f64)).sum();
    let k = k_terms as f64;
    let cfg = QuadratureConfig::default().with_tol(1e-11, 0.0);
    let integral = integrate_log_scale(term, k, f64::INFINITY, &cfg).into_result()?;
    let h = 0.5;
    let d1 = (term(k + h) - term(k - h)) / (2.0 * h);
    let d3 = (term(k + 2.0 * h) - 2.0 * term(k + h) + 2.0 * term(k - h) - term(k - 2.0 * h)) / (2.0 * h * h * h);
    let tail = integral + 0.5 * term(k) - d1 / 12.0 + d3 / 720.0;
    let closed = (ln_gamma(s) + ln_gamma(a) - ln_gamma(1.0 + s) - ln_gamma(a + s)).exp();
    // the next Euler–Maclaurin term is about t⁽⁵⁾(K)/30240 ~ t(K)·(1+s)⁵/K⁵
    let next = term(k) * (1.0 + s).powi(5) / (30240.0 * k.powi(5));
    if next > 1e-10 * closed {
        return Err(MathError::Accuracy { estimate: partial + tail, error_bound: next });
    }
    Ok(CheckReport::new("isometry-sum")
        .param("a", a)
        .param("s", s)
        .param("k_terms", k_terms)
        .relative(partial + tail, closed, 1e-8)
        .note(format!("tail {tail:.3e}")))
}

/// ln Γ(x) − ln Γ(x+d), by Stirling's series once x is large enough that the
/// direct difference cancels.
fn ln_gamma_difference(x: f64, d: f64) -> f64 {
    if x < 1e6 {
        return ln_gamma(x) - ln_gamma(x + d);
    }
    // ln Γ(x+d) − ln Γ(x) = d ln x + d(d−1)/(2x) − d(d−1)(2d−1)/(12x²) + O(x⁻³)
    let y = 1.0 / x;
    -(d * x.ln() + d * (d - 1.0) * 0.5 * y - d * (d - 1.0) * (2.0 * d - 1.0) / 12.0 * y * y)
}

/// π^{2n+4}Γ(s)Γ(1+s)/(2^{2n−2−6s}Γ((n+1−s)/2)⁴): the constant of the
/// H^s(ℍⁿ) → H^{s+1}(ℍ^{n+1}) isometry of the solution operator, 0 < s < n+1.
/// Formula evaluation only; not verified end to end.
pub fn isometry_constant(n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0 && s < nf + 1.0) {
        return domain(format!("the isometry constant needs 0 < s < n+1, got {s}"));
    }
    Ok(((2.0 * nf + 4.0) * PI.ln() + ln_gamma(s) + ln_gamma(1.0 + s)
        - (2.0 * nf - 2.0 - 6.0 * s) * 2f64.ln()
        - 4.0 * ln_gamma(0.5 * (nf + 1.0 - s)))
    .exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::fd_weights;
    use crate::group_core::heisenberg;
    use crate::spectral::{extension_symbols, ls_multiplier};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::default().with_tol(1e-10, 0.0)
    }

    fn functional(s: f64) -> EnergyFunctional {
        EnergyFunctional::new(&heisenberg(1).unwrap(), s, &qcfg()).unwrap()
    }

    #[test]
    fn mode_energy_against_symbol_quadrature() {
        // ρ-integral of the spectral symbol itself, derivative by finite differences
        let (s, lambda, n) = (0.4, 2.0, 1usize);
        for k in [0usize, 3] {
            let off = [-2.0, -1.0, 0.0, 1.0, 2.0];
            let w = fd_weights(1, &off);
            let g = |rho: f64| {
                let h = 1e-3 * rho;
                let th: Vec<f64> = off.iter().map(|o| extension_symbols(n, s, lambda, rho + o * h, k + 1, &qcfg()).unwrap()[k]).collect();
                let d: f64 = w.iter().zip(&th).map(|(a, b)| a * b).sum::<f64>() / h;
                let kk = (2 * k + n) as f64;
                (d * d + (kk * lambda + 0.25 * rho * rho * lambda * lambda) * th[2] * th[2]) * rho.powf(1.0 - 2.0 * s)
            };
            // ρ < 10⁻⁹ carries a relative share of order (10⁻⁹)^{2s}
            let direct = integrate_log_scale(g, 1e-9, 60.0, &qcfg().with_tol(1e-7, 0.0)).value;
            let e = functional(s).mode_energy(k).unwrap() * lambda.powf(s);
            assert_relative_eq!(direct, e, max_relative = 1e-5);
        }
    }

    #[test]
    fn mode_energy_is_dtn_times_multiplier() {
        for s in [0.3, 0.5, 0.8] {
            let e = functional(s);
            for k in [0usize, 7, 40, 2000] {
                let expect = dtn_constant(s).unwrap() * ls_multiplier(1, k, 1.0, s).unwrap();
                assert_relative_eq!(e.mode_energy(k).unwrap(), expect, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn mode_table_interpolates() {
        let e = functional(0.5);
        let t = e.mode_table(5000).unwrap();
        for k in [30usize, 333, 4321] {
            assert_relative_eq!(t.eval(k), e.mode_energy(k).unwrap(), max_relative = 1e-6);
        }
        assert_relative_eq!(t.eval(5), e.mode_energy(5).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn zero_data_has_zero_energy() {
        let u = ExtensionSolution::solve_spectral(1, InitialData::gaussian(1.0, 1.0).unwrap().scaled(0.0), 0.5, &SpectralConfig::quick(), &qcfg()).unwrap();
        assert_eq!(functional(0.5).of_solution(&u).unwrap(), 0.0);
    }

    #[test]
    fn energy_scales_under_dilation() {
        // f∘δ_r has energy r^{2s−Q} times that of f
        let (s, r) = (0.5, 2.0);
        let scfg = SpectralConfig::quick();
        let e = functional(s);
        let base = ExtensionSolution::solve_spectral(1, InitialData::gaussian(1.0, 0.5).unwrap(), s, &scfg, &qcfg()).unwrap();
        let dil = ExtensionSolution::solve_spectral(1, InitialData::gaussian(r * r, 0.5 * r.powi(4)).unwrap(), s, &scfg, &qcfg()).unwrap();
        let ratio = e.of_solution(&dil).unwrap() / e.of_solution(&base).unwrap();
        assert_relative_eq!(ratio, r.powf(2.0 * s - 4.0), max_relative = 1e-4);
    }

    #[test]
    fn trace_hardy_is_quadratic_in_u() {
        let s = 0.5;
        let scfg = SpectralConfig::quick();
        let data = InitialData::gaussian(1.0, 1.0).unwrap();
        let u = ExtensionSolution::solve_spectral(1, data.clone(), s, &scfg, &qcfg()).unwrap();
        let u3 = ExtensionSolution::solve_spectral(1, data.scaled(3.0), s, &scfg, &qcfg()).unwrap();
        let a = trace_hardy_gap(&u, 1.0, 1e-3).unwrap();
        let b = trace_hardy_gap(&u3, 1.0, 1e-3).unwrap();
        assert!(a.pass && b.pass && a.lhs > a.rhs);
        assert_relative_eq!(b.lhs, 9.0 * a.lhs, max_relative = 1e-10);
        assert_relative_eq!(b.rhs, 9.0 * a.rhs, max_relative = 1e-10);
    }

    #[test]
    fn extremal_closed_form_matches_quadrature() {
        for &(s, delta) in &[(0.3, 0.5), (0.7, 2.0)] {
            let f = |r: f64, z: f64| crate::kernels::phi(1, 1, -s, delta, r, z);
            let q = c2(1, 1, s).unwrap() * delta.powf(2.0 * s) * weighted_square(1, 1, &f, s, delta, &qcfg());
            assert_relative_eq!(q, hardy_extremal_value(1, 1, s, delta).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn hardy_gaussian_ratio_is_dilation_invariant() {
        let (s, r) = (0.5, 1.7);
        let scfg = SpectralConfig::quick();
        let a = hardy_nonhomogeneous(1, &InitialData::gaussian(1.0, 1.0).unwrap(), s, 1.0, 1e-3, &scfg, &qcfg()).unwrap();
        let b = hardy_nonhomogeneous(1, &InitialData::gaussian(r * r, r.powi(4)).unwrap(), s, 1.0 / r, 1e-3, &scfg, &qcfg()).unwrap();
        assert!(a.pass && a.lhs > a.rhs);
        assert_relative_eq!(a.lhs / a.rhs, b.lhs / b.rhs, max_relative = 1e-3);
    }

    #[test]
    fn weight_table_is_homogeneous_and_interpolates() {
        let g = heisenberg(1).unwrap();
        let cfg = QuadratureConfig::default().with_tol(1e-7, 0.0);
        let t = HardyWeightTable::new(&g, 0.5, 9, &cfg).unwrap();
        let al = 0.6f64;
        let (r, z) = (al.cos().sqrt(), 0.25 * al.sin());
        let direct = weight_w(&g, 0.5, &g.biradial_point(r, z), &cfg).unwrap();
        assert_relative_eq!(t.value(r, z), direct, max_relative = 1e-4);
        assert_relative_eq!(t.value(2.0 * r, 4.0 * z), 0.5 * t.value(r, z), max_relative = 1e-12);
    }

    #[test]
    fn homogeneous_hardy_zero_and_gaussian() {
        let g = heisenberg(1).unwrap();
        let cfg = QuadratureConfig::default().with_tol(1e-7, 0.0);
        let t = HardyWeightTable::new(&g, 0.5, 9, &cfg).unwrap();
        let scfg = SpectralConfig::quick();
        let data = InitialData::gaussian(1.0, 1.0).unwrap();
        let zero = hardy_homogeneous(&data.scaled(0.0), &t, 1e-3, &scfg, &qcfg()).unwrap();
        assert!(zero.pass && zero.lhs == 0.0);
        let r = hardy_homogeneous(&data, &t, 1e-3, &scfg, &qcfg()).unwrap();
        assert!(r.pass && r.lhs > r.rhs, "{r:?}");
    }

    #[test]
    fn isometry_sum_examples() {
        // telescoping: Σ 1/((j+1)(j+2)) = 1
        let r = isometry_sum(1.0, 1.0, 100).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.rhs, 1.0, max_relative = 1e-14);
        assert!(isometry_sum(2.3, 0.5, 10_000).unwrap().pass);
        assert!(isometry_sum(50.0, 0.25, 10_000).unwrap().pass);
        assert!(isometry_sum(0.5, 0.25, 5).is_err());
        assert!(isometry_sum(-1.0, 0.5, 100).is_err());
    }

    #[test]
    fn isometry_constant_by_hand() {
        // n = 1, s = ½: π⁶·Γ(½)Γ(3/2)·2³/Γ(¾)⁴ = 4π⁷/Γ(¾)⁴
        let g34 = 1.225_416_702_465_177_6f64;
        assert_relative_eq!(isometry_constant(1, 0.5).unwrap(), 4.0 * PI.powi(7) / g34.powi(4), max_relative = 1e-13);
        assert!(isometry_constant(1, 2.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn isometry_sum_holds(a in 0.5f64..50.0, s in 0.25f64..1.5) {
            let r = isometry_sum(a, s, 20_000).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
