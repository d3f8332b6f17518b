//! Radial spectral calculus on the Heisenberg group ℍⁿ (m = 1).
//!
//! Conventions: f^λ(v) = ∫ f(v,z) e^{iλz} dz, φ_k^λ(v) = L_k^{n−1}(½λ|v|²) e^{−¼λ|v|²} and
//!
//!   f̂(λ,k) = k!(n−1)!/(k+n−1)! ∫ f^λ(v) φ_k^λ(v) dv,
//!   f(v,z) = (2π)^{−1} ∫ e^{−iλz} (|λ|/2π)^n Σ_k f̂(λ,k) φ_k^λ(v) dλ.
//!
//! With this normalisation the heat kernel q_t has f̂(λ,k) = e^{−(2k+n)|λ|t}.

use crate::constants::in_forbidden_set;
use crate::error::{domain, MathError, Result};
use crate::group_core::BiRadial;
use crate::special_math::{
    gauss_legendre, hankel_transform, integrate_breaks, integrate_log_scale, ln_gamma, ln_gamma_ratio, sphere_area,
    LaguerreStream, QuadratureConfig,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// L(a,b,c) = ∫₀^∞ e^{−a(2x+1)} x^{b−1} (1+x)^{−c} dx by quadrature in ln x.
pub fn l_function(a: f64, b: f64, c: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !c.is_finite() {
        return domain(format!("L-function needs a, b > 0 (a = {a}, b = {b})"));
    }
    let g = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        (-a * (2.0 * x + 1.0) + (b - 1.0) * x.ln() - c * x.ln_1p()).exp()
    };
    integrate_log_scale(g, 0.0, f64::INFINITY, &cfg.with_tol(cfg.rel_tol, 0.0)).into_result()
}

/// L(a, b₀+k, b₀−s+k) for k = 0..count by backward (Miller) recurrence,
///
///   (b−1)L_{k−1} + (1+s−2b−2a)L_k + (b−s)L_{k+1} = 0,  b = b₀+k,
///
/// normalised by a quadrature value of L_0. The sequence is the minimal
/// solution (L_k ~ e^{−2√(2ab)}), so the recurrence is stable downwards.
pub fn l_sequence(a: f64, b0: f64, s: f64, count: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let l0 = l_function(a, b0, b0 - s, cfg)?;
    if count == 1 {
        return Ok(vec![l0]);
    }
    // start far enough beyond count that the dominant solution has died out
    let kmax = (count - 1) as f64;
    let root = (kmax + b0).sqrt() + 20.0 / (2.0 * a).sqrt() + 4.0;
    let start = (root * root - b0).ceil().max(kmax + 30.0);
    if start > 5e7 {
        return Err(MathError::Accuracy { estimate: f64::NAN, error_bound: f64::INFINITY });
    }
    let start = start as usize;
    let mut out = vec![0.0; count];
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    for k in (1..=start).rev() {
        let b = b0 + k as f64;
        let prev = -((1.0 + s - 2.0 * b - 2.0 * a) * cur + (b - s) * next) / (b - 1.0);
        next = cur;
        cur = prev;
        if k - 1 < count {
            out[k - 1] = cur;
        }
        if cur.abs() > 1e250 {
            let scale = 1.0 / cur.abs();
            cur *= scale;
            next *= scale;
            for o in out.iter_mut() {
                *o *= scale;
            }
        }
    }
    let norm = l0 / out[0];
    for o in out.iter_mut() {
        *o *= norm;
    }
    Ok(out)
}

/// ln c_{k,ρ}^λ(s) = ln[(2π)^{n+1}|λ|^s Γ((n+1+s)/2)^{−2} L(ρ²|λ|/4, (2k+n+1+s)/2, (2k+n+1−s)/2)].
pub fn ln_kernel_coefficient(n: usize, k: usize, lambda: f64, rho: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let nf = n as f64;
    let g = 0.5 * (nf + 1.0 + s);
    if !(g > 0.0) || !(lambda > 0.0 && rho > 0.0) {
        return domain("kernel coefficient needs lambda, rho > 0 and n+1+s > 0");
    }
    let b = 0.5 * (2.0 * k as f64 + nf + 1.0 + s);
    let c = 0.5 * (2.0 * k as f64 + nf + 1.0 - s);
    let l = l_function(0.25 * rho * rho * lambda, b, c, cfg)?;
    Ok((nf + 1.0) * (2.0 * PI).ln() + s * lambda.ln() - 2.0 * ln_gamma(g) + l.ln())
}

/// Group Fourier coefficient c_{k,ρ}^λ(s) of φ_{s,ρ} in the normalisation of the L-function display.
pub fn kernel_coefficient(n: usize, k: usize, lambda: f64, rho: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_kernel_coefficient(n, k, lambda, rho, s, cfg)?.exp())
}

/// Laguerre coefficient of φ_{s,ρ} in this module's normalisation: 4^{−(n+1+s)} c_{k,ρ}^λ(s).
pub fn phi_coefficient(n: usize, k: usize, lambda: f64, rho: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let ln4 = 4f64.ln();
    Ok((ln_kernel_coefficient(n, k, lambda, rho, s, cfg)? - (n as f64 + 1.0 + s) * ln4).exp())
}

/// Laguerre coefficients 4^{−(n+1+σ)} c_{k,δ}^λ(σ) of φ_{σ,δ} for k = 0..count, by
/// the three-term recurrence in k (σ may be negative).
pub fn phi_coefficient_row(n: usize, lambda: f64, delta: f64, sigma: f64, count: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let nf = n as f64;
    let g = 0.5 * (nf + 1.0 + sigma);
    if !(g > 0.0) || !(lambda > 0.0 && delta > 0.0) {
        return domain("kernel coefficients need lambda, delta > 0 and n+1+sigma > 0");
    }
    let a = 0.25 * delta * delta * lambda;
    let l = l_sequence(a, g, sigma, count, cfg)?;
    let pref = ((nf + 1.0) * (2.0 * PI).ln() + sigma * lambda.ln() - 2.0 * ln_gamma(g) - (nf + 1.0 + sigma) * 4f64.ln()).exp();
    Ok(l.into_iter().map(|v| v * pref).collect())
}

/// Θ_k from the connection formula U(B,1+s,x) = Γ(−s)/Γ(B−s)·M(B,1+s,x) + Γ(s)/Γ(B)·x^{−s}M(B−s,1−s,x),
/// x = 2a; accurate while B·x is of order one (non-integer s only).
fn theta_series(big_b: f64, s: f64, x: f64) -> Result<f64> {
    let kummer = |p: f64, q: f64| {
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for j in 0..10_000 {
            let jf = j as f64;
            term *= (p + jf) * x / ((q + jf) * (jf + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    };
    let (lr, sign) = ln_gamma_ratio(big_b, big_b - s)?;
    let g = crate::special_math::gamma(-s)? / crate::special_math::gamma(s)?;
    let first = sign * (s * x.ln() + lr).exp() * g * kummer(big_b, 1.0 + s);
    Ok((-0.5 * x).exp() * (first + kummer(big_b - s, 1.0 - s)))
}

/// Spectral symbol Θ_k(λ,ρ) of u(·,ρ) = C1 ρ^{2s} f ∗ φ_{s,ρ}, k = 0..count:
/// Θ_k = (2a)^s L(a, b_k, b_k − s)/Γ(s) with a = ρ²λ/4, b_k = (2k+n+1+s)/2.
pub fn extension_symbols(n: usize, s: f64, lambda: f64, rho: f64, count: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    if !(s > 0.0) || !(lambda > 0.0 && rho > 0.0) {
        return domain("extension symbol needs s, lambda, rho > 0");
    }
    let a = 0.25 * rho * rho * lambda;
    let x = 2.0 * a;
    let b0 = 0.5 * (n as f64 + 1.0 + s);
    let mut out = Vec::with_capacity(count);
    if s.fract() != 0.0 {
        while out.len() < count && (b0 + out.len() as f64) * x <= 2.0 {
            out.push(theta_series(b0 + out.len() as f64, s, x)?);
        }
    }
    let k0 = out.len();
    if k0 < count {
        let pref = (s * x.ln() - ln_gamma(s)).exp();
        let l = l_sequence(a, b0 + k0 as f64, s, count - k0, cfg)?;
        out.extend(l.into_iter().map(|v| v * pref));
    }
    Ok(out)
}

/// ln of the ℒ_s multiplier (2|λ|)^s Γ((2k+n+1+s)/2)/Γ((2k+n+1−s)/2), with its sign.
pub fn ln_ls_multiplier(n: usize, k: usize, lambda: f64, s: f64) -> Result<(f64, f64)> {
    if in_forbidden_set(n, s) {
        return domain(format!("s = {s} lies in the forbidden set for n = {n}"));
    }
    if !(lambda > 0.0) {
        return domain("multiplier needs lambda > 0");
    }
    let base = 2.0 * k as f64 + n as f64 + 1.0;
    let (lr, sign) = ln_gamma_ratio(0.5 * (base + s), 0.5 * (base - s))?;
    Ok((s * (2.0 * lambda).ln() + lr, sign))
}

/// ℒ_s multiplier on the (λ,k) spectral component.
pub fn ls_multiplier(n: usize, k: usize, lambda: f64, s: f64) -> Result<f64> {
    let (l, sign) = ln_ls_multiplier(n, k, lambda, s)?;
    Ok(sign * l.exp())
}

/// Heat multiplier e^{−(2k+n)|λ|t}.
pub fn heat_multiplier(n: usize, k: usize, lambda: f64, t: f64) -> f64 {
    (-(2.0 * k as f64 + n as f64) * lambda.abs() * t).exp()
}

pub(crate) fn binom_weight(n: usize, k: usize) -> f64 {
    // (k+n−1)!/(k!(n−1)!)
    let mut w = 1.0;
    for j in 1..n {
        w *= (k + j) as f64 / j as f64;
    }
    w
}

/// Laguerre projection k!(n−1)!/(k+n−1)! ∫_{ℝ^{2n}} g(|v|) φ_k^λ(v) dv of a radial v-profile.
pub fn laguerre_project<G: Fn(f64) -> f64>(n: usize, lambda: f64, k: usize, g: G, cfg: &QuadratureConfig) -> Result<f64> {
    if n == 0 || !(lambda > 0.0) {
        return domain("Laguerre projection needs n >= 1 and lambda > 0");
    }
    // x = ½λ|v|²: dv = |S^{2n−1}| 2^{n−1} λ^{−n} x^{n−1} dx
    let alpha = (n - 1) as f64;
    let integrand = |x: f64| {
        let r = (2.0 * x / lambda).sqrt();
        let gv = g(r);
        if gv == 0.0 {
            return 0.0;
        }
        let mut st = LaguerreStream::new(alpha, x);
        for _ in 0..k {
            st.advance();
        }
        gv * x.powi(n as i32 - 1) * st.value() * (-0.5 * x).exp()
    };
    let span = 4.0 * k as f64 + 2.0 * n as f64 + 40.0;
    let panels = k + 8;
    let pts: Vec<f64> = (0..=panels).map(|i| span * i as f64 / panels as f64).collect();
    let est = integrate_breaks(&integrand, &pts, true, cfg);
    if !est.value.is_finite() {
        return Err(MathError::Accuracy { estimate: est.value, error_bound: est.error });
    }
    if !(est.error <= 100.0 * cfg.rel_tol * est.value.abs() + cfg.abs_tol) {
        // near-orthogonal cases: measure the error against the L¹ size instead
        let l1 = integrate_breaks(|x| integrand(x).abs(), &pts, true, cfg);
        if !(est.error <= 100.0 * cfg.rel_tol * l1.value + cfg.abs_tol) {
            return Err(MathError::Accuracy { estimate: est.value, error_bound: est.error });
        }
    }
    let v = est.value;
    Ok(v * sphere_area(2 * n) * 2f64.powi(n as i32 - 1) * lambda.powi(-(n as i32)) / binom_weight(n, k))
}

/// f̂(λ,k) of a bi-radial function f(|v|, |z|) on ℍⁿ.
pub fn laguerre_transform<F: BiRadial + ?Sized>(n: usize, f: &F, lambda: f64, k: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let inner = cfg.with_tol(0.1 * cfg.rel_tol, 0.1 * cfg.abs_tol);
    let profile = |r: f64| {
        // f^λ(r) = 2∫₀^∞ f(r,z) cos(λz) dz = 2π·hankel₁
        2.0 * PI * hankel_transform(|z: f64| f.value(r, z), 1, lambda, &inner).unwrap_or(f64::NAN)
    };
    let v = laguerre_project(n, lambda, k, profile, cfg)?;
    if v.is_nan() {
        return Err(MathError::Accuracy { estimate: v, error_bound: f64::INFINITY });
    }
    Ok(v)
}

/// λ-grid and truncation controls for [`LaguerreSpectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Gauss–Legendre panels in ln λ.
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Hard cap on the Laguerre degree.
    pub k_max: usize,
    /// Relative size below which the coefficient sequence is cut.
    pub coeff_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { lambda_min: 1e-3, lambda_max: 50.0, panels: 6, nodes_per_panel: 16, k_max: 400_000, coeff_tol: 1e-13 }
    }
}

impl SpectralConfig {
    pub fn quick() -> Self {
        Self { panels: 4, nodes_per_panel: 12, coeff_tol: 1e-10, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min) || self.panels == 0 || self.nodes_per_panel == 0 {
            return domain("spectral grid needs 0 < lambda_min < lambda_max and at least one node");
        }
        if !(self.coeff_tol > 0.0 && self.coeff_tol < 1.0) || self.k_max == 0 {
            return domain("coeff_tol must lie in (0,1) and k_max >= 1");
        }
        Ok(())
    }

    /// Nodes and weights for ∫₀^∞ g(λ) dλ: a midpoint node for (0, λ_min] and
    /// Gauss–Legendre panels in ln λ on [λ_min, λ_max].
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = gauss_legendre(self.nodes_per_panel);
        let mut nodes = vec![0.5 * self.lambda_min];
        let mut weights = vec![self.lambda_min];
        let (lo, hi) = (self.lambda_min.ln(), self.lambda_max.ln());
        let h = (hi - lo) / self.panels as f64;
        for p in 0..self.panels {
            let a = lo + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                let y = a + 0.5 * h * (xi + 1.0);
                let l = y.exp();
                nodes.push(l);
                weights.push(0.5 * h * wi * l);
            }
        }
        (nodes, weights)
    }
}

/// Radial spectrum f̂(λ_i, k) on a λ-grid, even in λ, with per-node truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaguerreSpectrum {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub weights: Vec<f64>,
    /// Ragged: coeffs[i][k] for k below the truncation degree at λ_i.
    pub coeffs: Vec<Vec<f64>>,
    /// Largest relative size of a dropped coefficient (the truncation estimate).
    pub tail_bound: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectrumHeader {
    n: usize,
    nodes: usize,
    k_max: usize,
    tail_bound: f64,
}

impl LaguerreSpectrum {
    /// Builds the spectrum from a coefficient function, cutting each λ row once
    /// |f̂(λ,k)|·(k+n−1 choose k) stays below coeff_tol times its running maximum.
    pub fn from_fn<F>(n: usize, cfg: &SpectralConfig, f: F) -> Result<Self>
    where
        F: Fn(f64, usize) -> f64 + Sync,
    {
        cfg.validate()?;
        if n == 0 {
            return domain("spectrum needs n >= 1");
        }
        let (lambda, weights) = cfg.nodes();
        let rows: Vec<(Vec<f64>, f64)> = crate::par::map(&lambda, |&l| truncated_row(n, cfg, |k| f(l, k)));
        Self::assemble(n, lambda, weights, rows)
    }

    /// Like [`from_fn`](Self::from_fn) with a whole row produced at once for
    /// each λ (the row may be longer than needed and is cut the same way).
    pub fn from_rows<F>(n: usize, cfg: &SpectralConfig, row: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<f64>> + Sync,
    {
        cfg.validate()?;
        let (lambda, weights) = cfg.nodes();
        let rows: Vec<Result<(Vec<f64>, f64)>> = crate::par::map(&lambda, |&l| {
            let full = row(l)?;
            Ok(truncated_row(n, cfg, |k| full.get(k).copied().unwrap_or(0.0)))
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Self::assemble(n, lambda, weights, rows)
    }

    fn assemble(n: usize, lambda: Vec<f64>, weights: Vec<f64>, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut tail = 0.0f64;
        let mut coeffs = Vec::with_capacity(rows.len());
        for (r, t) in rows {
            if r.iter().any(|v| !v.is_finite()) {
                return domain("spectrum has non-finite coefficients");
            }
            tail = tail.max(t);
            coeffs.push(r);
        }
        Ok(Self { n, lambda, weights, coeffs, tail_bound: tail })
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    pub fn zero_like(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|r| vec![0.0; r.len()]).collect(), tail_bound: 0.0, ..self.clone() }
    }

    /// Coefficient-wise multiplication by g(λ,k).
    pub fn map<F: Fn(f64, usize) -> f64 + Sync>(&self, g: F) -> Self {
        let coeffs = crate::par::map_range(self.lambda.len(), |i| {
            let l = self.lambda[i];
            self.coeffs[i].iter().enumerate().map(|(k, c)| c * g(l, k)).collect::<Vec<f64>>()
        });
        Self { coeffs, ..self.clone() }
    }

    /// Applies ℒ_s coefficient-wise.
    pub fn apply_ls(&self, s: f64) -> Result<Self> {
        if in_forbidden_set(self.n, s) {
            return domain(format!("s = {s} lies in the forbidden set for n = {}", self.n));
        }
        let n = self.n;
        let out = self.map(|l, k| ls_multiplier(n, k, l, s).unwrap_or(f64::NAN));
        if out.coeffs.iter().flatten().any(|v| !v.is_finite()) {
            return domain("multiplied spectrum is not finite");
        }
        // the multiplier grows like k^s, so the dropped tail grows with it
        let kk = self.k_max().max(1) as f64;
        let tail_bound = self.tail_bound * kk.powf(s.max(0.0));
        Ok(Self { tail_bound, ..out })
    }

    /// f(r, z) = π^{−1} ∫₀^∞ cos(λz) (λ/2π)^n Σ_k f̂(λ,k) φ_k^λ(r) dλ.
    pub fn inverse(&self, r: f64, z: f64) -> f64 {
        let n = self.n;
        let alpha = (n - 1) as f64;
        let mut total = 0.0;
        for (i, &l) in self.lambda.iter().enumerate() {
            let row = &self.coeffs[i];
            if row.is_empty() {
                continue;
            }
            let x = 0.5 * l * r * r;
            let mut st = LaguerreStream::new(alpha, x);
            let mut acc = 0.0;
            for (k, c) in row.iter().enumerate() {
                if k > 0 {
                    st.advance();
                }
                acc += c * st.value();
            }
            total += self.weights[i] * (l * z).cos() * (l / (2.0 * PI)).powi(n as i32) * (-0.5 * x).exp() * acc;
        }
        total / PI
    }

    /// Values on the tensor grid r_grid × z_grid, row-major in r. Each (λ, r)
    /// Laguerre sum is formed once and reused for every z.
    pub fn inverse_grid(&self, r_grid: &[f64], z_grid: &[f64]) -> Vec<f64> {
        let n = self.n;
        let alpha = (n - 1) as f64;
        let rows = crate::par::map(r_grid, |&r| {
            let profile: Vec<f64> = self
                .lambda
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let x = 0.5 * l * r * r;
                    let mut st = LaguerreStream::new(alpha, x);
                    let mut acc = 0.0;
                    for (k, c) in self.coeffs[i].iter().enumerate() {
                        if k > 0 {
                            st.advance();
                        }
                        acc += c * st.value();
                    }
                    self.weights[i] * (l / (2.0 * PI)).powi(n as i32) * (-0.5 * x).exp() * acc
                })
                .collect();
            z_grid
                .iter()
                .map(|&z| profile.iter().zip(&self.lambda).map(|(p, l)| p * (l * z).cos()).sum::<f64>() / PI)
                .collect::<Vec<f64>>()
        });
        rows.into_iter().flatten().collect()
    }

    /// Values at many (r, z) points, in parallel.
    pub fn inverse_many(&self, pts: &[(f64, f64)]) -> Vec<f64> {
        crate::par::map(pts, |&(r, z)| self.inverse(r, z))
    }

    /// Plancherel sum 2(2π)^{−n−1} ∫₀^∞ λ^n Σ_k (k+n−1 choose k)|f̂(λ,k)|² dλ = ‖f‖₂².
    pub fn plancherel_norm_sq(&self) -> f64 {
        self.inner_product(self)
    }

    /// ⟨f, g⟩ = ∫ f g for two spectra on the same grid.
    pub fn inner_product(&self, other: &Self) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for (i, &l) in self.lambda.iter().enumerate() {
            let a = &self.coeffs[i];
            let b = &other.coeffs[i];
            let s: f64 = a.iter().zip(b).enumerate().map(|(k, (x, y))| binom_weight(n, k) * x * y).sum();
            total += self.weights[i] * l.powi(n as i32) * s;
        }
        2.0 * (2.0 * PI).powi(-(n as i32) - 1) * total
    }

    /// CSV rows (λ, weight, k, value).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lambda", "weight", "k", "value"]).map_err(fmt_err)?;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                w.serialize((self.lambda[i], self.weights[i], k, v)).map_err(fmt_err)?;
            }
        }
        String::from_utf8(w.into_inner().map_err(|e| MathError::Format(e.to_string()))?).map_err(|e| MathError::Format(e.to_string()))
    }

    pub fn header_json(&self) -> String {
        serde_json::to_string_pretty(&SpectrumHeader {
            n: self.n,
            nodes: self.lambda.len(),
            k_max: self.k_max(),
            tail_bound: self.tail_bound,
        })
        .expect("header serialises")
    }

    /// Reads back the CSV and JSON header written by [`save`](Self::save).
    pub fn from_strings(header_json: &str, csv_data: &str) -> Result<Self> {
        let h: SpectrumHeader = serde_json::from_str(header_json).map_err(|e| MathError::Format(e.to_string()))?;
        let mut rdr = csv::Reader::from_reader(csv_data.as_bytes());
        let mut lambda: Vec<f64> = Vec::new();
        let mut weights = Vec::new();
        let mut coeffs: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.deserialize() {
            let (l, w, k, v): (f64, f64, usize, f64) = rec.map_err(fmt_err)?;
            if lambda.last() != Some(&l) {
                lambda.push(l);
                weights.push(w);
                coeffs.push(Vec::new());
            }
            let row = coeffs.last_mut().expect("row exists");
            if row.len() != k {
                return Err(MathError::Format(format!("spectrum row at lambda = {l} is not contiguous in k")));
            }
            row.push(v);
        }
        if lambda.len() != h.nodes {
            return Err(MathError::Format(format!("header says {} nodes, csv has {}", h.nodes, lambda.len())));
        }
        Ok(Self { n: h.n, lambda, weights, coeffs, tail_bound: h.tail_bound })
    }

    /// Writes `path` (CSV) and `path` with extension `.json` (header).
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| MathError::Format(e.to_string()))?;
        std::fs::write(path.with_extension("json"), self.header_json()).map_err(|e| MathError::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let csv_data = std::fs::read_to_string(path).map_err(|e| MathError::Format(e.to_string()))?;
        let header = std::fs::read_to_string(path.with_extension("json")).map_err(|e| MathError::Format(e.to_string()))?;
        Self::from_strings(&header, &csv_data)
    }
}

fn fmt_err(e: csv::Error) -> MathError {
    MathError::Format(e.to_string())
}

fn truncated_row<G: Fn(usize) -> f64>(n: usize, cfg: &SpectralConfig, g: G) -> (Vec<f64>, f64) {
    let mut row = Vec::new();
    let mut peak = 0.0f64;
    let mut quiet = 0usize;
    let mut last_size = 0.0f64;
    for k in 0..cfg.k_max {
        let v = g(k);
        let size = v.abs() * binom_weight(n, k);
        peak = peak.max(size);
        row.push(v);
        last_size = size;
        if size <= cfg.coeff_tol * peak {
            quiet += 1;
            if quiet >= 8 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    while row.len() > 1 && row.last().map(|v| v.abs() * binom_weight(n, row.len() - 1) <= cfg.coeff_tol * peak).unwrap_or(false) {
        row.pop();
    }
    let tail = if row.len() == cfg.k_max && peak > 0.0 { last_size / peak } else { cfg.coeff_tol };
    (row, tail)
}

/// Gaussian test data f(v,z) = e^{−a|v|² − bz²} with closed-form spectral data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub a: f64,
    pub b: f64,
}

impl Gaussian {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return domain("Gaussian needs a, b > 0");
        }
        Ok(Self { a, b })
    }

    /// f̂(λ,k) = √(π/b) e^{−λ²/4b} (2π/(2a+λ/2))^n w^k, w = (4a−λ)/(4a+λ).
    pub fn coefficient(&self, n: usize, lambda: f64, k: usize) -> f64 {
        let w = (4.0 * self.a - lambda) / (4.0 * self.a + lambda);
        (PI / self.b).sqrt()
            * (-lambda * lambda / (4.0 * self.b)).exp()
            * (2.0 * PI / (2.0 * self.a + 0.5 * lambda)).powi(n as i32)
            * w.powi(k as i32)
    }

    /// f^λ after the heat semigroup: z-Fourier profile of e^{−tℒ}f at |v| = r (Mehler).
    pub fn heat_profile(&self, n: usize, t: f64, lambda: f64, r: f64) -> f64 {
        let l = lambda.abs();
        if l == 0.0 {
            // Euclidean heat flow of e^{−a|v|²} on ℝ^{2n}
            let d = 1.0 + 4.0 * self.a * t;
            return (PI / self.b).sqrt() * d.powi(-(n as i32)) * (-self.a * r * r / d).exp();
        }
        let w = (4.0 * self.a - l) / (4.0 * self.a + l) * (-2.0 * l * t).exp();
        let pref = (PI / self.b).sqrt()
            * (-l * l / (4.0 * self.b)).exp()
            * (2.0 * PI / (2.0 * self.a + 0.5 * l)).powi(n as i32)
            * (-(n as f64) * l * t).exp()
            * (l / (2.0 * PI)).powi(n as i32);
        pref * (1.0 - w).powi(-(n as i32)) * (-0.25 * l * r * r * (1.0 + w) / (1.0 - w)).exp()
    }

    pub fn spectrum(&self, n: usize, cfg: &SpectralConfig) -> Result<LaguerreSpectrum> {
        let g = *self;
        LaguerreSpectrum::from_fn(n, cfg, move |l, k| g.coefficient(n, l, k))
    }
}

impl BiRadial for Gaussian {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        (-self.a * r * r - self.b * zeta * zeta).exp()
    }
}

/// ℒ_s f at (r, z) from a spectrum of f.
pub fn ls_pointwise(spectrum: &LaguerreSpectrum, s: f64, r: f64, z: f64) -> Result<f64> {
    Ok(spectrum.apply_ls(s)?.inverse(r, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::c2;
    use crate::kernels::{heat_q_profile, phi};
    use crate::special_math::gamma;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::default().with_tol(1e-12, 0.0)
    }

    #[test]
    fn l_function_examples() {
        let cfg = qcfg();
        for &(a, b) in &[(0.3, 0.7), (1.0, 2.5), (2.0, 10.0)] {
            let exact = (-a as f64).exp() * gamma(b).unwrap() * (2.0 * a as f64).powf(-b);
            assert_relative_eq!(l_function(a, b, 0.0, &cfg).unwrap(), exact, max_relative = 1e-10);
        }
        // brute force: fine trapezoid after x = u²/(1−u)²
        let brute = {
            let npts = 400_000;
            let mut acc = 0.5 * (-1.0f64).exp();
            for i in 1..npts {
                let u = i as f64 / npts as f64;
                let x = u / (1.0 - u);
                let dx = 1.0 / ((1.0 - u) * (1.0 - u));
                acc += (-(2.0 * x + 1.0)).exp() / (1.0 + x) * dx;
            }
            acc / npts as f64
        };
        assert_relative_eq!(l_function(1.0, 1.0, 1.0, &cfg).unwrap(), brute, max_relative = 1e-10);
        assert!(l_function(1.0, 1.5, 0.5, &cfg).unwrap() > l_function(2.0, 1.5, 0.5, &cfg).unwrap());
        assert!(l_function(0.0, 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn grid_inverse_matches_pointwise() {
        let spec = Gaussian::new(1.0, 2.0).unwrap().spectrum(2, &SpectralConfig::quick()).unwrap();
        let (rs, zs) = ([0.0, 0.4, 1.3], [0.0, 0.25, 0.9, 2.0]);
        let grid = spec.inverse_grid(&rs, &zs);
        for (i, &r) in rs.iter().enumerate() {
            for (j, &z) in zs.iter().enumerate() {
                assert_relative_eq!(grid[i * zs.len() + j], spec.inverse(r, z), max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn miller_matches_quadrature() {
        let cfg = qcfg();
        for &(a, b0, s) in &[(0.25, 1.25, 0.5), (0.01, 1.15, 0.3), (3.0, 1.35, 0.7), (0.5, 2.25, 1.5), (1e-4, 1.25, 0.5)] {
            let seq = l_sequence(a, b0, s, 60, &cfg).unwrap();
            for &k in &[0usize, 1, 7, 30, 59] {
                let b = b0 + k as f64;
                let direct = l_function(a, b, b - s, &cfg).unwrap();
                assert_relative_eq!(seq[k], direct, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn multiplier_properties() {
        assert_relative_eq!(ls_multiplier(1, 3, 0.7, 0.0).unwrap(), 1.0, max_relative = 1e-15);
        // s = 2: (2λ)² (b+1)(b)... Γ(b+2)/Γ(b) = (b+1)b, b = (2k+n−1)/2
        let (n, k, l) = (2usize, 5usize, 0.3);
        let b = (2.0 * k as f64 + n as f64 - 1.0) / 2.0;
        assert_relative_eq!(ls_multiplier(n, k, l, 2.0).unwrap(), (2.0 * l).powi(2) * b * (b + 1.0), max_relative = 1e-12);
        let m = ls_multiplier(1, 200, 0.8, 0.5).unwrap();
        assert!((m / ((2.0 * 200.0 + 1.0) * 0.8f64).powf(0.5) - 1.0).abs() < 0.02);
        assert!(ls_multiplier(1, 0, 1.0, 2.0).is_err());
        assert!(ln_ls_multiplier(1, 500, 3.0, 0.9).unwrap().0.is_finite());
        assert!(ln_kernel_coefficient(1, 500, 2.0, 1.0, 0.5, &qcfg()).unwrap().is_finite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn multiplier_reciprocity(k in 0usize..300, l in 0.01..40.0f64, s in -0.95..0.95f64) {
            let p = ls_multiplier(1, k, l, s).unwrap() * ls_multiplier(1, k, l, -s).unwrap();
            // Γ cancels; (2λ)^s(2λ)^{−s} = 1
            prop_assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_kernel_has_unit_normalisation() {
        let cfg = QuadratureConfig::default().with_tol(1e-11, 0.0);
        let (n, t) = (1usize, 0.4);
        for &l in &[0.3, 1.0, 2.5] {
            let c0 = laguerre_project(n, l, 0, |r| heat_q_profile(n, t, l, r), &cfg).unwrap();
            assert_relative_eq!(c0, (-(n as f64) * l * t).exp(), max_relative = 1e-8);
            for k in 0..6 {
                let a = laguerre_project(n, l, k, |r| heat_q_profile(n, t, l, r), &cfg).unwrap();
                let b = laguerre_project(n, l, k + 1, |r| heat_q_profile(n, t, l, r), &cfg).unwrap();
                assert_relative_eq!(b / a, (-2.0 * l * t).exp(), max_relative = 1e-6);
            }
        }
        // orthogonality: f^λ = φ_0^λ has no k = 1 component
        let c1 = laguerre_project(2, 0.9, 1, |r| (-0.25 * 0.9 * r * r).exp(), &cfg).unwrap();
        assert!(c1.abs() < 1e-8);
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = Gaussian::new(0.8, 1.3).unwrap();
        let cfg = QuadratureConfig::default().with_tol(1e-10, 1e-14);
        for &(n, l, k) in &[(1usize, 0.5, 0usize), (1, 2.0, 3), (2, 1.1, 5)] {
            let v = laguerre_transform(n, &g, l, k, &cfg).unwrap();
            assert_relative_eq!(v, g.coefficient(n, l, k), max_relative = 1e-7);
        }
        // linearity
        let h = Gaussian::new(1.5, 0.6).unwrap();
        let sum = |r: f64, z: f64| 2.0 * g.value(r, z) - h.value(r, z);
        let v = laguerre_transform(1, &sum, 1.2, 2, &cfg).unwrap();
        assert_relative_eq!(v, 2.0 * g.coefficient(1, 1.2, 2) - h.coefficient(1, 1.2, 2), max_relative = 1e-7);
    }

    #[test]
    fn phi_transform_matches_kernel_coefficient() {
        let cfg = QuadratureConfig::default().with_tol(1e-10, 1e-15);
        let (n, s, rho) = (1usize, 0.5, 1.0);
        let f = |r: f64, z: f64| phi(n, 1, s, rho, r, z);
        for &(l, k) in &[(1.0, 0usize), (1.0, 2), (0.4, 1)] {
            let direct = laguerre_transform(n, &f, l, k, &cfg).unwrap();
            let formula = phi_coefficient(n, k, l, rho, s, &cfg).unwrap();
            assert_relative_eq!(direct, formula, max_relative = 1e-6);
        }
    }

    #[test]
    fn cowling_haagerup_coefficientwise() {
        let cfg = qcfg();
        let n = 1usize;
        for &s in &[0.3, 0.5, 0.7] {
            let c = c2(n, 1, s).unwrap();
            for &rho in &[0.5, 1.0, 2.0] {
                for &l in &[0.2, 1.0, 5.0] {
                    for k in [0usize, 3, 17, 64] {
                        let lhs = ls_multiplier(n, k, l, s).unwrap() * phi_coefficient(n, k, l, rho, -s, &cfg).unwrap();
                        let rhs = c * rho.powf(2.0 * s) * phi_coefficient(n, k, l, rho, s, &cfg).unwrap();
                        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn extension_symbols_tend_to_one() {
        let cfg = qcfg();
        let th = extension_symbols(1, 0.5, 1.0, 1e-4, 5, &cfg).unwrap();
        for v in th {
            assert!((v - 1.0).abs() < 1e-3);
        }
        // series and recurrence regions against quadrature
        for &(s, l, rho) in &[(0.5, 2.0, 1.0), (0.3, 1e-3, 0.5), (0.7, 0.05, 3.0), (1.5, 0.4, 0.8)] {
            let th = extension_symbols(1, s, l, rho, 3000, &cfg).unwrap();
            let a = 0.25 * rho * rho * l;
            for &k in &[0usize, 2, 40, 700, 2999] {
                let b = 0.5 * (2.0 * k as f64 + 2.0 + s);
                let direct = (s * (2.0 * a).ln()).exp() / gamma(s).unwrap() * l_function(a, b, b - s, &cfg).unwrap();
                assert_relative_eq!(th[k], direct, max_relative = 1e-8, epsilon = 1e-280);
            }
        }
    }

    #[test]
    fn spectrum_round_trip_and_plancherel() {
        let g = Gaussian::new(1.0, 1.0).unwrap();
        let sp = g.spectrum(1, &SpectralConfig::default()).unwrap();
        for &(r, z) in &[(0.0, 0.0), (0.5, 0.3), (1.2, -0.7), (2.0, 1.5)] {
            assert!((sp.inverse(r, z) - g.value(r, z)).abs() < 1e-4, "({r},{z}) {} {}", sp.inverse(r, z), g.value(r, z));
        }
        // ‖f‖² = π^{n} (2a)^{−n} · √(π/2b)
        let exact = PI / 2.0 * (PI / 2.0).sqrt();
        assert_relative_eq!(sp.plancherel_norm_sq(), exact, max_relative = 1e-3);
        assert_eq!(sp.zero_like().inverse(0.3, 0.2), 0.0);
        let back = sp.apply_ls(0.4).unwrap().apply_ls(-0.4).unwrap();
        for (a, b) in back.coeffs.iter().flatten().zip(sp.coeffs.iter().flatten()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-300));
        }
        assert_eq!(sp.apply_ls(0.0).unwrap().coeffs, sp.coeffs);
    }

    #[test]
    fn heat_profile_matches_spectrum() {
        let g = Gaussian::new(0.7, 1.0).unwrap();
        let (n, t, l) = (1usize, 0.3, 0.9);
        let direct = g.heat_profile(n, t, l, 0.8);
        let x = 0.5 * l * 0.64;
        let series: f64 = (0..400)
            .map(|k| g.coefficient(n, l, k) * heat_multiplier(n, k, l, t) * crate::special_math::laguerre(k, 0.0, x))
            .sum::<f64>()
            * (-0.5 * x).exp()
            * (l / (2.0 * PI));
        assert_relative_eq!(direct, series, max_relative = 1e-10);
        let small = g.heat_profile(n, t, 1e-9, 0.8);
        assert_relative_eq!(small, g.heat_profile(n, t, 0.0, 0.8), max_relative = 1e-7);
    }

    #[test]
    fn spectrum_io_round_trip() {
        let g = Gaussian::new(1.0, 2.0).unwrap();
        let sp = g.spectrum(1, &SpectralConfig::quick()).unwrap();
        let back = LaguerreSpectrum::from_strings(&sp.header_json(), &sp.to_csv().unwrap()).unwrap();
        assert_eq!(back.coeffs.len(), sp.coeffs.len());
        assert_eq!(back.k_max(), sp.k_max());
        assert!(LaguerreSpectrum::from_strings("{}", "").is_err());
    }
}
