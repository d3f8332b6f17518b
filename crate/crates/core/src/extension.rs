//! Solutions u(x, ρ) of the extension problem
//!
//!   (−ℒ + ∂_ρ² + (1−2s)ρ⁻¹∂_ρ + ¼ρ²Δ_z) u = 0,  u(·, 0) = f,
//!
//! for bi-radial f, by group convolution with Φ_{s,ρ}, by Laguerre spectra, and
//! through the heat semigroup; plus the boundary limits that recover ℒ_s f.

use crate::constants::{c1, singular_integral_prefactor};
use crate::error::{domain, MathError, Result};
use crate::report::CheckReport;
use crate::group_core::{convolve_biradial, heisenberg, koranyi, BiRadial, BiRadialProfile, GroupParams, Point};
use crate::kernels::{heat_p_profile, phi, BigPhiKernel};
use crate::special_math::{hankel_transform, integrate_log_scale, laguerre_functions, ln_gamma, QuadratureConfig};
use crate::spectral::{extension_symbols, laguerre_transform, phi_coefficient_row, Gaussian, LaguerreSpectrum, SpectralConfig};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How u(·, ρ) is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Convolution,
    Spectral,
    HeatSemigroup,
}

impl std::str::FromStr for Route {
    type Err = MathError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convolution" => Ok(Route::Convolution),
            "spectral" => Ok(Route::Spectral),
            "heat" | "heat_semigroup" | "heat-semigroup" => Ok(Route::HeatSemigroup),
            other => domain(format!("unknown route '{other}'")),
        }
    }
}

/// Bi-radial initial data with the spectral information each route needs.
#[derive(Clone, Debug)]
pub enum InitialData {
    /// Σ cᵢ e^{−aᵢ|v|² − bᵢ|z|²}
    Gaussians(Vec<(f64, Gaussian)>),
    /// coef · φ_{σ,δ}; σ may be negative (σ > −(n+1) for the spectrum).
    Kernel { coef: f64, sigma: f64, delta: f64 },
    /// Sampled profile; spectra by numerical Laguerre projection.
    Profile(BiRadialProfile),
}

impl InitialData {
    pub fn gaussian(a: f64, b: f64) -> Result<Self> {
        Ok(InitialData::Gaussians(vec![(1.0, Gaussian::new(a, b)?)]))
    }

    /// φ_{σ,δ}
    pub fn kernel(sigma: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return domain("kernel data needs delta > 0");
        }
        Ok(InitialData::Kernel { coef: 1.0, sigma, delta })
    }

    /// Φ_{σ,δ} = C1 δ^{2σ} φ_{σ,δ} on ℍⁿ.
    pub fn big_phi(n: usize, sigma: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return domain("kernel data needs delta > 0");
        }
        Ok(InitialData::Kernel { coef: c1(n, 1, sigma)? * delta.powf(2.0 * sigma), sigma, delta })
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            InitialData::Gaussians(g) => InitialData::Gaussians(g.iter().map(|&(w, g)| (c * w, g)).collect()),
            InitialData::Kernel { coef, sigma, delta } => InitialData::Kernel { coef: c * coef, sigma: *sigma, delta: *delta },
            InitialData::Profile(p) => {
                let vals: Vec<f64> = p.values().iter().map(|v| c * v).collect();
                let g = crate::group_core::GroupParams::from_shape(p.shape().n, p.shape().m).expect("valid shape");
                InitialData::Profile(
                    BiRadialProfile::new(&g, p.r_grid().to_vec(), p.zeta_grid().to_vec(), vals, p.decay()).expect("same grid"),
                )
            }
        }
    }

    /// Laguerre coefficients f̂(λ, k) for k below `count` (m = 1).
    pub fn coefficient_row(&self, n: usize, lambda: f64, count: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
        match self {
            InitialData::Gaussians(gs) => {
                let len = gs.iter().map(|(_, g)| gaussian_row_len(g, lambda)).max().unwrap_or(1).min(count);
                Ok((0..len).map(|k| gs.iter().map(|(c, g)| c * g.coefficient(n, lambda, k)).sum()).collect())
            }
            InitialData::Kernel { coef, sigma, delta } => {
                let a = 0.25 * delta * delta * lambda;
                let len = ((160.0 / a).ceil() as usize).saturating_add(64).min(count);
                Ok(phi_coefficient_row(n, lambda, *delta, *sigma, len, cfg)?.into_iter().map(|v| coef * v).collect())
            }
            InitialData::Profile(p) => {
                let mut row = Vec::new();
                let mut peak = 0.0f64;
                for k in 0..count.min(400) {
                    let v = laguerre_transform(n, p, lambda, k, cfg)?;
                    peak = peak.max(v.abs());
                    row.push(v);
                    if k > 4 && v.abs() < 1e-12 * peak {
                        break;
                    }
                }
                Ok(row)
            }
        }
    }

    pub fn spectrum(&self, n: usize, scfg: &SpectralConfig, qcfg: &QuadratureConfig) -> Result<LaguerreSpectrum> {
        LaguerreSpectrum::from_rows(n, scfg, |l| self.coefficient_row(n, l, scfg.k_max, qcfg))
    }

    /// z-Fourier profile (e^{−tℒ}f)^λ at |v| = r on a group of type (n, m).
    /// Gaussian data works for every m; other data only on ℍⁿ.
    pub fn heat_profile(&self, n: usize, m: usize, t: f64, lambda: f64, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            InitialData::Gaussians(gs) => Ok(gs
                .iter()
                .map(|(c, g)| c * g.heat_profile(n, t, lambda, r) * (PI / g.b).powf(0.5 * (m as f64 - 1.0)))
                .sum()),
            _ if m != 1 => domain("heat profiles of non-Gaussian data are implemented for m = 1"),
            _ => {
                let l = lambda.abs();
                if l == 0.0 {
                    return domain("heat profile of spectral data needs lambda > 0");
                }
                let row = self.coefficient_row(n, l, 400_000, cfg)?;
                let x = 0.5 * l * r * r;
                let lag = laguerre_functions(row.len().saturating_sub(1), (n - 1) as f64, x);
                let sum: f64 = row
                    .iter()
                    .zip(&lag)
                    .enumerate()
                    .map(|(k, (c, p))| c * p * (-(2.0 * k as f64 + n as f64) * l * t).exp())
                    .sum();
                Ok((l / (2.0 * PI)).powi(n as i32) * (-0.5 * x).exp() * sum)
            }
        }
    }

    /// Rough decay scale of the z-Fourier profile, used as a quadrature hint.
    fn lambda_scale(&self) -> f64 {
        match self {
            InitialData::Gaussians(gs) => gs.iter().map(|(_, g)| 6.0 * g.b.sqrt()).fold(1.0, f64::max),
            InitialData::Kernel { delta, .. } => 8.0 / (delta * delta),
            InitialData::Profile(_) => 8.0,
        }
    }
}

fn gaussian_row_len(g: &Gaussian, lambda: f64) -> usize {
    let w = ((4.0 * g.a - lambda) / (4.0 * g.a + lambda)).abs();
    if w < 1e-300 {
        return 1;
    }
    // |w|^k below 1e−17 of the leading term
    ((-39.0 / w.ln()).ceil() as usize).saturating_add(2).min(400_000)
}

/// Initial data bound to a group type, so kernels get the right exponent.
#[derive(Clone, Debug)]
struct Bound<'a> {
    data: &'a InitialData,
    n: usize,
    m: usize,
}

impl BiRadial for Bound<'_> {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        match self.data {
            InitialData::Kernel { coef, sigma, delta } => coef * phi(self.n, self.m, *sigma, *delta, r, zeta),
            InitialData::Gaussians(gs) => gs.iter().map(|(c, g)| c * g.value(r, zeta)).sum(),
            InitialData::Profile(p) => p.value(r, zeta),
        }
    }
}

impl InitialData {
    /// f(r, ζ) on a group of type (n, m).
    pub fn eval(&self, n: usize, m: usize, r: f64, zeta: f64) -> f64 {
        Bound { data: self, n, m }.value(r, zeta)
    }

    /// The data as a bi-radial function on a group of type (n, m).
    pub fn on(&self, n: usize, m: usize) -> impl BiRadial + '_ {
        Bound { data: self, n, m }
    }
}

/// u(x, ρ) for one initial datum, order s and route.
#[derive(Clone, Debug)]
pub struct ExtensionSolution {
    pub group: GroupParams,
    pub s: f64,
    pub route: Route,
    pub data: InitialData,
    pub qcfg: QuadratureConfig,
    pub scfg: SpectralConfig,
    spectrum: Option<LaguerreSpectrum>,
}

impl ExtensionSolution {
    /// u = C1 ρ^{2s} f ∗ φ_{s,ρ} by group convolution (m = 1).
    pub fn solve_convolution(group: &GroupParams, data: InitialData, s: f64, qcfg: &QuadratureConfig) -> Result<Self> {
        check_order(s)?;
        if group.m() != 1 {
            return domain("the convolution route is implemented for m = 1");
        }
        c1(group.n(), 1, s)?;
        Ok(Self { group: group.clone(), s, route: Route::Convolution, data, qcfg: *qcfg, scfg: SpectralConfig::default(), spectrum: None })
    }

    /// û(λ, k, ρ) = Θ_k(λ, ρ) f̂(λ, k) on ℍⁿ.
    pub fn solve_spectral(n: usize, data: InitialData, s: f64, scfg: &SpectralConfig, qcfg: &QuadratureConfig) -> Result<Self> {
        check_order(s)?;
        let spectrum = data.spectrum(n, scfg, qcfg)?;
        Self::from_spectrum(spectrum, data, s, scfg, qcfg)
    }

    /// Spectral route from an already computed spectrum of f.
    pub fn from_spectrum(spectrum: LaguerreSpectrum, data: InitialData, s: f64, scfg: &SpectralConfig, qcfg: &QuadratureConfig) -> Result<Self> {
        check_order(s)?;
        let group = heisenberg(spectrum.n)?;
        Ok(Self { group, s, route: Route::Spectral, data, qcfg: *qcfg, scfg: *scfg, spectrum: Some(spectrum) })
    }

    /// u = 4π^{s+1}Γ(s)⁻¹ρ^{2s}∫₀^∞∫ p_{t,s}(ρ,w) e^{−tℒ}f(v, z−w) dw dt, done in
    /// the z-Fourier variable: the w-convolution becomes a product of profiles.
    pub fn solve_heat_semigroup(group: &GroupParams, data: InitialData, s: f64, qcfg: &QuadratureConfig) -> Result<Self> {
        check_order(s)?;
        if group.m() > 3 {
            return domain("the heat route supports m <= 3");
        }
        if group.m() != 1 && !matches!(data, InitialData::Gaussians(_)) {
            return domain("the heat route needs Gaussian data when m > 1");
        }
        Ok(Self { group: group.clone(), s, route: Route::HeatSemigroup, data, qcfg: *qcfg, scfg: SpectralConfig::default(), spectrum: None })
    }

    pub fn n(&self) -> usize {
        self.group.n()
    }

    pub fn m(&self) -> usize {
        self.group.m()
    }

    /// Spectrum of f (spectral route only).
    pub fn initial_spectrum(&self) -> Option<&LaguerreSpectrum> {
        self.spectrum.as_ref()
    }

    /// Spectrum of f: the stored one on the spectral route, otherwise computed
    /// on the solution's spectral grid (m = 1).
    pub fn data_spectrum(&self) -> Result<LaguerreSpectrum> {
        match &self.spectrum {
            Some(spec) => Ok(spec.clone()),
            None if self.m() == 1 => self.data.spectrum(self.n(), &self.scfg, &self.qcfg),
            None => domain("spectra are implemented for m = 1"),
        }
    }

    /// f(r, ζ)
    pub fn initial_value(&self, r: f64, zeta: f64) -> f64 {
        self.data.eval(self.n(), self.m(), r, zeta)
    }

    /// Spectrum of u(·, ρ) (spectral route only).
    pub fn slice(&self, rho: f64) -> Result<LaguerreSpectrum> {
        let spec = self.spectrum.as_ref().ok_or_else(|| MathError::Domain("slice needs the spectral route".into()))?;
        symbol_slice(spec, self.s, rho, &self.qcfg)
    }

    /// u(r, ζ, ρ) at the bi-radial point (|v|, |z|) = (r, ζ).
    pub fn eval(&self, r: f64, zeta: f64, rho: f64) -> Result<f64> {
        Ok(self.eval_many(&[(r, zeta)], rho)?[0])
    }

    pub fn eval_point(&self, x: &Point, rho: f64) -> Result<f64> {
        self.eval(x.v_norm(), x.z_norm(), rho)
    }

    /// u(·, ρ) at many (r, ζ) points; the spectral route shares one slice.
    pub fn eval_many(&self, pts: &[(f64, f64)], rho: f64) -> Result<Vec<f64>> {
        if !(rho > 0.0) {
            return domain("extension needs rho > 0");
        }
        match self.route {
            Route::Spectral => Ok(self.slice(rho)?.inverse_many(pts)),
            Route::Convolution => {
                let kernel = BigPhiKernel::new(self.n(), 1, self.s, rho)?;
                let f = self.data.on(self.n(), 1);
                let vals: Vec<Result<f64>> = crate::par::map(pts, |&(r, z)| {
                    let x = self.group.biradial_point(r, z);
                    convolve_biradial(&self.group, &f, &kernel, &x, &self.qcfg)
                });
                vals.into_iter().collect()
            }
            Route::HeatSemigroup => {
                let vals: Vec<Result<f64>> = crate::par::map(pts, |&(r, z)| self.heat_eval(r, z, rho));
                vals.into_iter().collect()
            }
        }
    }

    /// ∫₀^∞ p_{t,s}^λ(ρ) (e^{−tℒ}f)^λ(r) dt
    fn heat_time_integral(&self, lambda: f64, r: f64, rho: f64) -> Result<f64> {
        let (n, m, s) = (self.n(), self.m(), self.s);
        let failure = std::cell::RefCell::new(None);
        let est = integrate_log_scale(
            |t| {
                let p = heat_p_profile(s, t, lambda, rho);
                if p == 0.0 {
                    return 0.0;
                }
                match self.data.heat_profile(n, m, t, lambda, r, &self.qcfg) {
                    Ok(h) => p * h,
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            f64::INFINITY,
            &self.qcfg.with_tol(0.1 * self.qcfg.rel_tol, 0.0),
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(est.value)
    }

    fn heat_eval(&self, r: f64, zeta: f64, rho: f64) -> Result<f64> {
        let s = self.s;
        let pref = heat_prefactor(s, rho);
        let scale = self.data.lambda_scale().min(40.0 / (rho * rho + r * r).max(1e-12));
        let cfg = self.qcfg.with_tail(scale.max(1e-3));
        let v = hankel_transform(|l| self.heat_time_integral(l, r, rho).unwrap_or(f64::NAN), self.m(), zeta, &cfg)?;
        if !v.is_finite() {
            return Err(MathError::Accuracy { estimate: v, error_bound: f64::INFINITY });
        }
        Ok(pref * v)
    }

    /// ∫_N u(·, ρ) via the λ = 0 profile (heat route) or the Haar integral.
    pub fn mass(&self, rho: f64) -> Result<f64> {
        let n = self.n();
        match self.route {
            Route::HeatSemigroup => {
                let s = self.s;
                let pref = heat_prefactor(s, rho);
                let area = crate::special_math::sphere_area(2 * n);
                let radial = integrate_log_scale(
                    |r| {
                        let v = self.heat_time_integral(0.0, r, rho).unwrap_or(f64::NAN);
                        if v == 0.0 { 0.0 } else { r.powi(2 * n as i32 - 1) * v }
                    },
                    0.0,
                    f64::INFINITY,
                    &self.qcfg,
                );
                Ok(pref * area * radial.value)
            }
            _ => {
                let f = |r: f64, z: f64| self.eval(r, z, rho).unwrap_or(f64::NAN);
                Ok(crate::group_core::haar_polar_integral(n, self.m(), &f, &self.qcfg))
            }
        }
    }
}

/// Sampling box for [`uniform_bound`]: Gauss–Legendre nodes on [0, r_max] × [0, zeta_max].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormGrid {
    pub r_max: f64,
    pub zeta_max: f64,
    pub nodes: usize,
}

impl Default for NormGrid {
    fn default() -> Self {
        Self { r_max: 3.0, zeta_max: 3.0, nodes: 96 }
    }
}

/// ‖u(·,ρ)‖_p ≤ (1+tol)‖f‖_p for p = 1, 2, ∞ (spectral route on ℍⁿ).
///
/// p = 2 is Plancherel on the ρ-slice and p = ∞ the largest |value| on the
/// sampling grid (origin included). For p = 1, ∫|u| = ∫u + 2∫u⁻ with the mass
/// from the heat route's λ = 0 profile and u⁻ integrated by a tensor Gauss rule
/// on the box, which has to contain the negative set; ‖f‖₁ is a Haar integral of |f|.
pub fn uniform_bound(u: &ExtensionSolution, rho: f64, grid: &NormGrid, tol: f64) -> Result<Vec<CheckReport>> {
    let spec = u.initial_spectrum().ok_or_else(|| MathError::Domain("the uniform bound needs the spectral route".into()))?;
    if !(grid.r_max > 0.0 && grid.zeta_max > 0.0) || grid.nodes < 4 {
        return domain("the sampling box needs positive sides and at least 4 nodes");
    }
    let n = u.n();
    let slice = u.slice(rho)?;
    let report = |p: &str| CheckReport::new("uniform-lp").param("p", p).param("rho", rho).param("s", u.s).param("n", n);

    let l2 = report("2").at_most(slice.plancherel_norm_sq().sqrt(), spec.plancherel_norm_sq().sqrt(), tol);

    let (x, w) = crate::special_math::gauss_legendre(grid.nodes);
    let map = |len: f64| -> (Vec<f64>, Vec<f64>) { (x.iter().map(|t| 0.5 * len * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * len * v).collect()) };
    let (rs, wr) = map(grid.r_max);
    let (zs, wz) = map(grid.zeta_max);
    let uv = slice.inverse_grid(&rs, &zs);
    let nz = zs.len();

    let mut sup_u = slice.inverse(0.0, 0.0).abs();
    let mut sup_f = u.initial_value(0.0, 0.0).abs();
    let mut neg = 0.0;
    let mut edge_neg = 0.0f64;
    for (i, &r) in rs.iter().enumerate() {
        for (j, &z) in zs.iter().enumerate() {
            let v = uv[i * nz + j];
            sup_u = sup_u.max(v.abs());
            sup_f = sup_f.max(u.initial_value(r, z).abs());
            if v < 0.0 {
                neg += wr[i] * wz[j] * r.powi(2 * n as i32 - 1) * -v;
                if r > 0.75 * grid.r_max || z > 0.75 * grid.zeta_max {
                    edge_neg = edge_neg.max(-v);
                }
            }
        }
    }
    let linf = report("inf").at_most(sup_u, sup_f, tol);
    if edge_neg > 1e-10 * sup_u {
        return Err(MathError::Accuracy { estimate: edge_neg, error_bound: f64::INFINITY });
    }
    // dz over ℝ is twice the ζ-integral
    let neg = crate::special_math::sphere_area(2 * n) * 2.0 * neg;
    let heat = ExtensionSolution::solve_heat_semigroup(&u.group, u.data.clone(), u.s, &u.qcfg)?;
    let l1_u = heat.mass(rho)? + 2.0 * neg;
    let fabs = |r: f64, z: f64| u.initial_value(r, z).abs();
    let l1_f = crate::group_core::haar_polar_integral(n, 1, &fabs, &u.qcfg);
    let l1 = report("1").at_most(l1_u, l1_f, tol);
    Ok(vec![l1, l2, linf])
}

/// 4π^{s+1}Γ(s)⁻¹ρ^{2s}
fn heat_prefactor(s: f64, rho: f64) -> f64 {
    (4f64.ln() + (s + 1.0) * PI.ln() - ln_gamma(s) + 2.0 * s * rho.ln()).exp()
}

fn check_order(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("extension needs s > 0, got {s}"));
    }
    Ok(())
}

/// Multiplies each λ-row of `spec` by the extension symbols Θ_k(λ, ρ).
pub fn symbol_slice(spec: &LaguerreSpectrum, s: f64, rho: f64, cfg: &QuadratureConfig) -> Result<LaguerreSpectrum> {
    let n = spec.n;
    let rows: Vec<Result<Vec<f64>>> = crate::par::map_range(spec.lambda.len(), |i| {
        let row = &spec.coeffs[i];
        if row.is_empty() {
            return Ok(Vec::new());
        }
        let th = extension_symbols(n, s, spec.lambda[i], rho, row.len(), cfg)?;
        Ok(row.iter().zip(&th).map(|(c, t)| c * t).collect())
    });
    let coeffs = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(LaguerreSpectrum { coeffs, ..spec.clone() })
}

/// Finite-difference weights for the `order`-th derivative at 0 on `offsets`
/// (Fornberg's recursion).
pub fn fd_weights(order: usize, offsets: &[f64]) -> Vec<f64> {
    let np = offsets.len();
    let mut c = vec![vec![0.0; order + 1]; np];
    c[0][0] = 1.0;
    let mut c1v = 1.0;
    let mut c4 = offsets[0];
    for i in 1..np {
        let mn = i.min(order);
        let mut c2v = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2v *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1v * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2v;
                }
                c[i][0] = -c1v * c5 * c[i - 1][0] / c2v;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1v = c2v;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Least-squares extrapolation to ρ → 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extrapolation {
    /// Fitted value at ρ = 0.
    pub value: f64,
    /// Difference from the fit with one basis function fewer.
    pub spread: f64,
    /// Exponents e of the model Σ c_e X^e, X = ρ².
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// (ρ, sample) pairs.
    pub samples: Vec<(f64, f64)>,
}

/// Default ρ sequence 0.2·2^{−i}, i = 0..count.
pub fn default_rho_seq(count: usize) -> Vec<f64> {
    (0..count).map(|i| 0.2 * 0.5f64.powi(i as i32)).collect()
}

fn check_rho_seq(rho_seq: &[f64]) -> Result<()> {
    if rho_seq.len() < 3 {
        return domain("extrapolation needs at least 3 rho values");
    }
    if rho_seq.iter().any(|r| !(*r > 0.0)) || rho_seq.windows(2).any(|w| w[1] >= w[0]) {
        return domain("rho sequence must be positive and decreasing");
    }
    Ok(())
}

fn dedupe_exponents(raw: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &e in raw {
        if out.iter().all(|o| (o - e).abs() > 1e-9) {
            out.push(e);
        }
    }
    out
}

fn lsq_fit(xs: &[f64], ys: &[f64], exponents: &[f64]) -> Result<Vec<f64>> {
    let k = exponents.len().min(xs.len());
    let a = DMatrix::from_fn(xs.len(), k, |i, j| if exponents[j] == 0.0 { 1.0 } else { xs[i].powf(exponents[j]) });
    // column scaling keeps the normal system well conditioned
    let scale: Vec<f64> = (0..k).map(|j| a.column(j).amax().max(1e-300)).collect();
    let a = DMatrix::from_fn(xs.len(), k, |i, j| a[(i, j)] / scale[j]);
    let b = DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&b, 1e-14).map_err(|e| MathError::Domain(format!("least squares failed: {e}")))?;
    Ok((0..k).map(|j| sol[j] / scale[j]).collect())
}

/// Fits samples g(ρᵢ) by Σ c_e X^e with X = ρ² and returns c_0.
pub fn extrapolate(samples: &[(f64, f64)], exponents: &[f64]) -> Result<Extrapolation> {
    let exps = dedupe_exponents(exponents);
    let xs: Vec<f64> = samples.iter().map(|(r, _)| r * r).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, g)| *g).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(MathError::Accuracy { estimate: f64::NAN, error_bound: f64::INFINITY });
    }
    let k = exps.len().min(xs.len().saturating_sub(1)).max(1);
    let coef = lsq_fit(&xs, &ys, &exps[..k])?;
    let value = coef[0];
    let spread = if k > 1 {
        let lower = lsq_fit(&xs, &ys, &exps[..k - 1])?;
        (lower[0] - value).abs()
    } else {
        f64::INFINITY
    };
    if !value.is_finite() {
        return Err(MathError::Accuracy { estimate: value, error_bound: spread });
    }
    Ok(Extrapolation { value, spread, exponents: exps[..k].to_vec(), coefficients: coef, samples: samples.to_vec() })
}

/// Samples of X^{ℓ−s}∂_X^ℓ u at X = ρ² for every point and every ρ in rho_seq,
/// by central differences in X (step X/10).
fn derivative_samples(u: &ExtensionSolution, pts: &[(f64, f64)], ell: usize, rho_seq: &[f64]) -> Result<Vec<Vec<(f64, f64)>>> {
    let p = (ell / 2 + 2).min(5) as i32;
    let offsets: Vec<f64> = (-p..=p).map(|i| i as f64).collect();
    let w = fd_weights(ell, &offsets);
    let s = u.s;
    let mut out = vec![Vec::with_capacity(rho_seq.len()); pts.len()];
    for &rho in rho_seq {
        let x = rho * rho;
        let h = 0.1 * x;
        let mut acc = vec![0.0; pts.len()];
        for (o, wt) in offsets.iter().zip(&w) {
            if *wt == 0.0 {
                continue;
            }
            let vals = u.eval_many(pts, (x + o * h).sqrt())?;
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += wt * v;
            }
        }
        let factor = x.powf(ell as f64 - s) / h.powi(ell as i32);
        for (i, a) in acc.into_iter().enumerate() {
            out[i].push((rho, a * factor));
        }
    }
    Ok(out)
}

/// −lim ρ^{1−2s}∂_ρu = dtn_constant(s)·ℒ_s f at each point; 0 < s < 1.
///
/// With X = ρ², −ρ^{1−2s}∂_ρ u = −2X^{1−s}∂_X u, whose small-ρ expansion
/// runs over X^0, X^{1−s}, X, X^{2−s}.
pub fn dtn_limits(u: &ExtensionSolution, pts: &[(f64, f64)], rho_seq: &[f64]) -> Result<Vec<Extrapolation>> {
    let s = u.s;
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("the Dirichlet-to-Neumann limit needs 0 < s < 1, got {s}"));
    }
    check_rho_seq(rho_seq)?;
    let samples = derivative_samples(u, pts, 1, rho_seq)?;
    let exps = [0.0, 1.0 - s, 1.0, 2.0 - s];
    samples
        .into_iter()
        .map(|sm| {
            let sm: Vec<(f64, f64)> = sm.into_iter().map(|(r, g)| (r, -2.0 * g)).collect();
            extrapolate(&sm, &exps)
        })
        .collect()
}

pub fn dtn_limit(u: &ExtensionSolution, r: f64, zeta: f64, rho_seq: &[f64]) -> Result<Extrapolation> {
    Ok(dtn_limits(u, &[(r, zeta)], rho_seq)?.remove(0))
}

/// −lim ρ^{−2s}(u − f) = limit2_constant(s)·ℒ_s f; 0 < s < ½.
pub fn limit2s(u: &ExtensionSolution, pts: &[(f64, f64)], rho_seq: &[f64]) -> Result<Vec<Extrapolation>> {
    let s = u.s;
    if !(s > 0.0 && s < 0.5) {
        return domain(format!("the second limit needs 0 < s < 1/2, got {s}"));
    }
    check_rho_seq(rho_seq)?;
    let f0: Vec<f64> = pts.iter().map(|&(r, z)| u.initial_value(r, z)).collect();
    let mut samples = vec![Vec::new(); pts.len()];
    for &rho in rho_seq {
        let vals = u.eval_many(pts, rho)?;
        for (i, v) in vals.into_iter().enumerate() {
            samples[i].push((rho, -(v - f0[i]) * rho.powf(-2.0 * s)));
        }
    }
    let exps = [0.0, 1.0 - s, 1.0, 2.0 - s];
    samples.into_iter().map(|sm| extrapolate(&sm, &exps)).collect()
}

pub fn limit2(u: &ExtensionSolution, r: f64, zeta: f64, rho_seq: &[f64]) -> Result<Extrapolation> {
    Ok(limit2s(u, &[(r, zeta)], rho_seq)?.remove(0))
}

/// lim ρ^{2(ℓ−s)}((2ρ)⁻¹∂_ρ)^ℓ u = X^{ℓ−s}∂_X^ℓ u at X → 0, for s ∈ [ℓ−1, ℓ).
pub fn higher_order_limits(u: &ExtensionSolution, ell: usize, pts: &[(f64, f64)], rho_seq: &[f64]) -> Result<Vec<Extrapolation>> {
    let s = u.s;
    let lf = ell as f64;
    if ell == 0 || !(s >= lf - 1.0 && s < lf) {
        return domain(format!("order-{ell} limit needs s in [{}, {ell}), got {s}", ell as f64 - 1.0));
    }
    if crate::constants::in_forbidden_set(u.n(), s) {
        return domain(format!("s = {s} lies in the forbidden set"));
    }
    check_rho_seq(rho_seq)?;
    let samples = derivative_samples(u, pts, ell, rho_seq)?;
    let exps = [0.0, lf - s, 1.0, lf - s + 1.0, 2.0];
    samples.into_iter().map(|sm| extrapolate(&sm, &exps)).collect()
}

pub fn higher_order_limit(u: &ExtensionSolution, ell: usize, r: f64, zeta: f64, rho_seq: &[f64]) -> Result<Extrapolation> {
    Ok(higher_order_limits(u, ell, &[(r, zeta)], rho_seq)?.remove(0))
}

/// (−ℒ + ∂_ρ² + (1−2s)ρ⁻¹∂_ρ + ¼ρ²Δ_z)u at (r, ζ, ρ) by second-order central
/// differences with step h, using the bi-radial form
/// −ℒu = u_rr + (2n−1)r⁻¹u_r + ¼r²Δ_z u, Δ_z u = u_ζζ + (m−1)ζ⁻¹u_ζ.
pub fn pde_residual(u: &ExtensionSolution, r: f64, zeta: f64, rho: f64, h: f64) -> Result<f64> {
    pde_residual_with_order(u, u.s, r, zeta, rho, h)
}

/// The residual with the operator of order `s` applied to u (a negative
/// control when `s` differs from the order u was built with).
pub fn pde_residual_with_order(u: &ExtensionSolution, s: f64, r: f64, zeta: f64, rho: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && r > h && rho > h) {
        return domain("pde residual needs r, rho > h > 0");
    }
    let m = u.m();
    if m > 1 && !(zeta > h) {
        return domain("pde residual needs zeta > h when m > 1");
    }
    let n = u.n() as f64;
    let ev = |pts: &[(f64, f64)], rr: f64| u.eval_many(pts, rr);
    let z = |x: f64| if m == 1 { x } else { x.abs() };
    let space = ev(&[(r, zeta), (r + h, zeta), (r - h, zeta), (r, z(zeta + h)), (r, z(zeta - h))], rho)?;
    let (c, rp, rm, zp, zm) = (space[0], space[1], space[2], space[3], space[4]);
    let up = ev(&[(r, zeta)], rho + h)?[0];
    let um = ev(&[(r, zeta)], rho - h)?[0];
    let u_rr = (rp - 2.0 * c + rm) / (h * h);
    let u_r = (rp - rm) / (2.0 * h);
    let u_zz = (zp - 2.0 * c + zm) / (h * h);
    let u_z = (zp - zm) / (2.0 * h);
    let lap_z = if m == 1 { u_zz } else { u_zz + (m as f64 - 1.0) / zeta * u_z };
    let minus_l = u_rr + (2.0 * n - 1.0) / r * u_r + 0.25 * r * r * lap_z;
    let u_pp = (up - 2.0 * c + um) / (h * h);
    let u_p = (up - um) / (2.0 * h);
    Ok(minus_l + u_pp + (1.0 - 2.0 * s) / rho * u_p + 0.25 * rho * rho * lap_z)
}

/// ℒ_s f(x) = prefactor·∫_N (f(x) − f(xy⁻¹)) |y|^{−Q−2s} dy for 0 < s < ½ on ℍⁿ.
///
/// The ball |y| < ε (ε = 10⁻³) is replaced by its second-order Taylor value
/// ℒf(x)·M/(4n)·ε^{2−2s}/(2−2s), M = ∫_Σ |v|² dσ over the unit gauge sphere:
/// the first-order terms average out and the neglected part is O(ε^{4−2s}).
/// Inside the ball f(x) − f(xy⁻¹) is dominated by rounding.
pub fn ls_singular_integral<F: BiRadial + ?Sized>(group: &GroupParams, f: &F, s: f64, x: &Point, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0 && s < 0.5) {
        return domain(format!("the singular integral needs 0 < s < 1/2, got {s}"));
    }
    if group.m() != 1 {
        return domain("the singular integral is implemented for m = 1");
    }
    const EPS: f64 = 1e-3;
    let n = group.n();
    let q = 2.0 * (n + 1) as f64;
    let (rx, zx) = (x.v_norm(), x.z_norm());
    let fx = f.value(rx, zx);
    let diff = |r: f64, z: f64| fx - f.value(r, z);
    let kern = |r: f64, z: f64| {
        let d = koranyi(r, z);
        if d < EPS { 0.0 } else { d.powf(-q - 2.0 * s) }
    };
    let far = convolve_biradial(group, &diff, &kern, x, cfg)?;
    let sphere_v2 = 0.25 * crate::special_math::sphere_area(2 * n) * cos_power_integral(n);
    let near = sublaplacian_biradial(f, n, rx, zx, 1e-3) * sphere_v2 / (4.0 * n as f64) * EPS.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    Ok(singular_integral_prefactor(n, 1, s)? * (far + near))
}

/// ∫_{−π/2}^{π/2} cos^n α dα
fn cos_power_integral(n: usize) -> f64 {
    PI.sqrt() * (ln_gamma(0.5 * (n as f64 + 1.0)) - ln_gamma(0.5 * n as f64 + 1.0)).exp()
}

/// ℒf = −(f_rr + (2n−1)r⁻¹f_r) − ¼r²f_ζζ for bi-radial f on ℍⁿ, by central differences.
pub fn sublaplacian_biradial<F: BiRadial + ?Sized>(f: &F, n: usize, r: f64, zeta: f64, h: f64) -> f64 {
    let c = f.value(r, zeta);
    // f is even in each variable, so reflected samples stay valid near the axes
    let at = |a: f64, b: f64| f.value(a.abs(), b.abs());
    let f_rr = (at(r + h, zeta) - 2.0 * c + at(r - h, zeta)) / (h * h);
    let radial = if r < 10.0 * h {
        // (2n−1)r⁻¹f_r → (2n−1)f_rr on the axis
        2.0 * n as f64 * f_rr
    } else {
        f_rr + (2.0 * n as f64 - 1.0) / r * (at(r + h, zeta) - at(r - h, zeta)) / (2.0 * h)
    };
    let f_zz = (at(r, zeta + h) - 2.0 * c + at(r, zeta - h)) / (h * h);
    -radial - 0.25 * r * r * f_zz
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{dtn_constant, higher_order_constant, coeff_table, limit2_constant};
    use crate::spectral::ls_pointwise;
    use approx::assert_relative_eq;

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::default().with_tol(1e-10, 0.0)
    }

    #[test]
    fn fornberg_weights() {
        let w = fd_weights(2, &[-1.0, 0.0, 1.0]);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], -2.0, epsilon = 1e-14);
        let w = fd_weights(1, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_relative_eq!(w[0], 1.0 / 12.0, epsilon = 1e-14);
        assert_relative_eq!(w[1], -8.0 / 12.0, epsilon = 1e-14);
        assert_relative_eq!(w[2], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn extrapolation_recovers_model() {
        let s = 0.3;
        let samples: Vec<(f64, f64)> =
            default_rho_seq(6).into_iter().map(|r| (r, 1.5 - 0.7 * (r * r).powf(1.0 - s) + 0.2 * r * r)).collect();
        let e = extrapolate(&samples, &[0.0, 1.0 - s, 1.0, 2.0 - s]).unwrap();
        assert_relative_eq!(e.value, 1.5, epsilon = 1e-10);
    }

    #[test]
    fn leading_symbol_term_gives_the_limit_constants() {
        // Θ_k ≈ 1 + 4^{−s}Γ(−s)/Γ(s)·m_k(λ)·ρ^{2s} with m_k the ℒ_s multiplier
        let (n, s, lambda, k) = (1usize, 0.3, 0.8, 3usize);
        let mk = crate::spectral::ls_multiplier(n, k, lambda, s).unwrap();
        let rho_seq = default_rho_seq(7);
        let samples: Vec<(f64, f64)> = rho_seq
            .iter()
            .map(|&r| {
                let th = extension_symbols(n, s, lambda, r, k + 1, &qcfg()).unwrap()[k];
                (r, -(th - 1.0) * r.powf(-2.0 * s))
            })
            .collect();
        let e = extrapolate(&samples, &[0.0, 1.0 - s, 1.0, 2.0 - s]).unwrap();
        assert_relative_eq!(e.value / mk, limit2_constant(s).unwrap(), max_relative = 1e-6);
        // order-2 constant from the leading term: Γ(2−s)4^{−s}/Γ(s) at s = 1.5 is 1/4,
        // and it agrees with C1·C2⁻¹·a(n,m,s) from the differentiated coefficients
        let t = coeff_table(2, 1, 1, 1.5);
        assert_relative_eq!(higher_order_constant(2, 1, 1, 1.5, &t).unwrap(), 0.25, max_relative = 1e-10);
    }

    fn gaussian_spectral(s: f64) -> ExtensionSolution {
        ExtensionSolution::solve_spectral(1, InitialData::gaussian(1.0, 1.0).unwrap(), s, &SpectralConfig::default(), &qcfg()).unwrap()
    }

    #[test]
    fn spectral_route_recovers_boundary_value() {
        for s in [0.3, 0.7] {
            let u = gaussian_spectral(s);
            for &(r, z) in &[(0.0, 0.0), (0.8, 0.3), (1.2, -0.5)] {
                let f = u.initial_value(r, z);
                let v = u.eval(r, z, 1e-7).unwrap();
                assert!((v - f).abs() < 1e-3, "s={s} ({r},{z}): {v} vs {f}");
            }
        }
        let zero = ExtensionSolution::solve_spectral(1, InitialData::gaussian(1.0, 1.0).unwrap().scaled(0.0), 0.5, &SpectralConfig::quick(), &qcfg())
            .unwrap();
        assert_eq!(zero.eval(0.4, 0.2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn heat_and_spectral_routes_agree() {
        let g = heisenberg(1).unwrap();
        let data = InitialData::gaussian(1.0, 1.0).unwrap();
        let heat = ExtensionSolution::solve_heat_semigroup(&g, data.clone(), 0.5, &QuadratureConfig::default().with_tol(1e-8, 0.0)).unwrap();
        let spec = gaussian_spectral(0.5);
        for &(r, z, rho) in &[(1.0, 0.5, 0.8), (0.2, 0.0, 0.3), (0.5, 1.5, 2.0)] {
            let a = heat.eval(r, z, rho).unwrap();
            let b = spec.eval(r, z, rho).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-5);
        }
        assert_relative_eq!(heat.mass(0.7).unwrap(), PI.powf(1.5), max_relative = 1e-6);
    }

    #[test]
    fn heat_route_mass_for_larger_centre() {
        for m in [2usize, 3] {
            let g = GroupParams::from_shape(if m == 3 { 4 } else { 2 }, m).unwrap();
            let data = InitialData::gaussian(1.0, 2.0).unwrap();
            let u = ExtensionSolution::solve_heat_semigroup(&g, data, 0.4, &QuadratureConfig::default().with_tol(1e-8, 0.0)).unwrap();
            let n = g.n() as i32;
            let expect = PI.powi(n) * (PI / 2.0).powf(0.5 * m as f64);
            assert_relative_eq!(u.mass(1.3).unwrap(), expect, max_relative = 1e-4);
        }
    }

    #[test]
    fn convolution_route_matches_spectral() {
        let g = heisenberg(1).unwrap();
        let data = InitialData::gaussian(1.0, 1.0).unwrap();
        let conv = ExtensionSolution::solve_convolution(&g, data, 0.5, &QuadratureConfig::default().with_tol(1e-7, 0.0)).unwrap();
        let spec = gaussian_spectral(0.5);
        let a = conv.eval(1.0, 0.5, 0.8).unwrap();
        let b = spec.eval(1.0, 0.5, 0.8).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-4);
    }

    #[test]
    fn pde_residual_is_second_order() {
        let u = gaussian_spectral(0.5);
        let res: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&h| pde_residual(&u, 0.7, 0.3, 0.6, h).unwrap().abs()).collect();
        let slope1 = (res[0] / res[1]).log2();
        let slope2 = (res[1] / res[2]).log2();
        assert!((slope1 - 2.0).abs() < 0.3 && (slope2 - 2.0).abs() < 0.3, "{res:?}");
        // the same data extended with the wrong order is not a solution
        let wrong = ExtensionSolution::from_spectrum(u.initial_spectrum().unwrap().clone(), u.data.clone(), 0.8, &u.scfg, &u.qcfg).unwrap();
        let bad = pde_residual_with_order(&wrong, 0.5, 0.7, 0.3, 0.6, 0.025).unwrap().abs();
        assert!(bad > 100.0 * res[2], "{bad} vs {}", res[2]);
    }

    #[test]
    fn dtn_limit_matches_spectral_ls() {
        let s = 0.5;
        let u = gaussian_spectral(s);
        let pts = [(0.0, 0.0), (0.7, 0.4)];
        let lim = dtn_limits(&u, &pts, &default_rho_seq(6)).unwrap();
        let spec = u.initial_spectrum().unwrap();
        for (e, &(r, z)) in lim.iter().zip(&pts) {
            let ls = ls_pointwise(spec, s, r, z).unwrap();
            assert_relative_eq!(e.value, dtn_constant(s).unwrap() * ls, max_relative = 1e-3);
        }
    }

    #[test]
    fn singular_integral_of_constant_vanishes() {
        let g = heisenberg(1).unwrap();
        let one = |_: f64, _: f64| 1.0;
        let x = g.biradial_point(0.5, 0.2);
        assert_eq!(ls_singular_integral(&g, &one, 0.3, &x, &qcfg()).unwrap(), 0.0);
    }

    #[test]
    fn uniform_bound_for_positive_data() {
        let scfg = SpectralConfig { panels: 24, ..SpectralConfig::default() };
        let u = ExtensionSolution::solve_spectral(1, InitialData::gaussian(1.0, 1.0).unwrap(), 0.5, &scfg, &qcfg()).unwrap();
        let reports = uniform_bound(&u, 0.8, &NormGrid::default(), 1e-3).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
        // Φ has unit mass, so positive data keep their L¹ norm
        assert_relative_eq!(reports[0].lhs, reports[0].rhs, max_relative = 1e-6);
        assert!(reports[1].lhs < reports[1].rhs && reports[2].lhs < reports[2].rhs);
    }

    #[test]
    fn biradial_sublaplacian_of_gaussian() {
        // ℒ e^{−r²−ζ²} = (4n − 4r² + ¼r²(2 − 4ζ²)) e^{−r²−ζ²}
        let f = |r: f64, z: f64| (-r * r - z * z).exp();
        for &(r, z) in &[(0.0, 0.3), (0.7, 0.4), (1.5, 0.0)] {
            let n = 1usize;
            let exact = (4.0 * n as f64 - 4.0 * r * r + 0.25 * r * r * (2.0 - 4.0 * z * z)) * f(r, z);
            assert_relative_eq!(sublaplacian_biradial(&f, n, r, z, 1e-4), exact, epsilon = 1e-6);
        }
        assert_relative_eq!(cos_power_integral(1), 2.0, epsilon = 1e-14);
        assert_relative_eq!(cos_power_integral(2), 0.5 * PI, epsilon = 1e-14);
    }
}
