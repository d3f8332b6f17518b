//! Explicit kernels of the extension problem as bi-radial functions of
//! (r, ζ) = (|v|, |z|), together with the heat kernels q_t, p_{t,s} and the
//! homogeneous Hardy weight w_s.

use crate::constants::{c1, cns_oscillatory_integral, coeff_table, CoeffTable};
use crate::error::{domain, Result};
use crate::group_core::{convolve_biradial_split, koranyi, BiRadial, BiRadialProfile, Centering, Decay, GroupParams, Point};
use crate::special_math::{gamma, hankel_transform, integrate_1d, sphere_area, Domain, QuadratureConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// D = (ρ² + r²)² + 16ζ²
#[inline]
pub fn big_d(rho: f64, r: f64, zeta: f64) -> f64 {
    let a = rho * rho + r * r;
    a * a + 16.0 * zeta * zeta
}

/// φ_{s,ρ}(v,z) = ((ρ²+|v|²)² + 16|z|²)^{−(n+m+s)/2}
#[inline]
pub fn phi(n: usize, m: usize, s: f64, rho: f64, r: f64, zeta: f64) -> f64 {
    (-0.5 * (n as f64 + m as f64 + s) * big_d(rho, r, zeta).ln()).exp()
}

/// Φ_{s,ρ} = C1 ρ^{2s} φ_{s,ρ}
pub fn big_phi(n: usize, m: usize, s: f64, rho: f64, r: f64, zeta: f64) -> Result<f64> {
    Ok(c1(n, m, s)? * rho.powf(2.0 * s) * phi(n, m, s, rho, r, zeta))
}

/// K_{s,ρ} = −ρ^{1−2s}∂_ρφ_{−s,ρ} = 2(n+m−s)ρ^{2(1−s)}(ρ²+|v|²) D^{−1/2} φ_{1−s,ρ}
pub fn k_kernel(n: usize, m: usize, s: f64, rho: f64, r: f64, zeta: f64) -> f64 {
    let a = rho * rho + r * r;
    let d = big_d(rho, r, zeta);
    2.0 * (n as f64 + m as f64 - s) * rho.powf(2.0 * (1.0 - s)) * a * (-0.5 * (n as f64 + m as f64 + 2.0 - s) * d.ln()).exp()
}

/// Poisson kernel 𝒫_s(v,z,ρ) = ρ^{(n+m+s)/2} ((ρ²+|v|²)²+16|z|²)^{−(n+m+s)/2} of the AN extension.
pub fn poisson_kernel(n: usize, m: usize, s: f64, rho: f64, r: f64, zeta: f64) -> f64 {
    rho.powf(0.5 * (n as f64 + m as f64 + s)) * phi(n, m, s, rho, r, zeta)
}

/// g_{j,ρ} = (ρ²+|v|²)^j / D^{j/2}
pub fn g_kernel(j: usize, rho: f64, r: f64, zeta: f64) -> f64 {
    let a = rho * rho + r * r;
    (a / big_d(rho, r, zeta).sqrt()).powi(j as i32)
}

/// h_{j,ρ,s} = c(ℓ,j) g_{j,ρ} ρ^{2(ℓ−s)} φ_{ℓ−s,ρ}
pub fn h_kernel(table: &CoeffTable, j: usize, rho: f64, r: f64, zeta: f64) -> f64 {
    let ell = table.ell as f64;
    table.get(j) * g_kernel(j, rho, r, zeta) * rho.powf(2.0 * (ell - table.s)) * phi(table.n, table.m, ell - table.s, rho, r, zeta)
}

/// (λ/sinh tλ, ¼λ coth tλ) evaluated without overflow.
pub fn sinh_coth(t: f64, lambda: f64) -> (f64, f64) {
    let x = t * lambda;
    if x < 1e-4 {
        let x2 = x * x;
        (1.0 / t * (1.0 - x2 / 6.0), 0.25 / t * (1.0 + x2 / 3.0))
    } else {
        let e = (-2.0 * x).exp();
        (2.0 * lambda * (-x).exp() / (1.0 - e), 0.25 * lambda * (1.0 + e) / (1.0 - e))
    }
}

/// z-Fourier profile of q_t: (4π)^{−n}(λ/sinh tλ)^n e^{−¼λ coth(tλ)|v|²}.
pub fn heat_q_profile(n: usize, t: f64, lambda: f64, r: f64) -> f64 {
    let (sr, q) = sinh_coth(t, lambda.abs());
    (4.0 * PI).powi(-(n as i32)) * sr.powi(n as i32) * (-q * r * r).exp()
}

/// z-Fourier profile of p_{t,s}: (4π)^{−s−1}(λ/sinh tλ)^{s+1} e^{−¼λ coth(tλ)ρ²}.
pub fn heat_p_profile(s: f64, t: f64, lambda: f64, rho: f64) -> f64 {
    let (sr, q) = sinh_coth(t, lambda.abs());
    (4.0 * PI).powf(-s - 1.0) * sr.powf(s + 1.0) * (-q * rho * rho).exp()
}

// The λ-profiles are analytic in |Im λ| < π/t, so the kernels decay like
// e^{−πζ/t}; past e^{−60} the inversion only returns rounding noise.
fn heat_negligible(t: f64, zeta: f64) -> bool {
    PI * zeta / t > 60.0
}

fn heat_cfg(cfg: &QuadratureConfig, rate: f64) -> QuadratureConfig {
    cfg.with_tail(1.0 / rate.max(1e-3))
}

/// Heat kernel q_t(v, z) of the sublaplacian by Hankel inversion of its profile.
pub fn heat_q(n: usize, m: usize, t: f64, r: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t > 0.0) {
        return domain("heat kernel needs t > 0");
    }
    if heat_negligible(t, zeta) {
        return Ok(0.0);
    }
    let rate = n as f64 * t + 0.25 * r * r;
    hankel_transform(|l| heat_q_profile(n, t, l, r), m, zeta, &heat_cfg(cfg, rate))
}

/// Heat kernel p_{t,s}(ρ, z) of ∂_ρ² + (1+2s)ρ⁻¹∂_ρ + ¼ρ²Δ_z by Hankel inversion.
pub fn heat_p(m: usize, s: f64, t: f64, rho: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t > 0.0) || !(s > -1.0) {
        return domain("heat kernel p needs t > 0 and s > -1");
    }
    if heat_negligible(t, zeta) {
        return Ok(0.0);
    }
    let rate = (s + 1.0) * t + 0.25 * rho * rho;
    hankel_transform(|l| heat_p_profile(s, t, l, rho), m, zeta, &heat_cfg(cfg, rate))
}

/// Radial measure under which p_{t,s} has unit mass: |S^{2s+1}| ρ^{2s+1} dρ
/// (the surface area of the unit sphere in "dimension" 2s+2).
pub fn heat_p_radial_weight(s: f64, rho: f64) -> f64 {
    2.0 * PI.powf(s + 1.0) / gamma(s + 1.0).expect("s > -1") * rho.powf(2.0 * s + 1.0)
}

/// ∫₀^∞∫_ℝ e^{−iλw}(λ/sinh tλ)^{n+s+1} e^{−¼λ coth(tλ)(1+|v|²)} dλ dt by quadrature.
///
/// With u = tλ and c = coth u the inner t-integral becomes
/// λ^{p−1}∫₁^∞ (c²−1)^{p/2−1} e^{−λac/4} dc, p = n+s+1, a = 1+|v|²; the outer
/// λ-integral is a cosine transform.
pub fn oscillatory_phi_integral(n: usize, s: f64, v_norm: f64, w: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let p = n as f64 + s + 1.0;
    if !(p > 2.0) {
        return domain("oscillatory integral needs n + s > 1");
    }
    let a = 1.0 + v_norm * v_norm;
    let inner_cfg = cfg.with_tol(0.1 * cfg.rel_tol, 0.0);
    let inner = |lambda: f64| -> f64 {
        if lambda == 0.0 {
            // λ^{p−1}·Γ(p−1)(λa/4)^{1−p}
            return gamma(p - 1.0).unwrap_or(f64::NAN) * (a / 4.0).powf(1.0 - p);
        }
        let beta = 0.25 * lambda * a;
        let e = p / 2.0 - 1.0;
        // substitute c = 1 + y
        let f = |y: f64| {
            let c = 1.0 + y;
            (e * (y * (c + 1.0)).ln() - beta * y).exp()
        };
        let cfg_in = inner_cfg.with_tail(1.0 / beta.max(1e-3));
        let val = integrate_1d(f, Domain::UpperHalf(0.0), &cfg_in).unwrap_or(f64::NAN);
        lambda.powf(p - 1.0) * (-beta).exp() * val
    };
    // 2∫₀^∞ cos(λw) G(λ) dλ = 2π · hankel_1(G)(|w|)
    let cfg_out = cfg.with_tail(4.0 / a);
    Ok(2.0 * PI * hankel_transform(inner, 1, w.abs(), &cfg_out)?)
}

/// Closed form c·((1+|v|²)²+16w²)^{−(n+1+s)/2} of the oscillatory integral, with
/// c from [`cns_oscillatory_integral`].
pub fn oscillatory_phi_closed(n: usize, s: f64, v_norm: f64, w: f64) -> Result<f64> {
    Ok(cns_oscillatory_integral(n, s)? * phi(n, 1, s, 1.0, v_norm, w))
}

/// Exact homogeneous kernel φ_s(x) = |x|^{−(n+m+s)}.
pub fn homogeneous_phi(n: usize, m: usize, s: f64, r: f64, zeta: f64) -> f64 {
    koranyi(r, zeta).powf(-(n as f64 + m as f64 + s))
}

/// ψ_s = C1·(φ_s ∗ |·|^{−Q+2s}), computed by a partition of unity between the
/// two singular points.
pub fn psi_s(group: &GroupParams, s: f64, x: &Point, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("psi_s needs 0 < s < 1, got {s}"));
    }
    if x.is_identity() {
        return domain("psi_s is singular at the identity");
    }
    let (n, m) = (group.n(), group.m());
    let q = group.q() as f64;
    let f = move |r: f64, z: f64| homogeneous_phi(n, m, s, r, z);
    let h = move |r: f64, z: f64| koranyi(r, z).powf(-q + 2.0 * s);
    let v = convolve_biradial_split(group, &f, &h, x, Centering::Partition { power: 4.0 }, cfg)?;
    Ok(c1(n, m, s)? * v)
}

/// Hardy weight w_s = φ_s/ψ_s, homogeneous of degree −2s.
pub fn weight_w(group: &GroupParams, s: f64, x: &Point, cfg: &QuadratureConfig) -> Result<f64> {
    let psi = psi_s(group, s, x, cfg)?;
    Ok(homogeneous_phi(group.n(), group.m(), s, x.v_norm(), x.z_norm()) / psi)
}

/// Kernel families that can be evaluated through a [`KernelSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Phi,
    #[serde(rename = "big_phi")]
    BigPhi,
    K,
    Poisson,
    HeatQ,
    HeatP,
    WeightW,
    GJ,
    HJ,
}

impl std::str::FromStr for KernelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "phi" => Self::Phi,
            "Phi" | "big_phi" => Self::BigPhi,
            "K" | "k" => Self::K,
            "poisson" | "Poisson" => Self::Poisson,
            "heat_q" => Self::HeatQ,
            "heat_p" => Self::HeatP,
            "weight_w" => Self::WeightW,
            "g_j" | "g" => Self::GJ,
            "h_j" | "h" => Self::HJ,
            _ => return Err(format!("unknown kernel kind '{s}'")),
        })
    }
}

/// A kernel with its parameters; `scale` is ρ (or t for the heat kernels).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub scale: f64,
    pub j: usize,
    pub ell: usize,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, n: usize, m: usize, s: f64, scale: f64) -> Result<Self> {
        let spec = Self { kind, n, m, s, scale, j: 0, ell: 1 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_index(mut self, j: usize, ell: usize) -> Result<Self> {
        self.j = j;
        self.ell = ell;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return domain("kernel needs n, m >= 1");
        }
        if !(self.scale > 0.0) {
            return domain("kernel scale must be positive");
        }
        match self.kind {
            KernelKind::BigPhi if !(self.s > 0.0) => domain("Phi needs s > 0"),
            KernelKind::K | KernelKind::WeightW if !(self.s > 0.0 && self.s < 1.0) => {
                domain("this kernel needs 0 < s < 1")
            }
            KernelKind::GJ | KernelKind::HJ if self.j > self.ell => domain("kernel index j must satisfy j <= ell"),
            _ => Ok(()),
        }
    }

    /// Value at (|v|, |z|) = (r, ζ).
    pub fn eval(&self, r: f64, zeta: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let (n, m, s, sc) = (self.n, self.m, self.s, self.scale);
        Ok(match self.kind {
            KernelKind::Phi => phi(n, m, s, sc, r, zeta),
            KernelKind::BigPhi => big_phi(n, m, s, sc, r, zeta)?,
            KernelKind::K => k_kernel(n, m, s, sc, r, zeta),
            KernelKind::Poisson => poisson_kernel(n, m, s, sc, r, zeta),
            KernelKind::HeatQ => heat_q(n, m, sc, r, zeta, cfg)?,
            KernelKind::HeatP => heat_p(m, s, sc, r, zeta, cfg)?,
            KernelKind::WeightW => {
                let g = GroupParams::from_shape(n, m)?;
                weight_w(&g, s, &g.biradial_point(r, zeta), cfg)?
            }
            KernelKind::GJ => g_kernel(self.j, sc, r, zeta),
            KernelKind::HJ => h_kernel(&coeff_table(self.ell, n, m, s), self.j, sc, r, zeta),
        })
    }

    pub fn eval_point(&self, x: &Point, cfg: &QuadratureConfig) -> Result<f64> {
        self.eval(x.v_norm(), x.z_norm(), cfg)
    }

    /// Samples the kernel on a grid as a profile.
    pub fn tabulate(&self, group: &GroupParams, r_grid: Vec<f64>, zeta_grid: Vec<f64>, cfg: &QuadratureConfig) -> Result<BiRadialProfile> {
        let nz = zeta_grid.len();
        let vals: Vec<Result<f64>> = crate::par::map_range(r_grid.len() * nz, |i| self.eval(r_grid[i / nz], zeta_grid[i % nz], cfg));
        let values = vals.into_iter().collect::<Result<Vec<f64>>>()?;
        let q = (self.n + self.m) as f64 + self.s;
        let decay = match self.kind {
            KernelKind::HeatQ | KernelKind::HeatP => Decay::exponential(1.0 / self.scale, 1.0 / self.scale),
            _ => Decay::algebraic(2.0 * q, q),
        };
        BiRadialProfile::new(group, r_grid, zeta_grid, values, decay)
    }
}

/// φ_{s,ρ} as a [`BiRadial`] function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiKernel {
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub rho: f64,
}

impl BiRadial for PhiKernel {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        phi(self.n, self.m, self.s, self.rho, r, zeta)
    }
}

/// Unit-mass kernel Φ_{s,ρ} as a [`BiRadial`] function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BigPhiKernel {
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub rho: f64,
    coef: f64,
}

impl BigPhiKernel {
    pub fn new(n: usize, m: usize, s: f64, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return domain("Phi needs rho > 0");
        }
        Ok(Self { n, m, s, rho, coef: c1(n, m, s)? * rho.powf(2.0 * s) })
    }
}

impl BiRadial for BigPhiKernel {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        self.coef * phi(self.n, self.m, self.s, self.rho, r, zeta)
    }
}

/// Surface measure of the unit Korányi sphere: ∫ over α and the v-sphere of ¼cos^{n−1}α (m = 1).
pub fn koranyi_sphere_measure(n: usize) -> f64 {
    // ∫_{−π/2}^{π/2} cos^{n−1}α dα = √π Γ(n/2)/Γ((n+1)/2)
    let nf = n as f64;
    0.25 * sphere_area(2 * n) * PI.sqrt() * gamma(nf / 2.0).unwrap() / gamma((nf + 1.0) / 2.0).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::c3;
    use crate::group_core::{haar_polar_integral, heisenberg};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_relative_eq!(phi(1, 1, 0.5, 0.7, 0.0, 0.0), 0.7f64.powf(-5.0), max_relative = 1e-13);
        let cfg = QuadratureConfig::default().with_tol(1e-11, 0.0);
        let mass = haar_polar_integral(1, 1, &PhiKernel { n: 1, m: 1, s: 0.5, rho: 1.0 }, &cfg);
        assert_relative_eq!(mass, 1.0 / c1(1, 1, 0.5).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn masses() {
        let cfg = QuadratureConfig::default().with_tol(1e-11, 0.0);
        let big = BigPhiKernel::new(2, 1, 0.3, 1.0).unwrap();
        assert_relative_eq!(haar_polar_integral(2, 1, &big, &cfg), 1.0, max_relative = 1e-8);
        let kk = |r: f64, z: f64| k_kernel(1, 1, 0.3, 1.0, r, z);
        assert_relative_eq!(haar_polar_integral(1, 1, &kk, &cfg), c3(1, 1, 0.3).unwrap(), max_relative = 1e-8);
        assert!(big_phi(1, 1, 0.5, 1e-3, 1.0, 0.5).unwrap() < 1e-2);
    }

    #[test]
    fn k_matches_finite_difference() {
        for &(n, m, s, rho, r, z) in &[(1, 1, 0.3, 0.8, 0.4, 0.2), (2, 3, 0.7, 1.3, 1.1, -0.5), (1, 2, 0.5, 0.5, 0.0, 0.9)] {
            let h = 1e-4 * rho;
            let f = |p: f64| phi(n, m, -s, p, r, z);
            let d = (f(rho - 2.0 * h) - 8.0 * f(rho - h) + 8.0 * f(rho + h) - f(rho + 2.0 * h)) / (12.0 * h);
            let fd = -rho.powf(1.0 - 2.0 * s) * d;
            assert_relative_eq!(k_kernel(n, m, s, rho, r, z), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn g_and_h_examples() {
        assert_eq!(g_kernel(0, 0.7, 1.0, 2.0), 1.0);
        for &(r, z) in &[(0.0, 0.0), (1.0, 3.0), (2.0, -0.1)] {
            let g = g_kernel(3, 0.5, r, z);
            assert!((0.0..=1.0).contains(&g));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn parabolic_scaling(r in 0.0..3.0f64, z in 0.0..3.0f64, rho in 0.2..3.0f64, s in 0.05..0.95f64) {
            let (n, m) = (1usize, 2usize);
            let q = 2.0 * (n + m) as f64;
            let lhs = phi(n, m, s, rho, r, z);
            let rhs = rho.powf(-2.0 * (n + m) as f64 - 2.0 * s) * phi(n, m, s, 1.0, r / rho, z / (rho * rho));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
            let lhs = big_phi(n, m, s, rho, r, z).unwrap();
            let rhs = rho.powf(-q) * big_phi(n, m, s, 1.0, r / rho, z / (rho * rho)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
            let lhs = k_kernel(n, m, s, rho, r, z);
            let rhs = rho.powf(-q) * k_kernel(n, m, s, 1.0, r / rho, z / (rho * rho));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
            let t = coeff_table(2, n, m, s + 1.0);
            for j in 0..=2 {
                let lhs = h_kernel(&t, j, rho, r, z);
                let rhs = rho.powf(-q) * h_kernel(&t, j, 1.0, r / rho, z / (rho * rho));
                prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn oscillatory_integral() {
        let cfg = QuadratureConfig::default().with_tol(1e-10, 1e-14);
        // at v = w = 0 the integral is 2Γ(p)4^p ∫₀^{π/2} sin^{p−1}θ dθ, p = n+s+1
        let v = oscillatory_phi_integral(1, 0.5, 0.0, 0.0, &cfg).unwrap();
        let p = 2.5f64;
        let beta = PI.sqrt() * gamma(p / 2.0).unwrap() / (2.0 * gamma((p + 1.0) / 2.0).unwrap());
        assert_relative_eq!(v, 2.0 * gamma(p).unwrap() * 4f64.powf(p) * beta, max_relative = 1e-8);
        assert_relative_eq!(
            cns_oscillatory_integral(1, 0.5).unwrap() / crate::constants::cns_oscillatory(1, 0.5).unwrap(),
            32.0 * PI * PI,
            max_relative = 1e-12
        );
        let v = oscillatory_phi_integral(1, 0.3, 1.0, 0.7, &cfg).unwrap();
        let closed = cns_oscillatory_integral(1, 0.3).unwrap() * (4.0f64 + 16.0 * 0.49).powf(-1.15);
        assert_relative_eq!(v, closed, max_relative = 1e-7);
        assert_relative_eq!(v, oscillatory_phi_closed(1, 0.3, 1.0, 0.7).unwrap(), max_relative = 1e-7);
        let a = oscillatory_phi_integral(2, 0.4, 0.6, 0.3, &cfg).unwrap();
        let b = oscillatory_phi_integral(2, 0.4, 0.6, -0.3, &cfg).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn heat_kernel_masses_and_scaling() {
        let cfg = QuadratureConfig::default().with_tol(1e-10, 1e-15);
        // ∫_N q_t = 1 on ℍ¹
        let t = 0.7;
        let qcfg = cfg.with_tol(1e-8, 1e-14);
        let mass = haar_polar_integral(1, 1, &|r: f64, z: f64| heat_q(1, 1, t, r, z, &qcfg).unwrap(), &cfg.with_tol(1e-7, 0.0));
        assert_relative_eq!(mass, 1.0, max_relative = 1e-6);
        // forward z-Fourier transform of q_t reproduces the profile
        for &lam in &[0.0, 0.8, 2.5] {
            let fwd = 2.0
                * integrate_1d(|z: f64| (lam * z).cos() * heat_q(1, 1, t, 0.5, z, &cfg).unwrap(), Domain::UpperHalf(0.0), &cfg.with_tol(1e-9, 0.0))
                    .unwrap();
            assert_relative_eq!(fwd, heat_q_profile(1, t, lam, 0.5), max_relative = 1e-6);
        }
        // q_t(rv, r²z) = r^{−2m−2n} q_{t/r²}(v, z)
        let (r0, z0) = (0.6, 0.3);
        let lhs = heat_q(1, 1, t, 2.0 * r0, 4.0 * z0, &cfg).unwrap();
        let rhs = 2f64.powi(-4) * heat_q(1, 1, t / 4.0, r0, z0, &cfg).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
        // small-λ limit of the profile
        let euclid = (4.0 * PI * t).powi(-1) * (-r0 * r0 / (4.0 * t)).exp();
        assert_relative_eq!(heat_q_profile(1, t, 1e-9, r0), euclid, max_relative = 1e-12);
        // ∫_{ℝ^m} p_{t,s}(1, z) dz = (4π)^{−s−1}t^{−s−1}e^{−1/(4t)}
        for m in 1..=3usize {
            let s = 0.4;
            let zm = integrate_1d(
                |z: f64| sphere_area(m) * z.powi(m as i32 - 1) * heat_p(m, s, t, 1.0, z, &cfg).unwrap(),
                Domain::UpperHalf(0.0),
                &cfg.with_tol(1e-9, 0.0),
            )
            .unwrap();
            let exact = (4.0 * PI).powf(-s - 1.0) * t.powf(-s - 1.0) * (-1.0 / (4.0 * t)).exp();
            assert_relative_eq!(zm, exact, max_relative = 1e-8);
            let lhs = heat_p(m, s, t, 2.0 * 0.8, 4.0 * 0.3, &cfg).unwrap();
            let rhs = 2f64.powf(-2.0 * m as f64 - 2.0 * (s + 1.0)) * heat_p(m, s, t / 4.0, 0.8, 0.3, &cfg).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-7);
        }
    }

    #[test]
    fn heat_p_unit_mass_in_radial_measure() {
        let cfg = QuadratureConfig::default().with_tol(1e-9, 0.0);
        let (s, t) = (0.4f64, 0.7f64);
        let mass = integrate_1d(
            |rho: f64| heat_p_radial_weight(s, rho) * (4.0 * PI).powf(-s - 1.0) * t.powf(-s - 1.0) * (-rho * rho / (4.0 * t)).exp(),
            Domain::UpperHalf(0.0),
            &cfg,
        )
        .unwrap();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn hardy_weight_homogeneity() {
        let g = heisenberg(1).unwrap();
        let cfg = QuadratureConfig::default().with_tol(1e-7, 0.0);
        for &(s, r, t) in &[(0.5, 0.7, 0.3), (0.25, 0.2, -0.6)] {
            let x = Point::new(vec![r, 0.0], vec![t]);
            let p1 = psi_s(&g, s, &x, &cfg).unwrap();
            let p2 = psi_s(&g, s, &g.dilate(2.0, &x), &cfg).unwrap();
            assert_relative_eq!(p2, 2f64.powf(-(2.0 - s)) * p1, max_relative = 1e-5);
            let w1 = weight_w(&g, s, &x, &cfg).unwrap();
            let w2 = weight_w(&g, s, &g.dilate(2.0, &x), &cfg).unwrap();
            assert!(w1 > 0.0);
            assert_relative_eq!(w2, 2f64.powf(-2.0 * s) * w1, max_relative = 1e-5);
        }
        assert!(weight_w(&g, 0.5, &g.identity(), &cfg).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec = KernelSpec::new(KernelKind::K, 1, 1, 0.4, 0.9).unwrap();
        let cfg = QuadratureConfig::default();
        assert_eq!(spec.eval(0.3, 0.2, &cfg).unwrap(), k_kernel(1, 1, 0.4, 0.9, 0.3, 0.2));
        assert!(KernelSpec::new(KernelKind::K, 1, 1, 1.4, 0.9).is_err());
        assert!("weight_w".parse::<KernelKind>().is_ok());
        assert!(koranyi_sphere_measure(1) > 0.0);
        assert_relative_eq!(koranyi_sphere_measure(1), PI * PI / 2.0, max_relative = 1e-14);
    }
}
