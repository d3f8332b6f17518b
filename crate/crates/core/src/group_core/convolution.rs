//! Group convolution of bi-radial functions on Heisenberg groups, computed in
//! homogeneous polar coordinates
//!
//!   v = R √(cos α) ω,  t = ¼ R² sin α,  dv dt = ¼ R^{2n+1} cos^{n−1}α dR dα dω,
//!
//! with α = (π/2) sin β so that the √(cos α) endpoint behaviour becomes smooth.

use super::{koranyi, BiRadial, GroupParams, Point};
use crate::error::{domain, Result};
use crate::special_math::{integrate_estimate, integrate_log_scale, sphere_area, Domain, QuadratureConfig};
use std::f64::consts::{FRAC_PI_2, PI};

/// Where the polar coordinates of the convolution integral are centred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Centering {
    /// Around the singularity of the right factor h (y = 0 in ∫ f(xy⁻¹) h(y) dy).
    Right,
    /// Around the singularity of the left factor f (w = xy⁻¹ = 0).
    Left,
    /// Smooth partition χ = d₂ᵖ/(d₁ᵖ + d₂ᵖ) between the two, for factors that
    /// are both singular.
    Partition { power: f64 },
}

fn inner_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { rel_tol: 0.1 * cfg.rel_tol, abs_tol: 0.0, max_subdivisions: 200, tail_cut: cfg.tail_cut }
}

// Homogeneous factors overflow at extreme radii (R^{−Q} near 0, decay at ∞);
// there the integrand in the log-radius variable is negligible.
fn far_field(v: f64, big_r: f64) -> f64 {
    if v.is_finite() || big_r.ln().abs() < 100.0 { v } else { 0.0 }
}

/// ∫_{S^{2n−1}} g(⟨e₁,ω⟩, ⟨e₂,ω⟩) dω.
fn sphere_projection<G: Fn(f64, f64) -> f64>(n: usize, g: G, cfg: &QuadratureConfig) -> f64 {
    let breaks = [0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI];
    let around = |scale: f64| {
        let pts = breaks;
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += integrate_estimate(|th: f64| g(scale * th.cos(), scale * th.sin()), Domain::Finite(w[0], w[1]), cfg).value;
        }
        total
    };
    if n == 1 {
        return around(1.0);
    }
    // projection of the uniform measure onto a 2-plane has density ∝ (1−|p|²)^{n−2}
    let norm = sphere_area(2 * n) * (n as f64 - 1.0) / PI;
    let radial = |rho: f64| rho * (1.0 - rho * rho).powi(n as i32 - 2) * around(rho);
    norm * integrate_estimate(radial, Domain::Finite(0.0, 1.0), cfg).value
}

/// ∫_N F(|v|, |z|) dv dz for bi-radial F, in homogeneous polar coordinates.
pub fn haar_polar_integral<F: BiRadial + ?Sized>(n: usize, m: usize, f: &F, cfg: &QuadratureConfig) -> f64 {
    // r = R√cos α, ζ = ¼R² sin α on α ∈ [0, π/2]; r^{2n−1} ζ^{m−1} dr dζ = ¼R² r^{2n−1} ζ^{m−1} / √cos α dR dα
    let area = sphere_area(2 * n) * sphere_area(m);
    let icfg = inner_cfg(cfg);
    let radial = |big_r: f64| {
        let ang = |beta: f64| {
            let alpha = FRAC_PI_2 * beta.sin();
            let c = alpha.cos();
            let r = big_r * c.sqrt();
            let zeta = 0.25 * big_r * big_r * alpha.sin();
            let jac = 0.25 * big_r * big_r * r.powi(2 * n as i32 - 1) * zeta.powi(m as i32 - 1) / c.sqrt();
            let v = f.value(r, zeta);
            if v == 0.0 { 0.0 } else { v * jac * FRAC_PI_2 * beta.cos() }
        };
        let a = integrate_estimate(ang, Domain::Finite(0.0, FRAC_PI_2), &icfg).value;
        far_field(a, big_r)
    };
    area * integrate_log_scale(radial, 0.0, f64::INFINITY, cfg).value
}

/// Convolution f ∗ h(x) = ∫ f(xy⁻¹) h(y) dy with polar coordinates centred at
/// y = 0. Heisenberg groups (m = 1) only.
pub fn convolve_biradial<F, H>(g: &GroupParams, f: &F, h: &H, x: &Point, cfg: &QuadratureConfig) -> Result<f64>
where
    F: BiRadial + ?Sized,
    H: BiRadial + ?Sized,
{
    convolve_biradial_split(g, f, h, x, Centering::Right, cfg)
}

/// Convolution with an explicit choice of polar centring.
pub fn convolve_biradial_split<F, H>(
    g: &GroupParams,
    f: &F,
    h: &H,
    x: &Point,
    centering: Centering,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: BiRadial + ?Sized,
    H: BiRadial + ?Sized,
{
    cfg.validate()?;
    if g.m() != 1 {
        return domain(format!("group convolution is implemented for m = 1, got m = {}", g.m()));
    }
    let n = g.n();
    let rx = x.v_norm();
    let tx = x.z_norm();
    let icfg = inner_cfg(cfg);

    // piece centred at y = 0: ∫ f(xy⁻¹) h(y) χ(y) dy with weight chi(|y|, |xy⁻¹|)
    let piece = |left: bool, chi: &dyn Fn(f64, f64) -> f64| -> f64 {
        let radial = |big_r: f64| {
            let ang = |beta: f64| {
                let alpha = FRAC_PI_2 * beta.sin();
                let c = alpha.cos();
                let rp = big_r * c.sqrt();
                let tp = 0.25 * big_r * big_r * alpha.sin();
                let center = |p1: f64, p2: f64| {
                    let dv2 = (rx * rx + rp * rp - 2.0 * rx * rp * p1).max(0.0);
                    let dt = if left { tx - tp - 0.5 * rx * rp * p2 } else { tx - tp + 0.5 * rx * rp * p2 };
                    (dv2.sqrt(), dt.abs())
                };
                let sph = sphere_projection(
                    n,
                    |p1, p2| {
                        let (dr, dt) = center(p1, p2);
                        let other = koranyi(dr, dt);
                        let w = chi(big_r, other);
                        if w == 0.0 {
                            return 0.0;
                        }
                        let val = if left { f.value(rp, tp.abs()) * h.value(dr, dt) } else { f.value(dr, dt) * h.value(rp, tp.abs()) };
                        w * val
                    },
                    &icfg,
                );
                sph * c.powi(n as i32 - 1) * FRAC_PI_2 * beta.cos()
            };
            let a = integrate_estimate(ang, Domain::Finite(-FRAC_PI_2, 0.0), &icfg).value
                + integrate_estimate(ang, Domain::Finite(0.0, FRAC_PI_2), &icfg).value;
            let v = if a == 0.0 { 0.0 } else { 0.25 * big_r.powi(2 * n as i32 + 1) * a };
            far_field(v, big_r)
        };
        integrate_log_scale(radial, 0.0, f64::INFINITY, cfg).value
    };

    let one = |_: f64, _: f64| 1.0;
    let value = match centering {
        Centering::Right => piece(false, &one),
        Centering::Left => piece(true, &one),
        Centering::Partition { power } => {
            let near = move |d_self: f64, d_other: f64| {
                let a = d_self.powf(power);
                let b = d_other.powf(power);
                if a + b == 0.0 { 0.5 } else { b / (a + b) }
            };
            piece(false, &near) + piece(true, &near)
        }
    };
    Ok(value)
}
