//! Radon transform in the centre variable for z-radial functions, and the
//! hyperplane-section identity for φ_{s,1}.

use crate::constants::radon_cross_constant;
use crate::error::{domain, Result};
use crate::kernels::phi;
use crate::report::CheckReport;
use crate::special_math::{integrate_1d, sphere_area, Domain, QuadratureConfig};

/// R f(t) = ∫_{ℝ^{m−1}} f(√(t² + |z′|²)) dz′ for a radial function f of |z| ∈ ℝ^m.
pub fn radon_radial<F: Fn(f64) -> f64>(m: usize, f: F, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if m == 0 {
        return domain("radon transform needs m >= 1");
    }
    if m == 1 {
        return Ok(f(t.abs()));
    }
    let w = sphere_area(m - 1);
    let p = m as i32 - 2;
    let v = integrate_1d(|r| f((t * t + r * r).sqrt()) * r.powi(p), Domain::UpperHalf(0.0), cfg)?;
    Ok(w * v)
}

/// ∫_{x·ω=t} ((1+|v|²)²+16|x|²)^{−(n+m+s)/2} dμ(x) against
/// C1(n,1,s)/C1(n,m,s)·((1+|v|²)²+16t²)^{−(n+1+s)/2}.
pub fn cross_section_identity(n: usize, m: usize, s: f64, v_norm: f64, t: f64, cfg: &QuadratureConfig) -> Result<CheckReport> {
    if m < 2 {
        return domain("the cross-section identity needs m >= 2");
    }
    if !(s > 0.0) {
        return domain("the cross-section identity needs s > 0");
    }
    let lhs = radon_radial(m, |z| phi(n, m, s, 1.0, v_norm, z), t, cfg)?;
    let rhs = radon_cross_constant(n, m, s)? * phi(n, 1, s, 1.0, v_norm, t);
    Ok(CheckReport::new("radon-cross-section")
        .param("n", n)
        .param("m", m)
        .param("s", s)
        .param("v", v_norm)
        .param("t", t)
        .relative(lhs, rhs, 1e-6))
}
