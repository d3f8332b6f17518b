//! Closed-form constants of the extension problem, the coefficient family
//! c(ℓ, j) and the beta-type integral of the kernels.
//!
//! Every constant has a `ln_*` companion returning the log of its absolute
//! value; plain values are computed from it.

use crate::error::{domain, MathError, Result};
use crate::special_math::{gamma_sign, is_gamma_pole, ln_gamma, ln_gamma_ratio};
use serde::Serialize;
use std::f64::consts::PI;

/// The range a fractional order is required to lie in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderContext {
    /// s > 0
    Extension,
    /// s outside D = {±(n + 2k + 1)}
    Conformal,
    /// 0 < s < 1
    Unit,
    /// 0 < s < 1/2
    Half,
}

/// A fractional order together with the range it was validated against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FractionalOrder {
    pub s: f64,
    pub context: OrderContext,
}

impl FractionalOrder {
    /// Validates `s` for `context`; `n` is needed for the conformal range.
    pub fn new(s: f64, context: OrderContext, n: usize) -> Result<Self> {
        if !s.is_finite() {
            return domain("fractional order must be finite");
        }
        let ok = match context {
            OrderContext::Extension => s > 0.0,
            OrderContext::Unit => s > 0.0 && s < 1.0,
            OrderContext::Half => s > 0.0 && s < 0.5,
            OrderContext::Conformal => !in_forbidden_set(n, s),
        };
        if ok {
            Ok(Self { s, context })
        } else {
            domain(format!("s = {s} is not admissible in context {context:?} (n = {n})"))
        }
    }
}

/// s ∈ D = {±(n + 2k + 1) : k ≥ 0}, where Γ((2k+n+1−s)/2) or its mirror has a pole.
pub fn in_forbidden_set(n: usize, s: f64) -> bool {
    let t = s.abs() - (n as f64 + 1.0);
    t >= 0.0 && t == t.floor() && (t as i64) % 2 == 0
}

fn check_pos(name: &str, x: f64) -> Result<()> {
    if is_gamma_pole(x) {
        return domain(format!("{name}: gamma pole at {x}"));
    }
    Ok(())
}

/// ln C1 = ln[4^m π^{−(n+m/2)} Γ(n+s)Γ((n+m+s)/2) / (Γ(s)Γ((n+s)/2))].
pub fn ln_c1(n: usize, m: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("C1 needs s > 0, got {s}"));
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(mf * 4f64.ln() - (nf + 0.5 * mf) * PI.ln() + ln_gamma(nf + s) + ln_gamma(0.5 * (nf + mf + s))
        - ln_gamma(s)
        - ln_gamma(0.5 * (nf + s)))
}

/// Normalising constant making C1 ρ^{2s} φ_{s,ρ} a unit-mass kernel.
pub fn c1(n: usize, m: usize, s: f64) -> Result<f64> {
    Ok(ln_c1(n, m, s)?.exp())
}

/// (ln|C2|, sign) with C2 = 4^{2s} Γ((n+1+s)/2)Γ((n+m+s)/2) / (Γ((n+1−s)/2)Γ((n+m−s)/2)).
pub fn ln_c2(n: usize, m: usize, s: f64) -> Result<(f64, f64)> {
    let (nf, mf) = (n as f64, m as f64);
    let args = [0.5 * (nf + 1.0 + s), 0.5 * (nf + mf + s), 0.5 * (nf + 1.0 - s), 0.5 * (nf + mf - s)];
    for a in args {
        check_pos("C2", a)?;
    }
    let (l1, s1) = ln_gamma_ratio(args[0], args[2])?;
    let (l2, s2) = ln_gamma_ratio(args[1], args[3])?;
    Ok((2.0 * s * 4f64.ln() + l1 + l2, s1 * s2))
}

/// Constant in ℒ_s φ_{−s,ρ} = C2 ρ^{2s} φ_{s,ρ}.
pub fn c2(n: usize, m: usize, s: f64) -> Result<f64> {
    let (l, sg) = ln_c2(n, m, s)?;
    Ok(sg * l.exp())
}

/// ln C3 with C3 = 2(n+m−s)·I(n, m, 1, 2−s) = ∫_N K_{s,1}.
pub fn ln_c3(n: usize, m: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("C3 needs 0 < s < 1, got {s}"));
    }
    Ok((2.0 * (n as f64 + m as f64 - s)).ln() + ln_lemma_i(n, m, 1.0, 2.0 - s)?)
}

pub fn c3(n: usize, m: usize, s: f64) -> Result<f64> {
    Ok(ln_c3(n, m, s)?.exp())
}

/// ln of 2^{1−2s}Γ(1−s)/Γ(s).
pub fn ln_dtn_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("Dirichlet-to-Neumann constant needs 0 < s < 1, got {s}"));
    }
    Ok((1.0 - 2.0 * s) * 2f64.ln() + ln_gamma(1.0 - s) - ln_gamma(s))
}

/// 2^{1−2s}Γ(1−s)/Γ(s).
pub fn dtn_constant(s: f64) -> Result<f64> {
    Ok(ln_dtn_constant(s)?.exp())
}

/// ln of |Γ(−s)|/(4^s Γ(s)).
pub fn ln_limit2_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("limit constant needs 0 < s < 1, got {s}"));
    }
    Ok(ln_gamma(-s) - s * 4f64.ln() - ln_gamma(s))
}

/// |Γ(−s)|/(4^s Γ(s)).
pub fn limit2_constant(s: f64) -> Result<f64> {
    Ok(ln_limit2_constant(s)?.exp())
}

/// ln c_{n,s} = ln[2^{n−1+3s} π^{−n−1} Γ((n+s+1)/2)²].
pub fn ln_cns_oscillatory(n: usize, s: f64) -> Result<f64> {
    let nf = n as f64;
    if !(nf + s + 1.0 > 0.0) {
        return domain("c_{n,s} needs n+s+1 > 0");
    }
    Ok((nf - 1.0 + 3.0 * s) * 2f64.ln() - (nf + 1.0) * PI.ln() + 2.0 * ln_gamma(0.5 * (nf + s + 1.0)))
}

/// Constant of the oscillatory double integral of the heat kernels.
pub fn cns_oscillatory(n: usize, s: f64) -> Result<f64> {
    Ok(ln_cns_oscillatory(n, s)?.exp())
}

/// Normalisation that the oscillatory double integral actually carries:
/// 2^{3(n+s+1)−1} Γ((n+s+1)/2)², which equals 2^{2n+3}π^{n+1} c_{n,s}.
pub fn cns_oscillatory_integral(n: usize, s: f64) -> Result<f64> {
    let p = n as f64 + s + 1.0;
    if !(p > 0.0) {
        return domain("c_{n,s} needs n+s+1 > 0");
    }
    Ok(((3.0 * p - 1.0) * 2f64.ln() + 2.0 * ln_gamma(0.5 * p)).exp())
}

/// ln of ∫_N (1+|v|²)^j ((1+|v|²)²+16|z|²)^{−(n+m+α)/2} dv dz.
pub fn ln_lemma_i(n: usize, m: usize, j: f64, alpha: f64) -> Result<f64> {
    let (nf, mf) = (n as f64, m as f64);
    if !(alpha - j > 0.0) {
        return Err(MathError::Divergent(format!("integral diverges for alpha - j = {} <= 0", alpha - j)));
    }
    if !(alpha > -nf) {
        return domain(format!("integral needs alpha > -n, got {alpha}"));
    }
    for a in [nf - j + alpha, 0.5 * (nf + mf + alpha)] {
        check_pos("lemma integral", a)?;
    }
    Ok((nf + 0.5 * mf) * PI.ln() - mf * 4f64.ln() + ln_gamma(alpha - j) + ln_gamma(0.5 * (nf + alpha))
        - ln_gamma(nf - j + alpha)
        - ln_gamma(0.5 * (nf + mf + alpha)))
}

/// π^{n+m/2}4^{−m} Γ(α−j)Γ((n+α)/2) / (Γ(n−j+α)Γ((n+m+α)/2)).
pub fn lemma_i(n: usize, m: usize, j: f64, alpha: f64) -> Result<f64> {
    let (nf, mf) = (n as f64, m as f64);
    let l = ln_lemma_i(n, m, j, alpha)?;
    let sign = gamma_sign(alpha - j) * gamma_sign(0.5 * (nf + alpha)) * gamma_sign(nf - j + alpha) * gamma_sign(0.5 * (nf + mf + alpha));
    Ok(sign * l.exp())
}

/// Prefactor of the singular-integral representation of ℒ_s:
/// 4^{m+s}π^{−(n+m/2)}Γ(n+s)Γ((n+m+s)/2)/(Γ((n+s)/2)|Γ(−s)|).
pub fn singular_integral_prefactor(n: usize, m: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("singular integral needs 0 < s < 1, got {s}"));
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(((mf + s) * 4f64.ln() - (nf + 0.5 * mf) * PI.ln() + ln_gamma(nf + s) + ln_gamma(0.5 * (nf + mf + s))
        - ln_gamma(0.5 * (nf + s))
        - ln_gamma(-s))
    .exp())
}

/// Cross-section constant C1(n,1,s)/C1(n,m,s).
pub fn radon_cross_constant(n: usize, m: usize, s: f64) -> Result<f64> {
    Ok((ln_c1(n, 1, s)? - ln_c1(n, m, s)?).exp())
}

/// How the coefficients c(ℓ, j) were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffMethod {
    /// Exact differentiation of A^j D^{−(N+ℓ+j)/2} with A = ρ²+|v|², D = A² + 16|z|².
    Differentiation,
    /// The alternative recurrence carrying a factor ½ on the lowering terms.
    PaperRecurrence,
}

/// Coefficients of ((2ρ)⁻¹∂_ρ)^ℓ φ_{−s,ρ} = Σ_j c(ℓ,j) g_{j,ρ} φ_{ℓ−s,ρ}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffTable {
    pub ell: usize,
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub method: CoeffMethod,
    pub coeffs: Vec<f64>,
}

impl CoeffTable {
    pub fn get(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }
}

/// Coefficient table by exact differentiation. With X = ρ² one has
/// (2ρ)⁻¹∂_ρ = ∂_X, ∂_X A = 1, ∂_X D = 2A, so
/// ∂_X(A^a D^b) = aA^{a−1}D^b + 2bA^{a+1}D^{b−1}, which gives
/// c(ℓ+1, j) = (j+1)c(ℓ, j+1) − (N+ℓ+j−1)c(ℓ, j−1), N = n+m−s.
pub fn coeff_table(ell: usize, n: usize, m: usize, s: f64) -> CoeffTable {
    coeff_table_with(ell, n, m, s, CoeffMethod::Differentiation)
}

pub fn coeff_table_with(ell: usize, n: usize, m: usize, s: f64, method: CoeffMethod) -> CoeffTable {
    let big_n = n as f64 + m as f64 - s;
    let half = match method {
        CoeffMethod::Differentiation => 1.0,
        CoeffMethod::PaperRecurrence => 0.5,
    };
    let mut c = vec![1.0];
    for l in 0..ell {
        let lf = l as f64;
        let mut next = vec![0.0; l + 2];
        for (j, slot) in next.iter_mut().enumerate() {
            let up = if j < l { (j as f64 + 1.0) * c[j + 1] } else { 0.0 };
            let down = if j >= 1 && j - 1 <= l { half * (big_n + lf + j as f64 - 1.0) * c[j - 1] } else { 0.0 };
            *slot = up - down;
        }
        c = next;
    }
    CoeffTable { ell, n, m, s, method, coeffs: c }
}

/// a(n,m,s) = π^{n+m/2}4^{−m} Γ(ℓ−s)/Γ(n+ℓ−s) Σ_j c(ℓ,j) Γ((n+ℓ+j−s)/2)/Γ((n+m+ℓ+j−s)/2).
pub fn a_constant(ell: usize, n: usize, m: usize, s: f64, table: &CoeffTable) -> Result<f64> {
    if table.ell != ell {
        return domain("coefficient table has the wrong order");
    }
    let (nf, mf, lf) = (n as f64, m as f64, ell as f64);
    if !(lf - s > 0.0) {
        return domain(format!("a(n,m,s) needs s < ell, got s = {s}, ell = {ell}"));
    }
    let pre = (nf + 0.5 * mf) * PI.ln() - mf * 4f64.ln();
    let (lr, sr) = ln_gamma_ratio(lf - s, nf + lf - s)?;
    let mut sum = 0.0;
    for (j, &c) in table.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let jf = j as f64;
        let (l, sg) = ln_gamma_ratio(0.5 * (nf + lf + jf - s), 0.5 * (nf + mf + lf + jf - s))?;
        sum += c * sg * l.exp();
    }
    Ok(sr * (pre + lr).exp() * sum)
}

/// Limit constant C1·C2⁻¹·a(n,m,s) of the order-ℓ boundary limit.
pub fn higher_order_constant(ell: usize, n: usize, m: usize, s: f64, table: &CoeffTable) -> Result<f64> {
    Ok(c1(n, m, s)? / c2(n, m, s)? * a_constant(ell, n, m, s, table)?)
}

/// All constants for one (n, m, s), as reported by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub n: usize,
    pub m: usize,
    pub s: f64,
    pub q: usize,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub dtn: Option<f64>,
    pub limit2: Option<f64>,
    pub cns: Option<f64>,
    pub singular_prefactor: Option<f64>,
    pub ln_c1: Option<f64>,
    pub ln_c2_abs: Option<f64>,
}

pub fn constants_report(n: usize, m: usize, s: f64) -> ConstantsReport {
    ConstantsReport {
        n,
        m,
        s,
        q: 2 * (n + m),
        c1: c1(n, m, s).ok(),
        c2: c2(n, m, s).ok(),
        c3: c3(n, m, s).ok(),
        dtn: dtn_constant(s).ok(),
        limit2: limit2_constant(s).ok(),
        cns: cns_oscillatory(n, s).ok(),
        singular_prefactor: singular_integral_prefactor(n, m, s).ok(),
        ln_c1: ln_c1(n, m, s).ok(),
        ln_c2_abs: ln_c2(n, m, s).ok().map(|x| x.0),
    }
}
