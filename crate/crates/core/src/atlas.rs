//! The boundary-parameter atlas.
//!
//! A boundary triple α = (α₀, α₁, α₂) prescribes the asymptotic condition
//! v₋₁ + α₀v₀ + α₁v₁ + α₂v₂ = 0 at the origin.  This module decides which
//! triples are realizable as self-adjoint extensions (the region 𝒜), produces
//! a concrete realization (μ₁, μ₂, γ₁, γ₂, λ₀) by locating a zero of the
//! scalar function G_α with positive slope, inverts that map, and classifies
//! the special families Σ(0), Σ(m) and the θ = 0 decoupled family.

use crate::error::{Error, Result};
use crate::profiles::{g0_at_zero, MuTriple};
use crate::specfun::{EULER_GAMMA, PI_CUBED, SIGMA};
use serde::{Deserialize, Serialize};

/// Coefficients of the boundary condition at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTriple {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl BoundaryTriple {
    pub fn new(a0: f64, a1: f64, a2: f64) -> Self {
        Self { a0, a1, a2 }
    }
}

/// A concrete self-adjoint realization of an admissible triple.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtensionParams {
    pub mus: MuTriple,
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NegA2,
    ZeroA2,
    PosA2Window,
    Inadmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    EmptyPointSpectrum,
    GravitonOnly,
    Indefinite,
}

/// Admissibility verdict with its case split and stability class.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaClass {
    pub admissible: bool,
    pub branch: Branch,
    pub positivity: Positivity,
}

/// Strict inequalities resolved as inadmissible when within this distance of
/// equality; the region is open.
const TIE_TOL: f64 = 1e-12;

/// Threshold 3/4 - γ of the principal admissibility inequality.
fn zin_threshold() -> f64 {
    0.75 - EULER_GAMMA
}

/// Left side of the principal inequality, evaluated with s = α₁ ± √(α₁²-4α₂).
fn zin_expr(alpha: &BoundaryTriple, s: f64) -> f64 {
    alpha.a0 + alpha.a1 / s - alpha.a2 / (s * s) + 0.5 * s.abs().ln()
}

/// Classifies a boundary triple: admissibility, case branch, and the
/// positivity class of the associated conserved energy.
pub fn is_admissible(alpha: &BoundaryTriple) -> AlphaClass {
    let BoundaryTriple { a1, a2, .. } = *alpha;
    let disc = a1 * a1 - 4.0 * a2;
    let inadmissible = AlphaClass {
        admissible: false,
        branch: Branch::Inadmissible,
        positivity: Positivity::Indefinite,
    };
    if disc <= TIE_TOL {
        return inadmissible;
    }
    let sqrt_disc = disc.sqrt();
    let s_plus = a1 + sqrt_disc;
    let zin_ok = |v: f64| v < zin_threshold() - TIE_TOL;
    let principal = zin_expr(alpha, s_plus);

    let branch = if a2 < -TIE_TOL {
        Branch::NegA2
    } else if a2.abs() <= TIE_TOL && a1 > TIE_TOL {
        Branch::ZeroA2
    } else if a2 > TIE_TOL && a1 > TIE_TOL && 4.0 * a2 < a1 * a1 - TIE_TOL {
        Branch::PosA2Window
    } else {
        return inadmissible;
    };

    if !zin_ok(principal) {
        return inadmissible;
    }
    if branch == Branch::PosA2Window {
        let s_minus = a1 - sqrt_disc;
        if !(zin_expr(alpha, s_minus) > zin_threshold() + TIE_TOL) {
            return inadmissible;
        }
    }

    let positivity = classify_positivity(alpha, branch, principal);
    AlphaClass {
        admissible: true,
        branch,
        positivity,
    }
}

fn classify_positivity(alpha: &BoundaryTriple, branch: Branch, principal: f64) -> Positivity {
    match branch {
        Branch::NegA2 => {
            if principal > -std::f64::consts::LN_2 + TIE_TOL {
                Positivity::EmptyPointSpectrum
            } else {
                Positivity::Indefinite
            }
        }
        Branch::ZeroA2 => {
            let v = alpha.a0 + 0.5 * alpha.a1.ln();
            let lo = -0.5 - 1.5 * std::f64::consts::LN_2;
            let hi = 0.25 - 0.5 * std::f64::consts::LN_2 - EULER_GAMMA;
            if v > lo + TIE_TOL && v < hi - TIE_TOL {
                Positivity::GravitonOnly
            } else {
                Positivity::Indefinite
            }
        }
        _ => Positivity::Indefinite,
    }
}

/// G_α(μ) = α₀/4 - α₁/μ - 4α₂/μ² + (1/8) log|μ| - log2/4 - 3/16 + γ/4.
///
/// Zeros with positive slope are exactly the realizations (γⱼ > 0); its
/// entire zero set is the point spectrum of the extension (as -μ).
pub fn g_alpha(alpha: &BoundaryTriple, mu: f64) -> Result<f64> {
    if !(mu < 0.0) {
        return Err(Error::Domain(format!("g_alpha needs mu < 0, got {mu}")));
    }
    Ok(alpha.a0 / 4.0 - alpha.a1 / mu - 4.0 * alpha.a2 / (mu * mu) + mu.abs().ln() / 8.0
        - SIGMA / 16.0)
}

/// d/dμ G_α = μ^{-3} (μ²/8 + α₁ μ + 8α₂).
pub fn g_alpha_prime(alpha: &BoundaryTriple, mu: f64) -> f64 {
    (mu * mu / 8.0 + alpha.a1 * mu + 8.0 * alpha.a2) / (mu * mu * mu)
}

/// Critical points 4(-α₁ ± √(α₁²-4α₂)) of G_α (also h's, scaled by -1).
pub fn g_alpha_critical_points(alpha: &BoundaryTriple) -> Option<(f64, f64)> {
    let disc = alpha.a1 * alpha.a1 - 4.0 * alpha.a2;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some((4.0 * (-alpha.a1 - r), 4.0 * (-alpha.a1 + r)))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numeric(format!(
            "bisection bracket [{lo}, {hi}] does not straddle a sign change"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() < tol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the zero μ* of G_α with G_α'(μ*) > 0 on the monotone piece picked
/// out by the case analysis, then realizes the triple by straddling μ* with
/// μ₁ < μ* < μ₂, shrinking the straddle until both weights come out positive.
pub fn find_extension_params(alpha: &BoundaryTriple, spread: f64) -> Result<ExtensionParams> {
    if !(spread > 0.0 && spread < 1.0) {
        return Err(Error::Usage(format!("spread must lie in (0,1), got {spread}")));
    }
    let class = is_admissible(alpha);
    if !class.admissible {
        return Err(Error::Inadmissible(format!("{alpha:?}")));
    }
    let (mu_minus, mu_plus) = g_alpha_critical_points(alpha)
        .ok_or_else(|| Error::Inadmissible(format!("{alpha:?}: complex critical points")))?;

    // Monotone-increasing piece: (μ₋, μ₊ ∧ 0).  On the first two branches G
    // climbs to +∞ as μ → 0⁻; on the window branch it peaks at μ₊ < 0.
    let g = |mu: f64| g_alpha(alpha, mu).expect("mu < 0 inside bracket");
    let hi = match class.branch {
        Branch::PosA2Window => mu_plus,
        _ => {
            // expand toward 0⁻ until the sign flips
            let mut hi = mu_minus * 0.5;
            let mut guard = 0;
            while g(hi) <= 0.0 {
                hi *= 0.5;
                guard += 1;
                if guard > 200 {
                    return Err(Error::Inadmissible(format!(
                        "{alpha:?}: no sign change toward the origin"
                    )));
                }
            }
            hi
        }
    };
    if !(g(mu_minus) < 0.0) {
        return Err(Error::Inadmissible(format!(
            "{alpha:?}: G_α does not dip negative at its critical point"
        )));
    }
    if class.branch == Branch::PosA2Window && !(g(hi) > 0.0) {
        return Err(Error::Inadmissible(format!(
            "{alpha:?}: window branch lacks a positive-slope crossing"
        )));
    }
    let mu_star = bisect(g, mu_minus, hi, 1e-14)?;
    if !(g_alpha_prime(alpha, mu_star) > 0.0) {
        return Err(Error::Inadmissible(format!(
            "{alpha:?}: located zero has non-positive slope"
        )));
    }

    let mut s = spread;
    for _ in 0..40 {
        let mu1 = mu_star * (1.0 + s);
        let mu2 = mu_star * (1.0 - s);
        let gamma1 = (mu1 - mu2) * mu1 * mu1 * g(mu1) / (16.0 * PI_CUBED);
        let gamma2 = (mu2 - mu1) * mu2 * mu2 * g(mu2) / (16.0 * PI_CUBED);
        if gamma1 > 0.0 && gamma2 > 0.0 {
            let mus = MuTriple::new(0.5 * (mu1 + mu2), mu1, mu2)?;
            let lambda0 = g0_at_zero(&mus) + alpha.a0 / (32.0 * PI_CUBED);
            return Ok(ExtensionParams {
                mus,
                gamma1,
                gamma2,
                lambda0,
            });
        }
        s *= 0.5;
    }
    Err(Error::Numeric(format!(
        "{alpha:?}: could not straddle μ* = {mu_star} with positive weights"
    )))
}

/// Recovers the boundary triple from a realization (the inverse of
/// `find_extension_params` on the admissible set).
pub fn alpha_from_params(params: &ExtensionParams) -> Result<BoundaryTriple> {
    let MuTriple { mu1, mu2, .. } = params.mus;
    if !(params.gamma1 > 0.0 && params.gamma2 > 0.0) {
        return Err(Error::Domain(format!(
            "weights must be positive: ({}, {})",
            params.gamma1, params.gamma2
        )));
    }
    let dl = params.lambda0 - g0_at_zero(&params.mus);
    let a0 = 32.0 * PI_CUBED * dl;
    let d12 = mu1 - mu2;
    let a1 = (mu1 + mu2) * (8.0 * PI_CUBED * dl - SIGMA / 16.0)
        + (mu1 * mu1 * (-mu1).ln() - mu2 * mu2 * (-mu2).ln()) / (8.0 * d12)
        - 16.0 * PI_CUBED * (params.gamma1 + params.gamma2) / (d12 * d12);
    let a2 = mu1
        * mu2
        * (-2.0 * PI_CUBED * dl + SIGMA / 64.0
            - (mu1 * (-mu1).ln() - mu2 * (-mu2).ln()) / (32.0 * d12))
        + 4.0 * PI_CUBED * (mu2 * params.gamma1 + mu1 * params.gamma2) / (d12 * d12);
    Ok(BoundaryTriple::new(a0, a1, a2))
}

/// Which printing of a condition that the text states in two inconsistent
/// forms to use; `Shifted` is the one consistent with the K2 expansion and
/// is what the numerical oracle selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Printed,
    Shifted,
}

/// Membership in Σ(0): the periodic profile z^{-3/2} e^{±imt} satisfies the
/// boundary condition (equivalently, 0 is an eigenvalue).
pub fn sigma0_contains(alpha: &BoundaryTriple) -> bool {
    alpha.a2 == 0.0
        && alpha.a1 > 0.0
        && alpha.a0 + 0.5 * alpha.a1.ln()
            < 0.25 - 0.5 * std::f64::consts::LN_2 - EULER_GAMMA - TIE_TOL
}

/// Residual of the Σ(m) membership identity; zero means the static profile
/// z^{1/2} K2(mz) satisfies the boundary condition.
pub fn sigma_m_residual(alpha: &BoundaryTriple, m: f64, variant: Variant) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("sigma_m needs m > 0, got {m}")));
    }
    let m2 = m * m;
    Ok(match variant {
        // identity as printed
        Variant::Printed => {
            m2 * alpha.a0 + 0.5 * alpha.a1 - 2.0 * alpha.a2 / m2
                - m2 * (SIGMA / 32.0 - m.ln())
        }
        // identity rederived from the K2 expansion coefficients
        Variant::Shifted => {
            m2 * alpha.a0 / 8.0 + 0.5 * alpha.a1 - 2.0 * alpha.a2 / m2
                - m2 * (SIGMA / 32.0 - m.ln() / 8.0)
        }
    })
}

/// Membership test for Σ(m) at numerical tolerance (the set is a surface).
pub fn sigma_m_contains(alpha: &BoundaryTriple, m: f64, variant: Variant) -> Result<bool> {
    let r = sigma_m_residual(alpha, m, variant)?;
    let scale = (m * m * alpha.a0.abs()).max(alpha.a1.abs()).max(1.0);
    Ok(is_admissible(alpha).admissible && r.abs() < 1e-10 * scale)
}

/// Solves the Σ(m) identity for α₀ given (α₁, α₂, m); handy for constructing
/// exact members.
pub fn sigma_m_alpha0(a1: f64, a2: f64, m: f64, variant: Variant) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("sigma_m needs m > 0, got {m}")));
    }
    let m2 = m * m;
    Ok(match variant {
        Variant::Printed => SIGMA / 32.0 - m.ln() - 0.5 * a1 / m2 + 2.0 * a2 / (m2 * m2),
        Variant::Shifted => SIGMA / 4.0 - m.ln() - 4.0 * a1 / m2 + 16.0 * a2 / (m2 * m2),
    })
}

/// The decoupled family α₀ = 1, α₁ < 0, -α₁² < 4α₂ < 0 whose dynamics splits
/// into a free regular part and two independent oscillators; excluded from
/// the dynamic atlas.
pub fn theta_zero_case(alpha: &BoundaryTriple) -> bool {
    alpha.a0 == 1.0
        && alpha.a1 < 0.0
        && -alpha.a1 * alpha.a1 < 4.0 * alpha.a2
        && alpha.a2 < 0.0
}
