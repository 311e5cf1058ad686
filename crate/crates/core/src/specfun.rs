//! Special functions used throughout the crate.
//!
//! The centrepiece is the modified Bessel function `K2` together with its
//! small-argument decomposition
//!
//! ```text
//! K2(z) = 2/z^2 - 1/2 - (z^2/8) log z + z^2 F(z^2) + z^4 G(z^2) log z
//! ```
//!
//! with `F`, `G` entire.  The coefficients of that decomposition are what the
//! boundary machinery of the rest of the crate is built on, so `K2` itself is
//! evaluated through the same series for small arguments (crossing over to a
//! Steed continued fraction for large ones).  `I2`, `J2`, `Y2` are provided
//! for spectral exclusion checks.

use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// 4 log 2 + 3 - 4γ; recurring combination in every expansion at the origin.
pub const SIGMA: f64 = 3.463_726_062_633_649_8;

/// F(0) = (4 log 2 + 3 - 4γ)/32, the value of the entire part of the K2
/// decomposition at the origin.
pub const F0: f64 = SIGMA / 32.0;

/// π³, the area of the unit 5-sphere.
pub const PI_CUBED: f64 = PI * PI * PI;

/// Additive constant (4 log 2 + 3 - 4γ)/2 = 16 F(0) distinguishing the two
/// printings of the eigenvalue equation.
pub const FUNCLAM_SHIFT: f64 = SIGMA / 2.0;

/// Named constants bundle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub euler_gamma: f64,
    pub pi_cubed: f64,
    pub funclam_shift: f64,
}

/// Returns the constants record (γ, π³, and the eigenvalue-equation shift).
pub fn constants() -> Constants {
    Constants {
        euler_gamma: EULER_GAMMA,
        pi_cubed: PI_CUBED,
        funclam_shift: FUNCLAM_SHIFT,
    }
}

/// The small-argument decomposition of K2 at a fixed argument.
///
/// `leading`, `half` and `logcoef` are the multipliers of the canonical
/// pieces 2/z², -1/2 and -(z²/8)·log z (all exactly 1 for K2 itself);
/// `f_entire_at` and `g_entire_at` are F(z²) and G(z²).
#[derive(Debug, Clone, Copy)]
pub struct K2Decomposition {
    pub leading: f64,
    pub half: f64,
    pub logcoef: f64,
    pub f_entire_at: f64,
    pub g_entire_at: f64,
}

impl K2Decomposition {
    /// Puts the pieces back together at argument `x`.
    pub fn reassemble(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.leading * 2.0 / x2 - 0.5 * self.half - self.logcoef * x2 / 8.0 * x.ln()
            + x2 * self.f_entire_at
            + x2 * x2 * self.g_entire_at * x.ln()
    }
}

/// F(w) = Σ_k [log 2 - γ + (H_k + H_{k+2})/2] w^k / (4^{k+1} k! (k+2)!)
/// where H_k is the k-th harmonic number.
pub(crate) fn entire_f(w: f64) -> f64 {
    let log2 = std::f64::consts::LN_2;
    let mut sum = 0.0;
    // 1/(4^{k+1} k! (k+2)!)
    let mut denom_inv = 1.0 / 8.0;
    let mut wk = 1.0;
    let mut h_k = 0.0; // H_0
    let mut h_k2 = 1.5; // H_2
    for k in 0..200 {
        let term = (log2 - EULER_GAMMA + 0.5 * (h_k + h_k2)) * denom_inv * wk;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        let kf = (k + 1) as f64;
        denom_inv /= 4.0 * kf * (kf + 2.0);
        wk *= w;
        h_k += 1.0 / kf;
        h_k2 += 1.0 / (kf + 2.0);
    }
    sum
}

/// G(w) = -Σ_j w^j / (4^{j+2} (j+1)! (j+3)!)
pub(crate) fn entire_g(w: f64) -> f64 {
    let mut sum = 0.0_f64;
    let mut denom_inv = 1.0_f64 / 96.0; // 1/(16 * 1! * 3!)
    let mut wj = 1.0;
    for j in 0..200 {
        let term = denom_inv * wj;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        let jf = (j + 1) as f64;
        denom_inv /= 4.0 * (jf + 1.0) * (jf + 3.0);
        wj *= w;
    }
    -sum
}

/// Steed/Thompson–Barnett continued fraction for K0, K1; accurate for x >= 2.
fn k0_k1_cf(x: f64) -> (f64, f64) {
    let eps = f64::EPSILON;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = delh;
    let mut q1 = 0.0_f64;
    let mut q2 = 1.0_f64;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < eps {
            break;
        }
    }
    h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("{name} requires x > 0, got {x}")));
    }
    Ok(())
}

/// Modified Bessel function K2(x), relative accuracy better than 1e-10 on
/// [1e-6, 50].  Series regrouping below the crossover, continued fraction
/// plus upward recurrence above.
pub fn bessel_k2(x: f64) -> Result<f64> {
    check_positive("bessel_k2", x)?;
    if x <= 2.0 {
        let w = x * x;
        Ok(2.0 / w - 0.5 - w / 8.0 * x.ln() + w * entire_f(w) + w * w * entire_g(w) * x.ln())
    } else {
        let (k0, k1) = k0_k1_cf(x);
        Ok(k0 + 2.0 * k1 / x)
    }
}

/// K1(x); series for x <= 2, continued fraction above.  Needed for the
/// derivative identity K2'(x) = -K1(x) - (2/x) K2(x).
pub(crate) fn bessel_k1(x: f64) -> Result<f64> {
    check_positive("bessel_k1", x)?;
    if x > 2.0 {
        return Ok(k0_k1_cf(x).1);
    }
    // K1(z) = 1/z + log(z/2) I1(z) - (z/4) Σ_k (ψ(k+1)+ψ(k+2)) (z²/4)^k / (k!(k+1)!)
    let q = 0.25 * x * x;
    let mut sum = 0.0;
    let mut psi_a = -EULER_GAMMA; // ψ(1)
    let mut psi_b = 1.0 - EULER_GAMMA; // ψ(2)
    let mut term_base = 1.0; // (z²/4)^k / (k!(k+1)!)
    for k in 0..200 {
        let term = (psi_a + psi_b) * term_base;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        let kf = (k + 1) as f64;
        term_base *= q / (kf * (kf + 1.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 1.0);
    }
    Ok(1.0 / x + (0.5 * x).ln() * bessel_i1(x)? - 0.25 * x * sum)
}

/// I1(x) by ascending series (positive terms, no cancellation).
pub(crate) fn bessel_i1(x: f64) -> Result<f64> {
    check_positive("bessel_i1", x)?;
    let q = 0.25 * x * x;
    let mut term = 0.5 * x; // k = 0
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    Ok(sum)
}

fn bessel_i2(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.125 * x * x; // (x/2)^2 / (0! 2!)
    let mut sum = term;
    for k in 1..600 {
        let kf = k as f64;
        term *= q / (kf * (kf + 2.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn bessel_j2_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.125 * x * x;
    let mut sum = term;
    for k in 1..600 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 2.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn bessel_y2_series(x: f64) -> f64 {
    // Y2(z) = (2/π) log(z/2) J2(z) - (1/π)(4/z²)(1 + z²/4)
    //         - (z²/(4π)) Σ_k (ψ(k+1)+ψ(k+3)) (-z²/4)^k / (k!(k+2)!)
    let q = 0.25 * x * x;
    let mut sum = 0.0;
    let mut psi_a = -EULER_GAMMA; // ψ(1)
    let mut psi_b = 1.5 - EULER_GAMMA; // ψ(3)
    let mut term_base = 0.5; // (-z²/4)^k / (k!(k+2)!), k = 0
    for k in 0..300 {
        let term = (psi_a + psi_b) * term_base;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        let kf = (k + 1) as f64;
        term_base *= -q / (kf * (kf + 2.0));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (kf + 2.0);
    }
    let j2 = bessel_j2_series(x);
    (2.0 / PI) * (0.5 * x).ln() * j2 - (4.0 / (PI * x * x)) * (1.0 + q) - q / PI * sum
}

/// Hankel asymptotic modulus/phase expansion for J2 and Y2, x >= 12.
fn bessel_j2_y2_asymptotic(x: f64) -> (f64, f64) {
    let mu = 16.0; // 4 ν² for ν = 2
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (kf * 8.0 * x);
        if term.abs() >= prev {
            break; // asymptotic series started diverging
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 5.0 * PI / 4.0;
    let amp = (2.0 / (PI * x)).sqrt();
    let j2 = amp * (p * chi.cos() - q * chi.sin());
    let y2 = amp * (p * chi.sin() + q * chi.cos());
    (j2, y2)
}

/// Which member of the order-2 Bessel family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J2,
    Y2,
    I2,
}

/// Standard Bessel values of order 2, relative accuracy better than 1e-8 on
/// [1e-3, 50].
pub fn bessel_family(kind: BesselKind, x: f64) -> Result<f64> {
    check_positive("bessel_family", x)?;
    Ok(match kind {
        BesselKind::I2 => bessel_i2(x),
        BesselKind::J2 => {
            if x <= 12.0 {
                bessel_j2_series(x)
            } else {
                bessel_j2_y2_asymptotic(x).0
            }
        }
        BesselKind::Y2 => {
            if x <= 12.0 {
                bessel_y2_series(x)
            } else {
                bessel_j2_y2_asymptotic(x).1
            }
        }
    })
}

/// The decomposition of K2 in the series regime 0 < x <= 1.
pub fn k2_series(x: f64) -> Result<K2Decomposition> {
    check_positive("k2_series", x)?;
    if x > 1.0 {
        return Err(Error::Range(format!(
            "k2_series is validated on (0, 1], got {x}"
        )));
    }
    let w = x * x;
    Ok(K2Decomposition {
        leading: 1.0,
        half: 1.0,
        logcoef: 1.0,
        f_entire_at: entire_f(w),
        g_entire_at: entire_g(w),
    })
}
