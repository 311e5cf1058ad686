//! The conserved high-order energy.
//!
//! On decomposed states (f, g) = (field, velocity) the energy is the
//! quadratic form 𝓔 = ⟨A f, f⟩₀ + m²‖f‖₀² + ‖g‖₀² of the extension, written
//! out against the profile basis.  The coefficients below are fixed by
//! requiring the boundary form of A to vanish on the constraint domain in
//! exactly the inner product `inner_h0` implements — that choice is what
//! makes the form conserved by the evolution, annihilate the graviton kernel
//! state, and satisfy the eigenfunction identity (all unit-tested).
//!
//! With d = 1/(μ₁-μ₂), R = resolvent-at-origin of F_r, and
//! N₀ = phi0_h2_norm_sq/(2π³) (the H²-norm square of the Φ₀ profile in the
//! quadrature normalization used throughout):
//!
//! ```text
//! 𝓔 = Σ_j γ_j[(μ_j+m²)f_j² + g_j²]
//!     + ((m²+μ₀)N₀ + 2λ₀) f₀²  - 4 d f₀ (γ₁f₁ - γ₂f₂)  - 4(m²+μ₀) f₀ R
//!     + ⟨P1(P2-μ₁)F_r, P1(P2-μ₂)F_r⟩ + m²⟨(P2-μ₁)F_r, (P2-μ₂)F_r⟩
//!     + ⟨(P2-μ₁)g_r, (P2-μ₂)g_r⟩           (all quadratures carry π³)
//! ```
//!
//! On states compactly supported away from the origin it collapses to the
//! three-term derivative ladder `energy_compact`.

use crate::atlas::ExtensionParams;
use crate::error::{Error, Result};
use crate::fields::{
    apply_p1, apply_p2, grad_tail_ip, h2_ip_tailed, resolvent_at_origin, skipped_ip_pub,
    tail_coefficient, v_to_u, v_to_u0_level, CutoffSpec, RadialGridField, VCoords,
};
use crate::profiles::{phi0_h2_norm_sq, phi0_radial};
use crate::specfun::PI_CUBED;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Energy of a decomposed state with its term-by-term breakdown.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyReport {
    pub total: f64,
    /// Oscillator terms in the singular coefficients f₀, f₁, f₂, g₁, g₂.
    pub singular_part: f64,
    /// H²-weighted quadratures of the regular parts.
    pub regular_part: f64,
    /// Coupling of f₀ to (f₁, f₂) and to the regular part at the origin.
    pub cross_part: f64,
    /// The m²-proportional quadrature piece.
    pub mass: f64,
}

/// H²-norm square of the Φ₀ profile in the quadrature normalization.
pub fn phi0_norm_sq_quad(params: &ExtensionParams) -> f64 {
    phi0_h2_norm_sq(&params.mus) / (2.0 * PI_CUBED)
}

fn grad_quadrature(
    fr: &RadialGridField,
    mu1: f64,
    mu2: f64,
) -> Result<f64> {
    let p1f1 = apply_p1(&apply_p2(fr)?.axpy(-mu1, fr)?)?;
    let p1f2 = apply_p1(&apply_p2(fr)?.axpy(-mu2, fr)?)?;
    let c = tail_coefficient(fr);
    Ok(PI_CUBED * skipped_ip_pub(&p1f1, &p1f2) + grad_tail_ip(c, c, mu1, mu2, fr.l()))
}

/// Full energy of the decomposed state (f, g) for one Fourier mode of mass m.
///
/// f is a field-level decomposition (coefficients v₋₁..v₂ + remainder); g
/// needs only its (v₁, v₂) sector.  Uses the origin-resolvent form of the
/// f₀-coupling; `energy_full_quadratic` is the direct-quadrature cross-check.
pub fn energy_full(
    f: &VCoords,
    g: &VCoords,
    params: &ExtensionParams,
    m: f64,
    chi: &CutoffSpec,
) -> Result<EnergyReport> {
    if m < 0.0 {
        return Err(Error::Usage(format!("mass must be >= 0, got {m}")));
    }
    if !f.psi_r.same_grid(&g.psi_r) {
        return Err(Error::Usage(
            "state and velocity must share one grid".into(),
        ));
    }
    let mus = &params.mus;
    let (mu0, mu1, mu2) = (mus.mu0, mus.mu1, mus.mu2);
    let m2 = m * m;
    let d = 1.0 / (mu1 - mu2);
    let uf = v_to_u(f, mus, chi);
    let (f0, f1, f2) = (uf.u0, uf.u1, uf.u2);
    let (g1, g2, gr) = v_to_u0_level(g, mus, chi);

    let singular = params.gamma1 * ((mu1 + m2) * f1 * f1 + g1 * g1)
        + params.gamma2 * ((mu2 + m2) * f2 * f2 + g2 * g2)
        + ((m2 + mu0) * phi0_norm_sq_quad(params) + 2.0 * params.lambda0) * f0 * f0;

    let coupling = -4.0 * d * f0 * (params.gamma1 * f1 - params.gamma2 * f2);
    let resolvent = -4.0 * (m2 + mu0) * f0 * resolvent_at_origin(&uf.u_r, mu0)?;

    let g_quad = h2_ip_tailed(&gr, &gr, mu1, mu2)?;
    let f_grad = grad_quadrature(&uf.u_r, mu1, mu2)?;
    let f_quad = h2_ip_tailed(&uf.u_r, &uf.u_r, mu1, mu2)?;

    Ok(EnergyReport {
        total: singular + coupling + resolvent + g_quad + f_grad + m2 * f_quad,
        singular_part: singular,
        regular_part: g_quad + f_grad,
        cross_part: coupling + resolvent,
        mass: m2 * f_quad,
    })
}

/// The same energy with the f₀-sector evaluated as one direct quadrature of
/// the combined field F_r + f₀Φ₀ instead of through the origin resolvent:
///
/// 𝓔 = Σγ-terms + 2λ₀f₀² - 4df₀(γ₁f₁-γ₂f₂) + ⟨g⟩ + ⟨∇F_r⟩
///     + (m²+μ₀)‖F_r + f₀Φ₀‖² - μ₀‖F_r‖².
pub fn energy_full_quadratic(
    f: &VCoords,
    g: &VCoords,
    params: &ExtensionParams,
    m: f64,
    chi: &CutoffSpec,
) -> Result<f64> {
    let mus = &params.mus;
    let (mu0, mu1, mu2) = (mus.mu0, mus.mu1, mus.mu2);
    let m2 = m * m;
    let d = 1.0 / (mu1 - mu2);
    let uf = v_to_u(f, mus, chi);
    let (f0, f1, f2) = (uf.u0, uf.u1, uf.u2);
    let (g1, g2, gr) = v_to_u0_level(g, mus, chi);

    let singular = params.gamma1 * ((mu1 + m2) * f1 * f1 + g1 * g1)
        + params.gamma2 * ((mu2 + m2) * f2 * f2 + g2 * g2)
        + 2.0 * params.lambda0 * f0 * f0;
    let coupling = -4.0 * d * f0 * (params.gamma1 * f1 - params.gamma2 * f2);

    let g_quad = h2_ip_tailed(&gr, &gr, mu1, mu2)?;
    let f_grad = grad_quadrature(&uf.u_r, mu1, mu2)?;
    let f_quad = h2_ip_tailed(&uf.u_r, &uf.u_r, mu1, mu2)?;

    let mut combo = uf.u_r.clone();
    for i in 0..combo.n() {
        let z = combo.z(i);
        combo.values_mut()[i] += f0 * phi0_radial(mus, z).expect("z > 0");
    }
    let combo_quad = h2_ip_tailed(&combo, &combo, mu1, mu2)?;

    Ok(singular + coupling + g_quad + f_grad + (m2 + mu0) * combo_quad - mu0 * f_quad)
}

/// Energy shortcut for states supported away from both ends:
/// π³[ ‖P1P2f‖² - (μ₁+μ₂)‖P2f‖² + μ₁μ₂‖P1f‖²
///     + m²(‖P2f‖² - (μ₁+μ₂)‖P1f‖² + μ₁μ₂‖f‖²)
///     + ‖P2g‖² - (μ₁+μ₂)‖P1g‖² + μ₁μ₂‖g‖² ].
pub fn energy_compact(
    f: &RadialGridField,
    g: &RadialGridField,
    params: &ExtensionParams,
    m: f64,
) -> Result<f64> {
    if !f.same_grid(g) {
        return Err(Error::Shape("fields must share one grid".into()));
    }
    let h = f.h();
    let margin = 10.0 * h;
    let far = |x: &RadialGridField| {
        (0..x.n()).all(|i| {
            let z = x.z(i);
            x.values()[i] == 0.0 || (z > margin && z < x.l() - margin)
        })
    };
    if !far(f) || !far(g) {
        return Err(Error::Usage(
            "energy_compact needs support at least 10h away from both ends".into(),
        ));
    }
    let (mu1, mu2) = (params.mus.mu1, params.mus.mu2);
    let m2 = m * m;
    let sum_mu = mu1 + mu2;
    let prod_mu = mu1 * mu2;
    let p1f = apply_p1(f)?;
    let p2f = apply_p2(f)?;
    let p1p2f = apply_p1(&p2f)?;
    let p1g = apply_p1(g)?;
    let p2g = apply_p2(g)?;
    let nf = |x: &RadialGridField| x.l2_ip(x).expect("same grid");
    Ok(PI_CUBED
        * (nf(&p1p2f) - sum_mu * nf(&p2f) + prod_mu * nf(&p1f)
            + m2 * (nf(&p2f) - sum_mu * nf(&p1f) + prod_mu * nf(f))
            + nf(&p2g) - sum_mu * nf(&p1g) + prod_mu * nf(g)))
}

/// Outcome of random-state positivity sampling.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PositivitySample {
    pub min_value: f64,
    pub all_nonnegative: bool,
    /// Scale against which the tolerance was applied (largest |term| seen).
    pub scale: f64,
}

/// Draws `trials` random decomposed states (smooth interior bumps plus
/// uniform singular coefficients) and reports the minimum energy.
pub fn positivity_sample(
    params: &ExtensionParams,
    m: f64,
    trials: usize,
    seed: u64,
    grid_l: f64,
    grid_n: usize,
) -> Result<PositivitySample> {
    if trials == 0 {
        return Err(Error::Usage("positivity_sample needs trials >= 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let chi = CutoffSpec::default_for(grid_l);
    let mut min_value = f64::INFINITY;
    let mut scale = 0.0_f64;
    for _ in 0..trials {
        let f = random_state(&mut rng, grid_l, grid_n);
        let g = random_state(&mut rng, grid_l, grid_n);
        let e = energy_full(&f, &g, params, m, &chi)?;
        min_value = min_value.min(e.total);
        scale = scale
            .max(e.singular_part.abs())
            .max(e.regular_part.abs())
            .max(e.cross_part.abs())
            .max(e.mass.abs());
    }
    Ok(PositivitySample {
        min_value,
        all_nonnegative: min_value >= -1e-10 * scale,
        scale,
    })
}

fn random_state<R: Rng>(rng: &mut R, l: f64, n: usize) -> VCoords {
    let c1 = rng.gen_range(0.3 * l..0.6 * l);
    let w1 = rng.gen_range(0.05 * l..0.12 * l);
    let a1 = rng.gen_range(-1.0..1.0);
    let c2 = rng.gen_range(0.3 * l..0.6 * l);
    let w2 = rng.gen_range(0.05 * l..0.12 * l);
    let a2 = rng.gen_range(-1.0..1.0);
    let bump = RadialGridField::from_fn(l, n, |z| {
        let mut v = 0.0;
        for (c, w, a) in [(c1, w1, a1), (c2, w2, a2)] {
            let t = (z - c) / w;
            if t.abs() < 1.0 {
                v += a * (1.0 - t * t).powi(4);
            }
        }
        v
    });
    VCoords::from_parts(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        bump,
    )
}
