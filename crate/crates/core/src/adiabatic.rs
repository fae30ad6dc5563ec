//! Closed-form adiabatic (dark-state) theory of the photon emission.
//!
//! When the drive varies slowly the site tracks the instantaneous dark
//! state, parametrized by the mixing angle θ with tanθ ∝ Ω/g. Population
//! flows from the trapped ground level into the photonic ket and leaks out
//! at rate κ·sin²θ, so the emitted envelope takes the closed form
//!
//! f(t) = √κ · sinθ(t) · exp(−(κ/2)·∫₀ᵗ sin²θ(τ) dτ),
//!
//! identical in shape for both polarizations of a site. Matching the two
//! sites' drives so that sinθ_A(t) = sinθ_B(t) makes the two envelopes
//! coincide, which is what pushes the photon overlap |χ| — and with it the
//! teleportation fidelity — toward one. These functions double as oracles
//! for the integrated dynamics: the numeric pulse must converge to f(t) as
//! the drive becomes more adiabatic.

use crate::dynamics::{DriveProfile, EmittedPulse};
use crate::error::{Error, Result};
use crate::hilbert::{Qubit, SiteState, Site, ALICE_DIM, BOB_DIM};
use crate::quad;
use crate::C64;

/// Effective coupling multiplicity: site B's excited level talks to two
/// cavity polarizations at once, so its mixing angle sees √2·g.
fn coupling_weight(site: Site) -> f64 {
    match site {
        Site::Alice => 1.0,
        Site::Bob => 2.0,
    }
}

/// Instantaneous mixing angle (cosθ, sinθ) of a site for drive `omega` and
/// coupling `g`: Alice (g, Ω)/√(g²+Ω²), Bob (√2g, Ω)/√(2g²+Ω²).
pub fn mixing_angle(site: Site, omega: f64, g: f64) -> Result<(f64, f64)> {
    let w = coupling_weight(site);
    let r2 = w * g * g + omega * omega;
    if r2 <= 0.0 {
        return Err(Error::DegenerateMixingAngle);
    }
    let r = r2.sqrt();
    Ok((w.sqrt() * g / r, omega / r))
}

/// The two dark states of site A:
/// D₁ = cosθ·gL|0,0⟩ − sinθ·g0|1,0⟩ and D₂ = cosθ·gR|0,0⟩ − sinθ·g0|0,1⟩.
pub fn dark_states_alice(omega: f64, g: f64) -> Result<(SiteState, SiteState)> {
    let (c, s) = mixing_angle(Site::Alice, omega, g)?;
    let mut d1 = vec![C64::new(0.0, 0.0); ALICE_DIM];
    d1[0] = C64::new(c, 0.0);
    d1[4] = C64::new(-s, 0.0);
    let mut d2 = vec![C64::new(0.0, 0.0); ALICE_DIM];
    d2[1] = C64::new(c, 0.0);
    d2[5] = C64::new(-s, 0.0);
    Ok((
        SiteState::new(Site::Alice, d1, 0.0)?,
        SiteState::new(Site::Alice, d2, 0.0)?,
    ))
}

/// The dark state of site B:
/// cosθ·g0′|0,0⟩ − sinθ·(gL|0,1⟩ + gR|1,0⟩)/√2.
pub fn dark_state_bob(omega: f64, g: f64) -> Result<SiteState> {
    let (c, s) = mixing_angle(Site::Bob, omega, g)?;
    let w = s * std::f64::consts::FRAC_1_SQRT_2;
    let mut d = vec![C64::new(0.0, 0.0); BOB_DIM];
    d[0] = C64::new(c, 0.0);
    d[2] = C64::new(-w, 0.0);
    d[3] = C64::new(-w, 0.0);
    SiteState::new(Site::Bob, d, 0.0)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "pulse grid must start at t = 0 and hold at least two times".into(),
        });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "pulse grid must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// The scalar envelope f(t) on `grid`, shared by both polarizations of the
/// site. The inner ∫sin²θ is a running trapezoid on the same grid. The
/// envelope is non-negative by construction, fixing the phase convention.
pub fn analytic_envelope(p: &DriveProfile, site: Site, grid: &[f64]) -> Result<Vec<f64>> {
    p.validate()?;
    check_grid(grid)?;
    let w = coupling_weight(site);
    let mut sin2 = Vec::with_capacity(grid.len());
    for &t in grid {
        let om = p.omega(t);
        let g = p.g(t);
        let r2 = w * g * g + om * om;
        if r2 <= 0.0 {
            return Err(Error::DegenerateMixingAngle);
        }
        sin2.push(om * om / r2);
    }
    let cum = quad::cumulative_trapezoid_t(grid, &sin2);
    let sk = p.kappa.sqrt();
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, _)| sk * sin2[k].sqrt() * (-0.5 * p.kappa * cum[k]).exp())
        .collect())
}

/// Alice's analytic pulse: the scalar envelope carrying the qubit weights,
/// amp_L = α·f(t) and amp_R = β·f(t).
pub fn analytic_pulse_alice(
    p: &DriveProfile,
    q: &Qubit,
    grid: &[f64],
) -> Result<EmittedPulse> {
    let f = analytic_envelope(p, Site::Alice, grid)?;
    let amp_l: Vec<C64> = f.iter().map(|&v| q.alpha() * v).collect();
    let amp_r: Vec<C64> = f.iter().map(|&v| q.beta() * v).collect();
    Ok(EmittedPulse { site: Site::Alice, times: grid.to_vec(), amp_l, amp_r })
}

/// Bob's analytic pulse: the envelope split evenly across the two
/// polarizations, amp_L = amp_R = f(t)/√2.
pub fn analytic_pulse_bob(p: &DriveProfile, grid: &[f64]) -> Result<EmittedPulse> {
    let f = analytic_envelope(p, Site::Bob, grid)?;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let amp: Vec<C64> = f.iter().map(|&v| C64::new(w * v, 0.0)).collect();
    Ok(EmittedPulse { site: Site::Bob, times: grid.to_vec(), amp_l: amp.clone(), amp_r: amp })
}

/// Builds Bob's drive from Alice's so the two mixing angles coincide:
/// Ω_B0 = √2·(g_B0/g_A0)·Ω_A0, with envelope timing copied. The condition
/// is enforced at peak couplings; the motional phase stays the caller's to
/// set.
pub fn matched_drive(alice: &DriveProfile, g_b0: f64) -> Result<DriveProfile> {
    if alice.g0 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "g0",
            reason: "drive matching needs a positive source coupling".into(),
        });
    }
    if g_b0 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "g0",
            reason: "drive matching needs a positive target coupling".into(),
        });
    }
    Ok(DriveProfile {
        omega0: std::f64::consts::SQRT_2 * (g_b0 / alice.g0) * alice.omega0,
        g0: g_b0,
        ..*alice
    })
}
