//! Run configuration: the TOML schema, its defaults, and resolution into a
//! concrete simulator preset.
//!
//! Config files speak laboratory units — linear frequencies ν = rate/2π in
//! MHz, times in µs, angles in radians — while the simulator works in
//! angular rad/s and seconds. Resolution multiplies by 2π·10⁶ (rates) and
//! 10⁻⁶ (times) at this boundary, so nothing downstream converts again.
//!
//! Every key is optional; an empty file is a valid configuration. Missing
//! keys take the defaults below, and unknown keys are rejected so a typo
//! cannot silently fall back to a default.
//!
//! | key            | default  | meaning                                     |
//! |----------------|----------|---------------------------------------------|
//! | `experiment`   | `single` | single, sweep, monte-carlo, or validate      |
//! | `preset`       | `strong` | named parameter set to start from            |
//! | `out_dir`      | `.`      | where result files are written               |
//! | `seed`         | 1        | RNG seed for sampling experiments            |
//! | `samples`      | 100000   | Monte Carlo shots per efficiency             |
//! | `etas`         | [1.0]    | detector efficiencies to sample              |
//! | `tolerance`    | 1e-8     | relative tolerance of the integrator         |
//! | `phi_points`   | 16       | sweep grid size over [0, 2π)                 |
//! | `[parameters]` | (empty)  | per-key physics overrides, see below         |
//!
//! The `[parameters]` table overrides individual physics values of the
//! named preset. When `omega_b0_mhz` is omitted, Bob's drive amplitude is
//! re-derived from Alice's by the mixing-angle matching condition
//! Ω_B0 = √2·(g_B0/g_A0)·Ω_A0, keeping the two emitted pulses identical in
//! shape; supplying it explicitly marks the preset as unmatched.

use anyhow::{anyhow, bail, Context, Result};
use cavity_teleport::adiabatic::matched_drive;
use cavity_teleport::dynamics::DriveProfile;
use cavity_teleport::experiments::{preset_by_name, Preset};
use cavity_teleport::hilbert::Qubit;
use cavity_teleport::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;

/// Which experiment a run performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// One teleportation at the configured parameters, full report.
    Single,
    /// Fidelity and success probability over Bob's motional phase.
    Sweep,
    /// Click sampling at finite detector efficiency.
    MonteCarlo,
    /// The built-in self-checks.
    Validate,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentKind::Single => "single",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::MonteCarlo => "monte-carlo",
            ExperimentKind::Validate => "validate",
        };
        f.write_str(s)
    }
}

/// Top-level schema of a configuration file. Unknown keys are errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<ExperimentKind>,
    pub preset: Option<String>,
    pub out_dir: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub etas: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub phi_points: Option<usize>,
    pub parameters: Option<InlineParameters>,
}

/// Physics overrides in laboratory units. Frequencies are ν = rate/2π in
/// MHz, times are µs, angles are radians. Omitted keys inherit the preset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineParameters {
    /// Cavity field decay rate κ/2π, MHz. Shared by both sites.
    pub kappa_mhz: Option<f64>,
    /// Atomic polarization decay rate γ/2π, MHz. Shared by both sites.
    pub gamma_mhz: Option<f64>,
    /// Vacuum Rabi coupling g₀/2π, MHz. Shared by both sites.
    pub g0_mhz: Option<f64>,
    /// Common detuning Δ/2π of drive and cavity from the excited level, MHz.
    pub delta_mhz: Option<f64>,
    /// Trap frequency ω_z/2π, MHz. Shared by both sites.
    pub omega_z_mhz: Option<f64>,
    /// Peak drive amplitude at site A, Ω_A0/2π in MHz.
    pub omega_a0_mhz: Option<f64>,
    /// Peak drive amplitude at site B, Ω_B0/2π in MHz. Omit to keep the
    /// drives matched (Ω_B0 = √2·(g_B0/g_A0)·Ω_A0).
    pub omega_b0_mhz: Option<f64>,
    /// Lamb-Dicke modulation depth of the coupling, radians.
    pub delta_g_rad: Option<f64>,
    /// Motional phase of site A, radians.
    pub phi_a_rad: Option<f64>,
    /// Motional phase of site B, radians.
    pub phi_b_rad: Option<f64>,
    /// Center of the Gaussian drive pulse, µs.
    pub t_c_us: Option<f64>,
    /// 1/e half-width of the Gaussian drive pulse, µs.
    pub delta_t_us: Option<f64>,
    /// Run duration, µs.
    pub t_end_us: Option<f64>,
    /// Intervals of the dynamics reporting grid.
    pub grid_points: Option<usize>,
    /// Qubit amplitude α as [re, im]; requires `beta`.
    pub alpha: Option<[f64; 2]>,
    /// Qubit amplitude β as [re, im]; requires `alpha`.
    pub beta: Option<[f64; 2]>,
}

impl InlineParameters {
    /// True when any physics key is present.
    fn is_empty(&self) -> bool {
        let Self {
            kappa_mhz,
            gamma_mhz,
            g0_mhz,
            delta_mhz,
            omega_z_mhz,
            omega_a0_mhz,
            omega_b0_mhz,
            delta_g_rad,
            phi_a_rad,
            phi_b_rad,
            t_c_us,
            delta_t_us,
            t_end_us,
            grid_points,
            alpha,
            beta,
        } = self;
        kappa_mhz.is_none()
            && gamma_mhz.is_none()
            && g0_mhz.is_none()
            && delta_mhz.is_none()
            && omega_z_mhz.is_none()
            && omega_a0_mhz.is_none()
            && omega_b0_mhz.is_none()
            && delta_g_rad.is_none()
            && phi_a_rad.is_none()
            && phi_b_rad.is_none()
            && t_c_us.is_none()
            && delta_t_us.is_none()
            && t_end_us.is_none()
            && grid_points.is_none()
            && alpha.is_none()
            && beta.is_none()
    }
}

/// Everything a run needs, after defaults and unit conversion.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: ExperimentKind,
    pub preset: Preset,
    pub out_dir: String,
    pub seed: u64,
    pub samples: u64,
    pub etas: Vec<f64>,
    pub tolerance: f64,
    pub phi_points: usize,
}

/// Linear frequency in MHz → angular rate in rad/s.
fn mhz(nu: f64) -> f64 {
    nu * 1.0e6 * TAU
}

/// Microseconds → seconds.
fn us(t: f64) -> f64 {
    t * 1.0e-6
}

/// Parses a configuration file's text. Unknown keys are rejected; syntax
/// errors carry the line and column of the offending token.
pub fn parse_config(text: &str) -> Result<FileConfig> {
    toml::from_str(text).map_err(|e| anyhow!("{e}"))
}

/// Applies the `[parameters]` overrides to a named preset.
fn apply_parameters(base: &Preset, p: &InlineParameters) -> Result<Preset> {
    // Values shared by both sites.
    let shared = |profile: &DriveProfile| DriveProfile {
        kappa: p.kappa_mhz.map_or(profile.kappa, mhz),
        gamma: p.gamma_mhz.map_or(profile.gamma, mhz),
        g0: p.g0_mhz.map_or(profile.g0, mhz),
        delta: p.delta_mhz.map_or(profile.delta, mhz),
        omega_z: p.omega_z_mhz.map_or(profile.omega_z, mhz),
        delta_g: p.delta_g_rad.unwrap_or(profile.delta_g),
        t_c: p.t_c_us.map_or(profile.t_c, us),
        delta_t: p.delta_t_us.map_or(profile.delta_t, us),
        ..*profile
    };
    let alice = DriveProfile {
        omega0: p.omega_a0_mhz.map_or(base.alice.omega0, mhz),
        phi: p.phi_a_rad.unwrap_or(base.alice.phi),
        ..shared(&base.alice)
    };
    let (bob, matched) = match p.omega_b0_mhz {
        // An explicit Bob amplitude breaks the matching condition.
        Some(nu) => {
            let bob = DriveProfile {
                omega0: mhz(nu),
                phi: p.phi_b_rad.unwrap_or(base.bob.phi),
                ..shared(&base.bob)
            };
            (bob, false)
        }
        // Otherwise re-derive Ω_B0 from the (possibly overridden) Alice
        // drive so the two pulses keep identical envelopes.
        None => {
            let g_b0 = shared(&base.bob).g0;
            let bob = DriveProfile {
                phi: p.phi_b_rad.unwrap_or(base.bob.phi),
                ..matched_drive(&alice, g_b0)?
            };
            (bob, base.matched)
        }
    };
    let qubit = match (p.alpha, p.beta) {
        (Some(a), Some(b)) => {
            Qubit::new(C64::new(a[0], a[1]), C64::new(b[0], b[1]))?
        }
        (None, None) => base.qubit,
        _ => bail!("`alpha` and `beta` must be given together"),
    };
    Ok(Preset {
        name: format!("{}-custom", base.name),
        t_end: p.t_end_us.map_or(base.t_end, us),
        grid_points: p.grid_points.unwrap_or(base.grid_points),
        matched,
        alice,
        bob,
        qubit,
    })
}

/// Fills defaults, converts units, and validates the result.
pub fn resolve(cfg: &FileConfig) -> Result<Resolved> {
    let kind = cfg.experiment.unwrap_or(ExperimentKind::Single);
    let name = cfg.preset.as_deref().unwrap_or("strong");
    let base = preset_by_name(name)
        .ok_or_else(|| anyhow!("unknown preset `{name}` (expected `strong` or `weak`)"))?;
    let preset = match &cfg.parameters {
        Some(p) if !p.is_empty() => apply_parameters(&base, p)?,
        _ => base,
    };
    preset.validate()?;

    let samples = cfg.samples.unwrap_or(100_000);
    if samples == 0 {
        bail!("invalid parameter `samples`: at least one shot is required");
    }
    let etas = cfg.etas.clone().unwrap_or_else(|| vec![1.0]);
    if etas.is_empty() {
        bail!("invalid parameter `etas`: at least one efficiency is required");
    }
    for &eta in &etas {
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            bail!("invalid parameter `etas`: efficiency {eta} is outside [0, 1]");
        }
    }
    let tolerance = cfg.tolerance.unwrap_or(1.0e-8);
    if !tolerance.is_finite() || tolerance <= 0.0 {
        bail!("invalid parameter `tolerance`: {tolerance} must be positive");
    }
    let phi_points = cfg.phi_points.unwrap_or(16);
    if phi_points == 0 {
        bail!("invalid parameter `phi_points`: the sweep grid needs at least one point");
    }
    Ok(Resolved {
        kind,
        preset,
        out_dir: cfg.out_dir.clone().unwrap_or_else(|| ".".into()),
        seed: cfg.seed.unwrap_or(1),
        samples,
        etas,
        tolerance,
        phi_points,
    })
}

/// Reads and resolves a config file from disk.
pub fn load(path: &std::path::Path) -> Result<Resolved> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file `{}`", path.display()))?;
    let cfg =
        parse_config(&text).with_context(|| format!("in config file `{}`", path.display()))?;
    resolve(&cfg)
}
