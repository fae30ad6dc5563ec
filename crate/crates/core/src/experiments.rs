//! Protocol-level experiments: named presets, single teleportation runs,
//! motional-phase sweeps, and Monte Carlo detection statistics.
//!
//! The headline figures — overlap χ, fidelity F, success probability P and
//! the click-pattern weights — come from the closed-form dark-state
//! envelopes on a fine model grid, where the protocol is insensitive to the
//! excited-level parameters. The integrated Schrödinger dynamics supply the
//! diagnostics that the envelopes cannot: the emission completion time and
//! the temporal-mode match between the numeric pulse and its analytic
//! shape. A Monte Carlo layer samples detector outcomes per shot with one
//! RNG stream per sample, so results are independent of evaluation order.

use std::f64::consts::{FRAC_PI_3, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adiabatic::{analytic_envelope, analytic_pulse_alice, analytic_pulse_bob, matched_drive};
use crate::dynamics::{
    combined_emission_time, evolve_grid, extract_pulse, uniform_grid, DriveProfile, EmittedPulse,
    DEFAULT_GRID_INTERVALS,
};
use crate::error::{Error, Result};
use crate::hilbert::{alice_initial_state, bob_initial_state, Qubit, Site};
use crate::measurement::{
    bell_analyzer, chi_overlap, fidelity, success_probability, BellPattern, JointState,
};
use crate::quad;
use crate::C64;

/// Intervals of the model grid used for envelope overlaps. The coupling
/// modulation beats against the drive envelope, so the overlap needs a much
/// finer grid than the dynamics reporting grid to resolve the product.
pub const MODEL_GRID_INTERVALS: usize = 40_000;

/// Fraction of the pulse energy defining the emission completion time.
pub const EMISSION_FRACTION: f64 = 0.99;

/// A complete, reproducible protocol configuration for both sites.
/// (Scalar fields precede the nested tables so the struct serializes
/// directly to TOML.)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    /// Human-readable label, carried into reports.
    pub name: String,
    /// Duration of a run, seconds.
    pub t_end: f64,
    /// Intervals of the dynamics reporting grid.
    pub grid_points: usize,
    /// Whether Bob's drive was derived from Alice's by mixing-angle
    /// matching (Ω_B0 = √2·(g_B0/g_A0)·Ω_A0).
    pub matched: bool,
    /// Drive and coupling of the sending site.
    pub alice: DriveProfile,
    /// Drive and coupling of the receiving site.
    pub bob: DriveProfile,
    /// The unknown qubit to teleport.
    pub qubit: Qubit,
}

impl Preset {
    /// Checks both profiles and the run window.
    pub fn validate(&self) -> Result<()> {
        self.alice.validate()?;
        self.bob.validate()?;
        if !self.t_end.is_finite() || self.t_end <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: format!("run duration {} must be positive", self.t_end),
            });
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points",
                reason: "the reporting grid needs at least two intervals".into(),
            });
        }
        Ok(())
    }

    /// The uniform model grid for this preset's run window.
    pub fn model_grid(&self) -> Vec<f64> {
        uniform_grid(0.0, self.t_end, MODEL_GRID_INTERVALS)
    }

    /// The uniform dynamics reporting grid.
    pub fn reporting_grid(&self) -> Vec<f64> {
        uniform_grid(0.0, self.t_end, self.grid_points)
    }
}

/// Cavity decay rate shared by both presets: κ = 2π·4 MHz.
fn preset_kappa() -> f64 {
    TAU * 4.0e6
}

/// Trap frequency shared by both presets; the motional period is
/// 1/(0.05·κ).
fn preset_omega_z(kappa: f64) -> f64 {
    TAU * 0.05 * kappa
}

/// Strong-coupling preset: g₀ = 8κ, resonant drive, microsecond pulses.
pub fn strong_preset() -> Preset {
    let kappa = preset_kappa();
    let alice = DriveProfile {
        omega0: 8.0 * kappa,
        t_c: 0.6e-6,
        delta_t: 0.2e-6,
        g0: 8.0 * kappa,
        delta_g: FRAC_PI_3,
        omega_z: preset_omega_z(kappa),
        phi: 0.0,
        delta: 0.0,
        gamma: kappa,
        kappa,
    };
    let bob = matched_drive(&alice, alice.g0).expect("preset couplings are positive");
    Preset {
        name: "strong".into(),
        t_end: 3.0e-6,
        grid_points: DEFAULT_GRID_INTERVALS,
        matched: true,
        alice,
        bob,
        qubit: Qubit::balanced(),
    }
}

/// Weak-coupling preset: g₀ = κ, far-detuned drive (Δ = 40κ), pulses
/// stretched a hundredfold to stay adiabatic.
pub fn weak_preset() -> Preset {
    let kappa = preset_kappa();
    let alice = DriveProfile {
        omega0: 6.0 * kappa,
        t_c: 120.0e-6,
        delta_t: 40.0e-6,
        g0: kappa,
        delta_g: FRAC_PI_3,
        omega_z: preset_omega_z(kappa),
        phi: 0.0,
        delta: 40.0 * kappa,
        gamma: kappa,
        kappa,
    };
    let bob = matched_drive(&alice, alice.g0).expect("preset couplings are positive");
    Preset {
        name: "weak".into(),
        t_end: 400.0e-6,
        grid_points: DEFAULT_GRID_INTERVALS,
        matched: true,
        alice,
        bob,
        qubit: Qubit::balanced(),
    }
}

/// Looks up a built-in preset by its label.
pub fn preset_by_name(name: &str) -> Option<Preset> {
    match name {
        "strong" => Some(strong_preset()),
        "weak" => Some(weak_preset()),
        _ => None,
    }
}

/// Probability that one click pattern occurs, at unit efficiency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternWeight {
    pub pattern: BellPattern,
    pub probability: f64,
}

/// Everything a single protocol run predicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportReport {
    pub preset: String,
    /// Teleportation fidelity F = √(|α|⁴ + |β|⁴ + 2|αβχ|²).
    pub fidelity: f64,
    /// Heralded success probability P = ½‖f_A‖²‖f_B‖².
    pub success_probability: f64,
    /// Modulus of the temporal-mode overlap of the two photons.
    pub abs_chi: f64,
    /// Success-averaged fidelity recovered from the analyzer enumeration;
    /// agrees with `fidelity` to rounding.
    pub analyzer_fidelity: f64,
    /// Time by which both cavities have emitted 99% of the pulse energy,
    /// from the integrated dynamics. Seconds.
    pub emission_time: f64,
    /// Overlap between the numeric pulse magnitude |f(t)| and the analytic
    /// envelope, per site — how well the dark-state shape predicts the
    /// emitted intensity profile. Near unity for resonant adiabatic
    /// passage; small for far-detuned drives, where the cavity-limited
    /// Raman rate ~4(Ωg/Δ)²/κ displaces the emission well after the
    /// dark-state prediction.
    pub mode_match_alice: f64,
    pub mode_match_bob: f64,
    /// All six click-pattern weights at unit efficiency.
    pub patterns: Vec<PatternWeight>,
}

/// The component carrying more energy represents the pulse's temporal
/// shape (both polarizations share it).
fn dominant_mode(p: &EmittedPulse) -> &[C64] {
    if p.norm_l_sq() >= p.norm_r_sq() {
        &p.amp_l
    } else {
        &p.amp_r
    }
}

/// ⟨|numeric mode|, analytic envelope⟩ on the numeric grid, normalized.
fn mode_match(numeric: &EmittedPulse, envelope: &[f64]) -> f64 {
    let num: Vec<C64> = dominant_mode(numeric)
        .iter()
        .map(|c| C64::new(c.norm(), 0.0))
        .collect();
    let ana: Vec<C64> = envelope.iter().map(|&v| C64::new(v, 0.0)).collect();
    let h = (numeric.times[numeric.times.len() - 1] - numeric.times[0])
        / (numeric.times.len() - 1) as f64;
    quad::normalized_overlap(&num, &ana, h)
        .map(|c| c.norm())
        .unwrap_or(0.0)
}

/// Runs the full protocol once: closed-form envelopes for the measurement
/// statistics, integrated dynamics (relative tolerance `tol`) for the
/// emission diagnostics.
pub fn run_teleportation(preset: &Preset, tol: f64) -> Result<TeleportReport> {
    preset.validate()?;

    // Measurement statistics on the model grid.
    let grid = preset.model_grid();
    let pulse_a = analytic_pulse_alice(&preset.alice, &preset.qubit, &grid)?;
    let pulse_b = analytic_pulse_bob(&preset.bob, &grid)?;
    let f = fidelity(&preset.qubit, &pulse_a, &pulse_b)?;
    let p = success_probability(&pulse_a, &pulse_b);
    let abs_chi = chi_overlap(&pulse_a, &pulse_b)
        .map(|c| c.norm())
        .unwrap_or(0.0);
    let joint = JointState::new(&preset.qubit, &pulse_a, &pulse_b)?;
    let analysis = bell_analyzer(&joint);
    let analyzer_fidelity = analysis.fidelity()?;
    let patterns = analysis
        .patterns
        .iter()
        .map(|s| PatternWeight { pattern: s.pattern, probability: s.probability })
        .collect();

    // Emission diagnostics on the reporting grid.
    let report_grid = preset.reporting_grid();
    let traj_a = evolve_grid(
        &alice_initial_state(&preset.qubit),
        &preset.alice,
        &report_grid,
        tol,
        None,
    )?;
    let traj_b = evolve_grid(&bob_initial_state(), &preset.bob, &report_grid, tol, None)?;
    let num_a = extract_pulse(&traj_a, &preset.alice);
    let num_b = extract_pulse(&traj_b, &preset.bob);
    let emission_time = combined_emission_time(&num_a, &num_b, EMISSION_FRACTION)?;
    let env_a = analytic_envelope(&preset.alice, Site::Alice, &report_grid)?;
    let env_b = analytic_envelope(&preset.bob, Site::Bob, &report_grid)?;

    Ok(TeleportReport {
        preset: preset.name.clone(),
        fidelity: f,
        success_probability: p,
        abs_chi,
        analyzer_fidelity,
        patterns,
        emission_time,
        mode_match_alice: mode_match(&num_a, &env_a),
        mode_match_bob: mode_match(&num_b, &env_b),
    })
}

/// One row of a motional-phase sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub phi_b: f64,
    pub fidelity: f64,
    pub success_probability: f64,
    pub abs_chi: f64,
}

/// A φ_B sweep at fixed Alice phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub preset: String,
    pub rows: Vec<SweepRow>,
}

/// Sweeps Bob's motional phase over `phis` (order preserved), with Alice
/// held at the preset phase. Pure closed-form envelopes: Alice's pulse is
/// computed once and reused across the grid.
pub fn sweep_phi_b(preset: &Preset, phis: &[f64]) -> Result<SweepResult> {
    preset.validate()?;
    let grid = preset.model_grid();
    let pulse_a = analytic_pulse_alice(&preset.alice, &preset.qubit, &grid)?;
    let mut rows = Vec::with_capacity(phis.len());
    for &phi_b in phis {
        let wrap = |e: Error| Error::SweepPoint { phi_b, source: Box::new(e) };
        let bob = DriveProfile { phi: phi_b, ..preset.bob };
        let pulse_b = analytic_pulse_bob(&bob, &grid).map_err(wrap)?;
        let f = fidelity(&preset.qubit, &pulse_a, &pulse_b).map_err(wrap)?;
        let abs_chi = chi_overlap(&pulse_a, &pulse_b)
            .map(|c| c.norm())
            .unwrap_or(0.0);
        rows.push(SweepRow {
            phi_b,
            fidelity: f,
            success_probability: success_probability(&pulse_a, &pulse_b),
            abs_chi,
        });
    }
    Ok(SweepResult { preset: preset.name.clone(), rows })
}

/// The canonical 16-point phase grid over [0, 2π).
pub fn default_phi_grid() -> Vec<f64> {
    (0..16).map(|k| k as f64 * TAU / 16.0).collect()
}

/// Detection statistics of a finite Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub eta: f64,
    pub samples: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Wilson 3σ interval for the success rate.
    pub rate_low: f64,
    pub rate_high: f64,
    /// η²·P, the rate the model predicts.
    pub predicted_rate: f64,
    /// Mean corrected fidelity over successful shots; `None` when no shot
    /// succeeded.
    pub mean_fidelity: Option<f64>,
    /// Sample standard deviation of the per-shot fidelity.
    pub fidelity_std: Option<f64>,
    /// The model fidelity the sample mean should reproduce.
    pub predicted_fidelity: f64,
}

/// Wilson score interval at `z` standard normal deviations.
fn wilson_interval(successes: u64, samples: u64, z: f64) -> (f64, f64) {
    let n = samples as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Samples are reduced in fixed blocks of this many shots; the block
/// boundaries, not the worker count, define the floating-point reduction
/// order, so any thread count produces bit-identical statistics.
const MC_BLOCK: u64 = 4096;

/// Welford moments of the per-shot fidelity over one block of samples.
#[derive(Debug, Clone, Copy, Default)]
struct McAccum {
    successes: u64,
    mean: f64,
    m2: f64,
}

impl McAccum {
    fn push(&mut self, f: f64) {
        self.successes += 1;
        let d = f - self.mean;
        self.mean += d / self.successes as f64;
        self.m2 += d * (f - self.mean);
    }

    /// Chan's parallel-Welford merge; exact counterpart of `push` chains.
    fn merge(self, other: McAccum) -> McAccum {
        if other.successes == 0 {
            return self;
        }
        if self.successes == 0 {
            return other;
        }
        let n1 = self.successes as f64;
        let n2 = other.successes as f64;
        let n = n1 + n2;
        let d = other.mean - self.mean;
        McAccum {
            successes: self.successes + other.successes,
            mean: self.mean + d * n2 / n,
            m2: self.m2 + other.m2 + d * d * n1 * n2 / n,
        }
    }
}

/// Runs shots `range` (one block), each from its own RNG stream.
fn mc_block(
    analysis: &crate::measurement::BellAnalysis,
    shot_fidelity: &[Option<f64>],
    eta: f64,
    seed: u64,
    range: std::ops::Range<u64>,
) -> McAccum {
    let mut acc = McAccum::default();
    for i in range {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let outcome = crate::measurement::sample_outcome(analysis, eta, &mut rng);
        if outcome.pattern.is_success() {
            let idx = BellPattern::ALL
                .iter()
                .position(|&p| p == outcome.pattern)
                .expect("pattern is canonical");
            acc.push(shot_fidelity[idx].expect("success patterns carry an overlap"));
        }
    }
    acc
}

/// Samples `samples` protocol shots at per-photon detector efficiency
/// `eta`. Shot `i` draws from RNG stream `i` of one seeded generator, so
/// the result depends on the seed alone.
pub fn monte_carlo(preset: &Preset, samples: u64, eta: f64, seed: u64) -> Result<MonteCarloResult> {
    monte_carlo_threaded(preset, samples, eta, seed, 1)
}

/// [`monte_carlo`] with the blocks distributed over `threads` workers.
/// The reduction runs over fixed blocks in index order, so every thread
/// count yields bit-identical output for a given seed.
pub fn monte_carlo_threaded(
    preset: &Preset,
    samples: u64,
    eta: f64,
    seed: u64,
    threads: usize,
) -> Result<MonteCarloResult> {
    preset.validate()?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("detector efficiency {eta} must lie in [0, 1]"),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "a Monte Carlo run needs at least one sample".into(),
        });
    }
    if threads == 0 {
        return Err(Error::InvalidParameter {
            name: "threads",
            reason: "worker count must be at least one".into(),
        });
    }

    let grid = preset.model_grid();
    let pulse_a = analytic_pulse_alice(&preset.alice, &preset.qubit, &grid)?;
    let pulse_b = analytic_pulse_bob(&preset.bob, &grid)?;
    let joint = JointState::new(&preset.qubit, &pulse_a, &pulse_b)?;
    let analysis = bell_analyzer(&joint);
    let predicted_rate = eta * eta * analysis.success_probability();
    let predicted_fidelity = analysis.fidelity()?;

    // Fidelity of a successful shot, by click pattern.
    let shot_fidelity: Vec<Option<f64>> = analysis
        .patterns
        .iter()
        .map(|s| s.corrected_overlap.map(f64::sqrt))
        .collect();

    let n_blocks = samples.div_ceil(MC_BLOCK) as usize;
    let block_range = |b: usize| {
        let lo = b as u64 * MC_BLOCK;
        lo..(lo + MC_BLOCK).min(samples)
    };
    let mut accums = vec![McAccum::default(); n_blocks];
    if threads == 1 || n_blocks == 1 {
        for (b, slot) in accums.iter_mut().enumerate() {
            *slot = mc_block(&analysis, &shot_fidelity, eta, seed, block_range(b));
        }
    } else {
        let per = n_blocks.div_ceil(threads.min(n_blocks));
        std::thread::scope(|scope| {
            for (t, chunk) in accums.chunks_mut(per).enumerate() {
                let analysis = &analysis;
                let shot_fidelity = &shot_fidelity;
                scope.spawn(move || {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        let b = t * per + k;
                        *slot = mc_block(analysis, shot_fidelity, eta, seed, block_range(b));
                    }
                });
            }
        });
    }
    // One serial left fold in block order, independent of the worker count.
    let total = accums.into_iter().fold(McAccum::default(), McAccum::merge);

    let successes = total.successes;
    let success_rate = successes as f64 / samples as f64;
    let (rate_low, rate_high) = wilson_interval(successes, samples, 3.0);
    let (mean_fidelity, fidelity_std) = if successes > 0 {
        (
            Some(total.mean),
            Some((total.m2 / successes as f64).max(0.0).sqrt()),
        )
    } else {
        (None, None)
    };

    Ok(MonteCarloResult {
        eta,
        samples,
        successes,
        success_rate,
        rate_low,
        rate_high,
        predicted_rate,
        mean_fidelity,
        fidelity_std,
        predicted_fidelity,
    })
}
