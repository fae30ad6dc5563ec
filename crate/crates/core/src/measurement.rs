//! Linear-optics Bell-state analyzer with temporal-mode mismatch.
//!
//! The two photons meet on a symmetric 50-50 beam splitter; each output
//! port passes a wave plate and a polarization splitter onto two detectors,
//! so the four detectors resolve port × circular polarization. Bob's photon
//! is entangled with his atom — (gR⊗L + gL⊗R)/√2 — so a click pattern with
//! one L and one R detector projects the atom onto a superposition carrying
//! Alice's qubit: D1L&D1R or D2L&D2R herald α·gL + β·gR directly, while
//! D1L&D2R or D2L&D1R herald α·gL − β·gR, fixed by a local phase flip.
//!
//! Imperfect temporal overlap χ = ⟨f_A|f_B⟩/(‖f_A‖‖f_B‖) spoils the
//! two-photon interference: Bob's envelope is decomposed as χ·u + s·w with
//! w ⊥ u and s = √(1−|χ|²), the detectors integrate over time, and the w
//! branch contributes an incoherent admixture. Every probability here is
//! produced by brute-force enumeration of the two-photon amplitudes over
//! all port × polarization × temporal modes — the 1/8 pattern weights and
//! the fidelity law emerge from the enumeration rather than being assumed.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::EmittedPulse;
use crate::error::{Error, Result};
use crate::hilbert::{Qubit, NORM_EPSILON};
use crate::quad;
use crate::C64;

/// Click patterns of the four detectors (port 1/2 × polarization L/R).
/// Any two-photon outcome that heralds no Bell state — both photons on one
/// detector, or two clicks of equal polarization — is lumped into
/// [`BellPattern::FailureSamePort`]; fewer than two clicks (photon loss or
/// detector inefficiency) is [`BellPattern::NoTwoClicks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BellPattern {
    D1LD1R,
    D2LD2R,
    D1LD2R,
    D2LD1R,
    FailureSamePort,
    NoTwoClicks,
}

impl BellPattern {
    /// Canonical reporting order.
    pub const ALL: [BellPattern; 6] = [
        BellPattern::D1LD1R,
        BellPattern::D2LD2R,
        BellPattern::D1LD2R,
        BellPattern::D2LD1R,
        BellPattern::FailureSamePort,
        BellPattern::NoTwoClicks,
    ];

    /// Local unitary Bob must apply, when the pattern heralds success.
    pub fn correction(self) -> Option<Correction> {
        match self {
            BellPattern::D1LD1R | BellPattern::D2LD2R => Some(Correction::Identity),
            BellPattern::D1LD2R | BellPattern::D2LD1R => Some(Correction::PhaseFlip),
            _ => None,
        }
    }

    /// Whether the pattern completes the teleportation.
    pub fn is_success(self) -> bool {
        self.correction().is_some()
    }
}

impl fmt::Display for BellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BellPattern::D1LD1R => "D1L&D1R",
            BellPattern::D2LD2R => "D2L&D2R",
            BellPattern::D1LD2R => "D1L&D2R",
            BellPattern::D2LD1R => "D2L&D1R",
            BellPattern::FailureSamePort => "failure_same_port",
            BellPattern::NoTwoClicks => "no_two_clicks",
        };
        f.write_str(s)
    }
}

/// Bob's conditional local unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Correction {
    Identity,
    PhaseFlip,
}

/// One measurement outcome: the click pattern plus its implied correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellOutcome {
    pub pattern: BellPattern,
    pub correction: Option<Correction>,
}

impl BellOutcome {
    pub fn from_pattern(pattern: BellPattern) -> Self {
        Self { pattern, correction: pattern.correction() }
    }
}

/// Applies the heralded correction to Bob's atomic qubit.
pub fn apply_correction(outcome: &BellOutcome, bob: &Qubit) -> Result<Qubit> {
    match outcome.correction {
        Some(Correction::Identity) => Ok(*bob),
        Some(Correction::PhaseFlip) => Ok(bob.phase_flipped()),
        None => Err(Error::NoCorrectionDefined),
    }
}

/// The two-photon ⊗ Bob-atom state entering the analyzer, reduced to the
/// quantities the optics can see: the qubit weights, the temporal overlap,
/// and the two emission probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    alpha: C64,
    beta: C64,
    chi: C64,
    norm_a_sq: f64,
    norm_b_sq: f64,
}

impl JointState {
    /// Builds the joint state from the two emitted pulses, interpolating
    /// onto a common grid when the reporting grids differ.
    pub fn new(q: &Qubit, f_a: &EmittedPulse, f_b: &EmittedPulse) -> Result<Self> {
        let chi = chi_overlap(f_a, f_b).unwrap_or(C64::new(0.0, 0.0));
        Self::with_norms(q, chi, f_a.norm_sq(), f_b.norm_sq())
    }

    /// Synthetic joint state with unit-norm pulses — handy for oracles.
    pub fn from_amplitudes(q: &Qubit, chi: C64) -> Result<Self> {
        Self::with_norms(q, chi, 1.0, 1.0)
    }

    /// Fully explicit constructor; rejects |χ| > 1 and out-of-range norms.
    pub fn with_norms(q: &Qubit, chi: C64, norm_a_sq: f64, norm_b_sq: f64) -> Result<Self> {
        if chi.norm_sqr() > 1.0 + 10.0 * NORM_EPSILON || !chi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "chi",
                reason: format!("overlap modulus {} exceeds 1", chi.norm()),
            });
        }
        for (name, n) in [("norm_a_sq", norm_a_sq), ("norm_b_sq", norm_b_sq)] {
            if !(0.0..=1.0 + 10.0 * NORM_EPSILON).contains(&n) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("emission probability {n} must lie in [0, 1]"),
                });
            }
        }
        Ok(Self { alpha: q.alpha(), beta: q.beta(), chi, norm_a_sq, norm_b_sq })
    }

    pub fn chi(&self) -> C64 {
        self.chi
    }

    pub fn norm_a_sq(&self) -> f64 {
        self.norm_a_sq
    }

    pub fn norm_b_sq(&self) -> f64 {
        self.norm_b_sq
    }
}

/// Linear interpolation of a sampled envelope onto query times; zero
/// outside the sampled support.
fn resample(times: &[f64], values: &[C64], query: &[f64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(query.len());
    let mut j = 0usize;
    for &t in query {
        if t < times[0] || t > times[times.len() - 1] {
            out.push(C64::new(0.0, 0.0));
            continue;
        }
        while j + 2 < times.len() && times[j + 1] < t {
            j += 1;
        }
        let (t0, t1) = (times[j], times[j + 1]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        out.push(values[j] * (1.0 - w) + values[j + 1] * w);
    }
    out
}

/// The scalar temporal mode of a pulse: both polarization envelopes of one
/// site share a single shape, so the component with more energy represents
/// it (and is never zero unless the whole pulse is).
fn scalar_mode(p: &EmittedPulse) -> &[C64] {
    if p.norm_l_sq() >= p.norm_r_sq() {
        &p.amp_l
    } else {
        &p.amp_r
    }
}

/// Normalized temporal overlap χ of two pulses, `None` when either is
/// empty. Shared trapezoid weights keep |χ| ≤ 1 to rounding.
pub fn chi_overlap(f_a: &EmittedPulse, f_b: &EmittedPulse) -> Option<C64> {
    let same_grid = f_a.times.len() == f_b.times.len()
        && f_a.times.first() == f_b.times.first()
        && f_a.times.last() == f_b.times.last();
    let (sa, sb, h);
    let (ra, rb);
    if same_grid {
        ra = scalar_mode(f_a).to_vec();
        rb = scalar_mode(f_b).to_vec();
        sa = &ra[..];
        sb = &rb[..];
        h = (f_a.times[f_a.times.len() - 1] - f_a.times[0]) / (f_a.times.len() - 1) as f64;
    } else {
        let t0 = f_a.times[0].min(f_b.times[0]);
        let t1 = f_a.times[f_a.times.len() - 1].max(f_b.times[f_b.times.len() - 1]);
        let ha = (f_a.times[f_a.times.len() - 1] - f_a.times[0]) / (f_a.times.len() - 1) as f64;
        let hb = (f_b.times[f_b.times.len() - 1] - f_b.times[0]) / (f_b.times.len() - 1) as f64;
        let n = ((t1 - t0) / ha.min(hb)).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
        ra = resample(&f_a.times, scalar_mode(f_a), &grid);
        rb = resample(&f_b.times, scalar_mode(f_b), &grid);
        sa = &ra[..];
        sb = &rb[..];
        h = (t1 - t0) / n as f64;
    }
    quad::normalized_overlap(sa, sb, h)
}

/// Success probability of the Bell measurement: the double time integral
/// factorizes into (1/2)·‖f_A‖²·‖f_B‖².
pub fn success_probability(f_a: &EmittedPulse, f_b: &EmittedPulse) -> f64 {
    0.5 * f_a.norm_sq() * f_b.norm_sq()
}

fn fidelity_formula(q: &Qubit, abs_chi: f64) -> f64 {
    let a2 = q.alpha().norm_sqr();
    let b2 = q.beta().norm_sqr();
    (a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * abs_chi * abs_chi).sqrt()
}

/// Teleportation fidelity for a qubit and the two emitted pulses:
/// F = √(|α|⁴ + |β|⁴ + 2|αβχ|²), the χ = 1 limit being F = 1.
pub fn fidelity(q: &Qubit, f_a: &EmittedPulse, f_b: &EmittedPulse) -> Result<f64> {
    if success_probability(f_a, f_b) <= 0.0 {
        return Err(Error::UndefinedFidelity);
    }
    let chi = chi_overlap(f_a, f_b).ok_or(Error::UndefinedFidelity)?;
    Ok(fidelity_formula(q, chi.norm()))
}

/// Statistics of one click pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternStat {
    pub pattern: BellPattern,
    /// Probability of the pattern at unit detector efficiency.
    pub probability: f64,
    /// Bob's conditional atomic state (gL, gR amplitudes, normalized) —
    /// the coherent two-photon branch; present for success patterns when
    /// χ ≠ 0.
    pub conditional_state: Option<(C64, C64)>,
    /// Mean squared overlap of Bob's corrected state with Alice's qubit,
    /// conditioned on this pattern; success patterns only.
    pub corrected_overlap: Option<f64>,
}

/// Full output statistics of the analyzer at unit detector efficiency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellAnalysis {
    /// One entry per [`BellPattern::ALL`] member, in that order.
    pub patterns: Vec<PatternStat>,
}

impl BellAnalysis {
    pub fn probability(&self, pattern: BellPattern) -> f64 {
        self.patterns
            .iter()
            .find(|p| p.pattern == pattern)
            .map(|p| p.probability)
            .unwrap_or(0.0)
    }

    /// Total heralded-success probability (the four Bell patterns).
    pub fn success_probability(&self) -> f64 {
        self.patterns
            .iter()
            .filter(|p| p.pattern.is_success())
            .map(|p| p.probability)
            .sum()
    }

    /// Success-averaged teleportation fidelity √(E[overlap | success]).
    pub fn fidelity(&self) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for p in &self.patterns {
            if let Some(ov) = p.corrected_overlap {
                num += p.probability * ov;
                den += p.probability;
            }
        }
        if den <= 0.0 {
            return Err(Error::UndefinedFidelity);
        }
        Ok((num / den).sqrt())
    }
}

// Mode bookkeeping: index m = 4·port + 2·pol + temporal, with port 0
// feeding detectors D1L/D1R, polarization 0 = L, and temporal 0 the
// symmetric mode u (Alice's envelope). Detector index is m/2.
const MODES: usize = 8;

fn pattern_of(d1: usize, d2: usize) -> BellPattern {
    match (d1, d2) {
        (0, 1) => BellPattern::D1LD1R,
        (2, 3) => BellPattern::D2LD2R,
        (0, 3) => BellPattern::D1LD2R,
        (1, 2) => BellPattern::D2LD1R,
        _ => BellPattern::FailureSamePort,
    }
}

/// Propagates the joint state through the analyzer by enumerating all
/// two-photon amplitudes (with Bob's atom tagged along), and aggregates
/// them into click-pattern probabilities and conditional statistics.
pub fn bell_analyzer(joint: &JointState) -> BellAnalysis {
    let s = (1.0 - joint.chi.norm_sqr()).max(0.0).sqrt();
    let ra = joint.norm_a_sq.sqrt();
    let rb = joint.norm_b_sq.sqrt();
    let inv2 = std::f64::consts::FRAC_1_SQRT_2;
    let bs_t = C64::new(inv2, 0.0);
    let bs_r = C64::new(0.0, inv2);

    // Photon A: qubit weights on polarization, temporal mode u only.
    let mut a = [C64::new(0.0, 0.0); MODES];
    // Photon B, one amplitude vector per atom branch: gL rides with an
    // R-polarized photon and gR with an L-polarized one.
    let mut b = [[C64::new(0.0, 0.0); MODES]; 2];
    for port in 0..2 {
        let (pa, pb) = if port == 0 { (bs_t, bs_r) } else { (bs_r, bs_t) };
        a[4 * port] = ra * joint.alpha * pa;
        a[4 * port + 2] = ra * joint.beta * pa;
        for (temp, tw) in [(0usize, joint.chi), (1, C64::new(s, 0.0))] {
            let w = rb * inv2 * pb * tw;
            b[1][4 * port + temp] = w; // atom gR, photon L
            b[0][4 * port + 2 + temp] = w; // atom gL, photon R
        }
    }

    let mut prob = [0.0f64; 6];
    let mut overlap = [0.0f64; 6];
    let mut coherent = [(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 6];
    let sqrt2 = C64::new(std::f64::consts::SQRT_2, 0.0);

    for m1 in 0..MODES {
        for m2 in m1..MODES {
            // Atom-resolved two-photon amplitude of this unordered pair.
            let (vl, vr) = if m1 == m2 {
                (sqrt2 * a[m1] * b[0][m1], sqrt2 * a[m1] * b[1][m1])
            } else {
                (
                    a[m1] * b[0][m2] + a[m2] * b[0][m1],
                    a[m1] * b[1][m2] + a[m2] * b[1][m1],
                )
            };
            let w = vl.norm_sqr() + vr.norm_sqr();
            if w == 0.0 {
                continue;
            }
            let pattern = pattern_of(m1 / 2, m2 / 2);
            let idx = BellPattern::ALL.iter().position(|&p| p == pattern).unwrap();
            prob[idx] += w;
            if let Some(corr) = pattern.correction() {
                let (cl, cr) = match corr {
                    Correction::Identity => (vl, vr),
                    Correction::PhaseFlip => (vl, -vr),
                };
                overlap[idx] +=
                    (joint.alpha.conj() * cl + joint.beta.conj() * cr).norm_sqr();
                if m1 % 2 == 0 && m2 % 2 == 0 {
                    coherent[idx] = (vl, vr);
                }
            }
        }
    }

    let two_click: f64 = prob.iter().sum();
    let mut patterns = Vec::with_capacity(6);
    for (idx, &pattern) in BellPattern::ALL.iter().enumerate() {
        if pattern == BellPattern::NoTwoClicks {
            patterns.push(PatternStat {
                pattern,
                probability: (1.0 - two_click).max(0.0),
                conditional_state: None,
                corrected_overlap: None,
            });
            continue;
        }
        let success = pattern.is_success();
        let (state, ov) = if success && prob[idx] > 0.0 {
            let (vl, vr) = coherent[idx];
            let n = (vl.norm_sqr() + vr.norm_sqr()).sqrt();
            let state = if n > 0.0 { Some((vl / n, vr / n)) } else { None };
            (state, Some(overlap[idx] / prob[idx]))
        } else {
            (None, if success { Some(0.0) } else { None })
        };
        patterns.push(PatternStat {
            pattern,
            probability: prob[idx],
            conditional_state: state,
            corrected_overlap: ov,
        });
    }
    BellAnalysis { patterns }
}

/// Samples one outcome with per-photon detector efficiency `eta` from an
/// explicit RNG — the building block for Monte Carlo runs.
pub fn sample_outcome<R: Rng>(
    analysis: &BellAnalysis,
    eta: f64,
    rng: &mut R,
) -> BellOutcome {
    debug_assert!((0.0..=1.0).contains(&eta));
    let eta = eta.clamp(0.0, 1.0);
    let two_click: f64 = analysis
        .patterns
        .iter()
        .filter(|p| p.pattern != BellPattern::NoTwoClicks)
        .map(|p| p.probability)
        .sum();
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for p in &analysis.patterns {
        if p.pattern == BellPattern::NoTwoClicks {
            continue;
        }
        acc += eta * eta * p.probability;
        if u < acc {
            return BellOutcome::from_pattern(p.pattern);
        }
    }
    let _ = two_click;
    BellOutcome::from_pattern(BellPattern::NoTwoClicks)
}

/// Samples one outcome from a fresh deterministic RNG.
pub fn sample_run(joint: &JointState, eta: f64, seed: u64) -> BellOutcome {
    let analysis = bell_analyzer(joint);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_outcome(&analysis, eta, &mut rng)
}
