//! Conditional (no-click) dynamics of a driven atom–cavity site.
//!
//! Each site evolves under dψ/dt = −iH(t)ψ with a non-Hermitian H: the
//! coherent part couples the ground levels through the excited level to the
//! cavity modes via the Gaussian drive Ω(t) = Ω₀·exp(−((t−t_c)/Δ_t)²) and
//! the motion-modulated coupling g(t) = g₀·cos(Δ_g·sin(ω_z t + φ)), while
//! −iγ/2 on the excited level and −iκ/2 on the photonic kets remove the
//! population lost to spontaneous emission and to cavity output. The norm
//! of ψ is therefore non-increasing, and for γ = 0 the loss is exactly the
//! photon flux √κ·c_photon(t) leaking through the mirror — the emitted
//! temporal mode that the measurement stage interferes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Site, SiteState, NORM_EPSILON};
use crate::ode::{self, AdaptiveOptions, OdeSystem};
use crate::quad;
use crate::C64;

/// Default number of uniform reporting intervals per evolution.
pub const DEFAULT_GRID_INTERVALS: usize = 2000;

/// Time-dependent drive, coupling, and loss parameters of one site.
///
/// All rates are angular frequencies in rad/s; times are seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveProfile {
    /// Peak Rabi frequency Ω₀ of the classical drive.
    pub omega0: f64,
    /// Center of the Gaussian drive envelope.
    pub t_c: f64,
    /// 1/e half-width Δ_t of the Gaussian drive envelope.
    pub delta_t: f64,
    /// Peak atom–cavity coupling g₀.
    pub g0: f64,
    /// Depth Δ_g of the motional modulation of the coupling.
    pub delta_g: f64,
    /// Trap angular frequency ω_z of the atomic motion.
    pub omega_z: f64,
    /// Motional phase φ at t = 0.
    pub phi: f64,
    /// Detuning Δ of the drive and cavity from the excited level.
    pub delta: f64,
    /// Spontaneous-emission rate γ of the excited level.
    pub gamma: f64,
    /// Cavity field decay rate κ.
    pub kappa: f64,
}

impl DriveProfile {
    /// Drive amplitude Ω(t) = Ω₀·exp(−((t−t_c)/Δ_t)²).
    pub fn omega(&self, t: f64) -> f64 {
        let u = (t - self.t_c) / self.delta_t;
        self.omega0 * (-u * u).exp()
    }

    /// Coupling g(t) = g₀·cos(Δ_g·sin(ω_z t + φ)); constant g₀ when Δ_g = 0.
    pub fn g(&self, t: f64) -> f64 {
        self.g0 * (self.delta_g * (self.omega_z * t + self.phi).sin()).cos()
    }

    /// Checks every field against its domain, naming the offender.
    pub fn validate(&self) -> Result<()> {
        let finite: [(&'static str, f64); 10] = [
            ("omega0", self.omega0),
            ("t_c", self.t_c),
            ("delta_t", self.delta_t),
            ("g0", self.g0),
            ("delta_g", self.delta_g),
            ("omega_z", self.omega_z),
            ("phi", self.phi),
            ("delta", self.delta),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("value {v} is not finite"),
                });
            }
        }
        let nonneg: [(&'static str, f64); 5] = [
            ("omega0", self.omega0),
            ("g0", self.g0),
            ("omega_z", self.omega_z),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ];
        for (name, v) in nonneg {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("rate {v} must be non-negative"),
                });
            }
        }
        if self.delta_t <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: format!("drive width {} must be positive", self.delta_t),
            });
        }
        Ok(())
    }
}

/// Non-Hermitian Hamiltonian of site A in the canonical 6-ket basis.
pub fn hamiltonian_alice(p: &DriveProfile, t: f64) -> [[C64; 6]; 6] {
    let om = C64::new(p.omega(t), 0.0);
    let g = C64::new(p.g(t), 0.0);
    let he = C64::new(-p.delta, -0.5 * p.gamma);
    let hk = C64::new(0.0, -0.5 * p.kappa);
    let z = C64::new(0.0, 0.0);
    let mut h = [[z; 6]; 6];
    h[2][2] = he;
    h[3][3] = he;
    h[4][4] = hk;
    h[5][5] = hk;
    h[0][2] = om;
    h[2][0] = om;
    h[1][3] = om;
    h[3][1] = om;
    h[2][4] = g;
    h[4][2] = g;
    h[3][5] = g;
    h[5][3] = g;
    h
}

/// Non-Hermitian Hamiltonian of site B in the canonical 4-ket basis.
pub fn hamiltonian_bob(p: &DriveProfile, t: f64) -> [[C64; 4]; 4] {
    let om = C64::new(p.omega(t), 0.0);
    let g = C64::new(p.g(t), 0.0);
    let he = C64::new(-p.delta, -0.5 * p.gamma);
    let hk = C64::new(0.0, -0.5 * p.kappa);
    let z = C64::new(0.0, 0.0);
    let mut h = [[z; 4]; 4];
    h[1][1] = he;
    h[2][2] = hk;
    h[3][3] = hk;
    h[0][1] = om;
    h[1][0] = om;
    h[1][2] = g;
    h[2][1] = g;
    h[1][3] = g;
    h[3][1] = g;
    h
}

struct SiteSystem<'a> {
    site: Site,
    p: &'a DriveProfile,
}

impl OdeSystem for SiteSystem<'_> {
    fn dim(&self) -> usize {
        self.site.dim()
    }

    fn rhs(&self, t: f64, y: &[C64], dydt: &mut [C64]) {
        let p = self.p;
        let om = p.omega(t);
        let g = p.g(t);
        let mi = C64::new(0.0, -1.0);
        let he = C64::new(-p.delta, -0.5 * p.gamma);
        let hk = C64::new(0.0, -0.5 * p.kappa);
        match self.site {
            Site::Alice => {
                dydt[0] = mi * (om * y[2]);
                dydt[1] = mi * (om * y[3]);
                dydt[2] = mi * (om * y[0] + g * y[4] + he * y[2]);
                dydt[3] = mi * (om * y[1] + g * y[5] + he * y[3]);
                dydt[4] = mi * (g * y[2] + hk * y[4]);
                dydt[5] = mi * (g * y[3] + hk * y[5]);
            }
            Site::Bob => {
                dydt[0] = mi * (om * y[1]);
                dydt[1] = mi * (om * y[0] + g * y[2] + g * y[3] + he * y[1]);
                dydt[2] = mi * (g * y[1] + hk * y[2]);
                dydt[3] = mi * (g * y[1] + hk * y[3]);
            }
        }
    }
}

/// Site trajectory sampled on a reporting grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub site: Site,
    /// Reporting times, seconds.
    pub times: Vec<f64>,
    /// Amplitudes in the canonical site basis at each reporting time.
    pub states: Vec<Vec<C64>>,
    /// Accepted integrator steps.
    pub steps: usize,
}

impl Trajectory {
    /// Squared norm of the state at grid index `k`.
    pub fn norm_sq(&self, k: usize) -> f64 {
        self.states[k].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Uniform grid of `intervals` steps spanning [t0, t0 + span].
pub fn uniform_grid(t0: f64, span: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .map(|i| t0 + span * i as f64 / intervals as f64)
        .collect()
}

/// Integrates one site from `state0` for `t_end` seconds on the default
/// uniform reporting grid (step t_end/2000), with relative tolerance `tol`.
pub fn evolve(
    state0: &SiteState,
    p: &DriveProfile,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let grid = uniform_grid(state0.time, t_end, DEFAULT_GRID_INTERVALS);
    evolve_grid(state0, p, &grid, tol, None)
}

/// Integrates one site on an explicit reporting grid. `state0` is taken as
/// the state at `times[0]`. A step cap `h_max` turns the integrator into a
/// fixed-step method when the error test keeps passing.
pub fn evolve_grid(
    state0: &SiteState,
    p: &DriveProfile,
    times: &[f64],
    tol: f64,
    h_max: Option<f64>,
) -> Result<Trajectory> {
    p.validate()?;
    let n = state0.norm_sq();
    if (n - 1.0).abs() > NORM_EPSILON {
        return Err(Error::NotNormalized { defect: n - 1.0, tol: NORM_EPSILON });
    }
    if times.len() < 2 || times[times.len() - 1] <= times[0] {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: "evolution span must be positive".into(),
        });
    }
    let sys = SiteSystem { site: state0.site, p };
    let opts = AdaptiveOptions { rtol: tol, atol: 1e-14, h_max, ..Default::default() };
    let sol = ode::integrate(&sys, &state0.amplitudes, times, &opts)?;
    Ok(Trajectory { site: state0.site, times: sol.times, states: sol.states, steps: sol.steps })
}

/// Output temporal mode of one cavity: the two circular-polarization
/// envelopes amp(t) = √κ·c_photon(t) on the trajectory's grid.
#[derive(Debug, Clone)]
pub struct EmittedPulse {
    pub site: Site,
    /// Grid times, seconds (uniform).
    pub times: Vec<f64>,
    /// Left-circular envelope, units √(1/s).
    pub amp_l: Vec<C64>,
    /// Right-circular envelope, units √(1/s).
    pub amp_r: Vec<C64>,
}

impl EmittedPulse {
    fn h(&self) -> f64 {
        debug_assert!(self.times.len() >= 2);
        (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64
    }

    /// Emitted-energy fraction in the left-circular mode, ∫|amp_L|²dt.
    pub fn norm_l_sq(&self) -> f64 {
        let f: Vec<f64> = self.amp_l.iter().map(|c| c.norm_sqr()).collect();
        quad::simpson(&f, self.h())
    }

    /// Emitted-energy fraction in the right-circular mode, ∫|amp_R|²dt.
    pub fn norm_r_sq(&self) -> f64 {
        let f: Vec<f64> = self.amp_r.iter().map(|c| c.norm_sqr()).collect();
        quad::simpson(&f, self.h())
    }

    /// Total emission probability ∫(|amp_L|²+|amp_R|²)dt.
    pub fn norm_sq(&self) -> f64 {
        self.norm_l_sq() + self.norm_r_sq()
    }

    /// Instantaneous output flux |amp_L|²+|amp_R|² at grid index `k`.
    pub fn flux(&self, k: usize) -> f64 {
        self.amp_l[k].norm_sqr() + self.amp_r[k].norm_sqr()
    }
}

/// Reads the photon envelopes out of a trajectory: amp = √κ times the
/// amplitude of the matching one-photon ket. At site B the atom records the
/// polarization, so the L envelope rides on gR|1,0⟩ and the R envelope on
/// gL|0,1⟩.
pub fn extract_pulse(traj: &Trajectory, p: &DriveProfile) -> EmittedPulse {
    let sk = p.kappa.sqrt();
    let (il, ir) = match traj.site {
        Site::Alice => (4usize, 5usize),
        Site::Bob => (3usize, 2usize),
    };
    let amp_l: Vec<C64> = traj.states.iter().map(|s| sk * s[il]).collect();
    let amp_r: Vec<C64> = traj.states.iter().map(|s| sk * s[ir]).collect();
    EmittedPulse { site: traj.site, times: traj.times.clone(), amp_l, amp_r }
}

fn completion_time_of_flux(times: &[f64], flux: &[f64], fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&fraction) || fraction <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "fraction",
            reason: format!("completion fraction {fraction} must lie in (0, 1)"),
        });
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let cum = quad::cumulative_trapezoid(flux, h);
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(Error::ZeroNormPulse);
    }
    let target = fraction * total;
    let k = cum.iter().position(|&c| c >= target).unwrap();
    Ok(times[k])
}

/// Earliest grid time by which a pulse has emitted `fraction` of its total
/// energy ∫(|amp_L|²+|amp_R|²)dt.
pub fn emission_completion_time(pulse: &EmittedPulse, fraction: f64) -> Result<f64> {
    let flux: Vec<f64> = (0..pulse.times.len()).map(|k| pulse.flux(k)).collect();
    completion_time_of_flux(&pulse.times, &flux, fraction)
}

/// Emission completion time of two pulses taken together (their fluxes add);
/// both must share one reporting grid. This is the natural operation time of
/// a protocol run, where the two photons are emitted concurrently.
pub fn combined_emission_time(
    a: &EmittedPulse,
    b: &EmittedPulse,
    fraction: f64,
) -> Result<f64> {
    if a.times.len() != b.times.len()
        || a.times.first() != b.times.first()
        || a.times.last() != b.times.last()
    {
        return Err(Error::InvalidParameter {
            name: "pulses",
            reason: "combined emission time needs a shared reporting grid".into(),
        });
    }
    let flux: Vec<f64> = (0..a.times.len()).map(|k| a.flux(k) + b.flux(k)).collect();
    completion_time_of_flux(&a.times, &flux, fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{alice_initial_state, bob_initial_state, Qubit, ALICE_DIM};
    use approx::assert_abs_diff_eq;

    fn quiet_profile() -> DriveProfile {
        DriveProfile {
            omega0: 0.0,
            t_c: 0.0,
            delta_t: 1.0,
            g0: 0.0,
            delta_g: 0.0,
            omega_z: 0.0,
            phi: 0.0,
            delta: 0.0,
            gamma: 0.0,
            kappa: 0.0,
        }
    }

    fn toy_profile() -> DriveProfile {
        DriveProfile {
            omega0: 5.0,
            t_c: 1.0,
            delta_t: 0.4,
            g0: 5.0,
            delta_g: 0.3,
            omega_z: 3.0,
            phi: 0.7,
            delta: 0.0,
            gamma: 0.5,
            kappa: 2.0,
        }
    }

    #[test]
    fn drive_envelope_matches_closed_form() {
        let p = DriveProfile { omega0: 2.0, t_c: 0.6e-6, delta_t: 0.2e-6, ..quiet_profile() };
        assert_abs_diff_eq!(p.omega(p.t_c), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.omega(p.t_c + p.delta_t), 2.0 / std::f64::consts::E, epsilon = 1e-15);
        // t_c = 3Δ_t puts nine decades of suppression at t = 0.
        let rel = p.omega(0.0) / (2.0 * (-9.0f64).exp());
        assert_abs_diff_eq!(rel, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coupling_modulation_matches_closed_form() {
        let p = DriveProfile {
            g0: 3.0,
            delta_g: std::f64::consts::FRAC_PI_3,
            omega_z: 1.0,
            ..quiet_profile()
        };
        assert_abs_diff_eq!(p.g(0.0), 3.0, epsilon = 1e-15);
        // At ω_z·t + φ = π/2 the modulation reaches cos(Δ_g) = 1/2.
        assert_abs_diff_eq!(p.g(std::f64::consts::FRAC_PI_2), 1.5, epsilon = 1e-12);
        let flat = DriveProfile { delta_g: 0.0, ..p };
        for t in [0.0, 0.3, 1.9, 7.0] {
            assert_abs_diff_eq!(flat.g(t), 3.0, epsilon = 0.0);
        }
    }

    #[test]
    fn hamiltonians_vanish_without_parameters() {
        let p = quiet_profile();
        let z = C64::new(0.0, 0.0);
        assert!(hamiltonian_alice(&p, 0.3).iter().flatten().all(|&e| e == z));
        assert!(hamiltonian_bob(&p, 0.3).iter().flatten().all(|&e| e == z));
    }

    #[test]
    fn hamiltonian_elements_sit_in_the_right_places() {
        let p = toy_profile();
        let t = 0.8;
        let ha = hamiltonian_alice(&p, t);
        assert_eq!(ha[2][0], C64::new(p.omega(t), 0.0));
        assert_eq!(ha[4][4], C64::new(0.0, -0.5 * p.kappa));
        assert_eq!(ha[2][4], C64::new(p.g(t), 0.0));
        assert_eq!(ha[2][2], C64::new(-p.delta, -0.5 * p.gamma));
        let hb = hamiltonian_bob(&p, t);
        assert_eq!(hb[1][0], C64::new(p.omega(t), 0.0));
        assert_eq!(hb[2][1], C64::new(p.g(t), 0.0));
        assert_eq!(hb[3][1], C64::new(p.g(t), 0.0));
        assert_eq!(hb[3][3], C64::new(0.0, -0.5 * p.kappa));
    }

    #[test]
    fn rhs_agrees_with_matrix_hamiltonian() {
        let p = DriveProfile { delta: 0.9, ..toy_profile() };
        let t = 1.37;
        for site in [Site::Alice, Site::Bob] {
            let dim = site.dim();
            let y: Vec<C64> = (0..dim)
                .map(|i| C64::new(0.1 + 0.2 * i as f64, 0.3 - 0.1 * i as f64))
                .collect();
            let sys = SiteSystem { site, p: &p };
            let mut dydt = vec![C64::new(0.0, 0.0); dim];
            sys.rhs(t, &y, &mut dydt);
            for i in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..dim {
                    let hij = match site {
                        Site::Alice => hamiltonian_alice(&p, t)[i][j],
                        Site::Bob => hamiltonian_bob(&p, t)[i][j],
                    };
                    acc += hij * y[j];
                }
                let expect = C64::new(0.0, -1.0) * acc;
                assert!((dydt[i] - expect).norm() < 1e-15, "{site:?} component {i}");
            }
        }
    }

    #[test]
    fn zero_hamiltonian_freezes_the_state() {
        let q = Qubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let s0 = alice_initial_state(&q);
        let traj = evolve(&s0, &quiet_profile(), 1.0, 1e-8).unwrap();
        for state in &traj.states {
            assert_eq!(state, &s0.amplitudes);
        }
    }

    #[test]
    fn constant_drive_gives_rabi_oscillation() {
        // Two-level limit of site B: no cavity coupling, flat drive.
        let p = DriveProfile { omega0: 1.0, delta_t: 1e9, ..quiet_profile() };
        let traj = evolve(&bob_initial_state(), &p, 3.0, 1e-10).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert_abs_diff_eq!(s[1].norm_sqr(), t.sin().powi(2), epsilon = 1e-6);
        }
    }

    #[test]
    fn bare_cavity_decay_reproduces_the_exponential_pulse() {
        let kappa = 2.0;
        let p = DriveProfile { kappa, ..quiet_profile() };
        let mut amps = vec![C64::new(0.0, 0.0); ALICE_DIM];
        amps[4] = C64::new(1.0, 0.0);
        let s0 = SiteState::new(Site::Alice, amps, 0.0).unwrap();
        let tol = 1e-8;
        let t_end = 5.0;
        let traj = evolve(&s0, &p, t_end, tol).unwrap();
        let pulse = extract_pulse(&traj, &p);

        for (t, al) in pulse.times.iter().zip(&pulse.amp_l) {
            let expect = kappa.sqrt() * (-0.5 * kappa * t).exp();
            assert!((al - C64::new(expect, 0.0)).norm() < 1e-7, "t = {t}");
        }
        assert!(pulse.amp_r.iter().all(|c| c.norm_sqr() == 0.0));

        // Emitted energy equals the population that left the state.
        let lost = 1.0 - traj.norm_sq(traj.times.len() - 1);
        assert!((lost - pulse.norm_sq()).abs() < 10.0 * tol);
        assert_abs_diff_eq!(pulse.norm_sq(), 1.0 - (-kappa * t_end).exp(), epsilon = 1e-9);

        // 99% of the energy is out by ln(100)/κ, to within one grid step.
        let t99 = emission_completion_time(&pulse, 0.99).unwrap();
        let step = t_end / DEFAULT_GRID_INTERVALS as f64;
        assert!((t99 - 100.0f64.ln() / kappa).abs() <= step);
    }

    #[test]
    fn swapping_the_qubit_swaps_the_polarizations_exactly() {
        let p = toy_profile();
        let q = Qubit::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let qs = Qubit::new(C64::new(0.0, 0.8), C64::new(0.6, 0.0)).unwrap();
        let t1 = evolve(&alice_initial_state(&q), &p, 3.0, 1e-8).unwrap();
        let t2 = evolve(&alice_initial_state(&qs), &p, 3.0, 1e-8).unwrap();
        let p1 = extract_pulse(&t1, &p);
        let p2 = extract_pulse(&t2, &p);
        assert_eq!(p1.amp_l, p2.amp_r);
        assert_eq!(p1.amp_r, p2.amp_l);
    }

    #[test]
    fn norm_is_monotone_under_loss() {
        let p = toy_profile();
        let traj = evolve(&alice_initial_state(&Qubit::balanced()), &p, 3.0, 1e-8).unwrap();
        let mut prev = traj.norm_sq(0);
        for k in 1..traj.times.len() {
            let n = traj.norm_sq(k);
            assert!(n <= prev + 1e-9, "norm grew at grid index {k}");
            prev = n;
        }
    }

    #[test]
    fn hermitian_limit_conserves_norm_and_real_energy() {
        let p = DriveProfile { gamma: 0.0, kappa: 0.0, delta: 1.3, ..toy_profile() };
        let tol = 1e-8;
        let traj = evolve(&alice_initial_state(&Qubit::balanced()), &p, 3.0, tol).unwrap();
        for k in 0..traj.times.len() {
            assert!((traj.norm_sq(k) - 1.0).abs() < 10.0 * tol);
        }
        let k = traj.times.len() / 2;
        let h = hamiltonian_alice(&p, traj.times[k]);
        let psi = &traj.states[k];
        let mut energy = C64::new(0.0, 0.0);
        for i in 0..6 {
            for j in 0..6 {
                energy += psi[i].conj() * h[i][j] * psi[j];
            }
        }
        assert!(energy.im.abs() < 1e-12);
    }

    #[test]
    fn flux_balance_holds_without_spontaneous_loss() {
        let p = DriveProfile { gamma: 0.0, ..toy_profile() };
        let tol = 1e-8;
        let traj = evolve(&alice_initial_state(&Qubit::balanced()), &p, 6.0, tol).unwrap();
        let pulse = extract_pulse(&traj, &p);
        let lost = 1.0 - traj.norm_sq(traj.times.len() - 1);
        assert!(
            (lost - pulse.norm_sq()).abs() < 10.0 * tol,
            "defect {}",
            (lost - pulse.norm_sq()).abs()
        );
    }

    #[test]
    fn fixed_step_endpoint_error_shrinks_at_high_order() {
        let p = DriveProfile { gamma: 0.2, kappa: 0.5, delta: 0.4, omega0: 1.5, delta_t: 1e9, ..quiet_profile() };
        let s0 = bob_initial_state();
        let grid = [0.0, 2.0];
        let reference = evolve_grid(&s0, &p, &grid, 1e-13, None).unwrap();
        let endpoint_error = |h: f64| {
            let sol = evolve_grid(&s0, &p, &grid, 1.0, Some(h)).unwrap();
            sol.states[1]
                .iter()
                .zip(&reference.states[1])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let e1 = endpoint_error(2.0 / 64.0);
        let e2 = endpoint_error(2.0 / 128.0);
        assert!(e1 / e2 >= 16.0, "observed ratio {}", e1 / e2);
    }

    #[test]
    fn evolve_rejects_bad_inputs() {
        let q = Qubit::balanced();
        let s0 = alice_initial_state(&q);
        assert!(evolve(&s0, &quiet_profile(), 0.0, 1e-8).is_err());
        assert!(evolve(&s0, &quiet_profile(), -1.0, 1e-8).is_err());

        let bad = DriveProfile { kappa: -1.0, ..quiet_profile() };
        match evolve(&s0, &bad, 1.0, 1e-8) {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "kappa"),
            other => panic!("expected kappa rejection, got {other:?}"),
        }

        let mut drained = s0.clone();
        drained.amplitudes[0] = C64::new(0.5, 0.0);
        drained.amplitudes[1] = C64::new(0.0, 0.0);
        assert!(matches!(
            evolve(&drained, &quiet_profile(), 1.0, 1e-8),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn completion_time_validates_its_inputs() {
        let pulse = EmittedPulse {
            site: Site::Alice,
            times: vec![0.0, 0.5, 1.0],
            amp_l: vec![C64::new(0.0, 0.0); 3],
            amp_r: vec![C64::new(0.0, 0.0); 3],
        };
        assert!(matches!(
            emission_completion_time(&pulse, 0.99),
            Err(Error::ZeroNormPulse)
        ));
        let live = EmittedPulse {
            amp_l: vec![C64::new(1.0, 0.0); 3],
            ..pulse
        };
        assert!(emission_completion_time(&live, 0.0).is_err());
        assert!(emission_completion_time(&live, 1.0).is_err());
    }
}
