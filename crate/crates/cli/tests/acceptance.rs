//! Acceptance criteria for the simulator, one test per criterion.
//!
//! Every test prints exactly one `criterion N: PASS/FAIL — detail` line, so
//! a full run reads as a checklist. Tolerances are pinned in the asserts.
//! The sweep tables are additionally compared against golden files under
//! `tests/golden/`, regenerated only by the ignored `regenerate_golden_files`
//! test; any drift beyond 1e-6 in those curves is a reportable change.

use cavity_teleport::adiabatic::{analytic_envelope, dark_state_bob, dark_states_alice};
use cavity_teleport::dynamics::{
    evolve_grid, extract_pulse, hamiltonian_alice, hamiltonian_bob, uniform_grid, DriveProfile,
    EmittedPulse,
};
use cavity_teleport::experiments::{
    default_phi_grid, monte_carlo, run_teleportation, strong_preset, sweep_phi_b, weak_preset,
    Preset, SweepResult,
};
use cavity_teleport::hilbert::{alice_initial_state, bob_initial_state, Qubit, Site};
use cavity_teleport::measurement::{bell_analyzer, BellPattern, JointState};
use cavity_teleport::{quad, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Prints the one-line verdict for a criterion, then enforces it.
fn report(criterion: usize, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} — {detail}");
    assert!(ok, "criterion {criterion}: {detail}");
}

/// The sweep table in the CLI's CSV schema.
fn sweep_to_csv(sweep: &SweepResult) -> String {
    let mut s = String::from("phi_B,F,P,abs_chi\n");
    for r in &sweep.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.phi_b, r.fidelity, r.success_probability, r.abs_chi
        );
    }
    s
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Largest |difference| between a sweep and its golden table.
fn golden_deviation(name: &str, sweep: &SweepResult) -> Result<f64, String> {
    let path = golden_dir().join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        format!(
            "cannot read `{}` (run the ignored regenerate_golden_files test once): {e}",
            path.display()
        )
    })?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "phi_B,F,P,abs_chi" {
        return Err(format!("golden header is `{header}`"));
    }
    let mut worst = 0.0f64;
    let mut rows = 0usize;
    for (line, row) in lines.zip(&sweep.rows) {
        let got: Vec<f64> = line
            .split(',')
            .map(|v| v.parse().map_err(|e| format!("bad golden value `{v}`: {e}")))
            .collect::<Result<_, _>>()?;
        if got.len() != 4 {
            return Err(format!("golden row has {} columns", got.len()));
        }
        for (g, f) in got.iter().zip([
            row.phi_b,
            row.fidelity,
            row.success_probability,
            row.abs_chi,
        ]) {
            worst = worst.max((g - f).abs());
        }
        rows += 1;
    }
    if rows != sweep.rows.len() {
        return Err(format!(
            "golden table has {rows} rows, sweep has {}",
            sweep.rows.len()
        ));
    }
    Ok(worst)
}

#[test]
fn criterion_1_strong_success_probability_on_the_phase_grid() {
    let start = Instant::now();
    let sweep = sweep_phi_b(&strong_preset(), &default_phi_grid()).expect("sweep");
    let elapsed = start.elapsed().as_secs_f64();
    let p_min = sweep
        .rows
        .iter()
        .map(|r| r.success_probability)
        .fold(f64::INFINITY, f64::min);
    let ok = sweep.rows.len() == 16 && p_min > 0.49 && elapsed < 10.0;
    report(
        1,
        ok,
        format!(
            "strong preset holds P > 0.49 at all {} phases (min P = {p_min:.6}) in {elapsed:.2} s (< 10 s)",
            sweep.rows.len()
        ),
    );
}

#[test]
fn criterion_2_strong_fidelity_and_golden_curve() {
    let sweep = sweep_phi_b(&strong_preset(), &default_phi_grid()).expect("sweep");
    let f_min = sweep
        .rows
        .iter()
        .map(|r| r.fidelity)
        .fold(f64::INFINITY, f64::min);
    match golden_deviation("strong_sweep.csv", &sweep) {
        Ok(dev) => {
            let ok = f_min > 0.95 && dev <= 1.0e-6;
            report(
                2,
                ok,
                format!(
                    "strong preset holds F > 0.95 at all phases (min F = {f_min:.6}) and matches the golden curve within 1e-6 (max dev {dev:.2e})"
                ),
            );
        }
        Err(e) => report(2, false, e),
    }
}

#[test]
fn criterion_3_weak_bounds_and_golden_curve() {
    let start = Instant::now();
    let sweep = sweep_phi_b(&weak_preset(), &default_phi_grid()).expect("sweep");
    let elapsed = start.elapsed().as_secs_f64();
    let p_min = sweep
        .rows
        .iter()
        .map(|r| r.success_probability)
        .fold(f64::INFINITY, f64::min);
    let f_mean =
        sweep.rows.iter().map(|r| r.fidelity).sum::<f64>() / sweep.rows.len() as f64;
    match golden_deviation("weak_sweep.csv", &sweep) {
        Ok(dev) => {
            let ok = p_min > 0.49 && f_mean > 0.95 && dev <= 1.0e-6 && elapsed < 60.0;
            report(
                3,
                ok,
                format!(
                    "weak preset holds P > 0.49 (min P = {p_min:.6}) with sweep-averaged F > 0.95 (mean F = {f_mean:.6}), matching the golden curve within 1e-6 (max dev {dev:.2e}) in {elapsed:.2} s (< 60 s)"
                ),
            );
        }
        Err(e) => report(3, false, e),
    }
}

#[test]
fn criterion_4_emission_completion_times() {
    let strong = run_teleportation(&strong_preset(), 1.0e-8).expect("strong run");
    let weak = run_teleportation(&weak_preset(), 1.0e-8).expect("weak run");
    let strong_us = strong.emission_time * 1.0e6;
    let weak_us = weak.emission_time * 1.0e6;
    // 0.8 µs and 70 µs nominal, ±25%.
    let strong_ok = (0.6..=1.0).contains(&strong_us);
    let weak_ok = (52.5..=87.5).contains(&weak_us);
    report(
        4,
        strong_ok && weak_ok,
        format!(
            "99% emission at {strong_us:.3} µs (strong, expected 0.8 ± 25%) and {weak_us:.1} µs (weak, expected 70 ± 25%)"
        ),
    );
}

/// The strong preset with motional modulation, detuning, and spontaneous
/// decay all switched off — the cleanest adiabatic-passage regime.
fn clean_strong() -> Preset {
    let mut preset = strong_preset();
    for p in [&mut preset.alice, &mut preset.bob] {
        p.delta_g = 0.0;
        p.delta = 0.0;
        p.gamma = 0.0;
    }
    preset
}

/// |normalized overlap| between a numeric pulse's dominant component and
/// the closed-form envelope, on the pulse's uniform grid.
fn envelope_overlap(pulse: &EmittedPulse, envelope: &[f64]) -> f64 {
    let num = if pulse.norm_l_sq() >= pulse.norm_r_sq() {
        &pulse.amp_l
    } else {
        &pulse.amp_r
    };
    let ana: Vec<C64> = envelope.iter().map(|&v| C64::new(v, 0.0)).collect();
    let h = (pulse.times[pulse.times.len() - 1] - pulse.times[0])
        / (pulse.times.len() - 1) as f64;
    quad::normalized_overlap(num, &ana, h)
        .map(|c| c.norm())
        .unwrap_or(0.0)
}

/// ‖H·d‖₂ / ‖H‖_F.
fn relative_residual<const N: usize>(h: &[[C64; N]; N], d: &[C64]) -> f64 {
    let hnorm: f64 = h.iter().flatten().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let mut rnorm = 0.0;
    for row in h {
        let mut acc = C64::new(0.0, 0.0);
        for (e, a) in row.iter().zip(d) {
            acc += e * a;
        }
        rnorm += acc.norm_sqr();
    }
    rnorm.sqrt() / hnorm
}

#[test]
fn criterion_5_adiabatic_model_matches_clean_dynamics() {
    // Pulse-shape agreement between the integrated dynamics and the
    // dark-state envelope, in the regime where the model should be exact.
    let preset = clean_strong();
    let grid = preset.reporting_grid();
    let traj_a = evolve_grid(
        &alice_initial_state(&preset.qubit),
        &preset.alice,
        &grid,
        1.0e-8,
        None,
    )
    .expect("Alice evolution");
    let traj_b =
        evolve_grid(&bob_initial_state(), &preset.bob, &grid, 1.0e-8, None).expect("Bob evolution");
    let overlap_a = envelope_overlap(
        &extract_pulse(&traj_a, &preset.alice),
        &analytic_envelope(&preset.alice, Site::Alice, &grid).expect("envelope"),
    );
    let overlap_b = envelope_overlap(
        &extract_pulse(&traj_b, &preset.bob),
        &analytic_envelope(&preset.bob, Site::Bob, &grid).expect("envelope"),
    );

    // Dark states annihilate the lossless Hamiltonian across two decades
    // of drive-to-coupling ratios.
    let kappa = preset.alice.kappa;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let omega = kappa * rng.gen_range(0.1..10.0);
        let g = kappa * rng.gen_range(0.1..10.0);
        let p = DriveProfile {
            omega0: omega,
            t_c: 0.0,
            delta_t: 1.0e12,
            g0: g,
            delta_g: 0.0,
            omega_z: 0.0,
            phi: 0.0,
            delta: 0.0,
            gamma: 0.0,
            kappa: 0.0,
        };
        let ha = hamiltonian_alice(&p, 0.0);
        let (d1, d2) = dark_states_alice(omega, g).expect("dark states");
        for d in [&d1, &d2] {
            worst = worst.max(relative_residual(&ha, &d.amplitudes));
        }
        let hb = hamiltonian_bob(&p, 0.0);
        let db = dark_state_bob(omega, g).expect("dark state");
        worst = worst.max(relative_residual(&hb, &db.amplitudes));
    }

    let ok = overlap_a > 0.99 && overlap_b > 0.99 && worst < 1.0e-12;
    report(
        5,
        ok,
        format!(
            "clean-regime pulse overlaps {overlap_a:.6} (A) and {overlap_b:.6} (B) exceed 0.99; worst dark-state residual {worst:.2e} < 1e-12 over 100 draws"
        ),
    );
}

#[test]
fn criterion_6_analyzer_agrees_with_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = loop {
            let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if n > 1.0e-3 {
                break (a / n, b / n);
            }
        };
        let q = Qubit::new(a, b).expect("normalized");
        let chi = C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU));
        let joint = JointState::from_amplitudes(&q, chi).expect("joint state");
        let analyzed = bell_analyzer(&joint).fidelity().expect("fidelity");
        let a2 = q.alpha().norm_sqr();
        let b2 = q.beta().norm_sqr();
        let closed = (a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * chi.norm_sqr()).sqrt();
        worst = worst.max((analyzed - closed).abs());
    }

    // Perfect temporal overlap: every success pattern at exactly 1/8 and
    // the four together at exactly 1/2.
    let mut worst_pattern = 0.0f64;
    let mut worst_total = 0.0f64;
    for k in 0..10 {
        let q = if k % 2 == 0 {
            Qubit::balanced()
        } else {
            let (a, b) = loop {
                let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if n > 1.0e-3 {
                    break (a / n, b / n);
                }
            };
            Qubit::new(a, b).expect("normalized")
        };
        let chi = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let analysis =
            bell_analyzer(&JointState::from_amplitudes(&q, chi).expect("joint state"));
        for pattern in BellPattern::ALL {
            if pattern.is_success() {
                worst_pattern =
                    worst_pattern.max((analysis.probability(pattern) - 0.125).abs());
            }
        }
        worst_total = worst_total.max((analysis.success_probability() - 0.5).abs());
    }

    let ok = worst < 1.0e-6 && worst_pattern < 1.0e-9 && worst_total < 1.0e-9;
    report(
        6,
        ok,
        format!(
            "analyzer fidelity matches √(|α|⁴+|β|⁴+2|α|²|β|²|χ|²) within 1e-6 over 20 draws (max dev {worst:.2e}); at |χ| = 1 the success patterns sit at 1/8 within 1e-9 (max dev {worst_pattern:.2e}) and total 1/2 within 1e-9 (max dev {worst_total:.2e})"
        ),
    );
}

#[test]
fn criterion_7_lossless_flux_balance_on_both_presets() {
    let mut worst = 0.0f64;
    for mut preset in [strong_preset(), weak_preset()] {
        preset.alice.gamma = 0.0;
        preset.bob.gamma = 0.0;
        // The flux integral needs a grid that resolves the far-detuned
        // micro-oscillation of |f|², much finer than the reporting grid.
        let grid = uniform_grid(0.0, preset.t_end, 32_000);
        let runs = [
            (alice_initial_state(&preset.qubit), preset.alice),
            (bob_initial_state(), preset.bob),
        ];
        for (state0, profile) in runs {
            let traj = evolve_grid(&state0, &profile, &grid, 1.0e-10, None).expect("evolution");
            let pulse = extract_pulse(&traj, &profile);
            let lost = 1.0 - traj.norm_sq(traj.times.len() - 1);
            worst = worst.max((lost - pulse.norm_sq()).abs());
        }
    }
    report(
        7,
        worst < 1.0e-6,
        format!(
            "with γ = 0, |(1 − ‖ψ‖²) − ∫‖f‖²dt| ≤ {worst:.2e} < 1e-6 across both presets and sites"
        ),
    );
}

#[test]
fn criterion_8_monte_carlo_tracks_the_predictions() {
    let preset = strong_preset();
    let samples = 100_000u64;
    let seed = 20_260_817u64;
    let mut rows = Vec::new();
    for eta in [1.0, 0.7, 0.3] {
        rows.push(monte_carlo(&preset, samples, eta, seed).expect("sampling"));
    }
    let mut rate_ok = true;
    let mut worst_sigma = 0.0f64;
    for r in &rows {
        let p = r.predicted_rate;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        let dev = (r.success_rate - p).abs() / sigma;
        worst_sigma = worst_sigma.max(dev);
        rate_ok &= dev <= 3.0;
    }
    let mut fid_ok = true;
    let mut worst_fid = 0.0f64;
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let mean_a = a.mean_fidelity.expect("successes at η = 1.0, 0.7, 0.3");
            let mean_b = b.mean_fidelity.expect("successes at η = 1.0, 0.7, 0.3");
            let se_a = a.fidelity_std.unwrap_or(0.0) / (a.successes as f64).sqrt();
            let se_b = b.fidelity_std.unwrap_or(0.0) / (b.successes as f64).sqrt();
            let gap = (mean_a - mean_b).abs();
            worst_fid = worst_fid.max(gap);
            fid_ok &= gap <= 3.0 * (se_a + se_b) + 1.0e-12;
        }
    }
    report(
        8,
        rate_ok && fid_ok,
        format!(
            "at η = 1.0, 0.7, 0.3 with 1e5 shots each, success rates sit within {worst_sigma:.2}σ (≤ 3σ) of η²P and mean fidelities agree to {worst_fid:.2e} across efficiencies"
        ),
    );
}

/// Path to the compiled binary under test.
fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cavity-teleport")
}

fn run_binary(args: &[&str]) -> std::process::Output {
    std::process::Command::new(bin())
        .args(args)
        .output()
        .expect("binary should spawn")
}

#[test]
fn criterion_9_identical_configs_reproduce_files_byte_for_byte() {
    let strong_cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/strong.toml");
    let dir = tempfile::tempdir().expect("tempdir");
    let mc_cfg = dir.path().join("mc.toml");
    std::fs::write(
        &mc_cfg,
        "experiment = \"monte-carlo\"\nsamples = 50000\netas = [1.0, 0.7, 0.3]\nseed = 12\n",
    )
    .expect("write config");

    let mut ok = true;
    let mut details = Vec::new();

    let sweep_a = dir.path().join("sweep_a");
    let sweep_b = dir.path().join("sweep_b");
    for out in [&sweep_a, &sweep_b] {
        let st = run_binary(&[
            "--config",
            strong_cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            st.status.success(),
            "sweep run failed: {}",
            String::from_utf8_lossy(&st.stderr)
        );
    }
    for file in ["sweep.csv", "plot_fidelity.dat", "plot_success.dat", "run_manifest.toml"] {
        let a = std::fs::read(sweep_a.join(file)).expect("read");
        let b = std::fs::read(sweep_b.join(file)).expect("read");
        ok &= a == b;
        if a != b {
            details.push(format!("{file} differs between identical sweep runs"));
        }
    }

    let mc_a = dir.path().join("mc_a");
    let mc_b = dir.path().join("mc_b");
    for (out, threads) in [(&mc_a, "1"), (&mc_b, "3")] {
        let st = run_binary(&[
            "--config",
            mc_cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(
            st.status.success(),
            "mc run failed: {}",
            String::from_utf8_lossy(&st.stderr)
        );
    }
    let a = std::fs::read(mc_a.join("mc.csv")).expect("read");
    let b = std::fs::read(mc_b.join("mc.csv")).expect("read");
    ok &= a == b;
    if a != b {
        details.push("mc.csv differs between worker counts".into());
    }

    let detail = if details.is_empty() {
        "identical config and seed reproduce sweep.csv, both plot files, the manifest, and mc.csv byte for byte (the latter across worker counts)".into()
    } else {
        details.join("; ")
    };
    report(9, ok, detail);
}

/// Rewrites the golden sweep tables from the current implementation. Run
/// explicitly (`--ignored`) after a deliberate, validated change to the
/// physics, then commit the new tables.
#[test]
#[ignore = "rewrites tests/golden from the current implementation"]
fn regenerate_golden_files() {
    let dir = golden_dir();
    std::fs::create_dir_all(&dir).expect("create golden dir");
    for (preset, name) in [
        (strong_preset(), "strong_sweep.csv"),
        (weak_preset(), "weak_sweep.csv"),
    ] {
        let sweep = sweep_phi_b(&preset, &default_phi_grid()).expect("sweep");
        std::fs::write(dir.join(name), sweep_to_csv(&sweep)).expect("write golden");
        println!("regenerated {name}");
    }
}
