//! Result files: CSV tables, gnuplot-ready curves, and the run manifest.
//!
//! All numbers are written with Rust's shortest round-trip formatting, so a
//! file parses back to bit-identical doubles and identical runs produce
//! byte-identical files. Nothing here writes a timestamp.

use anyhow::{Context, Result};
use cavity_teleport::dynamics::DriveProfile;
use cavity_teleport::experiments::{MonteCarloResult, Preset, SweepResult, TeleportReport};
use serde::Serialize;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

/// Stable column order of the sweep table.
pub const SWEEP_HEADER: &str = "phi_B,F,P,abs_chi";

/// Stable column order of the Monte Carlo table.
pub const MC_HEADER: &str = "eta,samples,successes,success_rate,rate_low,rate_high,\
predicted_rate,mean_fidelity,fidelity_std,predicted_fidelity";

/// The sweep table as CSV text.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in &result.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.phi_b, r.fidelity, r.success_probability, r.abs_chi
        );
    }
    s
}

/// One two-column curve, `x y` per line, with a comment header.
pub fn plot_data(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let mut s = format!("# {x_name} {y_name}\n");
    for (x, y) in points {
        let _ = writeln!(s, "{x} {y}");
    }
    s
}

/// The Monte Carlo table as CSV text; absent statistics print as `nan`.
pub fn mc_csv(rows: &[MonteCarloResult]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".into(), |x| x.to_string());
    let mut s = format!("{MC_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.eta,
            r.samples,
            r.successes,
            r.success_rate,
            r.rate_low,
            r.rate_high,
            r.predicted_rate,
            opt(r.mean_fidelity),
            opt(r.fidelity_std),
            r.predicted_fidelity
        );
    }
    s
}

/// One drive profile echoed in laboratory units: ν = rate/2π in MHz,
/// times in µs, angles in radians.
#[derive(Debug, Serialize)]
pub struct SiteEcho {
    pub omega0_mhz: f64,
    pub g0_mhz: f64,
    pub delta_mhz: f64,
    pub gamma_mhz: f64,
    pub kappa_mhz: f64,
    pub omega_z_mhz: f64,
    pub delta_g_rad: f64,
    pub phi_rad: f64,
    pub t_c_us: f64,
    pub delta_t_us: f64,
}

impl SiteEcho {
    fn new(p: &DriveProfile) -> Self {
        let to_mhz = |rate: f64| rate / (1.0e6 * TAU);
        let to_us = |t: f64| t * 1.0e6;
        Self {
            omega0_mhz: to_mhz(p.omega0),
            g0_mhz: to_mhz(p.g0),
            delta_mhz: to_mhz(p.delta),
            gamma_mhz: to_mhz(p.gamma),
            kappa_mhz: to_mhz(p.kappa),
            omega_z_mhz: to_mhz(p.omega_z),
            delta_g_rad: p.delta_g,
            phi_rad: p.phi,
            t_c_us: to_us(p.t_c),
            delta_t_us: to_us(p.delta_t),
        }
    }
}

/// Laboratory-unit echo of the whole preset.
#[derive(Debug, Serialize)]
pub struct Conventional {
    pub t_end_us: f64,
    pub alice: SiteEcho,
    pub bob: SiteEcho,
}

impl Conventional {
    pub fn new(preset: &Preset) -> Self {
        Self {
            t_end_us: preset.t_end * 1.0e6,
            alice: SiteEcho::new(&preset.alice),
            bob: SiteEcho::new(&preset.bob),
        }
    }
}

/// Everything needed to reproduce a run: the resolved inputs in both unit
/// systems, the tool version, and (for single runs) the report itself.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub seed: u64,
    pub samples: u64,
    pub threads: usize,
    pub tolerance: f64,
    pub phi_points: usize,
    pub etas: Vec<f64>,
    /// Resolved physics in angular rad/s and seconds.
    pub preset: Preset,
    /// The same physics in MHz and µs.
    pub conventional: Conventional,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<TeleportReport>,
}

/// Serializes the manifest as TOML.
pub fn manifest_toml(manifest: &Manifest) -> Result<String> {
    toml::to_string_pretty(manifest).context("cannot serialize the run manifest")
}

/// Writes a result file, with the path in any error.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write `{}`", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavity_teleport::experiments::{strong_preset, SweepRow};

    fn sample_sweep() -> SweepResult {
        SweepResult {
            preset: "strong".into(),
            rows: vec![
                SweepRow {
                    phi_b: 0.0,
                    fidelity: 1.0,
                    success_probability: 0.5,
                    abs_chi: 1.0,
                },
                SweepRow {
                    phi_b: 0.5,
                    fidelity: 0.9751,
                    success_probability: 0.4953,
                    abs_chi: 0.9,
                },
            ],
        }
    }

    #[test]
    fn sweep_csv_has_the_stable_header_and_one_row_per_point() {
        let text = sweep_csv(&sample_sweep());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "phi_B,F,P,abs_chi");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,1,0.5,1");
        assert_eq!(lines[2], "0.5,0.9751,0.4953,0.9");
    }

    #[test]
    fn csv_numbers_round_trip_through_parsing() {
        let rows = [(0.1f64 + 0.2, 1.0 / 3.0, 2.0f64.sqrt(), 0.49529150)];
        let result = SweepResult {
            preset: "x".into(),
            rows: rows
                .iter()
                .map(|&(phi_b, fidelity, success_probability, abs_chi)| SweepRow {
                    phi_b,
                    fidelity,
                    success_probability,
                    abs_chi,
                })
                .collect(),
        };
        let text = sweep_csv(&result);
        let line = text.lines().nth(1).unwrap();
        let parsed: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(parsed, vec![rows[0].0, rows[0].1, rows[0].2, rows[0].3]);
    }

    #[test]
    fn plot_data_is_two_columns_with_a_comment_header() {
        let text = plot_data("phi_B", "F", &[(0.0, 1.0), (0.5, 0.9751)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec!["# phi_B F", "0 1", "0.5 0.9751"]);
    }

    #[test]
    fn mc_csv_writes_nan_for_absent_statistics() {
        let row = MonteCarloResult {
            eta: 0.0,
            samples: 10,
            successes: 0,
            success_rate: 0.0,
            rate_low: 0.0,
            rate_high: 0.3,
            predicted_rate: 0.0,
            mean_fidelity: None,
            fidelity_std: None,
            predicted_fidelity: 0.9751,
        };
        let text = mc_csv(&[row]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], MC_HEADER);
        assert_eq!(lines[1], "0,10,0,0,0,0.3,0,nan,nan,0.9751");
    }

    #[test]
    fn manifest_serializes_to_toml_in_both_unit_systems() {
        let preset = strong_preset();
        let manifest = Manifest {
            tool: "cavity-teleport",
            version: "0.0.0",
            experiment: "sweep".into(),
            seed: 1,
            samples: 100_000,
            threads: 1,
            tolerance: 1.0e-8,
            phi_points: 16,
            etas: vec![1.0],
            conventional: Conventional::new(&preset),
            preset,
            report: None,
        };
        let text = manifest_toml(&manifest).unwrap();
        assert!(text.contains("tool = \"cavity-teleport\""), "{text}");
        // Angular-rate and laboratory forms both present: κ = 2π·4 MHz.
        assert!(text.contains("kappa_mhz = 4.0"), "{text}");
        let parsed: toml::Value = text.parse().unwrap();
        let kappa = parsed["preset"]["alice"]["kappa"].as_float().unwrap();
        assert_eq!(kappa, TAU * 4.0e6);
    }
}
