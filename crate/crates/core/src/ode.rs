//! Adaptive Dormand–Prince 5(4) integration for complex-valued ODE systems.
//!
//! The embedded pair takes seven stages per step with the first-same-as-last
//! property, so an accepted step costs six right-hand-side evaluations. Step
//! size is controlled by the usual mixed absolute/relative RMS error test,
//! and steps are clamped so the trajectory lands exactly on every requested
//! report time — simulation output grids are what the rest of the crate
//! consumes, so no interpolating dense output is needed.

use crate::error::{Error, Result};
use crate::C64;

/// Right-hand side dy/dt = f(t, y) over complex amplitudes.
pub trait OdeSystem {
    /// Number of complex components in the state vector.
    fn dim(&self) -> usize;

    /// Writes f(t, y) into `dydt` (length [`OdeSystem::dim`]).
    fn rhs(&self, t: f64, y: &[C64], dydt: &mut [C64]);
}

/// Controls for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    /// Relative error tolerance per step.
    pub rtol: f64,
    /// Absolute error tolerance per step.
    pub atol: f64,
    /// Optional hard cap on the step size. When set, the integration starts
    /// at this step, which turns the method into a fixed-step RK5 whenever
    /// the error test keeps passing — handy for convergence-order checks.
    pub h_max: Option<f64>,
    /// Abort with an error after this many attempted steps.
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-14, h_max: None, max_steps: 50_000_000 }
    }
}

/// Trajectory sampled on the caller's report grid.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Report times, copied from the request.
    pub times: Vec<f64>,
    /// State vector at each report time; `states[0]` is the initial state.
    pub states: Vec<Vec<C64>>,
    /// Accepted integration steps taken.
    pub steps: usize,
}

// Butcher tableau of the Dormand–Prince 5(4) pair.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; row seven of A coincides with them (FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th- and 4th-order weights, for the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

struct Stages {
    k: [Vec<C64>; 7],
    ytmp: Vec<C64>,
    errs: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            k: [
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
            ],
            ytmp: z,
            errs: vec![0.0; n],
        }
    }
}

/// Attempts one step of size `h` from `(t, y)`; `st.k[0]` must hold f(t, y).
/// Returns the candidate state and the scaled RMS error.
fn try_step<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[C64],
    h: f64,
    st: &mut Stages,
    opts: &AdaptiveOptions,
) -> (Vec<C64>, f64) {
    let n = y.len();
    let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
    for (s, row) in rows.iter().enumerate() {
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    acc += a * st.k[j][i];
                }
            }
            st.ytmp[i] = y[i] + h * acc;
        }
        let (head, tail) = st.k.split_at_mut(s + 1);
        let _ = head;
        sys.rhs(t + C[s + 1] * h, &st.ytmp, &mut tail[0]);
    }

    // Fifth-order solution, then its derivative as stage seven (FSAL).
    let mut y1 = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &b) in B.iter().enumerate() {
            if b != 0.0 {
                acc += b * st.k[j][i];
            }
        }
        y1[i] = y[i] + h * acc;
    }
    let (head, tail) = st.k.split_at_mut(6);
    let _ = head;
    sys.rhs(t + h, &y1, &mut tail[0]);

    for i in 0..n {
        let mut e = C64::new(0.0, 0.0);
        for (j, &w) in E.iter().enumerate() {
            if w != 0.0 {
                e += w * st.k[j][i];
            }
        }
        let scale = opts.atol + opts.rtol * y[i].norm().max(y1[i].norm());
        let r = (h * e).norm() / scale;
        st.errs[i] = r * r;
    }
    // Summing in sorted order makes the step controller invariant under any
    // relabeling of state components, so symmetric problems stay bit-exactly
    // symmetric along the whole trajectory.
    st.errs.sort_unstable_by(f64::total_cmp);
    let err_sq: f64 = st.errs.iter().sum();
    (y1, (err_sq / n as f64).sqrt())
}

/// Integrates `sys` from `report[0]`, returning the state at every report
/// time. Report times must be finite and strictly increasing.
pub fn integrate<S: OdeSystem>(
    sys: &S,
    y0: &[C64],
    report: &[f64],
    opts: &AdaptiveOptions,
) -> Result<Solution> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::InvalidParameter {
            name: "y0",
            reason: format!("state has {} components, system expects {n}", y0.len()),
        });
    }
    if report.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "report",
            reason: "need at least the initial and one later report time".into(),
        });
    }
    if report.windows(2).any(|w| !(w[1] > w[0])) || report.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "report",
            reason: "report times must be finite and strictly increasing".into(),
        });
    }
    if !(opts.rtol > 0.0) || !(opts.atol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            reason: format!("rtol = {}, atol = {} are not usable", opts.rtol, opts.atol),
        });
    }
    if let Some(hm) = opts.h_max {
        if !(hm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "h_max",
                reason: format!("step cap {hm} must be positive"),
            });
        }
    }

    let span = report[report.len() - 1] - report[0];
    let h_min = span * 1e-15;
    let cap = opts.h_max.unwrap_or(f64::INFINITY);
    let mut h = match opts.h_max {
        Some(hm) => hm,
        None => (span * 1e-6).min(report[1] - report[0]),
    };

    let mut t = report[0];
    let mut y = y0.to_vec();
    let mut st = Stages::new(n);
    sys.rhs(t, &y, &mut st.k[0]);

    let mut states = Vec::with_capacity(report.len());
    states.push(y.clone());
    let mut steps = 0usize;
    let mut attempts = 0usize;

    for &target in &report[1..] {
        loop {
            let gap = target - t;
            if gap <= 0.0 {
                break;
            }
            let lands = h >= gap;
            let hstep = if lands { gap } else { h };

            attempts += 1;
            if attempts > opts.max_steps {
                return Err(Error::StepLimitExceeded { time: t, max_steps: opts.max_steps });
            }

            let (y1, err) = try_step(sys, t, &y, hstep, &mut st, opts);
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };

            if err <= 1.0 {
                t = if lands { target } else { t + hstep };
                y = y1;
                st.k.swap(0, 6);
                steps += 1;
                h = (hstep * factor).min(cap);
                if lands {
                    break;
                }
            } else {
                if hstep <= h_min {
                    return Err(Error::IntegrationFailure { time: t, step: hstep });
                }
                h = (hstep * factor).min(cap);
            }
        }
        states.push(y.clone());
    }

    Ok(Solution { times: report.to_vec(), states, steps })
}
