//! Quadrature helpers for sampled pulses on uniform grids.
//!
//! Pulse norms use composite Simpson (error O(h⁴), needed to certify flux
//! conservation to 1e-6); mode overlaps use the trapezoid rule with the same
//! weights in the numerator and denominator, which makes the discrete
//! Cauchy–Schwarz inequality exact so that |χ| ≤ 1 holds to rounding.

use crate::C64;

/// Composite Simpson integral of real samples on a uniform grid of step `h`.
///
/// An odd interval count is closed with the 3/8 rule over the last three
/// intervals, so the rule stays exact for cubics whenever at least four
/// samples are given.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    if intervals == 1 {
        return 0.5 * h * (samples[0] + samples[1]);
    }
    let (m, mut total) = if intervals % 2 == 0 {
        (intervals, 0.0)
    } else {
        let s = &samples[n - 4..];
        (intervals - 3, 0.375 * h * (s[0] + 3.0 * s[1] + 3.0 * s[2] + s[3]))
    };
    if m > 0 {
        let mut acc = samples[0] + samples[m];
        for k in 1..m {
            acc += if k % 2 == 1 { 4.0 * samples[k] } else { 2.0 * samples[k] };
        }
        total += acc * h / 3.0;
    }
    total
}

/// Trapezoid integral of real samples on a uniform grid of step `h`.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = samples[1..n - 1].iter().sum();
    h * (0.5 * (samples[0] + samples[n - 1]) + inner)
}

/// Trapezoid integral of complex samples on a uniform grid of step `h`.
pub fn trapezoid_c(samples: &[C64], h: f64) -> C64 {
    let n = samples.len();
    if n < 2 {
        return C64::new(0.0, 0.0);
    }
    let mut inner = C64::new(0.0, 0.0);
    for s in &samples[1..n - 1] {
        inner += s;
    }
    (inner + 0.5 * (samples[0] + samples[n - 1])) * h
}

/// Running trapezoid antiderivative: out[k] = ∫ from the first sample to
/// sample k. The first entry is 0 and the last equals [`trapezoid`].
pub fn cumulative_trapezoid(samples: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Running trapezoid antiderivative on an arbitrary monotone grid.
pub fn cumulative_trapezoid_t(times: &[f64], samples: &[f64]) -> Vec<f64> {
    debug_assert_eq!(times.len(), samples.len());
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..samples.len() {
        acc += 0.5 * (times[k] - times[k - 1]) * (samples[k] + samples[k - 1]);
        out.push(acc);
    }
    out
}

/// Normalized overlap χ = ⟨f|g⟩ / √(⟨f|f⟩⟨g|g⟩) of two sampled complex
/// envelopes sharing one grid, with matching trapezoid weights throughout.
///
/// Returns `None` when either norm vanishes.
pub fn normalized_overlap(f: &[C64], g: &[C64], h: f64) -> Option<C64> {
    debug_assert_eq!(f.len(), g.len());
    let cross: Vec<C64> = f.iter().zip(g).map(|(a, b)| a.conj() * b).collect();
    let ff: Vec<f64> = f.iter().map(|a| a.norm_sqr()).collect();
    let gg: Vec<f64> = g.iter().map(|a| a.norm_sqr()).collect();
    let num = trapezoid_c(&cross, h);
    let den = (trapezoid(&ff, h) * trapezoid(&gg, h)).sqrt();
    if den <= 0.0 || !den.is_finite() {
        return None;
    }
    Some(num / den)
}
