use rayon::prelude::*;

use crate::error::{Error, Result};

use super::AdiabaticPath;

/// Default Simpson nodes per smooth piece of the schedule.
pub const DEFAULT_NODES: usize = 201;

/// Composite Simpson integral of `f` over `[0, 1]`, split at `breaks` and
/// using `nodes` (rounded up to odd) points per piece. Samples are taken
/// just inside each piece so one-sided limits are used at the breaks.
fn simpson(breaks: &[f64], nodes: usize, f: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<f64> {
    let n = (nodes.max(3) | 1) - 1;
    let mut edges = vec![0.0];
    edges.extend_from_slice(breaks);
    edges.push(1.0);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / n as f64;
        let inset = 1e-12 * (b - a);
        let values: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|i| f((a + i as f64 * h).clamp(a + inset, b - inset)))
            .collect::<Result<_>>()?;
        let mut acc = values[0] + values[n];
        for (i, v) in values.iter().enumerate().take(n).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        total += acc * h / 3.0;
    }
    Ok(total)
}

/// `I = ∫₀¹ ‖∂_s H‖² ds`.
pub fn adiabatic_numerator(path: &AdiabaticPath, nodes: usize) -> Result<f64> {
    simpson(&path.schedule.breakpoints(), nodes, &|s| {
        let n = path.derivative(s)?.spectral_norm();
        Ok(n * n)
    })
}

/// Terms of the evolution-time estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct JansenEstimate {
    /// `∫ [‖∂²H‖/Δ² + 7‖∂H‖²/Δ³] ds`.
    pub integral: f64,
    /// Boundary term; zero for endpoint-flat schedules.
    pub boundary: f64,
    pub delta: f64,
    pub time: f64,
}

/// `T = (1/δ) ∫ [‖∂²_s H‖/Δ² + 7‖∂_s H‖²/Δ³] ds + B/δ`, with
/// `B = ‖∂_s H(0)‖/Δ(0)² + ‖∂_s H(1)‖/Δ(1)²` unless the schedule is flat
/// at both ends.
pub fn jansen_time(path: &AdiabaticPath, delta: f64, nodes: usize) -> Result<JansenEstimate> {
    const OP: &str = "jansen_time";
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(OP, format!("target infidelity {delta} outside (0, 1)")));
    }
    let gap = |s: f64| -> Result<f64> {
        let g = path.gap(s)?;
        if g <= 1e-12 {
            return Err(Error::domain(OP, format!("bound diverges: gap {g:.3e} at s = {s:.6}")));
        }
        Ok(g)
    };
    let integral = simpson(&path.schedule.breakpoints(), nodes, &|s| {
        let g = gap(s)?;
        let d1 = path.derivative(s)?.spectral_norm();
        let d2 = path.second_derivative(s)?.spectral_norm();
        Ok(d2 / (g * g) + 7.0 * d1 * d1 / (g * g * g))
    })?;
    let boundary = if path.schedule.endpoint_flat() {
        0.0
    } else {
        let end = |s: f64| -> Result<f64> {
            let g = gap(s)?;
            Ok(path.derivative(s)?.spectral_norm() / (g * g))
        };
        // One-sided derivatives at the ends of the interval.
        end(1e-12)? + end(1.0 - 1e-12)?
    };
    Ok(JansenEstimate { integral, boundary, delta, time: (integral + boundary) / delta })
}
