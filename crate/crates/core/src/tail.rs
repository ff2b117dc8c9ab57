//! Power-law fits to the decaying tail of an l-indexed series.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Minimum number of resolved points in the fit window.
pub const MIN_POINTS: usize = 30;

/// Values below this fraction of the series maximum count as numerical noise.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailFit {
    /// |v_l| ≈ prefactor · l^{-exponent}
    Power { exponent: f64, prefactor: f64, points: usize },
    /// The series drops into the noise floor inside the window: faster than any resolved power.
    Vanishing { last_resolved: usize },
}

impl TailFit {
    /// Decay exponent, infinite for a vanishing tail.
    pub fn exponent(&self) -> f64 {
        match *self {
            TailFit::Power { exponent, .. } => exponent,
            TailFit::Vanishing { .. } => f64::INFINITY,
        }
    }

    /// Model value at l (zero for a vanishing tail).
    pub fn value(&self, l: usize) -> f64 {
        match *self {
            TailFit::Power { exponent, prefactor, .. } => prefactor * (l as f64).powf(-exponent),
            TailFit::Vanishing { .. } => 0.0,
        }
    }
}

/// Least-squares slope of log|v| against log l over the last decade of l.
pub fn fit_power_tail(series: &[(usize, f64)]) -> Result<TailFit> {
    let Some(&(l_last, _)) = series.last() else {
        return Err(Error::TailFit("empty series".into()));
    };
    let peak = series.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
    if peak == 0.0 {
        return Ok(TailFit::Vanishing { last_resolved: 0 });
    }
    let floor = NOISE_FLOOR * peak;
    let lo = (l_last / 10).max(1);
    let window: Vec<(usize, f64)> = series.iter().copied().filter(|e| e.0 >= lo).collect();
    let pts: Vec<(f64, f64)> =
        window.iter().filter(|e| e.1.abs() > floor).map(|e| ((e.0 as f64).ln(), e.1.abs().ln())).collect();
    if pts.len() < MIN_POINTS {
        let end = &window[window.len() - window.len().div_ceil(4)..];
        if end.iter().all(|e| e.1.abs() <= floor) {
            let last_resolved = series.iter().filter(|e| e.1.abs() > floor).map(|e| e.0).max().unwrap_or(0);
            return Ok(TailFit::Vanishing { last_resolved });
        }
        return Err(Error::TailFit(format!("{} points in the fit window, need {MIN_POINTS}", pts.len())));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(TailFit::Power { exponent: -slope, prefactor: (my - slope * mx).exp(), points: pts.len() })
}

/// Whether every even-l entry is (numerically) zero while odd ones are not.
pub fn odd_only(series: &[(usize, f64)]) -> bool {
    let peak = series.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
    let floor = NOISE_FLOOR * peak;
    series.iter().any(|e| e.0 % 2 == 0) && series.iter().filter(|e| e.0 % 2 == 0).all(|e| e.1.abs() <= floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn recovers_exact_power() {
        let s: Vec<(usize, f64)> = (1..=500).map(|l| (l, 0.3 * (l as f64).powf(-5.0 / 3.0))).collect();
        let TailFit::Power { exponent, prefactor, points } = fit_power_tail(&s).unwrap() else { panic!() };
        assert_relative_eq!(exponent, 5.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(prefactor, 0.3, max_relative = 1e-11);
        assert_eq!(points, 451);
    }

    #[test]
    fn exponential_decay_vanishes() {
        let s: Vec<(usize, f64)> = (1..=1000).map(|l| (-(l as f64) * 0.5).exp()).enumerate().map(|(i, v)| (i + 1, v)).collect();
        assert!(matches!(fit_power_tail(&s).unwrap(), TailFit::Vanishing { .. }));
        assert_eq!(fit_power_tail(&s).unwrap().exponent(), f64::INFINITY);
    }

    #[test]
    fn parity_zeros_are_skipped() {
        let s: Vec<(usize, f64)> =
            (1..=999).map(|l| (l, if l % 2 == 1 { (l as f64).powi(-2) } else { 0.0 })).collect();
        assert!(odd_only(&s));
        assert_relative_eq!(fit_power_tail(&s).unwrap().exponent(), 2.0, max_relative = 1e-12);
        assert!(matches!(fit_power_tail(&s[..40]), Err(Error::TailFit(_))));
    }

    proptest! {
        #[test]
        fn slope_is_scale_invariant(p in 0.5f64..4.0, c in 1e-6f64..1e6) {
            let s: Vec<(usize, f64)> = (1..=400).map(|l| (l, c * (l as f64).powf(-p))).collect();
            let fit = fit_power_tail(&s).unwrap();
            prop_assert!((fit.exponent() - p).abs() < 1e-9);
        }
    }
}
