//! Dimensionless power-law orbits and the width prefactor c(α) in Γ_n ≈ c γ n.
//!
//! With M = 1 and |A| = |E| = 1 the orbit of V = A|q|^α depends only on α and
//! on whether a wall sits at q = 0. Physical dipoles follow from
//! d_l = (E/A)^{1/α} d_l'.

use crate::classical;
use crate::dipole::{self, FourierMethod};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::special::{gamma, hurwitz_zeta, zeta};
use crate::tail::{self, TailFit};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of Fourier coefficients before tail extrapolation.
pub const DEFAULT_LMAX: usize = 1000;

/// Default exponent grid for scans.
pub const DEFAULT_GRID: [f64; 10] = [-1.9, -1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSystem {
    pub alpha: f64,
    pub sign_a: f64,
    pub sign_e: f64,
    pub wall: bool,
    pub s_prime: f64,
    pub t_prime: f64,
    /// (l, d_l')
    pub d_prime: Vec<(usize, f64)>,
    pub tail: Option<TailFit>,
}

impl ScaledSystem {
    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail.map(|t| t.exponent())
    }
}

fn check_alpha(alpha: f64, wall: bool) -> Result<()> {
    if !alpha.is_finite() || alpha == 0.0 || alpha <= -2.0 {
        return Err(Error::InvalidParameter(format!("alpha must be finite, non-zero and above -2, got {alpha}")));
    }
    if alpha < 0.0 && !wall {
        return Err(Error::InvalidParameter("alpha < 0 requires the wall at q = 0".into()));
    }
    Ok(())
}

/// The potential sign(α)|q|^α with M = ħ = 1.
pub fn scaled_potential(alpha: f64, wall: bool) -> Result<PotentialSpec> {
    check_alpha(alpha, wall)?;
    PotentialSpec::power_law(alpha.signum(), alpha, wall)
}

/// Scaled orbit at |E| = 1 with d_l' for l = 1..=l_max.
pub fn scaled_orbit(alpha: f64, wall: bool, l_max: usize) -> Result<ScaledSystem> {
    let spec = scaled_potential(alpha, wall)?;
    let sign = alpha.signum();
    let orbit = classical::trajectory(&spec, sign, 64)?;
    let d = dipole::fourier_coefficients(&orbit, l_max, FourierMethod::CoordinateIntegral)?;
    let d_prime: Vec<(usize, f64)> = d.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect();
    let tail = tail::fit_power_tail(&d_prime).ok();
    Ok(ScaledSystem {
        alpha,
        sign_a: sign,
        sign_e: sign,
        wall,
        s_prime: orbit.action,
        t_prime: orbit.period,
        d_prime,
        tail,
    })
}

/// Semiclassical level energy from the scaled action, optionally with the offset ν.
pub fn energy_from_n(alpha: f64, amplitude: f64, mass: f64, hbar: f64, s_prime: f64, n: f64, nu: f64) -> f64 {
    let mag = ((2.0 * PI * hbar / s_prime).powf(2.0 * alpha) * amplitude * amplitude / mass.powf(alpha)).powf(1.0 / (2.0 + alpha));
    alpha.signum() * mag * (n + nu).powf(2.0 * alpha / (2.0 + alpha))
}

/// Decay exponent of |d_l'| over the last decade of l.
pub fn tail_exponent(d_prime: &[(usize, f64)]) -> Result<TailFit> {
    tail::fit_power_tail(d_prime)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefactorReport {
    pub alpha: f64,
    pub wall: bool,
    /// Tail-extrapolated prefactor.
    pub c: f64,
    /// Sum over l ≤ l_max only.
    pub c_raw: f64,
    /// Spread between tail estimates from two fit windows.
    pub c_err: f64,
    pub l_max: usize,
    pub s_prime: f64,
    pub t_prime: f64,
    pub tail: Option<TailFit>,
}

/// Σ_{l > l_max} l d_l² for |d_l| = C l^{-p}, over all l or odd l only.
fn tail_sum(fit: &TailFit, l_max: usize, odd: bool) -> f64 {
    let TailFit::Power { exponent: p, prefactor: c, .. } = *fit else {
        return 0.0;
    };
    let s = 2.0 * p - 1.0;
    if s <= 1.0 {
        return f64::INFINITY;
    }
    if odd {
        let first = if l_max.is_multiple_of(2) { l_max + 1 } else { l_max + 2 };
        c * c * 2f64.powf(-s) * hurwitz_zeta(s, first as f64 / 2.0)
    } else {
        c * c * hurwitz_zeta(s, (l_max + 1) as f64)
    }
}

/// c = 8π² Σ l d_l'² / (S' T').
pub fn prefactor_from(system: &ScaledSystem) -> Result<PrefactorReport> {
    let l_max = system.d_prime.len();
    let norm = 8.0 * PI * PI / (system.s_prime * system.t_prime);
    let raw: f64 = system.d_prime.iter().map(|&(l, d)| l as f64 * d * d).sum();
    let odd = tail::odd_only(&system.d_prime);
    let (tail_a, tail_b) = match system.tail {
        Some(fit @ TailFit::Power { .. }) => {
            let short: Vec<(usize, f64)> = system.d_prime.iter().copied().filter(|e| e.0 >= l_max / 4).collect();
            let alt = tail::fit_power_tail(&short).map_or(fit, |f| f);
            (tail_sum(&fit, l_max, odd), tail_sum(&alt, l_max, odd))
        }
        Some(TailFit::Vanishing { .. }) => (0.0, 0.0),
        None => return Err(Error::TailFit(format!("no tail fit for alpha = {} with l_max = {l_max}", system.alpha))),
    };
    if !tail_a.is_finite() {
        return Err(Error::TailFit(format!("fitted decay too slow for a convergent sum (alpha = {})", system.alpha)));
    }
    Ok(PrefactorReport {
        alpha: system.alpha,
        wall: system.wall,
        c: norm * (raw + tail_a),
        c_raw: norm * raw,
        c_err: norm * (tail_a - tail_b).abs(),
        l_max,
        s_prime: system.s_prime,
        t_prime: system.t_prime,
        tail: system.tail,
    })
}

pub fn width_prefactor(alpha: f64, wall: bool, l_max: usize) -> Result<PrefactorReport> {
    prefactor_from(&scaled_orbit(alpha, wall, l_max)?)
}

/// Prefactors over a grid of exponents; walls wherever α < 0 or `wall` is set.
pub fn scan_alpha(grid: &[f64], wall: bool, l_max: usize) -> Vec<Result<PrefactorReport>> {
    grid.par_iter().map(|&a| width_prefactor(a, wall || a < 0.0, l_max)).collect()
}

/// Coefficient C and exponent p of d_l' ≈ C l^{-p} from the reflection cusp
/// q' ≈ κ|t'|^{2/(2-α)} at an attractive wall (α < 0).
pub fn cusp_coefficients(alpha: f64, t_prime: f64) -> (f64, f64) {
    let nu = 2.0 / (2.0 - alpha);
    let kappa = ((2.0 - alpha) / 2f64.sqrt()).powf(nu);
    let c = 2.0 * kappa / t_prime * gamma(nu + 1.0) * (PI * (nu + 1.0) / 2.0).cos().abs() * (t_prime / (2.0 * PI)).powf(nu + 1.0);
    (c, nu + 1.0)
}

/// Prefactor obtained by using the large-l cusp form of d_l' for every l.
pub fn asymptotic_width_prefactor(alpha: f64) -> Result<f64> {
    if !(alpha < 0.0 && alpha > -2.0) {
        return Err(Error::InvalidParameter("the cusp form applies to -2 < alpha < 0 with a wall".into()));
    }
    let spec = scaled_potential(alpha, true)?;
    let s = classical::action(&spec, -1.0)?;
    let t = classical::period(&spec, -1.0)?;
    let (c, p) = cusp_coefficients(alpha, t);
    Ok(8.0 * PI * PI * c * c * zeta(2.0 * p - 1.0) / (s * t))
}
