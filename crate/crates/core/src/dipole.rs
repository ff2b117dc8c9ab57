//! Dipole matrix elements ⟨m|q|n⟩: closed forms for the solvable wells and
//! Fourier coefficients of the classical orbit for everything else.

use crate::classical::{self, Orbit, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::potentials::{Family, PotentialSpec, Shape};
use crate::quad::{self, GaussLegendre, Tolerance};
use crate::special::{gamma, ln_gamma};
use crate::wkb;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleMethod {
    Exact,
    Semiclassical,
}

/// How Fourier coefficients of q(t) are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierMethod {
    /// Time samples for smooth orbits, the coordinate integral when a wall is hit.
    #[default]
    Auto,
    /// Trapezoid sum over uniform time samples (FFT).
    TimeSamples,
    /// -(1/πl) ∫ sin(2πl t(q)/T) dq.
    CoordinateIntegral,
}

/// Energy of the classical orbit used for the transition n → n − l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitEnergy {
    /// Orbit at the mean quantum number n − l/2.
    #[default]
    Midpoint,
    /// Orbit at E_n for every l.
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SemiclassicalOptions {
    pub fourier: FourierMethod,
    pub energy: OrbitEnergy,
    /// Time samples per period; chosen from l_max when absent.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleTable {
    pub n: usize,
    /// (l, d_{n,n-l})
    pub entries: Vec<(usize, f64)>,
    pub method: DipoleMethod,
    pub potential: PotentialSpec,
    /// E_n
    pub energy: f64,
    /// E_n - E_{n-l} per entry: exact differences, or 2πħl/T for semiclassical tables.
    pub spacings: Vec<f64>,
}

impl DipoleTable {
    pub fn l_max(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }

    pub fn get(&self, l: usize) -> Option<f64> {
        self.entries.get(l.checked_sub(1)?).filter(|e| e.0 == l).map(|e| e.1)
    }
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// d_{nm} = ⟨m|q|n⟩ from the closed form of an analytic family.
pub fn exact_dipole(spec: &PotentialSpec, n: usize, m: usize) -> Result<f64> {
    if n == m {
        return Err(Error::InvalidParameter("diagonal element requested".into()));
    }
    let (mass, h) = (spec.mass(), spec.hbar());
    let (hi, lo) = (n.max(m), n.min(m));
    let l = hi - lo;
    Ok(match spec.family() {
        Family::Harmonic { omega } => {
            if l == 1 {
                (h * hi as f64 / (2.0 * mass * omega)).sqrt()
            } else {
                0.0
            }
        }
        Family::Box { length } => {
            if l % 2 == 0 {
                0.0
            } else {
                let (a, b) = ((n + 1) as f64, (m + 1) as f64);
                -8.0 * length / (PI * PI) * a * b / (a * a - b * b).powi(2)
            }
        }
        Family::HalfHarmonic { omega } => {
            let (nf, mf) = (n as f64, m as f64);
            let ln = 0.5 * (h / (mass * PI * omega)).ln() - (nf + mf - 1.0) * 2f64.ln()
                + 0.5 * (ln_gamma(2.0 * nf + 2.0) + ln_gamma(2.0 * mf + 2.0))
                - ln_gamma(nf + 1.0)
                - ln_gamma(mf + 1.0)
                - ((4 * l * l - 1) as f64).ln();
            -parity(l) * ln.exp()
        }
        Family::Coulomb { strength } => {
            let (a, b) = ((hi + 1) as f64, (lo + 1) as f64);
            8.0 * h * h / (mass * PI * strength) * (a * b).powf(2.5) / (a * a - b * b) * coulomb_overlap(hi, lo)?
        }
        Family::PowerLaw { .. } => {
            return Err(Error::Unsupported("no closed-form dipoles for a generic power law; use the semiclassical route".into()))
        }
    })
}

/// I_nm = ∫_0^∞ u sin(f_n - f_m) / ([1+(n+1)²u²][1+(m+1)²u²]) du, f_k = 2(k+1) atan((k+1)u).
pub fn coulomb_overlap(n: usize, m: usize) -> Result<f64> {
    let (a, b) = ((n + 1) as f64, (m + 1) as f64);
    let small = a.min(b);
    // u = tan(φ)/k_small maps [0, ∞) to [0, π/2).
    let f = |phi: f64| {
        if phi >= FRAC_PI_2 {
            return 0.0;
        }
        let t = phi.tan();
        let u = t / small;
        let phase = 2.0 * a * (a * u).atan() - 2.0 * b * (b * u).atan();
        // du / (1 + small² u²) = dφ / small
        let other = if a == small { b } else { a };
        u * phase.sin() / (small * (1.0 + other * other * u * u))
    };
    let knee = (small / a.max(b)).atan();
    let mut breaks = vec![0.0, 0.5 * knee, knee, 2.0 * knee];
    let pieces = 16;
    for j in 1..=pieces {
        let x = 2.0 * knee + (FRAC_PI_2 - 2.0 * knee) * j as f64 / pieces as f64;
        breaks.push(x);
    }
    breaks.dedup_by(|x, y| *x <= *y);
    let scale = quad::integrate(|x| f(x).abs(), &breaks, Tolerance::rel(1e-4))?.value;
    let tol = Tolerance { abs: 1e-13 * scale, rel: 1e-11, max_panels: 50_000 };
    Ok(quad::integrate(f, &breaks, tol)?.value)
}

/// Large-n, large-(n-m) form of the Coulomb dipole.
pub fn coulomb_asymptotic_dipole(spec: &PotentialSpec, n: usize, m: usize) -> Result<f64> {
    let Family::Coulomb { strength } = spec.family() else {
        return Err(Error::Unsupported("asymptotic dipole is defined for the coulomb family only".into()));
    };
    if n == m || n == 0 || m == 0 {
        return Err(Error::InvalidParameter("need n ≠ m, both ≥ 1".into()));
    }
    let (hi, lo) = (n.max(m) as f64, n.min(m) as f64);
    let pre = 2f64.powf(4.0 / 3.0) * 3f64.powf(1.0 / 6.0) * spec.hbar().powi(2) / (spec.mass() * PI * strength);
    Ok(-parity(n.abs_diff(m)) * pre * gamma(2.0 / 3.0) * (hi * lo).powf(11.0 / 6.0) / (hi * hi - lo * lo).powf(5.0 / 3.0))
}

/// d_{n,n-l}, l = 1..=min(l_max, n), from closed forms.
pub fn exact_table(spec: &PotentialSpec, n: usize, l_max: usize) -> Result<DipoleTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let top = l_max.min(n);
    let e_n = wkb::exact_energy(spec, n)?;
    let rows: Result<Vec<(usize, f64, f64)>> = (1..=top)
        .into_par_iter()
        .map(|l| Ok((l, exact_dipole(spec, n, n - l)?, e_n - wkb::exact_energy(spec, n - l)?)))
        .collect();
    let rows = rows?;
    Ok(DipoleTable {
        n,
        entries: rows.iter().map(|r| (r.0, r.1)).collect(),
        method: DipoleMethod::Exact,
        potential: *spec,
        energy: e_n,
        spacings: rows.iter().map(|r| r.2).collect(),
    })
}

/// d_{nm} for all m ≤ m_max with m ≠ n, as (m, d).
pub fn exact_dipole_row(spec: &PotentialSpec, n: usize, m_max: usize) -> Result<Vec<(usize, f64)>> {
    (0..=m_max).into_par_iter().filter(|&m| m != n).map(|m| Ok((m, exact_dipole(spec, n, m)?))).collect()
}

fn time_form(orbit: &Orbit, l_max: usize) -> Result<Vec<f64>> {
    let n = orbit.samples.len();
    if l_max >= n / 2 {
        return Err(Error::Resolution { l: l_max, max: n / 2 - 1 });
    }
    let mut buf: Vec<Complex64> = orbit.samples.iter().map(|&q| Complex64::new(q, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok((1..=l_max).map(|l| buf[l].re / n as f64).collect())
}

const NODE_CHUNK: usize = 512;
const RESEED: usize = 64;

fn coordinate_form(orbit: &Orbit, l_max: usize) -> Result<Vec<f64>> {
    let map = &orbit.map;
    let chart = map.chart();
    let half = map.half_period();
    // Cut the half period into l_max slices of equal time so that sin(2πlt/T)
    // turns by at most π per panel; keep the adaptive panels of t(θ) as well.
    let slices = l_max.max(8);
    let times: Vec<f64> = (1..slices).map(|j| half * j as f64 / slices as f64).collect();
    let mut cuts: Vec<f64> = times.par_iter().map(|&t| map.theta_at_time(t)).collect::<Result<_>>()?;
    cuts.extend(map.boundaries());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = GaussLegendre::g16();
    let omega = PI / half;
    let nodes: Vec<(f64, f64)> = cuts
        .par_windows(2)
        .flat_map_iter(|w| {
            rule.mapped(w[0], w[1])
                .map(|(th, wt)| (omega * map.time_at(th), wt * chart.dq(th)))
                .filter(|&(_, w)| w != 0.0)
                .collect::<Vec<_>>()
        })
        .collect();
    let partial: Vec<Vec<f64>> = nodes
        .par_chunks(NODE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; l_max];
            for &(phi, w) in chunk {
                let step = Complex64::from_polar(1.0, phi);
                let mut z = step;
                for (i, a) in acc.iter_mut().enumerate() {
                    let l = i + 1;
                    if l % RESEED == 0 {
                        z = Complex64::from_polar(1.0, l as f64 * phi);
                    }
                    *a += w * z.im;
                    z *= step;
                }
            }
            acc
        })
        .collect();
    // Fixed-order reduction keeps results independent of the thread count.
    let mut total = vec![0.0; l_max];
    for p in &partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok(total.iter().enumerate().map(|(i, s)| -s / (PI * (i + 1) as f64)).collect())
}

/// Fourier coefficients d_l = (1/T)∫ q(t) cos(2πlt/T) dt, l = 1..=l_max.
pub fn fourier_coefficients(orbit: &Orbit, l_max: usize, method: FourierMethod) -> Result<Vec<f64>> {
    if l_max == 0 {
        return Ok(Vec::new());
    }
    match resolve(orbit, method) {
        FourierMethod::TimeSamples => time_form(orbit, l_max),
        _ => coordinate_form(orbit, l_max),
    }
}

fn resolve(orbit: &Orbit, method: FourierMethod) -> FourierMethod {
    match method {
        FourierMethod::Auto if orbit.has_wall() => FourierMethod::CoordinateIntegral,
        FourierMethod::Auto => FourierMethod::TimeSamples,
        m => m,
    }
}

/// Semiclassical d_{n,n-l} at the orbit's energy.
pub fn semiclassical_dipole(orbit: &Orbit, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    Ok(fourier_coefficients(orbit, l, FourierMethod::Auto)?[l - 1])
}

/// Exponents of d_l and T in |E| for the family's shape.
pub(crate) fn energy_exponents(spec: &PotentialSpec) -> (f64, f64) {
    match spec.shape() {
        Shape::Box { .. } => (0.0, -0.5),
        Shape::Power { alpha, .. } => (1.0 / alpha, 1.0 / alpha - 0.5),
    }
}

/// Samples needed to resolve l_max by the time route.
pub fn samples_for(l_max: usize) -> usize {
    (16 * l_max).next_power_of_two().max(DEFAULT_SAMPLES)
}

/// Semiclassical d_{n,n-l}, l = 1..=l_max.
pub fn semiclassical_table(spec: &PotentialSpec, n: usize, l_max: usize, opts: SemiclassicalOptions) -> Result<DipoleTable> {
    if n == 0 || l_max == 0 {
        return Err(Error::InvalidParameter("n and l_max must be at least 1".into()));
    }
    if opts.energy == OrbitEnergy::Midpoint && l_max > n {
        return Err(Error::InvalidParameter(format!(
            "midpoint orbits need l_max ≤ n (got l_max = {l_max}, n = {n}); use orbit energy 'level'"
        )));
    }
    let e_n = wkb::level_energy(spec, n)?;
    let samples = opts.samples.unwrap_or_else(|| samples_for(l_max));
    let orbit = classical::trajectory(spec, e_n, samples)?;
    let coeffs = fourier_coefficients(&orbit, l_max, opts.fourier)?;
    let (d_exp, t_exp) = energy_exponents(spec);
    let h = spec.hbar();
    let mut entries = Vec::with_capacity(l_max);
    let mut spacings = Vec::with_capacity(l_max);
    for (i, d) in coeffs.into_iter().enumerate() {
        let l = i + 1;
        let ratio = match opts.energy {
            OrbitEnergy::Level => 1.0,
            OrbitEnergy::Midpoint => wkb::energy_at(spec, n as f64 - 0.5 * l as f64)? / e_n,
        };
        entries.push((l, d * ratio.powf(d_exp)));
        spacings.push(2.0 * PI * h * l as f64 / (orbit.period * ratio.powf(t_exp)));
    }
    Ok(DipoleTable { n, entries, method: DipoleMethod::Semiclassical, potential: *spec, energy: e_n, spacings })
}

/// Table by either route with default options.
pub fn dipole_table(spec: &PotentialSpec, n: usize, l_max: usize, method: DipoleMethod) -> Result<DipoleTable> {
    match method {
        DipoleMethod::Exact => exact_table(spec, n, l_max),
        DipoleMethod::Semiclassical => semiclassical_table(spec, n, l_max, SemiclassicalOptions::default()),
    }
}
