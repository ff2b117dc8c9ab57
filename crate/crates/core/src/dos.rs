//! Density of states of a harmonic oscillator with Drude-regularised ohmic
//! damping, from its partition function by numerical Laplace inversion.
//!
//! Units: ħ = 1, so energies and frequencies coincide and β is an inverse energy.

use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta, ln_gamma_complex};
use crate::wkb::LevelSpectrum;
use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default Drude cutoff in units of ω0.
pub const DEFAULT_CUTOFF: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedOscillator {
    pub omega0: f64,
    pub gamma: f64,
    pub omega_c: f64,
}

impl DampedOscillator {
    pub fn new(omega0: f64, gamma: f64, omega_c: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(omega0) || !ok(omega_c) || !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need omega0 > 0, omega_c > 0, gamma ≥ 0 (got {omega0}, {omega_c}, {gamma})"
            )));
        }
        if gamma >= 2.0 * omega0 {
            return Err(Error::InvalidParameter("only the underdamped regime gamma < 2 omega0 is supported".into()));
        }
        Ok(Self { omega0, gamma, omega_c })
    }

    /// λ_j with (ν + ω_c)(ν² + ω0²) + γω_cν = Π_j (ν + λ_j).
    pub fn damping_roots(&self) -> [Complex64; 3] {
        let (w0, g, wc) = (self.omega0, self.gamma, self.omega_c);
        // ν³ + ω_c ν² + (ω0² + γω_c) ν + ω0² ω_c
        let (c2, c1, c0) = (wc, w0 * w0 + g * wc, w0 * w0 * wc);
        let companion = Matrix3::new(0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2);
        let ev = companion.complex_eigenvalues();
        let poly = |z: Complex64| ((z + c2) * z + c1) * z + c0;
        let dpoly = |z: Complex64| (3.0 * z + 2.0 * c2) * z + c1;
        let mut roots = [Complex64::new(0.0, 0.0); 3];
        for (r, z0) in roots.iter_mut().zip(ev.iter()) {
            let mut z = *z0;
            for _ in 0..4 {
                z -= poly(z) / dpoly(z);
            }
            *r = -z;
        }
        roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        roots
    }

    /// Angle between the imaginary axis and the nearest ray of poles of Z(β).
    pub fn pole_gap(&self) -> f64 {
        self.damping_roots()
            .iter()
            .filter(|l| l.im != 0.0)
            .map(|l| (l.re / l.im.abs()).atan())
            .fold(PI / 2.0, f64::min)
    }
}

const SERIES_ORDER: usize = 16;

/// Coefficients of ln(1 + γ̂(ν)/ν + ω0²/ν²) as a power series in 1/ν.
fn log_factor_series(osc: &DampedOscillator) -> [f64; SERIES_ORDER + 1] {
    let (w0, g, wc) = (osc.omega0, osc.gamma, osc.omega_c);
    let k = SERIES_ORDER;
    let mut x = [0.0; SERIES_ORDER + 1];
    x[2] = w0 * w0 + g * wc;
    let mut p = g * wc;
    for c in x.iter_mut().skip(3) {
        p *= -wc;
        *c = p;
    }
    let mut out = [0.0; SERIES_ORDER + 1];
    let mut pow = x;
    for m in 1..=k / 2 {
        let s = if m % 2 == 1 { 1.0 } else { -1.0 } / m as f64;
        for (o, v) in out.iter_mut().zip(&pow) {
            *o += s * v;
        }
        let mut next = [0.0; SERIES_ORDER + 1];
        for i in 0..=k {
            if pow[i] == 0.0 {
                continue;
            }
            for j in 2..=k - i {
                next[i + j] += pow[i] * x[j];
            }
        }
        pow = next;
    }
    out
}

fn ln_factor(osc: &DampedOscillator, nu: f64) -> f64 {
    let ghat = osc.gamma * osc.omega_c / (osc.omega_c + nu);
    (ghat / nu + (osc.omega0 / nu).powi(2)).ln_1p()
}

/// ln Z from the Matsubara product.
///
/// With `n_terms` the product is truncated there with no remainder; otherwise
/// enough terms are taken for the 1/ν series of the remaining factors to
/// converge and that remainder is added through Hurwitz zeta sums.
pub fn ln_partition_function(osc: &DampedOscillator, beta: f64, n_terms: Option<usize>) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let x = 2.0 * PI / beta;
    let head = -(beta * osc.omega0).ln();
    if let Some(n) = n_terms {
        let s: f64 = (1..=n).map(|k| ln_factor(osc, k as f64 * x)).sum();
        return Ok(head - s);
    }
    let scale = osc.omega_c.max(osc.omega0).max(osc.gamma);
    let n = ((20.0 * scale / x).ceil() as usize).max(64);
    let s: f64 = (1..=n).map(|k| ln_factor(osc, k as f64 * x)).sum();
    let coeffs = log_factor_series(osc);
    let inv = 1.0 / x;
    let mut tail = 0.0;
    for (k, c) in coeffs.iter().enumerate().skip(2) {
        if *c != 0.0 {
            tail += c * inv.powi(k as i32) * hurwitz_zeta(k as f64, (n + 1) as f64);
        }
    }
    Ok(head - s - tail)
}

pub fn partition_function(osc: &DampedOscillator, beta: f64, n_terms: Option<usize>) -> Result<f64> {
    Ok(ln_partition_function(osc, beta, n_terms)?.exp())
}

/// ln Z at complex β from Z = Π_j Γ(1 + βλ_j/2π) / (βω0 Γ(1 + βω_c/2π)).
pub fn ln_partition_complex(osc: &DampedOscillator, beta: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let s = beta / (2.0 * PI);
    let mut acc = -(beta * osc.omega0).ln() - ln_gamma_complex(one + s * osc.omega_c);
    for l in osc.damping_roots() {
        acc += ln_gamma_complex(one + s * l);
    }
    acc
}

/// E_g = lim −ln Z/β from Stirling's formula applied to the closed form.
pub fn ground_energy_exact(osc: &DampedOscillator) -> f64 {
    let s: Complex64 = osc.damping_roots().iter().map(|l| l * l.ln()).sum();
    -(s.re - osc.omega_c * osc.omega_c.ln()) / (2.0 * PI)
}

/// E_g from a least-squares fit of −ln Z = βE_g + a + b/β + c/β³ over β ∈ [β_lo, β_hi].
pub fn ground_energy(osc: &DampedOscillator, beta_lo: f64, beta_hi: f64) -> Result<f64> {
    let pts = 41;
    let mut a = DMatrix::zeros(pts, 4);
    let mut y = DVector::zeros(pts);
    for i in 0..pts {
        let b = beta_lo + (beta_hi - beta_lo) * i as f64 / (pts - 1) as f64;
        a[(i, 0)] = b;
        a[(i, 1)] = 1.0;
        a[(i, 2)] = 1.0 / b;
        a[(i, 3)] = b.powi(-3);
        y[i] = -ln_partition_function(osc, b, None)?;
    }
    let sol = a.svd(true, true).solve(&y, 1e-14).map_err(|e| Error::TailFit(e.to_string()))?;
    Ok(sol[0])
}

/// β window (units 1/ω0) of the ground-energy fit.
pub const GROUND_FIT: (f64, f64) = (20.0, 40.0);

/// Settings for the hyperbolic-contour trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourOptions {
    /// Nodes on each side of the real axis.
    pub half_nodes: usize,
    /// Contour parameter range u ∈ [−u_max, u_max].
    pub u_max: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { half_nodes: 1600, u_max: 7.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosCurve {
    /// Energies above the ground state.
    pub energies: Vec<f64>,
    pub rho: Vec<f64>,
    /// |ρ_N − ρ_{N/2}| per point.
    pub error: Vec<f64>,
    pub omega0: f64,
    pub gamma: f64,
    pub omega_c: f64,
    pub ground_energy: f64,
}

impl DosCurve {
    /// Mean of ρ over grid points with lo ≤ E ≤ hi.
    pub fn mean_between(&self, lo: f64, hi: f64) -> Option<f64> {
        let v: Vec<f64> =
            self.energies.iter().zip(&self.rho).filter(|(e, _)| **e >= lo && **e <= hi).map(|(_, r)| *r).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

struct Inverter {
    osc: DampedOscillator,
    eg: f64,
    opts: ContourOptions,
    shift: f64,
}

impl Inverter {
    fn new(osc: &DampedOscillator, opts: ContourOptions) -> Result<Self> {
        let gap = osc.pole_gap();
        if gap <= 1e-3 {
            return Err(Error::IllConditioned { energy: 0.0, error: f64::INFINITY });
        }
        let eg = ground_energy(osc, GROUND_FIT.0, GROUND_FIT.1)?;
        Ok(Self { osc: *osc, eg, opts, shift: (0.5 * gap).min(0.25) })
    }

    /// ρ(E) with the full and half node sets.
    fn rho(&self, e: f64) -> (f64, f64) {
        let n = self.opts.half_nodes;
        let h = self.opts.u_max / n as f64;
        let mu = 1.0 / e;
        let i = Complex64::i();
        let (mut full, mut half) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        // Conjugate symmetry: sum u ≥ 0 and take twice the real part.
        for k in 0..=n {
            let u = k as f64 * h;
            let w = i * u - self.shift;
            let z = mu * (1.0 + w.sin());
            let dz = i * mu * w.cos();
            let f = (ln_partition_complex(&self.osc, z) + z * self.eg).exp() - 1.0;
            let term = f * (z * e).exp() * dz * if k == 0 { 0.5 } else { 1.0 };
            full += term;
            if k % 2 == 0 {
                half += term;
            }
        }
        let scale = |s: Complex64, step: f64| (s * step / (PI * i)).re;
        (scale(full, h), scale(half, 2.0 * h))
    }
}

/// ρ(E) on a grid of energies above the ground state (ground-state delta excluded).
pub fn inverse_laplace_dos(osc: &DampedOscillator, energies: &[f64], opts: ContourOptions) -> Result<DosCurve> {
    if let Some(&bad) = energies.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidParameter(format!("energies must be positive, got {bad}")));
    }
    if osc.gamma >= osc.omega0 {
        return Err(Error::InvalidParameter("the density of states needs gamma < omega0".into()));
    }
    let inv = Inverter::new(osc, opts)?;
    let vals: Vec<(f64, f64)> = energies.par_iter().map(|&e| inv.rho(e)).collect();
    Ok(DosCurve {
        energies: energies.to_vec(),
        rho: vals.iter().map(|v| v.0).collect(),
        error: vals.iter().map(|v| (v.0 - v.1).abs()).collect(),
        omega0: osc.omega0,
        gamma: osc.gamma,
        omega_c: osc.omega_c,
        ground_energy: inv.eg,
    })
}

/// Σ_{n≥1} (Γ_n/2π) / ((E − ε_n)² + Γ_n²/4) with ε_n = E_n − E_0.
pub fn lorentzian_dos(spectrum: &LevelSpectrum, widths: &[f64], energies: &[f64]) -> Result<Vec<f64>> {
    if widths.first().is_some_and(|w| *w != 0.0) {
        return Err(Error::InvalidParameter("the ground state must have zero width".into()));
    }
    let e0 = spectrum.energy(0).ok_or(Error::Coverage(0))?;
    let levels: Vec<(f64, f64)> = spectrum
        .levels
        .iter()
        .zip(widths)
        .skip(1)
        .map(|(&(_, e), &g)| (e - e0, g))
        .collect();
    Ok(energies
        .iter()
        .map(|&e| levels.iter().map(|&(c, g)| g / (2.0 * PI) / ((e - c).powi(2) + 0.25 * g * g)).sum())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    /// Full width at half maximum.
    pub width: f64,
    pub weight: f64,
}

/// Least-squares fit of a linear background plus `n_peaks` Lorentzians
/// (initial centres at 1, 2, …, in units of ω0) to a curve on [lo, hi].
pub fn fit_lorentzian_peaks(curve: &DosCurve, n_peaks: usize, lo: f64, hi: f64) -> Result<Vec<Peak>> {
    let data: Vec<(f64, f64)> =
        curve.energies.iter().zip(&curve.rho).filter(|(e, _)| **e >= lo && **e <= hi).map(|(e, r)| (*e, *r)).collect();
    let np = 2 + 3 * n_peaks;
    if data.len() < 2 * np {
        return Err(Error::PeakFit(format!("{} points for {np} parameters", data.len())));
    }
    let mut p = DVector::zeros(np);
    for k in 0..n_peaks {
        p[2 + 3 * k] = 1.0;
        p[3 + 3 * k] = (k + 1) as f64 * curve.omega0;
        p[4 + 3 * k] = 0.5 * curve.omega0;
    }
    let model = |p: &DVector<f64>, e: f64, jac: Option<&mut [f64]>| -> f64 {
        let mut v = p[0] + p[1] * e;
        let mut jac = jac;
        if let Some(j) = jac.as_deref_mut() {
            j[0] = 1.0;
            j[1] = e;
        }
        for k in 0..n_peaks {
            let (a, c, g) = (p[2 + 3 * k], p[3 + 3 * k], p[4 + 3 * k]);
            let d = (e - c).powi(2) + 0.25 * g * g;
            let l = g / (2.0 * PI * d);
            v += a * l;
            if let Some(j) = jac.as_deref_mut() {
                j[2 + 3 * k] = l;
                j[3 + 3 * k] = a * l * 2.0 * (e - c) / d;
                j[4 + 3 * k] = a * (1.0 / (2.0 * PI * d) - g * 0.5 * g / (2.0 * PI * d * d));
            }
        }
        v
    };
    let m = data.len();
    let residuals = |p: &DVector<f64>| DVector::from_iterator(m, data.iter().map(|&(e, r)| model(p, e, None) - r));
    let mut lambda = 1e-3;
    let mut r = residuals(&p);
    let mut cost = r.norm_squared();
    let mut row = vec![0.0; np];
    for _ in 0..500 {
        let mut j = DMatrix::zeros(m, np);
        for (i, &(e, _)) in data.iter().enumerate() {
            model(&p, e, Some(&mut row));
            for (c, v) in row.iter().enumerate() {
                j[(i, c)] = *v;
            }
        }
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = a.clone();
            for d in 0..np {
                damped[(d, d)] += lambda * a[(d, d)].max(1e-12);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &p + &step;
            let rt = residuals(&trial);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct < cost {
                let rel = (cost - ct) / cost;
                let small = step.norm() < 1e-10 * (1.0 + p.norm());
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-10 || small {
                    return Ok(collect_peaks(&p, n_peaks));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return Ok(collect_peaks(&p, n_peaks));
        }
    }
    Err(Error::PeakFit("Levenberg-Marquardt did not settle in 500 iterations".into()))
}

fn collect_peaks(p: &DVector<f64>, n: usize) -> Vec<Peak> {
    (0..n).map(|k| Peak { weight: p[2 + 3 * k], center: p[3 + 3 * k], width: p[4 + 3 * k].abs() }).collect()
}

/// ∫ρ(E)e^{−βE} dE + 1 over [0, e_max] with the remainder beyond e_max taken as ρ ≈ 1/ω0.
pub fn forward_laplace(osc: &DampedOscillator, beta: &[f64], e_max: f64, opts: ContourOptions) -> Result<Vec<f64>> {
    let panel = 0.5 * osc.omega0;
    let panels = (e_max / panel).ceil() as usize;
    let rule = crate::quad::GaussLegendre::g16();
    let mut nodes = Vec::with_capacity(panels * 16);
    for k in 0..panels {
        nodes.extend(rule.mapped(k as f64 * panel, (k + 1) as f64 * panel));
    }
    let es: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let curve = inverse_laplace_dos(osc, &es, opts)?;
    let top = panels as f64 * panel;
    Ok(beta
        .iter()
        .map(|&b| {
            let body: f64 = nodes.iter().zip(&curve.rho).map(|(&(e, w), r)| w * r * (-b * e).exp()).sum();
            1.0 + body + (-b * top).exp() / (b * osc.omega0)
        })
        .collect())
}

/// Z(β)e^{βE_g}.
pub fn shifted_partition_function(osc: &DampedOscillator, beta: f64, ground_energy: f64) -> Result<f64> {
    Ok((ln_partition_function(osc, beta, None)? + beta * ground_energy).exp())
}

/// 1/(2 sinh(βω0/2)).
pub fn undamped_partition_function(omega0: f64, beta: f64) -> f64 {
    0.5 / (0.5 * beta * omega0).sinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig() -> DampedOscillator {
        DampedOscillator::new(1.0, 0.2, DEFAULT_CUTOFF).unwrap()
    }

    #[test]
    fn undamped_limit() {
        let osc = DampedOscillator::new(1.0, 0.0, 50.0).unwrap();
        for b in [0.3, 1.0, 4.0, 30.0] {
            let z = partition_function(&osc, b, None).unwrap();
            assert_relative_eq!(z, undamped_partition_function(1.0, b), max_relative = 1e-8);
        }
        assert_relative_eq!(ground_energy_exact(&osc), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn high_temperature_limit() {
        let z = partition_function(&fig(), 1e-4, None).unwrap();
        assert_relative_eq!(1e-4 * z, 1.0, max_relative = 1e-3);
    }

    #[test]
    fn product_converges_to_extrapolated_value() {
        // Doubling oracle: the plain product error falls as 1/N; Richardson on N, 2N.
        let osc = fig();
        let z = partition_function(&osc, 1.0, None).unwrap();
        let n = 1 << 20;
        let a = partition_function(&osc, 1.0, Some(n)).unwrap();
        let b = partition_function(&osc, 1.0, Some(2 * n)).unwrap();
        assert_relative_eq!(2.0 * b - a, z, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_matches_product() {
        let osc = fig();
        for b in [0.5, 1.0, 3.0, 20.0, 40.0] {
            let p = ln_partition_function(&osc, b, None).unwrap();
            let c = ln_partition_complex(&osc, Complex64::new(b, 0.0));
            assert!((p - c.re).abs() < 1e-10 * p.abs().max(1.0), "β = {b}: {p} vs {c}");
            assert!(c.im.abs() < 1e-9);
        }
    }

    #[test]
    fn damping_roots_and_ground_energy() {
        let osc = fig();
        let r = osc.damping_roots();
        let s: Complex64 = r.iter().sum();
        let p: Complex64 = r.iter().product();
        assert_relative_eq!(s.re, 50.0, max_relative = 1e-12);
        assert_relative_eq!(p.re, 50.0, max_relative = 1e-12);
        assert_relative_eq!(ground_energy_exact(&osc), 0.623_441, max_relative = 1e-5);
        assert_relative_eq!(ground_energy(&osc, 20.0, 40.0).unwrap(), ground_energy_exact(&osc), max_relative = 1e-6);
    }

    #[test]
    fn dos_values() {
        let osc = fig();
        let c = inverse_laplace_dos(&osc, &[1.0, 2.0, 10.0, 20.0], ContourOptions::default()).unwrap();
        assert_relative_eq!(c.rho[0], 3.294_83, max_relative = 1e-5);
        assert_relative_eq!(c.rho[1], 1.802_06, max_relative = 1e-5);
        assert_relative_eq!(c.rho[3], 1.000_327, max_relative = 1e-5);
        assert!(c.error.iter().all(|e| *e < 1e-9));
    }

    #[test]
    fn round_trip_and_peaks() {
        let osc = fig();
        let bs = [0.5, 1.5, 3.0];
        let fwd = forward_laplace(&osc, &bs, 60.0, ContourOptions::default()).unwrap();
        let eg = ground_energy(&osc, GROUND_FIT.0, GROUND_FIT.1).unwrap();
        for (b, f) in bs.iter().zip(&fwd) {
            assert_relative_eq!(*f, shifted_partition_function(&osc, *b, eg).unwrap(), max_relative = 1e-6);
        }
        let es: Vec<f64> = (50..=850).map(|i| i as f64 * 0.01).collect();
        let c = inverse_laplace_dos(&osc, &es, ContourOptions::default()).unwrap();
        let peaks = fit_lorentzian_peaks(&c, 10, 0.5, 8.5).unwrap();
        for (k, p) in peaks.iter().take(5).enumerate() {
            let n = (k + 1) as f64;
            assert!((p.center - n).abs() < osc.gamma, "{p:?}");
            assert!((p.width / (n * osc.gamma) - 1.0).abs() < 0.05, "{p:?}");
        }
    }

    #[test]
    fn rejects_overdamped_inversion() {
        let osc = DampedOscillator::new(1.0, 1.2, 50.0).unwrap();
        assert!(matches!(inverse_laplace_dos(&osc, &[1.0], ContourOptions::default()), Err(Error::InvalidParameter(_))));
        assert!(DampedOscillator::new(1.0, 2.0, 50.0).is_err());
    }

    #[test]
    fn lorentzian_model() {
        let h = crate::PotentialSpec::harmonic(1.0).unwrap();
        let s = crate::wkb::quantize(&h, 1, crate::wkb::Quantization::Exact).unwrap();
        let r = lorentzian_dos(&s, &[0.0, 0.1], &[1.0]).unwrap();
        assert_relative_eq!(r[0], 2.0 / (PI * 0.1), max_relative = 1e-14);
        assert!(lorentzian_dos(&s, &[0.1, 0.1], &[1.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn partition_function_decreases(b in 0.2f64..10.0, w in 0.5f64..3.0, db in 0.01f64..1.0) {
            let osc = DampedOscillator::new(w, 0.1, 50.0).unwrap();
            let z1 = partition_function(&osc, b, None).unwrap();
            prop_assert!(partition_function(&osc, b + db, None).unwrap() < z1);
            let stiffer = DampedOscillator::new(w + db, 0.1, 50.0).unwrap();
            prop_assert!(partition_function(&stiffer, b, None).unwrap() < z1);
        }
    }
}
