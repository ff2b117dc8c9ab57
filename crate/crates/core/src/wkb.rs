//! Energy levels from exact formulas or the WKB action condition, and the
//! semiclassical wavefunction.

use crate::classical::{self, Chart};
use crate::error::{Error, Result};
use crate::potentials::{Family, PotentialSpec, Shape};
use crate::roots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    ExactAnalytic,
    Wkb,
}

/// Which route `quantize` should take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantization {
    /// Exact levels for the analytic families, WKB otherwise.
    #[default]
    Auto,
    Exact,
    Wkb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpectrum {
    /// (n, E_n), n = 0..=n_max.
    pub levels: Vec<(usize, f64)>,
    pub nu: f64,
    pub method: SpectrumMethod,
    pub potential: PotentialSpec,
}

impl LevelSpectrum {
    pub fn energy(&self, n: usize) -> Option<f64> {
        self.levels.get(n).map(|&(_, e)| e)
    }

    pub fn n_max(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }
}

/// Offset ν in S(E_n) = 2πħ(n + ν): 1/4 per smooth turning point, 1/2 per wall.
pub fn maslov_offset(spec: &PotentialSpec) -> f64 {
    0.25 * spec.smooth_turning_count() as f64 + 0.5 * spec.wall_count() as f64
}

/// Closed-form levels for the analytic families.
pub fn exact_energy(spec: &PotentialSpec, n: usize) -> Result<f64> {
    let (m, h) = (spec.mass(), spec.hbar());
    let nf = n as f64;
    Ok(match spec.family() {
        Family::Box { length } => h * h * PI * PI * (nf + 1.0).powi(2) / (2.0 * m * length * length),
        Family::Harmonic { omega } => h * omega * (nf + 0.5),
        // odd states of the full oscillator
        Family::HalfHarmonic { omega } => h * omega * (2.0 * nf + 1.5),
        Family::Coulomb { strength } => -m * strength * strength / (2.0 * h * h * (nf + 1.0).powi(2)),
        Family::PowerLaw { .. } => {
            return Err(Error::Unsupported("no closed-form spectrum for a generic power law".into()))
        }
    })
}

/// Solves S(E) = 2πħ(n + ν) for E.
pub fn wkb_energy(spec: &PotentialSpec, n: usize) -> Result<f64> {
    let target = 2.0 * PI * spec.hbar() * (n as f64 + maslov_offset(spec));
    // S(E) is a power of |E|; one evaluation at |E| = 1 gives the starting point.
    let (sign, exponent) = match spec.shape() {
        Shape::Box { .. } => (1.0, 0.5),
        Shape::Power { alpha, .. } => (alpha.signum(), (2.0 + alpha) / (2.0 * alpha)),
    };
    let s1 = classical::action(spec, sign)?;
    let x0 = (target / s1).ln() / exponent;
    let f = |x: f64| -> f64 {
        match classical::action(spec, sign * x.exp()) {
            Ok(s) => (s / target).ln(),
            Err(_) => f64::NAN,
        }
    };
    let (mut lo, mut hi) = (x0 - 0.05, x0 + 0.05);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    for _ in 0..60 {
        if flo.is_finite() && fhi.is_finite() && flo.signum() != fhi.signum() {
            break;
        }
        let w = hi - lo;
        lo -= w;
        hi += w;
        flo = f(lo);
        fhi = f(hi);
    }
    let quant_err = |reason: &str| Error::Quantization { n, reason: reason.into() };
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(quant_err("energy window exhausted without a sign change"));
    }
    let x = roots::bracketed(f, lo, hi, 1e-14).ok_or_else(|| quant_err("root not bracketed"))?;
    Ok(sign * x.exp())
}

/// Level energy continued to a real quantum number x.
///
/// Closed forms for the analytic families; for a generic power law the WKB
/// condition S(E) = 2πħ(x + ν), which S ∝ |E|^{(2+α)/2α} makes explicit.
pub fn energy_at(spec: &PotentialSpec, x: f64) -> Result<f64> {
    let nu = maslov_offset(spec);
    if (x + nu).is_nan() || x + nu <= 0.0 {
        return Err(Error::InvalidParameter(format!("quantum number {x} below the ground state")));
    }
    let (m, h) = (spec.mass(), spec.hbar());
    Ok(match spec.family() {
        Family::Box { length } => h * h * PI * PI * (x + 1.0).powi(2) / (2.0 * m * length * length),
        Family::Harmonic { omega } => h * omega * (x + 0.5),
        Family::HalfHarmonic { omega } => h * omega * (2.0 * x + 1.5),
        Family::Coulomb { strength } => -m * strength * strength / (2.0 * h * h * (x + 1.0).powi(2)),
        Family::PowerLaw { alpha, .. } => {
            let sign = alpha.signum();
            let s1 = classical::action(spec, sign)?;
            sign * (2.0 * PI * h * (x + nu) / s1).powf(2.0 * alpha / (2.0 + alpha))
        }
    })
}

/// Energy of level n: exact for the analytic families, WKB otherwise.
pub fn level_energy(spec: &PotentialSpec, n: usize) -> Result<f64> {
    if spec.is_analytic() {
        exact_energy(spec, n)
    } else {
        wkb_energy(spec, n)
    }
}

/// Energies E_0..=E_{n_max}.
pub fn quantize(spec: &PotentialSpec, n_max: usize, how: Quantization) -> Result<LevelSpectrum> {
    let method = match how {
        Quantization::Exact if !spec.is_analytic() => {
            return Err(Error::Unsupported("exact spectrum requested for a generic power law".into()))
        }
        Quantization::Exact => SpectrumMethod::ExactAnalytic,
        Quantization::Auto if spec.is_analytic() => SpectrumMethod::ExactAnalytic,
        _ => SpectrumMethod::Wkb,
    };
    let energies: Result<Vec<f64>> = (0..=n_max)
        .into_par_iter()
        .map(|n| match method {
            SpectrumMethod::ExactAnalytic => exact_energy(spec, n),
            SpectrumMethod::Wkb => wkb_energy(spec, n),
        })
        .collect();
    let levels: Vec<(usize, f64)> = energies?.into_iter().enumerate().collect();
    Ok(LevelSpectrum { levels, nu: maslov_offset(spec), method, potential: *spec })
}

/// E_{n+l} - E_n estimated as 2πħl / T(E).
pub fn level_spacing(spec: &PotentialSpec, energy: f64, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    Ok(2.0 * PI * spec.hbar() * l as f64 / classical::period(spec, energy)?)
}

/// Semiclassical eigenfunction at a fixed energy.
#[derive(Debug, Clone)]
pub struct WkbWavefunction {
    spec: PotentialSpec,
    chart: Chart,
    period: f64,
    phase0: f64,
    /// (turning point, Airy half-width) for each smooth turning point.
    airy: Vec<(f64, f64)>,
}

impl WkbWavefunction {
    pub fn new(spec: &PotentialSpec, energy: f64) -> Result<Self> {
        let chart = Chart::new(spec, energy)?;
        let (q1, q2) = chart.turning_points();
        let period = classical::period(spec, energy)?;
        let phase0 = if spec.left_wall() { FRAC_PI_2 } else { FRAC_PI_4 };
        let scale = |q: f64| (spec.hbar().powi(2) / (spec.mass() * spec.derivative(q).abs())).cbrt();
        let mut airy = Vec::new();
        if !spec.left_wall() {
            airy.push((q1, scale(q1)));
        }
        if !spec.right_wall() {
            airy.push((q2, scale(q2)));
        }
        Ok(Self { spec: *spec, chart, period, phase0, airy })
    }

    pub fn airy_zones(&self) -> &[(f64, f64)] {
        &self.airy
    }

    /// ψ(q), refusing points inside an Airy zone.
    pub fn value(&self, q: f64) -> Result<f64> {
        for &(qt, w) in &self.airy {
            if (q - qt).abs() < w {
                return Err(Error::AiryZone { q, width: w });
            }
        }
        self.value_unchecked(q)
    }

    /// ψ(q) without the Airy-zone check; diverges at smooth turning points.
    pub fn value_unchecked(&self, q: f64) -> Result<f64> {
        let e = self.chart.energy();
        let s = classical::partial_action(&self.spec, e, q)?;
        let p = self.chart.momentum(self.chart.theta_of(q));
        let amp = (4.0 * self.spec.mass() / (self.period * p)).sqrt();
        Ok(amp * (s / self.spec.hbar() - self.phase0).cos())
    }
}

/// One-shot semiclassical wavefunction value.
pub fn wavefunction(spec: &PotentialSpec, energy: f64, q: f64) -> Result<f64> {
    WkbWavefunction::new(spec, energy)?.value(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{self, Tolerance};
    use crate::special::ln_factorial;
    use approx::assert_relative_eq;

    #[test]
    fn exact_level_examples() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        assert_relative_eq!(exact_energy(&b, 0).unwrap(), PI * PI / 2.0, max_relative = 1e-15);
        let c = PotentialSpec::coulomb(1.0).unwrap();
        assert_relative_eq!(exact_energy(&c, 1).unwrap(), -0.125, max_relative = 1e-15);
        let p = PotentialSpec::power_law(1.0, 4.0, false).unwrap();
        assert!(matches!(quantize(&p, 3, Quantization::Exact), Err(Error::Unsupported(_))));
    }

    #[test]
    fn wkb_is_exact_for_box_and_oscillator() {
        let p = PotentialSpec::power_law(0.5, 2.0, false).unwrap();
        assert_relative_eq!(wkb_energy(&p, 7).unwrap(), 7.5, max_relative = 1e-12);
        let b = PotentialSpec::box_well(1.3).unwrap().with_mass(2.0).unwrap();
        for n in [0, 5, 40] {
            assert_relative_eq!(wkb_energy(&b, n).unwrap(), exact_energy(&b, n).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn wkb_coulomb_has_three_quarter_offset() {
        let c = PotentialSpec::coulomb(1.0).unwrap();
        let e = wkb_energy(&c, 30).unwrap();
        assert_relative_eq!(e, -0.5 / 30.75f64.powi(2), max_relative = 1e-11);
        let s = classical::action(&c, e).unwrap();
        assert!((s - 2.0 * PI * 30.75).abs() <= 1e-10 * 2.0 * PI);
    }

    #[test]
    fn continued_energies_interpolate_levels() {
        let p = PotentialSpec::power_law(2.0, 3.0, true).unwrap();
        for n in [0, 7, 30] {
            assert_relative_eq!(energy_at(&p, n as f64).unwrap(), wkb_energy(&p, n).unwrap(), max_relative = 1e-12);
        }
        let h = PotentialSpec::harmonic(1.0).unwrap();
        assert_relative_eq!(energy_at(&h, 9.5).unwrap(), 10.0, max_relative = 1e-15);
        assert!(energy_at(&h, -0.6).is_err());
    }

    #[test]
    fn spectrum_is_increasing() {
        let p = PotentialSpec::power_law(-1.0, -0.5, true).unwrap();
        let s = quantize(&p, 20, Quantization::Auto).unwrap();
        assert_eq!(s.method, SpectrumMethod::Wkb);
        assert_eq!(s.nu, 0.75);
        assert!(s.levels.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn level_spacing_examples() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        assert_relative_eq!(level_spacing(&h, 3.3, 1).unwrap(), 1.0, max_relative = 1e-12);
        let c = PotentialSpec::coulomb(1.0).unwrap();
        assert_relative_eq!(level_spacing(&c, -0.5e-4, 1).unwrap(), 1e-6, max_relative = 1e-11);
        let b = PotentialSpec::box_well(1.0).unwrap();
        let e19 = exact_energy(&b, 19).unwrap();
        assert_relative_eq!(level_spacing(&b, e19, 1).unwrap(), PI * PI * 20.0, max_relative = 1e-12);
    }

    #[test]
    fn box_wavefunction_is_exact() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        let n = 4;
        let w = WkbWavefunction::new(&b, exact_energy(&b, n).unwrap()).unwrap();
        assert!(w.airy_zones().is_empty());
        for q in [0.01, 0.3, 0.77] {
            let exact = 2f64.sqrt() * ((n + 1) as f64 * PI * q).sin();
            assert!((w.value(q).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_wavefunction_at_origin() {
        // ψ_{2k}(0) = π^{-1/4} (2k)! / (k! sqrt(2^{2k} (2k)!)) (-1)^k
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let n = 20u64;
        let k = n / 2;
        let ln = -0.25 * PI.ln() + ln_factorial(n) - ln_factorial(k) - 0.5 * (n as f64 * 2f64.ln() + ln_factorial(n));
        let exact = ln.exp();
        let v = wavefunction(&h, n as f64 + 0.5, 0.0).unwrap();
        assert!((v / exact - 1.0).abs() < 0.02, "{v} vs {exact}");
        assert!(matches!(wavefunction(&h, 20.5, 6.4), Err(Error::AiryZone { .. })));
    }

    fn density_integral(spec: &PotentialSpec, n: usize) -> (f64, f64) {
        let e = quantize(spec, n, Quantization::Wkb).unwrap().energy(n).unwrap();
        let w = WkbWavefunction::new(spec, e).unwrap();
        let chart = Chart::new(spec, e).unwrap();
        // |ψ|² dq = (4/T) (M/p) dq cos²(…): integrate in the chart variable.
        let f = |th: f64| {
            let s = classical::partial_action(spec, e, chart.q(th)).unwrap();
            4.0 / w.period * chart.time_density(th) * (s - w.phase0).cos().powi(2)
        };
        let full = quad::integrate(f, &chart.breaks(), Tolerance::rel(1e-9)).unwrap().value;
        // cos² replaced by its mean 1/2
        let smooth = quad::integrate(|th| 2.0 / w.period * chart.time_density(th), &chart.breaks(), Tolerance::rel(1e-12));
        (full, smooth.unwrap().value)
    }

    #[test]
    fn wkb_density_normalisation() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        let (full, smooth) = density_integral(&b, 10);
        assert_relative_eq!(full, 1.0, max_relative = 1e-9);
        assert_relative_eq!(smooth, 1.0, max_relative = 1e-12);
        // Smooth turning points add an O(n^{-1/3}) excess: 1.1210 at n = 10, 1.0559 at n = 100.
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let (f10, s10) = density_integral(&h, 10);
        let (f100, _) = density_integral(&h, 100);
        assert_relative_eq!(s10, 1.0, max_relative = 1e-12);
        assert_relative_eq!(f10, 1.121_029_834_858_894, max_relative = 1e-7);
        assert_relative_eq!(f100, 1.055_864_759_351_053, max_relative = 1e-7);
        let c = PotentialSpec::coulomb(1.0).unwrap();
        let (fc, sc) = density_integral(&c, 40);
        assert_relative_eq!(sc, 1.0, max_relative = 1e-12);
        let (fc10, _) = density_integral(&c, 10);
        assert!(fc > 1.0 && fc < fc10, "{fc} {fc10}");
    }
}
