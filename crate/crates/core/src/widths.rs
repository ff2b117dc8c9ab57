//! Zero-temperature golden-rule widths for a system linearly coupled to a
//! harmonic bath, and oscillator-strength sums.

use crate::dipole::{self, DipoleMethod, DipoleTable, SemiclassicalOptions};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::tail::{self, TailFit};
use crate::wkb::{self, LevelSpectrum, Quantization};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathKind {
    /// J(ω) = Mγω
    Ohmic,
    /// J(ω) = Mγω / (1 + ω²/ω_c²)
    OhmicDrude { omega_c: f64 },
    /// J(ω) = prefactor · ω^s
    Power { s: f64, prefactor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub kind: BathKind,
    pub gamma: f64,
    /// Mass of the damped particle.
    pub mass: f64,
}

impl BathSpec {
    pub fn new(kind: BathKind, gamma: f64, mass: f64) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(gamma.is_finite() && gamma > 0.0) {
            return bad(format!("gamma must be positive, got {gamma}"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return bad(format!("mass must be positive, got {mass}"));
        }
        match kind {
            BathKind::OhmicDrude { omega_c } if !(omega_c.is_finite() && omega_c > 0.0) => {
                return bad(format!("cutoff must be positive, got {omega_c}"))
            }
            BathKind::Power { s, prefactor } if !(s.is_finite() && prefactor.is_finite() && prefactor >= 0.0) => {
                return bad("power bath needs finite s and a non-negative prefactor".into())
            }
            _ => {}
        }
        Ok(Self { kind, gamma, mass })
    }

    pub fn ohmic(gamma: f64, mass: f64) -> Result<Self> {
        Self::new(BathKind::Ohmic, gamma, mass)
    }
}

/// J(ω) for ω ≥ 0.
pub fn spectral_density(b: &BathSpec, omega: f64) -> Result<f64> {
    if omega.is_nan() || omega < 0.0 {
        return Err(Error::Domain { q: omega, lo: 0.0, hi: f64::INFINITY });
    }
    let ohmic = b.mass * b.gamma * omega;
    Ok(match b.kind {
        BathKind::Ohmic => ohmic,
        BathKind::OhmicDrude { omega_c } => ohmic / (1.0 + (omega / omega_c).powi(2)),
        BathKind::Power { .. } if omega == 0.0 => 0.0,
        BathKind::Power { s, prefactor } => prefactor * omega.powf(s),
    })
}

/// Energy differences for semiclassical tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Whatever the table carries (2πħl/T for semiclassical tables).
    #[default]
    Table,
    /// E_n - E_{n-l} from the level spectrum.
    Spectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub n: usize,
    /// Width including the tail estimate.
    pub gamma_n: f64,
    /// Sum over the tabulated transitions only.
    pub raw: f64,
    /// Extrapolated contribution of untabulated transitions.
    pub tail: f64,
    /// (l, ΔΓ) for the transition n → n − l.
    pub contributions: Vec<(usize, f64)>,
    /// (m, f_{n→m}) for the tabulated downward transitions.
    pub f_list: Vec<(usize, f64)>,
    pub trk_partial: f64,
    pub tail_fit: Option<TailFit>,
}

/// Γ_n = (2/ħ) Σ_{m<n} |d_nm|² J((E_n - E_m)/ħ).
pub fn golden_rule_width(
    spectrum: &LevelSpectrum,
    dip: &DipoleTable,
    bath: &BathSpec,
    n: usize,
    spacing: Spacing,
) -> Result<WidthReport> {
    let spec = &spectrum.potential;
    let (mass, h) = (spec.mass(), spec.hbar());
    if n == 0 {
        return Ok(WidthReport {
            n,
            gamma_n: 0.0,
            raw: 0.0,
            tail: 0.0,
            contributions: Vec::new(),
            f_list: Vec::new(),
            trk_partial: 0.0,
            tail_fit: None,
        });
    }
    if dip.n != n {
        return Err(Error::InvalidParameter(format!("dipole table is for n = {}, width requested for n = {n}", dip.n)));
    }
    for (i, &(l, _)) in dip.entries.iter().enumerate() {
        if l != i + 1 {
            return Err(Error::Coverage(i + 1));
        }
    }
    let covered = dip.entries.len().min(n);
    if covered < n && dip.method == DipoleMethod::Exact {
        return Err(Error::Coverage(covered + 1));
    }
    let use_spectrum = dip.method == DipoleMethod::Exact || spacing == Spacing::Spectrum;
    let e_n = if use_spectrum { spectrum.energy(n).ok_or(Error::Coverage(0))? } else { dip.energy };
    let mut contributions = Vec::with_capacity(covered);
    let mut f_list = Vec::with_capacity(covered);
    for (i, &(l, d)) in dip.entries.iter().take(covered).enumerate() {
        let de = if use_spectrum {
            e_n - spectrum.energy(n - l).ok_or(Error::Coverage(l))?
        } else {
            dip.spacings[i]
        };
        contributions.push((l, 2.0 / h * d * d * spectral_density(bath, de / h)?));
        f_list.push((n - l, -2.0 * mass / (h * h) * de * d * d));
    }
    let raw: f64 = contributions.iter().map(|c| c.1).sum();
    let trk_partial = f_list.iter().map(|f| f.1).sum();
    let (tail, tail_fit) = if covered < n {
        let fit = tail::fit_power_tail(&contributions)?;
        let step = if tail::odd_only(&contributions) { 2 } else { 1 };
        let first = if step == 2 && covered % 2 == 1 { covered + 2 } else { covered + 1 };
        let sum: f64 = (first..=n).step_by(step).map(|l| fit.value(l)).sum();
        (sum, Some(fit))
    } else {
        (0.0, None)
    };
    Ok(WidthReport { n, gamma_n: raw + tail, raw, tail, contributions, f_list, trk_partial, tail_fit })
}

/// Ohmic specialisation Γ_n = (2Mγ/ħ²) Σ |d_nm|² (E_n - E_m).
pub fn ohmic_width(spectrum: &LevelSpectrum, dip: &DipoleTable, gamma: f64, n: usize) -> Result<WidthReport> {
    let bath = BathSpec::ohmic(gamma, spectrum.potential.mass())?;
    golden_rule_width(spectrum, dip, &bath, n, Spacing::Table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSum {
    pub n: usize,
    /// (m, f_{n→m}), absorption positive.
    pub f_list: Vec<(usize, f64)>,
    pub trk_sum: f64,
    pub m_max: usize,
}

/// f_{n→m} = (2M/ħ²)(E_m - E_n)|d_nm|² over a dipole row (m, d_nm).
pub fn oscillator_strengths(spectrum: &LevelSpectrum, row: &[(usize, f64)], n: usize) -> Result<OscillatorSum> {
    let spec = &spectrum.potential;
    let c = 2.0 * spec.mass() / spec.hbar().powi(2);
    let e_n = spectrum.energy(n).ok_or(Error::Coverage(n))?;
    let mut f_list = Vec::with_capacity(row.len());
    for &(m, d) in row {
        let e_m = spectrum.energy(m).ok_or(Error::Coverage(m))?;
        f_list.push((m, c * (e_m - e_n) * d * d));
    }
    let trk_sum = f_list.iter().map(|f| f.1).sum();
    let m_max = row.iter().map(|r| r.0).max().unwrap_or(0);
    Ok(OscillatorSum { n, f_list, trk_sum, m_max })
}

/// Widths Γ_1..=Γ_levels with exact levels and dipoles, or WKB levels and
/// semiclassical tables truncated at `l_max` (default n) with tail extrapolation.
pub fn width_series(
    spec: &PotentialSpec,
    bath: &BathSpec,
    levels: usize,
    method: DipoleMethod,
    l_max: Option<usize>,
) -> Result<(LevelSpectrum, Vec<WidthReport>)> {
    let how = match method {
        DipoleMethod::Exact => Quantization::Exact,
        DipoleMethod::Semiclassical => Quantization::Wkb,
    };
    let spectrum = wkb::quantize(spec, levels, how)?;
    let reports = (1..=levels)
        .into_par_iter()
        .map(|n| {
            let table = match method {
                DipoleMethod::Exact => dipole::exact_table(spec, n, n)?,
                DipoleMethod::Semiclassical => {
                    dipole::semiclassical_table(spec, n, l_max.unwrap_or(n).min(n), SemiclassicalOptions::default())?
                }
            };
            golden_rule_width(&spectrum, &table, bath, n, Spacing::Table)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((spectrum, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dipole::{self, exact_table, SemiclassicalOptions};
    use crate::potentials::PotentialSpec;
    use crate::special::zeta;
    use crate::wkb::{quantize, Quantization};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn exact_width(spec: &PotentialSpec, n: usize, gamma: f64) -> WidthReport {
        let s = quantize(spec, n, Quantization::Auto).unwrap();
        let d = exact_table(spec, n, n).unwrap();
        ohmic_width(&s, &d, gamma, n).unwrap()
    }

    #[test]
    fn spectral_density_examples() {
        let o = BathSpec::ohmic(0.1, 1.0).unwrap();
        assert_relative_eq!(spectral_density(&o, 2.0).unwrap(), 0.2, max_relative = 1e-15);
        let d = BathSpec::new(BathKind::OhmicDrude { omega_c: 10.0 }, 0.1, 1.0).unwrap();
        assert_relative_eq!(spectral_density(&d, 10.0).unwrap(), 0.5, max_relative = 1e-15);
        let p = BathSpec::new(BathKind::Power { s: 3.0, prefactor: 1.0 }, 0.1, 1.0).unwrap();
        assert_eq!(spectral_density(&p, 0.0).unwrap(), 0.0);
        assert!(spectral_density(&o, -1.0).is_err());
        assert!(BathSpec::ohmic(0.0, 1.0).is_err());
    }

    #[test]
    fn harmonic_widths() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        for n in [1, 3, 17] {
            assert_relative_eq!(exact_width(&h, n, 0.05).gamma_n, 0.05 * n as f64, max_relative = 1e-14);
        }
        let s = quantize(&h, 1, Quantization::Exact).unwrap();
        let d = exact_table(&h, 1, 1).unwrap();
        assert_eq!(ohmic_width(&s, &d, 0.05, 0).unwrap().gamma_n, 0.0);
        // one transition in a cubic bath: (2/ħ)|d_10|² ω³ = 2 · 1/2 · 1
        let s = quantize(&h, 1, Quantization::Exact).unwrap();
        let d = exact_table(&h, 1, 1).unwrap();
        let cubic = BathSpec::new(BathKind::Power { s: 3.0, prefactor: 1.0 }, 0.1, 1.0).unwrap();
        let r = golden_rule_width(&s, &d, &cubic, 1, Spacing::Table).unwrap();
        assert_relative_eq!(r.gamma_n, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn route_consistency_and_linearity() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        let s = quantize(&b, 30, Quantization::Exact).unwrap();
        let d = exact_table(&b, 30, 30).unwrap();
        let o = ohmic_width(&s, &d, 0.01, 30).unwrap();
        let g = golden_rule_width(&s, &d, &BathSpec::ohmic(0.01, 1.0).unwrap(), 30, Spacing::Table).unwrap();
        assert_eq!(o.gamma_n.to_bits(), g.gamma_n.to_bits());
        let o2 = ohmic_width(&s, &d, 0.02, 30).unwrap();
        assert_eq!(o2.gamma_n, 2.0 * o.gamma_n);
        assert!(o.contributions.iter().all(|c| c.1 >= 0.0));
    }

    #[test]
    fn box_width_approaches_asymptote() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        let r = exact_width(&b, 100, 1.0).gamma_n / 100.0;
        // high-precision sum of the closed-form box dipoles
        assert_relative_eq!(r, 0.855_955_390_454_059, max_relative = 1e-12);
        let asym = 7.0 / (PI * PI) * zeta(3.0);
        assert!((r / asym - 1.0).abs() < 0.005);
    }

    #[test]
    fn half_oscillator_width() {
        let hh = PotentialSpec::half_harmonic(1.0).unwrap();
        let r = exact_width(&hh, 100, 1.0).gamma_n / 100.0;
        assert!((r / (8.0 / (PI * PI)) - 1.0).abs() < 0.005, "{r}");
    }

    #[test]
    fn missing_exact_entries_are_a_coverage_error() {
        let b = PotentialSpec::box_well(1.0).unwrap();
        let s = quantize(&b, 10, Quantization::Exact).unwrap();
        let d = exact_table(&b, 10, 4).unwrap();
        assert_eq!(ohmic_width(&s, &d, 0.1, 10), Err(Error::Coverage(5)));
    }

    #[test]
    fn truncated_semiclassical_tables_are_extrapolated() {
        let c = PotentialSpec::coulomb(1.0).unwrap();
        let s = quantize(&c, 400, Quantization::Exact).unwrap();
        let opts = SemiclassicalOptions::default();
        let full = dipole::semiclassical_table(&c, 400, 400, opts).unwrap();
        let part = dipole::semiclassical_table(&c, 400, 40, opts).unwrap();
        let wf = ohmic_width(&s, &full, 1.0, 400).unwrap();
        let wp = ohmic_width(&s, &part, 1.0, 400).unwrap();
        assert!(wp.tail > 0.0);
        let (ext, raw) = (wp.gamma_n / wf.gamma_n - 1.0, wp.raw / wf.gamma_n - 1.0);
        assert!(ext.abs() < 0.2 * raw.abs(), "{ext} {raw}");
    }

    #[test]
    fn trk_sums() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let s = quantize(&h, 7, Quantization::Exact).unwrap();
        let row = dipole::exact_dipole_row(&h, 5, 7).unwrap();
        assert_relative_eq!(oscillator_strengths(&s, &row, 5).unwrap().trk_sum, 1.0, max_relative = 1e-14);

        let b = PotentialSpec::box_well(1.0).unwrap();
        let s = quantize(&b, 400, Quantization::Exact).unwrap();
        let row = dipole::exact_dipole_row(&b, 10, 400).unwrap();
        let sum = oscillator_strengths(&s, &row, 10).unwrap();
        assert_eq!(sum.m_max, 400);
        assert!((sum.trk_sum - 1.0).abs() < 1e-3);

        let c = PotentialSpec::coulomb(1.0).unwrap();
        let s = quantize(&c, 120, Quantization::Exact).unwrap();
        let row = dipole::exact_dipole_row(&c, 5, 120).unwrap();
        let sum = oscillator_strengths(&s, &row, 5).unwrap();
        assert!(sum.trk_sum < 1.0 && sum.trk_sum > 0.0, "{}", sum.trk_sum);
    }

    #[test]
    fn series_matches_single_widths() {
        let h = PotentialSpec::half_harmonic(1.0).unwrap();
        let bath = BathSpec::ohmic(0.1, 1.0).unwrap();
        let (_, ex) = width_series(&h, &bath, 6, DipoleMethod::Exact, None).unwrap();
        assert_eq!(ex.len(), 6);
        assert_eq!(ex[5].gamma_n, exact_width(&h, 6, 0.1).gamma_n);
        let (s, sc) = width_series(&h, &bath, 70, DipoleMethod::Semiclassical, Some(40)).unwrap();
        assert_eq!(s.method, crate::wkb::SpectrumMethod::Wkb);
        assert_eq!(sc[39].tail, 0.0);
        assert!(sc[69].tail > 0.0);
        assert!((sc[69].gamma_n / exact_width(&h, 70, 0.1).gamma_n - 1.0).abs() < 0.01);
        assert!(matches!(width_series(&h, &bath, 6, DipoleMethod::Semiclassical, Some(3)), Err(Error::TailFit(_))));
    }
}
