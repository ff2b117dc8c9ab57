//! Periods, actions and sampled trajectories of bounded one-dimensional motion.
//!
//! All phase-space integrals are taken in an angle-like variable θ that maps
//! onto the classically allowed interval and removes the endpoint
//! singularities of 1/p (smooth turning points) and of p (a wall next to a
//! divergent attractive potential).

use crate::error::{Error, Result};
use crate::potentials::{PotentialSpec, Shape};
use crate::quad::{self, GaussLegendre, Panel, Tolerance};
use crate::roots;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Relative tolerance for period and action integrals.
pub const PHASE_SPACE_TOL: f64 = 1e-13;

/// Default number of time samples per period.
pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
enum ChartKind {
    /// q = q2 sin θ, θ ∈ [-π/2, π/2].
    Symmetric,
    /// q = q2 sin θ, θ ∈ [0, π/2], wall at θ = 0.
    WallSine,
    /// q = q2 sin^{2k} θ, θ ∈ [0, π/2], wall at θ = 0 with V → -∞ there.
    WallPower { k: f64 },
    /// q = L θ, θ ∈ [0, 1].
    Linear,
}

/// Parametrisation of the allowed interval at a fixed energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    kind: ChartKind,
    energy: f64,
    mass: f64,
    alpha: f64,
    q1: f64,
    q2: f64,
}

/// ln|sin θ| and |cos θ|, accurate near θ = ±π/2.
fn ln_sin_cos(theta: f64) -> (f64, f64) {
    let a = theta.abs();
    if a > FRAC_PI_4 {
        let d = FRAC_PI_2 - a;
        let s = (0.5 * d).sin();
        ((-2.0 * s * s).ln_1p(), d.sin())
    } else {
        (a.sin().ln(), a.cos())
    }
}

impl Chart {
    pub fn new(spec: &PotentialSpec, energy: f64) -> Result<Self> {
        let (q1, q2) = spec.turning_points(energy)?;
        let (kind, alpha) = match spec.shape() {
            Shape::Box { .. } => (ChartKind::Linear, 0.0),
            Shape::Power { alpha, wall: false, .. } => (ChartKind::Symmetric, alpha),
            Shape::Power { alpha, wall: true, .. } if alpha > 0.0 => (ChartKind::WallSine, alpha),
            // k ≥ 1/(2+α) keeps p dq/dθ bounded at the wall.
            Shape::Power { alpha, .. } => (ChartKind::WallPower { k: (1.0 / (2.0 + alpha)).max(1.0) }, alpha),
        };
        Ok(Self { kind, energy, mass: spec.mass(), alpha, q1, q2 })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn turning_points(&self) -> (f64, f64) {
        (self.q1, self.q2)
    }

    /// θ range and interior breakpoints (the kink of |q|^α at q = 0).
    pub fn breaks(&self) -> Vec<f64> {
        match self.kind {
            ChartKind::Symmetric => vec![-FRAC_PI_2, 0.0, FRAC_PI_2],
            ChartKind::WallSine | ChartKind::WallPower { .. } => vec![0.0, FRAC_PI_2],
            ChartKind::Linear => vec![0.0, 1.0],
        }
    }

    pub fn theta_range(&self) -> (f64, f64) {
        let b = self.breaks();
        (b[0], b[b.len() - 1])
    }

    pub fn q(&self, theta: f64) -> f64 {
        match self.kind {
            ChartKind::Symmetric | ChartKind::WallSine => self.q2 * theta.sin(),
            ChartKind::WallPower { k } => self.q2 * theta.sin().powf(2.0 * k),
            ChartKind::Linear => self.q2 * theta,
        }
    }

    pub fn dq(&self, theta: f64) -> f64 {
        match self.kind {
            ChartKind::Symmetric | ChartKind::WallSine => self.q2 * ln_sin_cos(theta).1,
            ChartKind::WallPower { k } => {
                let (ls, c) = ln_sin_cos(theta);
                self.q2 * 2.0 * k * ((2.0 * k - 1.0) * ls).exp() * c
            }
            ChartKind::Linear => self.q2,
        }
    }

    /// E − V(q(θ)), evaluated without cancellation near turning points.
    pub fn kinetic(&self, theta: f64) -> f64 {
        let m = match self.kind {
            ChartKind::Linear => return self.energy,
            ChartKind::WallPower { k } => 2.0 * k,
            _ => 1.0,
        };
        // V(q)/E = (q/q2)^α
        let ln_ratio = m * ln_sin_cos(theta).0;
        self.energy * -(self.alpha * ln_ratio).exp_m1()
    }

    pub fn momentum(&self, theta: f64) -> f64 {
        (2.0 * self.mass * self.kinetic(theta).max(0.0)).sqrt()
    }

    /// dt/dθ = M/p · dq/dθ.
    pub fn time_density(&self, theta: f64) -> f64 {
        let p = self.momentum(theta);
        if p.is_infinite() {
            return 0.0;
        }
        self.mass * self.dq(theta) / p
    }

    /// p · dq/dθ.
    pub fn action_density(&self, theta: f64) -> f64 {
        let dq = self.dq(theta);
        if dq == 0.0 {
            return 0.0;
        }
        self.momentum(theta) * dq
    }

    /// Inverse of [`Chart::q`].
    pub fn theta_of(&self, q: f64) -> f64 {
        let x = match self.kind {
            ChartKind::Linear => return (q / self.q2).clamp(0.0, 1.0),
            ChartKind::WallPower { k } => (q / self.q2).max(0.0).powf(0.5 / k),
            _ => q / self.q2,
        };
        x.clamp(-1.0, 1.0).asin()
    }
}

/// Monotone tabulation of the time of flight t(θ) from q1 on the half period.
#[derive(Debug, Clone)]
pub struct HalfPeriodMap {
    chart: Chart,
    panels: Vec<Panel>,
    starts: Vec<f64>,
    half_period: f64,
}

impl HalfPeriodMap {
    pub fn build(chart: Chart, rel_tol: f64) -> Result<Self> {
        let panels = quad::adaptive_panels(|th| chart.time_density(th), &chart.breaks(), Tolerance::rel(rel_tol))?;
        let mut starts = Vec::with_capacity(panels.len());
        let mut acc = 0.0;
        for p in &panels {
            starts.push(acc);
            acc += p.value;
        }
        Ok(Self { chart, panels, starts, half_period: acc })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// Panel boundaries in θ, ascending.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.panels.iter().map(|p| p.a).collect();
        b.push(self.panels.last().map_or(0.0, |p| p.b));
        b
    }

    fn panel_index(&self, theta: f64) -> usize {
        self.panels.partition_point(|p| p.b < theta).min(self.panels.len() - 1)
    }

    /// t(θ), measured from the left end of the orbit.
    pub fn time_at(&self, theta: f64) -> f64 {
        let i = self.panel_index(theta);
        let p = &self.panels[i];
        if theta <= p.a {
            return self.starts[i];
        }
        if theta >= p.b {
            return self.starts[i] + p.value;
        }
        self.starts[i] + GaussLegendre::g20().integrate(|x| self.chart.time_density(x), p.a, theta)
    }

    /// θ(t) for t in [0, T/2].
    pub fn theta_at_time(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.chart.theta_range();
        if t <= 0.0 {
            return Ok(lo);
        }
        if t >= self.half_period {
            return Ok(hi);
        }
        let i = self.starts.partition_point(|&s| s <= t).saturating_sub(1);
        let p = &self.panels[i];
        let tol = 4.0 * f64::EPSILON * (p.b.abs().max(p.a.abs()).max(1.0));
        roots::bracketed(|th| self.time_at(th) - t, p.a, p.b, tol)
            .ok_or(Error::Inversion { t_min: self.starts.get(1).copied().unwrap_or(self.half_period) })
    }
}

/// Period T(E) = 2∫ M/p dq.
pub fn period(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let chart = Chart::new(spec, energy)?;
    let q = quad::integrate(|th| chart.time_density(th), &chart.breaks(), Tolerance::rel(PHASE_SPACE_TOL))?;
    Ok(2.0 * q.value)
}

/// Action over one period S(E) = 2∫ p dq.
pub fn action(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    let chart = Chart::new(spec, energy)?;
    let q = quad::integrate(|th| chart.action_density(th), &chart.breaks(), Tolerance::rel(PHASE_SPACE_TOL))?;
    Ok(2.0 * q.value)
}

fn check_inside(spec: &PotentialSpec, energy: f64, q: f64) -> Result<Chart> {
    let chart = Chart::new(spec, energy)?;
    let (q1, q2) = chart.turning_points();
    if !(q >= q1 && q <= q2) {
        return Err(Error::Domain { q, lo: q1, hi: q2 });
    }
    Ok(chart)
}

fn partial_integral(chart: &Chart, density: impl Fn(f64) -> f64, theta: f64) -> Result<f64> {
    let mut breaks: Vec<f64> = chart.breaks().into_iter().filter(|&b| b < theta).collect();
    if breaks.is_empty() {
        return Ok(0.0);
    }
    breaks.push(theta);
    if breaks.len() < 2 || breaks[0] == theta {
        return Ok(0.0);
    }
    Ok(quad::integrate(density, &breaks, Tolerance::rel(PHASE_SPACE_TOL))?.value)
}

/// Time to travel from the left end q1 to q at energy E.
pub fn time_of_flight(spec: &PotentialSpec, energy: f64, q: f64) -> Result<f64> {
    let chart = check_inside(spec, energy, q)?;
    partial_integral(&chart, |th| chart.time_density(th), chart.theta_of(q))
}

/// Partial action S(q, E) = ∫_{q1}^{q} p dq'.
pub fn partial_action(spec: &PotentialSpec, energy: f64, q: f64) -> Result<f64> {
    let chart = check_inside(spec, energy, q)?;
    partial_integral(&chart, |th| chart.action_density(th), chart.theta_of(q))
}

/// One period of bounded motion sampled on a uniform time grid.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub energy: f64,
    pub q1: f64,
    pub q2: f64,
    pub period: f64,
    pub action: f64,
    pub map: HalfPeriodMap,
    /// q(t_k), t_k = kT/N for k = 0..N; starts at q1.
    pub samples: Vec<f64>,
    pub spec: PotentialSpec,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Whether the orbit is reflected by a hard wall.
    pub fn has_wall(&self) -> bool {
        self.spec.wall_count() > 0
    }

    /// Coordinate at time t (any real t; periodic).
    pub fn position_at(&self, t: f64) -> Result<f64> {
        let tau = t.rem_euclid(self.period);
        let half = 0.5 * self.period;
        let tau = if tau > half { self.period - tau } else { tau };
        Ok(self.map.chart().q(self.map.theta_at_time(tau)?))
    }
}

/// Builds the orbit at energy E with `samples` uniform time samples.
pub fn trajectory(spec: &PotentialSpec, energy: f64, samples: usize) -> Result<Orbit> {
    if samples < 64 || !samples.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("sample count must be even and ≥ 64, got {samples}")));
    }
    let chart = Chart::new(spec, energy)?;
    let (q1, q2) = chart.turning_points();
    let map = HalfPeriodMap::build(chart, PHASE_SPACE_TOL)?;
    let period = 2.0 * map.half_period();
    let act = action(spec, energy)?;
    let half = samples / 2;
    let mut out = vec![0.0; samples];
    out[0] = q1;
    out[half] = q2;
    for (k, slot) in out.iter_mut().enumerate().take(half).skip(1) {
        let t = period * k as f64 / samples as f64;
        *slot = chart.q(map.theta_at_time(t)?);
    }
    for k in half + 1..samples {
        out[k] = out[samples - k];
    }
    Ok(Orbit { energy, q1, q2, period, action: act, map, samples: out, spec: *spec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ho() -> PotentialSpec {
        PotentialSpec::harmonic(1.0).unwrap()
    }

    #[test]
    fn period_examples() {
        for e in [0.1, 2.0, 37.0] {
            assert_relative_eq!(period(&ho(), e).unwrap(), 2.0 * PI, max_relative = 1e-12);
        }
        let b = PotentialSpec::box_well(1.0).unwrap();
        assert_relative_eq!(period(&b, PI * PI / 2.0).unwrap(), 2.0 / PI, max_relative = 1e-13);
        let c = PotentialSpec::coulomb(1.0).unwrap();
        assert_relative_eq!(period(&c, -0.5).unwrap(), 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn action_examples() {
        assert_relative_eq!(action(&ho(), 3.0).unwrap(), 6.0 * PI, max_relative = 1e-12);
        let b = PotentialSpec::box_well(1.0).unwrap();
        assert_relative_eq!(action(&b, PI * PI / 2.0).unwrap(), 2.0 * PI, max_relative = 1e-13);
        let c = PotentialSpec::coulomb(1.0).unwrap();
        assert_relative_eq!(action(&c, -0.5).unwrap(), 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn time_of_flight_examples() {
        assert_relative_eq!(time_of_flight(&ho(), 5.0, 0.0).unwrap(), PI / 2.0, max_relative = 1e-12);
        let b = PotentialSpec::box_well(1.0).unwrap();
        assert_relative_eq!(time_of_flight(&b, PI * PI / 2.0, 0.5).unwrap(), 0.5 / PI, max_relative = 1e-13);
        assert!(matches!(time_of_flight(&ho(), 2.0, 3.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn coulomb_time_of_flight_matches_implicit_orbit() {
        // (2/M)^{1/2} |E|^{3/2} t / A + π/2 = arcsin(√q') - √q' √(1-q') with q' = q|E|/A,
        // t measured from the outer turning point. From the wall, t = T/2 - that time.
        let c = PotentialSpec::coulomb(1.0).unwrap();
        let e: f64 = -0.5;
        let qp: f64 = 0.5;
        let q = qp / e.abs();
        let s = qp.sqrt();
        // time from the wall to q' along the outbound leg
        let from_wall = (s.asin() - s * (1.0 - qp).sqrt()) / (2f64.sqrt() * e.abs().powf(1.5));
        assert_relative_eq!(time_of_flight(&c, e, q).unwrap(), from_wall, max_relative = 1e-12);
        assert_relative_eq!(from_wall, (PI / 4.0 - 0.5) / 2f64.sqrt() / 0.5f64.powf(1.5), max_relative = 1e-14);
    }

    #[test]
    fn harmonic_trajectory_is_a_cosine() {
        let e = 2.0;
        let orbit = trajectory(&ho(), e, 256).unwrap();
        let amp = (2.0 * e).sqrt();
        for (k, q) in orbit.samples.iter().enumerate() {
            let t = orbit.period * k as f64 / 256.0;
            assert!((q + amp * t.cos()).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn quartic_quarter_period_reaches_centre() {
        let p = PotentialSpec::power_law(1.0, 4.0, false).unwrap();
        let orbit = trajectory(&p, 1.0, 256).unwrap();
        assert_relative_eq!(orbit.q2, 1.0, max_relative = 1e-15);
        assert!(orbit.samples[64].abs() < 1e-12);
        assert_eq!(orbit.samples[128], 1.0);
    }

    #[test]
    fn coulomb_orbit_leaves_the_wall_as_t_to_two_thirds() {
        let c = PotentialSpec::coulomb(1.0).unwrap();
        let orbit = trajectory(&c, -0.5, 64).unwrap();
        for t in [1e-6, 1e-4] {
            let q = orbit.position_at(t).unwrap();
            let singular = (4.5f64 * t * t).cbrt();
            assert_relative_eq!(q, singular, max_relative = 2.0 * (t / orbit.period).powf(2.0 / 3.0) + 1e-9);
        }
    }

    #[test]
    fn samples_are_time_reversal_symmetric() {
        let p = PotentialSpec::power_law(-1.0, -0.5, true).unwrap();
        let orbit = trajectory(&p, -1.0, 128).unwrap();
        for k in 1..128 {
            assert_eq!(orbit.samples[k], orbit.samples[128 - k]);
        }
        assert!(trajectory(&p, -1.0, 100).is_ok());
        assert!(trajectory(&p, -1.0, 63).is_err());
    }
}
