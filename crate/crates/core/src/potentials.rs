//! Confining one-dimensional potentials.
//!
//! Every family reduces to one of two shapes: a pure power law `A|q|^α`
//! (optionally cut by a hard wall at the origin) or a box with hard walls at
//! `0` and `L`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// V(q) = A|q|^α, A and α of equal sign.
    PowerLaw { amplitude: f64, alpha: f64 },
    /// Hard walls at 0 and L.
    Box { length: f64 },
    /// V(q) = Mω²q²/2.
    Harmonic { omega: f64 },
    /// V(q) = Mω²q²/2 for q ≥ 0, wall at 0.
    HalfHarmonic { omega: f64 },
    /// V(q) = -A/q for q > 0, wall at 0.
    Coulomb { strength: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Walls {
    None,
    LeftAtZero,
    BoxPair,
}

/// Canonical form used by the classical and semiclassical machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Power { amplitude: f64, alpha: f64, wall: bool },
    Box { length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    family: Family,
    walls: Walls,
    mass: f64,
    hbar: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!("{name} must be positive and finite, got {v}")))
    }
}

impl PotentialSpec {
    pub fn new(family: Family, walls: Walls, mass: f64, hbar: f64) -> Result<Self> {
        positive("M", mass)?;
        positive("hbar", hbar)?;
        let bad = |msg: &str| Err(Error::InvalidPotential(msg.to_string()));
        match family {
            Family::PowerLaw { amplitude, alpha } => {
                if !amplitude.is_finite() || !alpha.is_finite() {
                    return bad("power law parameters must be finite");
                }
                if alpha == 0.0 {
                    return bad("alpha = 0 is the box potential; use box:L=...");
                }
                if alpha <= -2.0 {
                    return bad("alpha must exceed -2");
                }
                // Bound motion needs a confining (α > 0, A > 0) or attractive (α < 0, A < 0) law.
                if amplitude == 0.0 || amplitude.signum() != alpha.signum() {
                    return bad("A and alpha must have the same sign for bound motion");
                }
                match walls {
                    Walls::BoxPair => return bad("a power law takes at most a wall at q = 0"),
                    Walls::None if alpha < 0.0 => return bad("alpha < 0 requires a wall at q = 0"),
                    _ => {}
                }
            }
            Family::Box { length } => {
                positive("L", length)?;
                if walls != Walls::BoxPair {
                    return bad("box requires its pair of walls");
                }
            }
            Family::Harmonic { omega } => {
                positive("omega", omega)?;
                if walls != Walls::None {
                    return bad("harmonic oscillator has no walls; use halfharmonic");
                }
            }
            Family::HalfHarmonic { omega } => {
                positive("omega", omega)?;
                if walls != Walls::LeftAtZero {
                    return bad("half oscillator requires the wall at q = 0");
                }
            }
            Family::Coulomb { strength } => {
                positive("A", strength)?;
                if walls != Walls::LeftAtZero {
                    return bad("coulomb requires the wall at q = 0");
                }
            }
        }
        Ok(Self { family, walls, mass, hbar })
    }

    pub fn power_law(amplitude: f64, alpha: f64, wall: bool) -> Result<Self> {
        let walls = if wall { Walls::LeftAtZero } else { Walls::None };
        Self::new(Family::PowerLaw { amplitude, alpha }, walls, 1.0, 1.0)
    }

    pub fn box_well(length: f64) -> Result<Self> {
        Self::new(Family::Box { length }, Walls::BoxPair, 1.0, 1.0)
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        Self::new(Family::Harmonic { omega }, Walls::None, 1.0, 1.0)
    }

    pub fn half_harmonic(omega: f64) -> Result<Self> {
        Self::new(Family::HalfHarmonic { omega }, Walls::LeftAtZero, 1.0, 1.0)
    }

    pub fn coulomb(strength: f64) -> Result<Self> {
        Self::new(Family::Coulomb { strength }, Walls::LeftAtZero, 1.0, 1.0)
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        Self::new(self.family, self.walls, mass, self.hbar)
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(self.family, self.walls, self.mass, hbar)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn walls(&self) -> Walls {
        self.walls
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn shape(&self) -> Shape {
        let m = self.mass;
        match self.family {
            Family::PowerLaw { amplitude, alpha } => {
                Shape::Power { amplitude, alpha, wall: self.walls == Walls::LeftAtZero }
            }
            Family::Box { length } => Shape::Box { length },
            Family::Harmonic { omega } => Shape::Power { amplitude: 0.5 * m * omega * omega, alpha: 2.0, wall: false },
            Family::HalfHarmonic { omega } => {
                Shape::Power { amplitude: 0.5 * m * omega * omega, alpha: 2.0, wall: true }
            }
            Family::Coulomb { strength } => Shape::Power { amplitude: -strength, alpha: -1.0, wall: true },
        }
    }

    /// Whether closed-form energies and dipole elements exist.
    pub fn is_analytic(&self) -> bool {
        !matches!(self.family, Family::PowerLaw { .. })
    }

    /// Number of hard walls met by a bound orbit.
    pub fn wall_count(&self) -> usize {
        match self.walls {
            Walls::None => 0,
            Walls::LeftAtZero => 1,
            Walls::BoxPair => 2,
        }
    }

    /// Number of smooth (soft) turning points of a bound orbit.
    pub fn smooth_turning_count(&self) -> usize {
        2 - self.wall_count()
    }

    /// Allowed coordinate range.
    pub fn domain(&self) -> (f64, f64) {
        match (self.shape(), self.walls) {
            (Shape::Box { length }, _) => (0.0, length),
            (_, Walls::LeftAtZero) => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn evaluate(&self, q: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(q >= lo && q <= hi) {
            return Err(Error::Domain { q, lo, hi });
        }
        match self.shape() {
            Shape::Box { .. } => Ok(0.0),
            Shape::Power { amplitude, alpha, .. } => {
                if alpha < 0.0 && q == 0.0 {
                    return Err(Error::Divergence(q));
                }
                Ok(amplitude * q.abs().powf(alpha))
            }
        }
    }

    /// dV/dq inside the domain (zero in the box).
    pub fn derivative(&self, q: f64) -> f64 {
        match self.shape() {
            Shape::Box { .. } => 0.0,
            Shape::Power { amplitude, alpha, .. } => amplitude * alpha * q.abs().powf(alpha - 1.0) * q.signum(),
        }
    }

    /// Ends of the classically allowed region at energy `e`; a wall replaces
    /// the corresponding turning point.
    pub fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        if !e.is_finite() {
            return Err(Error::NoOrbit(e));
        }
        match self.shape() {
            Shape::Box { length } => {
                if e > 0.0 {
                    Ok((0.0, length))
                } else {
                    Err(Error::NoOrbit(e))
                }
            }
            Shape::Power { amplitude, alpha, wall } => {
                // Bound motion needs E on the same side of zero as A.
                if e * amplitude <= 0.0 {
                    return Err(Error::NoOrbit(e));
                }
                let q2 = (e / amplitude).powf(1.0 / alpha);
                if !(q2.is_finite() && q2 > 0.0) {
                    return Err(Error::NoOrbit(e));
                }
                Ok((if wall { 0.0 } else { -q2 }, q2))
            }
        }
    }

    /// Whether the left end of a bound orbit is a hard wall.
    pub fn left_wall(&self) -> bool {
        self.walls != Walls::None
    }

    /// Whether the right end of a bound orbit is a hard wall.
    pub fn right_wall(&self) -> bool {
        self.walls == Walls::BoxPair
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::PowerLaw { amplitude, alpha } => {
                write!(f, "powerlaw:A={amplitude},alpha={alpha}")?;
                if self.walls == Walls::LeftAtZero {
                    write!(f, ",wall")?;
                }
            }
            Family::Box { length } => write!(f, "box:L={length}")?,
            Family::Harmonic { omega } => write!(f, "harmonic:omega={omega}")?,
            Family::HalfHarmonic { omega } => write!(f, "halfharmonic:omega={omega}")?,
            Family::Coulomb { strength } => write!(f, "coulomb:A={strength}")?,
        }
        if self.mass != 1.0 {
            write!(f, ",M={}", self.mass)?;
        }
        if self.hbar != 1.0 {
            write!(f, ",hbar={}", self.hbar)?;
        }
        Ok(())
    }
}

impl FromStr for PotentialSpec {
    type Err = Error;

    /// Parses `powerlaw:A=<f>,alpha=<f>[,wall]`, `box:L=<f>`,
    /// `harmonic:omega=<f>`, `halfharmonic:omega=<f>` or `coulomb:A=<f>`,
    /// each optionally followed by `,M=<f>,hbar=<f>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidPotential(msg);
        let (name, rest) = s.split_once(':').ok_or_else(|| bad(format!("missing ':' in '{s}'")))?;
        let mut params: Vec<(&str, f64)> = Vec::new();
        let mut wall = false;
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if item == "wall" {
                wall = true;
                continue;
            }
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{item}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("cannot parse number in '{item}'")))?;
            let k = k.trim();
            if params.iter().any(|(p, _)| *p == k) {
                return Err(bad(format!("duplicate key '{k}'")));
            }
            params.push((k, v));
        }
        let mut take = |key: &str| params.iter().position(|(k, _)| *k == key).map(|i| params.remove(i).1);
        let mass = take("M").unwrap_or(1.0);
        let hbar = take("hbar").unwrap_or(1.0);
        let mut need = |key: &str| take(key).ok_or_else(|| bad(format!("{name} requires {key}=<value>")));
        let (family, walls) = match name.trim() {
            "powerlaw" => {
                let amplitude = need("A")?;
                let alpha = need("alpha")?;
                (Family::PowerLaw { amplitude, alpha }, if wall { Walls::LeftAtZero } else { Walls::None })
            }
            "box" => (Family::Box { length: need("L")? }, Walls::BoxPair),
            "harmonic" => (Family::Harmonic { omega: need("omega")? }, Walls::None),
            "halfharmonic" => (Family::HalfHarmonic { omega: need("omega")? }, Walls::LeftAtZero),
            "coulomb" => (Family::Coulomb { strength: need("A")? }, Walls::LeftAtZero),
            other => return Err(bad(format!("unknown potential family '{other}'"))),
        };
        if wall && name.trim() != "powerlaw" {
            return Err(bad(format!("'wall' flag is only valid for powerlaw, not {name}")));
        }
        if let Some((k, _)) = params.first() {
            return Err(bad(format!("unknown parameter '{k}' for {name}")));
        }
        Self::new(family, walls, mass, hbar)
    }
}
