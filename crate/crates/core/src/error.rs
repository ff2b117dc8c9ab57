use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coordinate {q} outside the allowed region [{lo}, {hi}]")]
    Domain { q: f64, lo: f64, hi: f64 },
    #[error("potential diverges at q = {0}")]
    Divergence(f64),
    #[error("no bounded classical motion at energy {0}")]
    NoOrbit(f64),
    #[error("quadrature did not converge: estimated error {error:e} for value {value:e}")]
    Quadrature { value: f64, error: f64 },
    #[error("trajectory inversion failed; smallest resolvable time is {t_min:e}")]
    Inversion { t_min: f64 },
    #[error("quantization failed for level {n}: {reason}")]
    Quantization { n: usize, reason: String },
    #[error("q = {q} is within the turning-point zone of width {width:e}; WKB is not valid there")]
    AiryZone { q: f64, width: f64 },
    #[error("harmonic l = {l} exceeds the resolvable bandwidth ({max})")]
    Resolution { l: usize, max: usize },
    #[error("exact dipole elements are not available for {0}")]
    Unsupported(String),
    #[error("dipole table does not cover transition l = {0}")]
    Coverage(usize),
    #[error("tail fit failed: {0}")]
    TailFit(String),
    #[error("inverse Laplace transform is ill-conditioned: estimated error {error:e} at E = {energy}")]
    IllConditioned { energy: f64, error: f64 },
    #[error("peak fit failed: {0}")]
    PeakFit(String),
}

impl Error {
    /// Convergence failures as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Inversion { .. }
                | Error::Quantization { .. }
                | Error::TailFit(_)
                | Error::IllConditioned { .. }
                | Error::PeakFit(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
