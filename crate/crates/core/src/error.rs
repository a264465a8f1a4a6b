use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Variant names double as the diagnostic tag the CLI prints on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("PoleOfGamma: argument {re}+{im}i is a pole of the gamma function")]
    PoleOfGamma { re: f64, im: f64 },

    #[error("DegenerateProduct: 1 + s2*s_-2 vanishes, s1 and s_-1 must be supplied directly")]
    DegenerateProduct,

    #[error("OutOfRegime: |s2| = {modulus} is outside the {regime} regime")]
    OutOfRegime { modulus: f64, regime: &'static str },

    #[error("NonRealCorrection: s1 - s_-1 has imaginary part {0}")]
    NonRealCorrection(f64),

    #[error("NoConvergence: {0}")]
    NoConvergence(String),

    #[error("DegreeTooSmall: Laurent degree {0} is below 4")]
    DegreeTooSmall(usize),

    #[error("AtPole: evaluation point coincides with the pole at {0}")]
    AtPole(f64),

    #[error("StepUnderflow: step size fell below 1e-14 at x = {0}")]
    StepUnderflow(f64),

    #[error("FitIllConditioned: {0}")]
    FitIllConditioned(String),

    #[error("MaxPolesExceeded: more than {0} poles crossed")]
    MaxPolesExceeded(usize),

    #[error("EmptyAfterMask: only {0} comparison points survive the pole mask")]
    EmptyAfterMask(usize),

    #[error("InsufficientCells: {0}")]
    InsufficientCells(String),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("Io: {0}")]
    Io(String),
}

impl Error {
    /// Short tag naming the failure.
    pub fn name(&self) -> &'static str {
        match self {
            Error::PoleOfGamma { .. } => "PoleOfGamma",
            Error::DegenerateProduct => "DegenerateProduct",
            Error::OutOfRegime { .. } => "OutOfRegime",
            Error::NonRealCorrection(_) => "NonRealCorrection",
            Error::NoConvergence(_) => "NoConvergence",
            Error::DegreeTooSmall(_) => "DegreeTooSmall",
            Error::AtPole(_) => "AtPole",
            Error::StepUnderflow(_) => "StepUnderflow",
            Error::FitIllConditioned(_) => "FitIllConditioned",
            Error::MaxPolesExceeded(_) => "MaxPolesExceeded",
            Error::EmptyAfterMask(_) => "EmptyAfterMask",
            Error::InsufficientCells(_) => "InsufficientCells",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
