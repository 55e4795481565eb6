use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("monomial relations do not cut out a finite basis: {0}")]
    NonSaturatedRelations(String),
    #[error("galois polynomial is not irreducible modulo p")]
    ReduciblePolynomial,
    #[error("enumeration of {0} elements exceeds the configured cap")]
    SizeOverflow(String),
    #[error("operands belong to different rings")]
    MixedRings,
    #[error("element is not in the ideal")]
    NotInIdeal,
    #[error("divided power rule has no value for gamma_{0}")]
    RuleUndefined(u64),
    #[error("inexact division by a power of p")]
    InexactDivision,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("Witt length too short for this operation")]
    LengthUnderflow,
    #[error("ghost vector violates the Dwork congruence at index {0}")]
    DworkCongruenceViolation(usize),
    #[error("p-adic precision exhausted")]
    PrecisionExhausted,
    #[error("Witt vector has a component outside the ideal")]
    NotInWIdeal,
    #[error("first Witt component is not in the ideal")]
    FirstComponentNotInIdeal,
    #[error("element or matrix is not invertible")]
    NotInvertible,
    #[error("parabolic block is not invertible")]
    BlockNotInvertible,
    #[error("matrix has a nonzero entry of negative weight")]
    NotInParabolic,
    #[error("n! does not divide D^n p-adically at n = {0}")]
    PDivisibilityFailure(usize),
    #[error("matrix is not in H_mu")]
    NotInHmu,
    #[error("matrix is not in the parabolic congruence group")]
    NotInGamma,
    #[error("divided power structure is invalid: {0}")]
    PdInvalid(String),
    #[error("display is not adjoint nilpotent")]
    NotAdjointNilpotent,
    #[error("fixed point iteration did not stabilise within {0} steps")]
    IterationDiverged(usize),
    #[error("displacement is not congruent to 1 modulo W(a)")]
    DisplacementNotInIdeal,
    #[error("certificate check failed: {0}")]
    CertificateFailure(String),
    #[error("support violates the component convention")]
    ConventionViolation,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

impl Error {
    /// Stable variant name, printed by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NonSaturatedRelations(_) => "NonSaturatedRelations",
            Error::ReduciblePolynomial => "ReduciblePolynomial",
            Error::SizeOverflow(_) => "SizeOverflow",
            Error::MixedRings => "MixedRings",
            Error::NotInIdeal => "NotInIdeal",
            Error::RuleUndefined(_) => "RuleUndefined",
            Error::InexactDivision => "InexactDivision",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::LengthUnderflow => "LengthUnderflow",
            Error::DworkCongruenceViolation(_) => "DworkCongruenceViolation",
            Error::PrecisionExhausted => "PrecisionExhausted",
            Error::NotInWIdeal => "NotInWIdeal",
            Error::FirstComponentNotInIdeal => "FirstComponentNotInIdeal",
            Error::NotInvertible => "NotInvertible",
            Error::BlockNotInvertible => "BlockNotInvertible",
            Error::NotInParabolic => "NotInParabolic",
            Error::PDivisibilityFailure(_) => "PDivisibilityFailure",
            Error::NotInHmu => "NotInHmu",
            Error::NotInGamma => "NotInGamma",
            Error::PdInvalid(_) => "PdInvalid",
            Error::NotAdjointNilpotent => "NotAdjointNilpotent",
            Error::IterationDiverged(_) => "IterationDiverged",
            Error::DisplacementNotInIdeal => "DisplacementNotInIdeal",
            Error::CertificateFailure(_) => "CertificateFailure",
            Error::ConventionViolation => "ConventionViolation",
            Error::HypothesisViolated(_) => "HypothesisViolated",
        }
    }
}
