use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidBasis(String),
    UnknownSubsystem(String),
    UnknownLevel { subsystem: String, label: String },
    LabelCount { expected: usize, found: usize },
    BasisMismatch,
    DimensionTooLarge(usize),
    EmptySuperposition,
    NonFinite,
    NullState,
    NotOrthonormal,
    NotHermitian,
    NotUnitary(String),
    NotProjector(String),
    NotNormalized,
    OrthogonalEnsemble,
    InvalidPointer(String),
    PointerOverflow { shift: f64, limit: f64 },
    InvalidComponent(String),
    UnknownDetector(String),
    UnknownObservable(String),
    HelicityUndefined,
    InvalidScenario(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBasis(msg) => write!(f, "invalid basis: {msg}"),
            Error::UnknownSubsystem(name) => write!(f, "unknown subsystem `{name}`"),
            Error::UnknownLevel { subsystem, label } => {
                write!(f, "unknown level `{label}` in subsystem `{subsystem}`")
            }
            Error::LabelCount { expected, found } => {
                write!(f, "expected {expected} level labels, found {found}")
            }
            Error::BasisMismatch => f.write_str("basis mismatch"),
            Error::DimensionTooLarge(dim) => {
                write!(f, "dimension {dim} exceeds the engine bound of {}", crate::MAX_DIM)
            }
            Error::EmptySuperposition => f.write_str("empty superposition"),
            Error::NonFinite => f.write_str("non-finite amplitude"),
            Error::NullState => f.write_str("cannot normalize null state"),
            Error::NotOrthonormal => f.write_str("states are not orthonormal"),
            Error::NotHermitian => f.write_str("operator is not Hermitian"),
            Error::NotUnitary(what) => write!(f, "{what} is not unitary"),
            Error::NotProjector(what) => write!(f, "{what} is not a projector"),
            Error::NotNormalized => f.write_str("state is not unit-normalized"),
            Error::OrthogonalEnsemble => f.write_str("post-selection impossible: ⟨Ψ_f|Ψ_i⟩ = 0"),
            Error::InvalidPointer(msg) => write!(f, "invalid pointer: {msg}"),
            Error::PointerOverflow { shift, limit } => {
                write!(f, "pointer grid overflow: shift {shift} exceeds {limit}")
            }
            Error::InvalidComponent(msg) => write!(f, "invalid component: {msg}"),
            Error::UnknownDetector(name) => write!(f, "unknown detector `{name}`"),
            Error::UnknownObservable(name) => write!(f, "unknown observable `{name}`"),
            Error::HelicityUndefined => f.write_str("helicity undefined for transverse spin"),
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
