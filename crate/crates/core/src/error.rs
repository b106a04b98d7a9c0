use thiserror::Error;

/// Errors raised by the adelic toolkit.
///
/// Every variant maps onto a stable machine-readable name (see [`Error::kind`]) which the
/// command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("element is not a root of unity of the fixed prime order")]
    NotARootOfUnity,
    #[error("zero has no root")]
    ZeroInput,
    #[error("zero is not invertible")]
    ZeroInverse,
    #[error("valuation of the exact zero series is undefined")]
    ZeroValuation,
    #[error("all retained coefficients cancelled; precision exhausted")]
    PrecisionExhausted,
    #[error("series is not a unit (valuation {0})")]
    NotAUnit(i64),
    #[error("series is not a {root}-th power (valuation {val})")]
    NotAPower { root: u64, val: i64 },
    #[error("parameter vector has a zero component at {0}")]
    ZeroComponent(String),
    #[error("default component has valuation {0}, the ramification locus would be infinite")]
    NonFiniteLocus(i64),
    #[error("zero local parameter")]
    ZeroParameter,
    #[error("local algebras are not isomorphic (ramification indices {0} and {1})")]
    IncompatibleStructure(u64, u64),
    #[error("point is unramified: the valuation {0} is divisible by p")]
    UnramifiedPoint(i64),
    #[error("local element is not invertible")]
    NonInvertible,
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("character must be nontrivial")]
    TrivialCharacter,
    #[error("subgroup is not pointwise transitive: {0}")]
    NotTransitive(String),
    #[error("extension is not Galois: {0}")]
    NotGalois(String),
    #[error("subgroups are not Galois equivalent")]
    NotEquivalent,
    #[error("function is not admissible: {0}")]
    NotAdmissible(String),
    #[error("function is a p-th power; the cover is trivial")]
    PthPower,
    #[error("mismatched prime: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Stable identifier used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "InvalidField",
            Error::NotARootOfUnity => "NotARootOfUnity",
            Error::ZeroInput => "ZeroInput",
            Error::ZeroInverse => "ZeroInverse",
            Error::ZeroValuation => "ZeroValuation",
            Error::PrecisionExhausted => "PrecisionExhausted",
            Error::NotAUnit(_) => "NotAUnit",
            Error::NotAPower { .. } => "NotAPower",
            Error::ZeroComponent(_) => "ZeroComponent",
            Error::NonFiniteLocus(_) => "NonFiniteLocus",
            Error::ZeroParameter => "ZeroParameter",
            Error::IncompatibleStructure(..) => "IncompatibleStructure",
            Error::UnramifiedPoint(_) => "UnramifiedPoint",
            Error::NonInvertible => "NonInvertible",
            Error::InvalidAutomorphism(_) => "InvalidAutomorphism",
            Error::TrivialCharacter => "TrivialCharacter",
            Error::NotTransitive(_) => "NotTransitive",
            Error::NotGalois(_) => "NotGalois",
            Error::NotEquivalent => "NotEquivalent",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::PthPower => "PthPower",
            Error::PrimeMismatch(..) => "PrimeMismatch",
            Error::Parse(_) => "Parse",
            Error::Inconsistent(_) => "Inconsistent",
        }
    }

    /// Malformed input as opposed to a well-formed request the mathematics rejects.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidField(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
