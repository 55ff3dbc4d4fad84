use core::fmt;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    EmptyPrimes,
    NotPrime {
        index: usize,
        value: u64,
    },
    /// Primes must be odd; the Legendre machinery has no meaning at 2.
    EvenPrime {
        index: usize,
    },
    NotIncreasing {
        index: usize,
        previous: u64,
        value: u64,
    },
    /// Theorem-grade configurations need `p_n >= 5^(2(n+1))`.
    TheoremGrowth {
        index: usize,
        value: u64,
    },
    CoordinateOutOfLevel {
        index: usize,
        level: usize,
    },
    ResidueNotReduced {
        index: usize,
        residue: u64,
        prime: u64,
    },
    ShapeMismatch {
        expected: usize,
        got: usize,
    },
    LevelTooLarge {
        requested: usize,
        level: usize,
    },
    BudgetExceeded {
        required: u128,
        budget: u128,
    },
    NotInLevelGroup {
        level: usize,
    },
    DuplicateElement,
    DomainMismatch,
    SubsetTooLarge {
        k: usize,
        available: usize,
    },
    ZeroResidue,
    /// Flatness window failed: a bug, not a data condition.
    WindowViolation {
        prime: u64,
    },
    OutOfRange(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyPrimes => write!(f, "prime list is empty"),
            Error::NotPrime { index, value } => {
                write!(f, "entry {index} ({value}) is not prime")
            }
            Error::EvenPrime { index } => write!(f, "entry {index} is 2; only odd primes are supported"),
            Error::NotIncreasing { index, previous, value } => write!(
                f,
                "entry {index} ({value}) does not exceed its predecessor ({previous})"
            ),
            Error::TheoremGrowth { index, value } => write!(
                f,
                "entry {index} ({value}) is below 5^{} required in theorem-grade mode",
                2 * (index + 1)
            ),
            Error::CoordinateOutOfLevel { index, level } => {
                write!(f, "coordinate {index} is outside the truncation level {level}")
            }
            Error::ResidueNotReduced { index, residue, prime } => {
                write!(f, "residue {residue} at coordinate {index} is not reduced mod {prime}")
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "point has {got} coordinates, expected {expected}")
            }
            Error::LevelTooLarge { requested, level } => {
                write!(f, "level {requested} exceeds the truncation level {level}")
            }
            Error::BudgetExceeded { required, budget } => {
                write!(f, "work of {required} exceeds the budget of {budget}")
            }
            Error::NotInLevelGroup { level } => {
                write!(f, "element is not supported on the first {level} coordinates")
            }
            Error::DuplicateElement => write!(f, "probe contains a repeated element"),
            Error::DomainMismatch => write!(f, "words are based on different index sets"),
            Error::SubsetTooLarge { k, available } => {
                write!(f, "subset size {k} exceeds the {available} available elements")
            }
            Error::ZeroResidue => write!(f, "residue must be nonzero"),
            Error::WindowViolation { prime } => {
                write!(
                    f,
                    "internal consistency failure: |P| leaves the flatness window for p = {prime}"
                )
            }
            Error::OutOfRange(what) => write!(f, "{what} is out of range"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
