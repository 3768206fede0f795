use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the library. Shape and modulus mismatches between
/// matrices are programming errors and panic instead (see the matrix ops).
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },

    #[error("operation needs {required} elements, guard allows {guard}")]
    GuardExceeded { required: u128, guard: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("modulus mismatch: expected {expected}, got {got}")]
    ModulusMismatch { expected: u64, got: u64 },

    #[error("central element is not a vertex: {0}")]
    CentralInput(String),

    #[error("modulus {0} is prime: constructive short paths need a composite modulus, use BFS instead")]
    PrimeModulus(u64),

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("not a member of the domain: {0}")]
    NotInDomain(String),

    #[error("not a vertex of the graph: {0}")]
    NotAVertex(String),

    #[error("index {index} outside the encoding space of {space} matrices")]
    IndexOutOfRange { index: u128, space: u128 },

    #[error("encoding space for n={n}, m={m} does not fit in 128 bits")]
    Unencodable { n: usize, m: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal self-check failed (implementation bug): {0}")]
    SelfCheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
