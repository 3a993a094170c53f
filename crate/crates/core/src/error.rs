use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A database (or the labeled subset handed to a measure) has no sequences.
    EmptyDatabase,
    /// A sequence of length zero was offered to a database.
    EmptySequence {
        index: usize,
    },
    /// An item id is not covered by the alphabet.
    UnknownItem {
        item: u32,
        alphabet_len: usize,
    },
    /// Fewer rows than requested clusters, or `k == 0`.
    InfeasibleK {
        k: usize,
        n: usize,
    },
    /// Pattern scoring needs at least two nonempty clusters.
    TooFewClusters {
        found: usize,
    },
    /// Two labelings (or labels and database) disagree in length.
    LengthMismatch {
        left: usize,
        right: usize,
    },
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDatabase => write!(f, "sequence database is empty"),
            Error::EmptySequence { index } => write!(f, "sequence {index} is empty"),
            Error::UnknownItem { item, alphabet_len } => {
                write!(f, "item id {item} outside alphabet of size {alphabet_len}")
            }
            Error::InfeasibleK { k, n } => {
                write!(
                    f,
                    "infeasible k = {k}: need 1 <= k <= {n} (number of sequences)"
                )
            }
            Error::TooFewClusters { found } => {
                write!(
                    f,
                    "scoring needs at least 2 nonempty clusters, found {found}"
                )
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
