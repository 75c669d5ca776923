use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the construction is defined.
    /// The message names the violated constraint.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two mirrors meet at an angle that is not 180°/n.
    #[error(
        "mirror arrangement is not kaleidoscopic: mirrors {i} and {j} meet at {degrees:.9}°, \
         which is not 180°/n for any n in 2..=64"
    )]
    NotKaleidoscopic { i: usize, j: usize, degrees: f64 },

    #[error("group closure exceeded {max_order} elements; the generated group is not finite")]
    ClosureOverflow { max_order: usize },

    #[error("mirror index {index} out of range {first}..={last}")]
    Index {
        index: usize,
        first: usize,
        last: usize,
    },

    #[error("parity of word length {word_length} disagrees with determinant {determinant}")]
    ParityMismatch {
        word_length: usize,
        determinant: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
