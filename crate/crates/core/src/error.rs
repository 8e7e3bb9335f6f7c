use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("not an isogeny: the H^1 action is singular")]
    NotIsogeny,

    #[error("not a finite correspondence: transpose graph of a non-isogeny")]
    NotFinite,

    #[error("transpose not finite: graph of a non-isogeny cannot be transposed")]
    TransposeNotFinite,

    #[error("singular system: {0}")]
    Singular(String),

    #[error("precision cap of {bits} bits reached before the root enclosure met tolerance {tol}")]
    Precision { bits: u32, tol: String },

    #[error("recurrence of order {order} not confirmed by {terms} terms; increase m_max")]
    RecurrenceUnstable { order: usize, terms: usize },

    #[error("degenerate: ratio undefined ({0})")]
    Degenerate(String),

    #[error("sequence is not log-concave at index {0}")]
    NotLogConcave(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
