use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("subset mask {mask:#x} references an element outside a ground set of size {size}")]
    OutOfRange { mask: u32, size: usize },

    #[error("sets are required to be disjoint but share {0:#x}")]
    OverlappingSets(u32),

    #[error("ground set of {0} elements exceeds the 32-element cap")]
    SizeCap(usize),

    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid element label `{0}`")]
    InvalidLabel(String),

    #[error("unknown element label `{0}`")]
    UnknownLabel(String),

    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("rank table violates the {axiom} axiom at {detail}")]
    RankAxiom { axiom: &'static str, detail: String },

    #[error("element {0} lies in Q or R")]
    ElementInPair(usize),

    #[error("neither deleting nor contracting element {0} preserves kappa")]
    Dichotomy(usize),

    #[error("element {0} is not in the free set F")]
    ElementNotFree(usize),

    #[error("element {0} is flexible with respect to (Q,R)")]
    FlexibleElement(usize),

    #[error("no single-element removal preserves kappa (S side {s:#x}, T side {t:#x})")]
    ShrinkStuck { s: u32, t: u32 },

    #[error("backtracking found no nested separating sequence")]
    CertificateNotFound,

    #[error("no intertwined element although |F| = {free} >= c({k},{l}) = {bound}")]
    TheoremViolation { k: u32, l: u32, free: usize, bound: u64 },

    #[error("grid ({k},{l}) has kappa(Q,R) = {kappa_qr}, kappa(S,T) = {kappa_st}")]
    KappaMismatch { k: u32, l: u32, kappa_qr: u32, kappa_st: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time budget exhausted")]
    BudgetExhausted,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, msg: msg.into() }
    }
}
