use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sequence support [{lo}, {hi}] lies outside the space window [{win_lo}, {win_hi}]")]
    SupportOutsideWindow { lo: i64, hi: i64, win_lo: i64, win_hi: i64 },
    #[error("invalid space parameters: {0}")]
    InvalidSpaceParams(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("modular exceeds 1 for every tested t (no finite bracket)")]
    ModularDivergesForAllT,
    #[error("modulation requires |z| = 1, got |z| = {modulus}")]
    NonUnimodularZ { modulus: f64 },
    #[error("shift power {power} needs a window larger than {window}")]
    WindowTooSmall { power: i64, window: usize },
    #[error("{direction} shift is unbounded: {evidence}")]
    UnboundedShift { direction: String, evidence: String },
    #[error("both S and S^-1 are unbounded: {diagnostic}")]
    BothShiftsUnbounded { diagnostic: String },
    #[error("symbol bandwidth {band} exceeds the section window {window}")]
    BandwidthExceedsWindow { band: i64, window: usize },
    #[error("method {method} cannot be used here: {reason}")]
    MethodSpaceMismatch { method: String, reason: String },
    #[error("symbol with negative powers evaluated at z = 0")]
    ZeroWithNegativePowers,
    #[error("half-line input has support at negative index {index}")]
    NegativeSupportInput { index: i64 },
    #[error("band {band} exceeds the black-box band limit {limit}")]
    BandExceedsBlackBox { band: usize, limit: usize },
    #[error("matrix {rows}x{cols} is too large for the brute-force oracle (max 12x12)")]
    MatrixTooLargeForOracle { rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
