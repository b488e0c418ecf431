use alloc::string::String;
use core::fmt;

/// Failures surfaced by the exact engines.
///
/// Verdict-like outcomes (`NoLimit`, `Pole`, `NonTerminating`) that the
/// contract treats as values are modeled as enum results at the call sites;
/// this type covers genuine failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreError {
    /// Inversion of the zero series.
    ZeroSeries,
    /// An infinite product had a factor of valuation <= 0.
    DivergentProduct,
    /// The recurrence driving a series failed to raise valuation in time.
    NonConvergent,
    /// Direct summation requested for a term family whose valuation bound
    /// cannot be established.
    NonSummable,
    /// A tail sum did not stabilize below the iteration cap.
    NonStabilizing,
    /// A term family has no n -> infinity limit.
    NoLimit,
    /// A denominator factor is the zero polynomial.
    ZeroDenominator,
    /// Inversion of zero in a cyclotomic field.
    ZeroInverse,
    /// A q -> 1/q transform left the descriptor language.
    OutOfFragment,
    /// A theta descriptor was not of the unary kind required.
    NotUnary,
    /// Unknown catalog, theta, hecke, or decomposition id.
    UnknownSeries(String),
    /// Unknown sums-of-tails family id.
    UnknownFamily(String),
    /// No shadow/ghost decomposition registered for the id.
    UnregisteredDecomposition(String),
    /// Descriptor text failed to parse at the given byte offset.
    Syntax { offset: usize, message: String },
    /// Descriptor parsed but is malformed (e.g. a length that goes negative).
    Semantics(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::ZeroSeries => write!(f, "cannot invert the zero series"),
            CoreError::DivergentProduct => {
                write!(f, "infinite product has a factor of valuation <= 0")
            }
            CoreError::NonConvergent => write!(f, "recurrence failed to raise valuation"),
            CoreError::NonSummable => write!(f, "term family is not directly summable"),
            CoreError::NonStabilizing => write!(f, "tail sum did not stabilize below the cap"),
            CoreError::NoLimit => write!(f, "term family has no limit at n = infinity"),
            CoreError::ZeroDenominator => write!(f, "denominator factor is identically zero"),
            CoreError::ZeroInverse => write!(f, "cannot invert zero in a cyclotomic field"),
            CoreError::OutOfFragment => {
                write!(f, "transform leaves the descriptor language fragment")
            }
            CoreError::NotUnary => write!(f, "theta descriptor is not unary"),
            CoreError::UnknownSeries(id) => write!(f, "unknown series id: {id}"),
            CoreError::UnknownFamily(id) => write!(f, "unknown family id: {id}"),
            CoreError::UnregisteredDecomposition(id) => {
                write!(f, "no shadow/ghost decomposition registered for: {id}")
            }
            CoreError::Syntax { offset, message } => {
                write!(f, "syntax error at byte {offset}: {message}")
            }
            CoreError::Semantics(msg) => write!(f, "semantic error: {msg}"),
        }
    }
}
