//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Errors carry
//! enough context to be printed to an end user without a backtrace; the CLI
//! maps [`Error::Config`] and [`Error::Parse`] to exit code 2 and everything
//! else to exit code 3.

use thiserror::Error;

/// Errors produced by circuit construction, simulation, aggregation and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A text input (circuit file, noise file, shot file, config file) could
    /// not be parsed. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A circuit is structurally invalid (empty register, ...).
    #[error("invalid circuit: {0}")]
    Circuit(String),

    /// A gate references a qubit outside the circuit register.
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    /// An `xx` gate was given the same qubit twice.
    #[error("xx gate targets must be distinct, got qubit {qubit} twice")]
    DuplicateXxTargets { qubit: usize },

    /// A gate angle is NaN or infinite.
    #[error("gate angle must be finite, got {angle}")]
    NonFiniteAngle { angle: f64 },

    /// A register is too large for dense simulation or unitary construction.
    #[error("{n_qubits} qubits exceeds the supported maximum of {max} for {what}")]
    TooManyQubits {
        n_qubits: usize,
        max: usize,
        what: &'static str,
    },

    /// Generator parameters are out of range (operand too large, more gate
    /// pairs requested than exist, ...).
    #[error("invalid generator parameters: {0}")]
    Generator(String),

    /// A noise model entry is out of range or malformed.
    #[error("invalid noise model: {0}")]
    Noise(String),

    /// A qubit mapping is not an injection into the physical register, or
    /// does not match the circuit it is applied to.
    #[error("invalid qubit mapping: {0}")]
    Mapping(String),

    /// A decomposition mask references a gate ordinal that does not exist.
    #[error("decomposition mask ordinal {ordinal} out of range: circuit has {n_xx} xx gates")]
    MaskOutOfRange { ordinal: usize, n_xx: usize },

    /// Aggregation input is structurally unusable (empty batch, mismatched
    /// shot counts, missing shot data for voting, ...).
    #[error("invalid aggregation input: {0}")]
    Aggregation(String),

    /// Voting-theory model parameters are out of range, or the model is
    /// degenerate (no state can ever win).
    #[error("invalid voting model: {0}")]
    Voting(String),

    /// An exact enumeration was requested for an instance too large to
    /// enumerate.
    #[error("instance too large for brute-force enumeration: {0}")]
    InstanceTooLarge(String),

    /// Analysis inputs have mismatched dimensions or too few points.
    #[error("invalid analysis input: {0}")]
    Analysis(String),

    /// An experiment configuration is incomplete or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// A pipeline step failed at run time (calibration could not reach the
    /// requested band, sweep grid exceeds available shots, ...).
    #[error("runtime error: {0}")]
    Runtime(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI should use for this error: 2 for configuration and
    /// input mistakes, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Circuit(_)
            | Error::QubitOutOfRange { .. }
            | Error::DuplicateXxTargets { .. }
            | Error::NonFiniteAngle { .. }
            | Error::Generator(_)
            | Error::Noise(_)
            | Error::Mapping(_)
            | Error::MaskOutOfRange { .. }
            | Error::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
