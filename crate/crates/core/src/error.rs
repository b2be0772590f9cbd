use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed to converge on [{a}, {b}]: estimated error {error:e} after {intervals} intervals")]
    Quadrature {
        a: f64,
        b: f64,
        error: f64,
        intervals: usize,
    },

    #[error("invalid time grid: {0}")]
    Grid(String),

    /// The trace drifted beyond the allowed tolerance during propagation.
    #[error("step instability at t = {time}: trace error {trace_error:e} (grid too coarse?)")]
    StepInstability { time: f64, trace_error: f64 },

    #[error("Riccati parameter k+ = {value:e} blew up at t = {time}")]
    RiccatiBlowUp { time: f64, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("state too unphysical to score: eigenvalue {0:e}")]
    Unphysical(f64),

    /// Mutual information minus classical correlation fell outside `[0, I]`
    /// by more than the clipping tolerance.
    #[error("discord {discord:e} outside [0, {mutual_information}]")]
    DiscordOutOfRange { discord: f64, mutual_information: f64 },
}
