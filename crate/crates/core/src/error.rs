use thiserror::Error;

/// Errors raised by the stadium library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The trajectory leaves the boundary (almost) tangentially.
    #[error("grazing trajectory at s = {s}, beta = {beta}")]
    Grazing { s: f64, beta: f64 },

    /// The next impact falls within the corner tolerance of a junction.
    #[error("impact at s = {s} lies within tolerance of the junction at s = {junction}")]
    Corner { s: f64, junction: f64 },

    /// Pan(n, a, h) does not exist for these parameters.
    #[error("Pan({n}, {a}, {h}) does not exist (requires h > {threshold})")]
    Existence { n: u32, a: f64, h: f64, threshold: f64 },

    #[error("root finder failed to converge: {0}")]
    Convergence(String),

    /// Newton refinement of a periodic orbit did not reach the closure tolerance.
    #[error("orbit refinement stalled with closure residual {residual:e}")]
    Refinement { residual: f64 },

    #[error("impact pattern of Pan({n}) is violated: {reason}")]
    Pattern { n: u32, reason: String },

    /// A perturbed orbit visited a different sequence of boundary pieces.
    #[error("itinerary changed at bounce {bounce}")]
    ItineraryChange { bounce: usize },

    #[error("eigenvalue is resonant: |mu^{order} - 1| = {defect:e}")]
    Resonance { order: u32, defect: f64 },

    #[error("fixed point is not elliptic (trace = {trace})")]
    NotElliptic { trace: f64 },

    #[error("jet methods disagree on coefficient {component}[{i},{j}]: {fd} vs {series}")]
    JetDisagreement {
        component: usize,
        i: usize,
        j: usize,
        fd: f64,
        series: f64,
    },

    /// An iterate left the chart in which a periodic point is being probed.
    #[error("iterate escaped the chart after {iteration} steps")]
    Escape { iteration: usize },
}

impl Error {
    /// Short machine-readable code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Grazing { .. } => "grazing",
            Error::Corner { .. } => "corner",
            Error::Existence { .. } => "existence",
            Error::Convergence(_) => "convergence",
            Error::Refinement { .. } => "refinement",
            Error::Pattern { .. } => "pattern",
            Error::ItineraryChange { .. } => "itinerary",
            Error::Resonance { .. } => "resonance",
            Error::NotElliptic { .. } => "not-elliptic",
            Error::JetDisagreement { .. } => "jet-disagreement",
            Error::Escape { .. } => "escape",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
