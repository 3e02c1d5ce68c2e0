use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the dynamics, stability and normal-form code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSet {
    /// Minimum distance of |β| from π/2 before a trajectory counts as grazing.
    pub graze: f64,
    /// Minimum arc-length distance of an impact from a junction.
    pub corner: f64,
    /// Minimum chord parameter, relative to the boundary length.
    pub chord_eps: f64,
    /// Band around Δ ∈ {0, 1} classified as parabolic.
    pub parabolic: f64,
    /// Band around a resonance constant c_jk classified as resonant.
    pub resonance: f64,
    /// Closure residual accepted for a materialized periodic orbit.
    pub closure: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            graze: 1e-9,
            corner: 1e-10,
            chord_eps: 1e-12,
            parabolic: 1e-9,
            resonance: 1e-9,
            closure: 1e-9,
        }
    }
}
