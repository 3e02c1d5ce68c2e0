//! Billiards in the elliptical stadium.
//!
//! The crate covers the billiard map and its derivative, the pantographic
//! periodic orbits `Pan(n, a, h)` together with their ellipticity and resonance
//! structure in the `(a, h)` plane, and a numerical Birkhoff normal form that
//! decides whether an elliptic orbit is surrounded by invariant curves.

pub mod error;
pub mod explore;
pub mod dynamics;
pub mod geometry;
pub mod normalform;
pub mod pantograph;
mod roots;
pub mod series;
mod quad;
pub mod tolerance;

pub use error::{Error, Result};
pub use dynamics::{Billiard, Bounce, PhasePoint, TangentMatrix};
pub use geometry::{build_stadium, BoundaryPoint, Piece, StadiumParams, Vec2};
pub use tolerance::ToleranceSet;
