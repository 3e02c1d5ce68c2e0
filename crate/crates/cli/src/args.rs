use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use stadion::ToleranceSet;

#[derive(Debug, Parser)]
#[command(name = "stadion", version, about = "Pantographic orbits and islands in the elliptical stadium billiard")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true, env = "STADION_WORKERS")]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Default, Args)]
pub struct TolArgs {
    #[arg(long, global = true)]
    pub tol_graze: Option<f64>,
    #[arg(long, global = true)]
    pub tol_corner: Option<f64>,
    #[arg(long, global = true)]
    pub tol_chord: Option<f64>,
    #[arg(long, global = true)]
    pub tol_parabolic: Option<f64>,
    #[arg(long, global = true)]
    pub tol_resonance: Option<f64>,
    #[arg(long, global = true)]
    pub tol_closure: Option<f64>,
}

impl TolArgs {
    pub fn resolve(&self) -> ToleranceSet {
        let d = ToleranceSet::default();
        ToleranceSet {
            graze: self.tol_graze.unwrap_or(d.graze),
            corner: self.tol_corner.unwrap_or(d.corner),
            chord_eps: self.tol_chord.unwrap_or(d.chord_eps),
            parabolic: self.tol_parabolic.unwrap_or(d.parabolic),
            resonance: self.tol_resonance.unwrap_or(d.resonance),
            closure: self.tol_closure.unwrap_or(d.closure),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct Pan(n, a, h) and report its impacts and stability factors (JSON).
    Orbit(PointArgs),
    /// Linear stability of Pan(n, a, h) (JSON).
    Classify(PointArgs),
    /// Level curves bounding the ellipticity strip and its resonance cuts, per a (CSV).
    Regions(RegionsArgs),
    /// Resonance levels up to order q, with their h when n and a are given (CSV).
    Resonances(ResonancesArgs),
    /// Gaps between consecutive ellipticity strips at fixed a (CSV).
    Gaps(GapsArgs),
    /// The bound H(a) above which the pantographic islands disappear, for a < √2 (CSV).
    ChaosBound(ARange),
    /// Birkhoff twist coefficients at one point (JSON) or along an h-grid (CSV).
    Twist(TwistArgs),
    /// Orbit traces from random seeds, one record per iterate (CSV).
    Portrait(PortraitArgs),
    /// The level curve Δₙ(a, h) = c over an a-grid (CSV).
    LevelCurve(LevelCurveArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 4)]
    pub q: u32,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ARange {
    #[arg(long)]
    pub a_min: f64,
    #[arg(long)]
    pub a_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub range: ARange,
    #[arg(long, default_value_t = 4)]
    pub q: u32,
}

#[derive(Debug, Args)]
pub struct ResonancesArgs {
    #[arg(long, default_value_t = 4)]
    pub q: u32,
    #[arg(long, requires = "a")]
    pub n: Option<u32>,
    #[arg(long, requires = "n")]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 3)]
    pub n_max: u32,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub a: f64,
    /// Single point; mutually exclusive with the h-grid.
    #[arg(long, conflicts_with_all = ["h_min", "h_max"], required_unless_present_all = ["h_min", "h_max"])]
    pub h: Option<f64>,
    #[arg(long, requires = "h_max")]
    pub h_min: Option<f64>,
    #[arg(long, requires = "h_min")]
    pub h_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value_t = 4)]
    pub q: u32,
    /// Return-map iterations per oracle radius.
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    /// Skip the rotation-number oracle.
    #[arg(long)]
    pub no_oracle: bool,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 200)]
    pub seeds: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Iterates discarded before recording.
    #[arg(long, default_value_t = 0)]
    pub skip: usize,
}

#[derive(Debug, Args)]
pub struct LevelCurveArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub c: f64,
    #[command(flatten)]
    pub range: ARange,
}
