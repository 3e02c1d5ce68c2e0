use rayon::ThreadPool;
use serde::Serialize;
use stadion::explore::{phase_portrait, PortraitSpec, Seeds};
use stadion::normalform::{twist_analysis, TwistAnalysis, TwistOptions};
use stadion::pantograph::{
    chaos_bound, classify, level_curve_h, materialize_orbit, resonance_levels, zero_level, DeltaFactors,
    StabilityReport,
};
use stadion::{Piece, ToleranceSet};

use crate::args::*;
use crate::format::{class_label, opt, report, sig, table, verdict_label};
use crate::scan::{grid, ordered};
use crate::{usage, CliError};

type Output = Result<Vec<u8>, CliError>;

pub(crate) fn dispatch(command: &Command, tol: &ToleranceSet, pool: &ThreadPool) -> Output {
    match command {
        Command::Orbit(p) => orbit(p, tol),
        Command::Classify(p) => report("classify", tol, &classify(p.n, p.a, p.h, p.q, tol)?),
        Command::Regions(r) => regions(r, pool),
        Command::Resonances(r) => resonances(r),
        Command::Gaps(g) => gaps(g),
        Command::ChaosBound(r) => chaos(r, pool),
        Command::Twist(t) => twist(t, tol, pool),
        Command::Portrait(p) => portrait(p, tol, pool),
        Command::LevelCurve(l) => level_curve(l, pool),
    }
}

fn check_a(a: f64) -> Result<(), CliError> {
    if a > 1.0 && a.is_finite() {
        Ok(())
    } else {
        usage(format!("--a must exceed 1, got {a}"))
    }
}

/// Cell text and error code of a fallible value.
fn cell(r: &stadion::Result<f64>) -> (String, Option<&'static str>) {
    match r {
        Ok(x) => (sig(*x), None),
        Err(e) => (String::new(), Some(e.code())),
    }
}

#[derive(Serialize)]
struct Impact {
    index: usize,
    piece: Piece,
    s: f64,
    beta: f64,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct OrbitReport {
    n: u32,
    a: f64,
    h: f64,
    period: usize,
    factors: DeltaFactors,
    stability: StabilityReport,
    closure_residual: f64,
    impacts: Vec<Impact>,
}

fn orbit(p: &PointArgs, tol: &ToleranceSet) -> Output {
    let orbit = materialize_orbit(p.n, p.a, p.h, tol)?;
    let impacts = orbit
        .impacts
        .iter()
        .zip(&orbit.positions)
        .zip(&orbit.pieces)
        .enumerate()
        .map(|(index, ((q, xy), &piece))| Impact {
            index,
            piece,
            s: q.s,
            beta: q.beta,
            x: xy[0],
            y: xy[1],
        })
        .collect();
    let body = OrbitReport {
        n: p.n,
        a: p.a,
        h: p.h,
        period: orbit.period(),
        factors: orbit.factors,
        stability: classify(p.n, p.a, p.h, p.q, tol)?,
        closure_residual: orbit.closure_residual,
        impacts,
    };
    report("orbit", tol, &body)
}

fn regions(r: &RegionsArgs, pool: &ThreadPool) -> Output {
    let a_grid = grid(r.range.a_min, r.range.a_max, r.range.steps)?;
    check_a(a_grid[0])?;
    let levels = resonance_levels(r.q);
    let labels: Vec<String> = levels.iter().map(|l| format!("h_{}/{}", l.j, l.k)).collect();
    let mut header = vec!["a", "h_zero"];
    header.extend(labels.iter().map(String::as_str));
    header.extend(["h_one", "error"]);

    let rows = ordered(pool, &a_grid, |&a| {
        let mut row = vec![sig(a), sig(zero_level(r.n, a))];
        let mut error = None;
        for c in levels.iter().map(|l| l.c).chain([1.0]) {
            let (text, code) = cell(&level_curve_h(r.n, c, a));
            row.push(text);
            error = error.or(code);
        }
        row.push(error.unwrap_or_default().to_string());
        row
    });
    table(&header, rows)
}

fn resonances(r: &ResonancesArgs) -> Output {
    if let Some(a) = r.a {
        check_a(a)?;
    }
    let rows = resonance_levels(r.q).into_iter().map(|l| {
        let (h, code) = match (r.n, r.a) {
            (Some(n), Some(a)) => cell(&level_curve_h(n, l.c, a)),
            _ => (String::new(), None),
        };
        vec![l.k.to_string(), l.j.to_string(), sig(l.c), h, code.unwrap_or_default().into()]
    });
    table(&["k", "j", "c", "h", "error"], rows)
}

fn gaps(g: &GapsArgs) -> Output {
    check_a(g.a)?;
    let rows = (0..=g.n_max).map(|n| {
        let lo = zero_level(n, g.a);
        let next = zero_level(n + 1, g.a);
        let one = level_curve_h(n, 1.0, g.a);
        let (one_text, code) = cell(&one);
        let (gap_lo, gap_hi) = match one {
            Ok(h1) if h1 < next => (sig(h1), sig(next)),
            _ => (String::new(), String::new()),
        };
        vec![
            n.to_string(),
            sig(lo),
            one_text,
            sig(next),
            gap_lo,
            gap_hi,
            code.unwrap_or_default().into(),
        ]
    });
    table(&["n", "h_zero", "h_one", "h_zero_next", "gap_lo", "gap_hi", "error"], rows)
}

fn chaos(r: &ARange, pool: &ThreadPool) -> Output {
    let a_grid = grid(r.a_min, r.a_max, r.steps)?;
    check_a(a_grid[0])?;
    let rows = ordered(pool, &a_grid, |&a| match chaos_bound(a) {
        Ok(b) => vec![sig(a), sig(b.h), b.n_max.to_string(), b.argmax.to_string(), String::new()],
        Err(e) => vec![sig(a), String::new(), String::new(), String::new(), e.code().into()],
    });
    table(&["a", "h_bound", "n_max", "argmax", "error"], rows)
}

fn level_curve(l: &LevelCurveArgs, pool: &ThreadPool) -> Output {
    let a_grid = grid(l.range.a_min, l.range.a_max, l.range.steps)?;
    check_a(a_grid[0])?;
    let rows = ordered(pool, &a_grid, |&a| {
        let (h, code) = cell(&level_curve_h(l.n, l.c, a));
        vec![sig(a), h, code.unwrap_or_default().into()]
    });
    table(&["a", "h", "error"], rows)
}

fn twist(t: &TwistArgs, tol: &ToleranceSet, pool: &ThreadPool) -> Output {
    check_a(t.a)?;
    let options = TwistOptions {
        q: t.q,
        oracle: !t.no_oracle,
        iterations: t.iters,
        tol: *tol,
        ..TwistOptions::default()
    };
    if let Some(h) = t.h {
        return report("twist", tol, &twist_analysis(t.n, t.a, h, &options)?);
    }
    let (Some(lo), Some(hi)) = (t.h_min, t.h_max) else {
        return usage("twist needs --h or both --h-min and --h-max");
    };
    let h_grid = grid(lo, hi, t.steps)?;
    let rows = ordered(pool, &h_grid, |&h| twist_row(t, h, &options));
    let header = [
        "h",
        "delta",
        "class",
        "rotation_number",
        "tau1",
        "tau1_oracle",
        "noise1",
        "jet_gap",
        "residual_imag",
        "verdict",
        "error",
    ];
    table(&header, rows)
}

fn twist_row(t: &TwistArgs, h: f64, options: &TwistOptions) -> Vec<String> {
    let stability = classify(t.n, t.a, h, t.q, &options.tol);
    let (delta, class, rho) = match &stability {
        Ok(s) => (sig(s.delta), class_label(s.class), opt(s.rotation_number)),
        Err(_) => Default::default(),
    };
    let mut row = vec![sig(h), delta, class, rho];
    match stability.and_then(|_| twist_analysis(t.n, t.a, h, options)) {
        Ok(TwistAnalysis { report: r, .. }) => row.extend([
            opt(r.tau1()),
            opt(r.tau1_oracle),
            opt(r.noise.first().copied()),
            opt(r.jet_gap),
            sig(r.residual_imag),
            verdict_label(r.verdict),
            String::new(),
        ]),
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), 6));
            row.push(e.code().into());
        }
    }
    row
}

fn portrait(p: &PortraitArgs, tol: &ToleranceSet, pool: &ThreadPool) -> Output {
    check_a(p.a)?;
    let spec = PortraitSpec {
        a: p.a,
        h: p.h,
        seeds: Seeds::Random {
            count: p.seeds,
            rng_seed: p.rng_seed,
        },
        iterations: p.iters,
        skip: p.skip,
        tol: *tol,
    };
    let portrait = pool.install(|| phase_portrait(&spec))?;
    let rows = portrait.traces.iter().flat_map(|trace| {
        trace.points.iter().enumerate().map(move |(k, q)| {
            vec![trace.seed.to_string(), (p.skip + k + 1).to_string(), sig(q.s), sig(q.beta)]
        })
    });
    table(&["seed", "iterate", "s", "beta"], rows)
}
