use std::f64::consts::SQRT_2;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stadion::pantograph::{
    alpha, delta, existence_threshold, level_curve_h, materialize_orbit, nonresonant_intervals, resonance_constant,
    solve_t, strip_partition, zero_level,
};
use stadion::{build_stadium, Billiard, ToleranceSet};

/// Lower and upper `h` of the ellipticity strip of `Pan(n, a, ·)`.
fn strip(n: u32, a: f64) -> (f64, f64) {
    (zero_level(n, a), level_curve_h(n, 1.0, a).unwrap())
}

/// Residual of the orbit equation in `t`.
fn orbit_equation(n: u32, a: f64, h: f64, t: f64) -> f64 {
    h * (a * a * t * t - 1.0) / (2.0 * a * t) + ((a * a - 2.0) * t * t - 1.0) / (2.0 * t * (1.0 + t * t).sqrt())
        - n as f64
}

/// A 20 × 20 grid of `(a, h)` strictly inside the ellipticity strip.
fn strip_grid(n: u32) -> Vec<(f64, f64)> {
    let a_lo = alpha(n, 1.0).unwrap() + 0.02;
    let a_hi = 2.4;
    let mut cells = Vec::new();
    for i in 0..20 {
        let a = a_lo + (a_hi - a_lo) * (i as f64 + 0.5) / 20.0;
        let (lo, hi) = strip(n, a);
        for j in 0..20 {
            cells.push((a, lo + (hi - lo) * (0.02 + 0.96 * j as f64 / 19.0)));
        }
    }
    cells
}

/// First-order expansion of the root about `1/a` for large `h`.
fn large_h_offset(n: u32, a: f64, h: f64) -> f64 {
    (n as f64 + 1.0 / (1.0 + a * a).sqrt()) / (a * h)
}

#[test]
fn large_h_limit() {
    for n in 0..3 {
        for a in [1.2, 1.5, 2.5] {
            let mut previous = f64::INFINITY;
            for h in [100.0, 1e3, 1e4] {
                let offset = solve_t(n, a, h).unwrap() - 1.0 / a;
                let oracle = large_h_offset(n, a, h);
                assert!(offset > 0.0 && offset < previous);
                assert!((offset - oracle).abs() < 0.05 * oracle, "n={n} a={a} h={h}: {offset} vs {oracle}");
                previous = offset;
            }
        }
    }
    // At h = 100 the offset is within 0.02 except for the slowest case.
    assert!(solve_t(1, 1.2, 100.0).unwrap() - 1.0 / 1.2 < 0.02);
    assert!(solve_t(2, 1.2, 100.0).unwrap() - 1.0 / 1.2 > 0.02);
}

#[test]
fn small_h_limits() {
    let a: f64 = 2.5;
    let t0 = solve_t(0, a, 1e-4).unwrap();
    assert!((t0 - 1.0 / (a * a - 2.0).sqrt()).abs() < 1e-3, "{t0}");
    let t1 = solve_t(1, a, 1e-4).unwrap();
    assert!((t1 - 1.0 / (a * (a - 2.0)).sqrt()).abs() < 1e-3, "{t1}");
    let limit = 1.0 / (a * (a - 2.0)).sqrt();
    let threshold = existence_threshold(2, a);
    let mut previous = f64::INFINITY;
    for k in 2..8 {
        let t = solve_t(2, a, threshold + 10f64.powi(-k)).unwrap();
        let gap = (t - limit).abs();
        assert!(gap <= previous);
        previous = gap;
    }
    assert!(previous < 1e-3, "{previous}");
}

#[test]
fn geometric_approach_to_zero() {
    let a: f64 = 1.8;
    let limit = 1.0 / (a * a - 2.0).sqrt();
    let gaps: Vec<f64> = (1..7)
        .map(|k| (solve_t(0, a, 10f64.powi(-k)).unwrap() - limit).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn delta_limits_below_sqrt2() {
    for n in 0..3 {
        for a in [1.05, 1.2, 1.35] {
            let d = delta(n, a, 1e-7).unwrap();
            let x = 1.0 / (a * a);
            assert!((d.delta1 - (2.0 * x - 1.0)).abs() < 1e-5, "δ₁ n={n} a={a}");
            assert!((d.delta2 - (2.0 * (n + 1) as f64 * x - 1.0)).abs() < 1e-5, "δ₂ n={n} a={a}");
        }
    }
    for n in 0..3 {
        assert!(delta(n, 1.5, 1e4).unwrap().delta > 1e3);
    }
}

#[test]
fn monotonicity_and_positivity_on_strip_grids() {
    for n in 0..4 {
        for (a, h) in strip_grid(n) {
            let step = 1e-6 * h.max(1e-3);
            let lo = delta(n, a, h - step).unwrap();
            let hi = delta(n, a, h + step).unwrap();
            assert!(hi.delta > lo.delta, "∂Δ/∂h at n={n} a={a} h={h}");
            assert!(hi.t < lo.t, "∂t/∂h at n={n} a={a} h={h}");
            let d = delta(n, a, h).unwrap();
            assert!(d.delta1 > 0.0 && d.delta2 > d.delta1, "δ ordering at n={n} a={a} h={h}: {d:?}");
            assert!(d.delta > 0.0 && d.delta < 1.0);
        }
    }
}

#[test]
fn delta1_vanishes_on_the_zero_level() {
    for n in 1..4 {
        for a in [1.5, 2.0] {
            let d = delta(n, a, zero_level(n, a)).unwrap();
            assert!(d.delta1.abs() < 1e-8, "n={n} a={a}: {}", d.delta1);
        }
    }
}

#[test]
fn ordering_in_n() {
    for (a, h) in [(1.2, 0.3), (1.5, 2.0), (2.5, 5.0), (1.9, 0.01)] {
        let ts: Vec<f64> = (0..4).map(|n| solve_t(n, a, h).unwrap()).collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]), "a={a} h={h}: {ts:?}");
    }
}

#[test]
fn half_trace_consistency_on_random_samples() {
    let tol = ToleranceSet::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.gen_range(0..4u32);
        let a = rng.gen_range(alpha(n, 1.0).unwrap() + 0.01..2.4);
        let (lo, hi) = strip(n, a);
        let h = lo + (hi - lo) * rng.gen_range(0.02..0.98);
        let orbit = materialize_orbit(n, a, h, &tol).unwrap();
        let billiard = Billiard::new(build_stadium(a, h).unwrap());
        let half = orbit.half_monodromy(&billiard).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expected = 4.0 * orbit.factors.delta - 2.0;
        assert!((half.trace() - sign * expected).abs() < 1e-7, "n={n} a={a} h={h}");
        let full = orbit.monodromy(&billiard).unwrap();
        assert!((full.determinant() - 1.0).abs() < 1e-8);
        assert!(orbit.closure_residual <= 1e-9);
        checked += 1;
    }
}

#[test]
fn resonance_cuts_at_sqrt2() {
    let tol = ToleranceSet::default();
    let intervals = nonresonant_intervals(0, SQRT_2, 4).unwrap();
    assert_eq!(intervals.len(), 6);
    let partition = strip_partition(0, SQRT_2, 4).unwrap();
    assert!(partition.cuts.windows(2).all(|w| w[1].h > w[0].h));
    for cut in &partition.cuts {
        let d = delta(0, SQRT_2, cut.h).unwrap().delta;
        assert!((d - cut.resonance.c).abs() < 1e-9, "{cut:?}: {d}");
        let report = stadion::pantograph::classify(0, SQRT_2, cut.h, 4, &tol).unwrap();
        assert!(matches!(report.class, stadion::pantograph::StabilityClass::Resonant { .. }));
    }
    assert!((resonance_constant(1, 2).unwrap() - 0.5).abs() < 1e-12);
    assert!((resonance_constant(1, 3).unwrap() - 0.75).abs() < 1e-12);
    assert!((resonance_constant(3, 4).unwrap() - 0.146_446_609_4).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn root_solves_the_orbit_equation(n in 0u32..5, a in 1.01f64..3.0, h in 0.01f64..20.0) {
        prop_assume!(h > existence_threshold(n, a) + 1e-6);
        let t = solve_t(n, a, h).unwrap();
        prop_assert!(t > 1.0 / a);
        prop_assert!(orbit_equation(n, a, h, t).abs() < 1e-9 * (1.0 + n as f64 + h));
    }

    #[test]
    fn delta1_has_a_closed_form(n in 0u32..4, a in 1.01f64..3.0, h in 0.01f64..20.0) {
        prop_assume!(h > existence_threshold(n, a) + 1e-6);
        let d = delta(n, a, h).unwrap();
        let t2 = d.t * d.t;
        let closed = 2.0 * (1.0 + t2) / (1.0 + a * a * t2) - 1.0;
        prop_assert!((d.delta1 - closed).abs() < 1e-10);
        prop_assert!((d.delta - d.delta1 * d.delta2).abs() < 1e-12 * (1.0 + d.delta.abs()));
        prop_assert!(d.l2 > d.l1);
    }

    #[test]
    fn level_curves_are_ordered(n in 0u32..3, a in 1.45f64..2.5, c1 in 0.05f64..0.95, dc in 0.01f64..0.5) {
        let c2 = (c1 + dc).min(0.99);
        prop_assume!(c2 > c1);
        let h1 = level_curve_h(n, c1, a).unwrap();
        let h2 = level_curve_h(n, c2, a).unwrap();
        prop_assert!(h1 < h2);
        prop_assert!((delta(n, a, h1).unwrap().delta - c1).abs() < 1e-9);
    }
}
