use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stadion::explore::sample_seeds;
use stadion::{build_stadium, Billiard, PhasePoint};

fn random_points(billiard: &Billiard, count: usize, seed: u64) -> Vec<PhasePoint> {
    sample_seeds(billiard, count, seed)
}

#[test]
fn jacobian_determinant_is_the_cosine_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100 {
        let a = rng.gen_range(1.05..3.0);
        let h = rng.gen_range(0.0..3.0);
        let billiard = Billiard::new(build_stadium(a, h).unwrap());
        let p = random_points(&billiard, 1, rng.gen())[0];
        let Ok(bounce) = billiard.step(p) else { continue };
        let m = bounce.tangent_matrix();
        let expected = bounce.beta_out.cos() / bounce.beta_in.cos();
        assert!((m.determinant() - expected).abs() < 1e-8 * expected.max(1.0), "{p:?}");
        checked += 1;
    }
}

#[test]
fn time_reversal_undoes_the_map() {
    let billiard = Billiard::new(build_stadium(1.7, 0.8).unwrap());
    let mut worst: f64 = 0.0;
    for p in random_points(&billiard, 200, 9) {
        let Ok(q) = billiard.step(p).map(|b| b.to()) else { continue };
        let Ok(back) = billiard.step(q.reversed()).map(|b| b.to().reversed()) else { continue };
        worst = worst.max(billiard.phase_distance(back, p));
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn ellipse_invariant_drift_over_ten_thousand_iterates() {
    let billiard = Billiard::new(build_stadium(1.6, 0.0).unwrap());
    for p in random_points(&billiard, 3, 11) {
        let lambda0 = billiard.ellipse_invariant(p);
        let mut drift: f64 = 0.0;
        for bounce in billiard.orbit(p).take(10_000) {
            drift = drift.max((billiard.ellipse_invariant(bounce.unwrap().to()) - lambda0).abs());
        }
        assert!(drift < 1e-7, "{drift}");
    }
}

/// Pushes uniform `(s, sin β)` samples forward and compares the image
/// histogram with the uniform one; an area-preserving map leaves it uniform.
#[test]
fn map_preserves_the_invariant_measure() {
    let billiard = Billiard::new(build_stadium(1.8, 1.1).unwrap());
    let len = billiard.params.length;
    const BINS: usize = 10;
    let samples = 40_000;
    let mut counts = [[0usize; BINS]; BINS];
    let mut used = 0usize;
    for p in random_points(&billiard, samples, 21) {
        let Ok(b) = billiard.step(p) else { continue };
        let q = b.to();
        let i = ((q.s / len) * BINS as f64).floor().clamp(0.0, BINS as f64 - 1.0) as usize;
        let j = ((q.beta.sin() + 1.0) * 0.5 * BINS as f64).floor().clamp(0.0, BINS as f64 - 1.0) as usize;
        counts[i][j] += 1;
        used += 1;
    }
    let expected = used as f64 / (BINS * BINS) as f64;
    let chi2: f64 = counts
        .iter()
        .flatten()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 99 degrees of freedom; the 0.999 quantile is about 149.
    assert!(chi2 < 149.0, "chi2 = {chi2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_symmetries_commute_with_the_map(a in 1.05f64..3.0, h in 0.0f64..3.0, u in 0.0f64..1.0, v in -0.95f64..0.95) {
        let billiard = Billiard::new(build_stadium(a, h).unwrap());
        let p = PhasePoint::new(u * billiard.params.length, v.asin());
        let (Ok(q), Ok(mq)) = (billiard.step(p), billiard.step(billiard.rotate_half(p))) else {
            return Ok(());
        };
        prop_assert!(billiard.phase_distance(billiard.rotate_half(q.to()), mq.to()) < 1e-9);
    }

    #[test]
    fn wrapped_arc_length_stays_in_range(a in 1.05f64..3.0, h in 0.0f64..3.0, s in -100.0f64..100.0) {
        let params = build_stadium(a, h).unwrap();
        let w = params.wrap(s);
        prop_assert!((0.0..params.length).contains(&w));
        prop_assert!(params.arc_difference(w, s).abs() < 1e-9);
    }
}
