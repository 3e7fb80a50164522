//! Cross-checks between independent computation routes: the four exact
//! volume algorithms against each other on handcrafted and random inputs,
//! exact integrals against the Monte Carlo oracle, and invariance of each
//! route under its own free choices (generic vector, seed, pivot rule).

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyvol::exact::{rat, rat_pow, ratio, Rat, RatMatrix};
use polyvol::{
    brion_volume, certify_bounded, classify_point, enumerate_vertices, eval_T_explicit,
    eval_T_recurrence, hrep_direction_system, integrate_polynomial_hrep, lasserre_volume_with_pivot,
    mc_integrate, mc_volume, sample_generic_c, volume_report, volume_via_T, DirectionMatrix, Error,
    ExponentVector, HPolytope, PivotRule, PointClassification, Polynomial, VolumeMethod,
};

fn pentagon_at(z: i64) -> HPolytope {
    HPolytope::new(
        RatMatrix::from_i64_rows(&[&[1, 1], &[-2, 2], &[2, -1]]),
        vec![rat(z), rat(z), rat(z)],
        true,
    )
    .unwrap()
}

/// All four exact routes on one polytope; returns the common value.
fn four_way(h: &HPolytope, seed: u64) -> Rat {
    let (m, b) = hrep_direction_system(h).unwrap();
    let c = sample_generic_c(&m, seed).unwrap();
    let explicit = eval_T_explicit(&m, &b, &c).unwrap();
    assert_eq!(explicit, eval_T_recurrence(&m, &b).unwrap());
    assert_eq!(
        explicit,
        lasserre_volume_with_pivot(h, PivotRule::FirstNonzero).unwrap()
    );
    let v = enumerate_vertices(h).unwrap();
    assert_eq!(explicit, brion_volume(&v, seed).unwrap());
    explicit
}

#[test]
fn handcrafted_cases_agree_four_ways() {
    // Unit cube, corner simplices, the pentagon, and a skewed triangle
    // with known areas.
    let cube = HPolytope::new(
        RatMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        vec![rat(1); 3],
        true,
    )
    .unwrap();
    assert_eq!(four_way(&cube, 3), rat(1));

    let simplex = HPolytope::new(
        RatMatrix::from_i64_rows(&[&[1, 1, 1]]),
        vec![rat(2)],
        true,
    )
    .unwrap();
    assert_eq!(four_way(&simplex, 4), ratio(8, 6));

    assert_eq!(four_way(&pentagon_at(2), 5), ratio(17, 12));

    let skewed = HPolytope::new(
        RatMatrix::from_i64_rows(&[&[1, 2], &[3, 1]]),
        vec![rat(4), rat(5)],
        true,
    )
    .unwrap();
    let area = four_way(&skewed, 6);
    // Triangle-by-triangle: the region splits along the vertex (6/5, 7/5).
    assert_eq!(
        area,
        lasserre_volume_with_pivot(&skewed, PivotRule::LastNonzero).unwrap()
    );
    assert!(area > Rat::zero());
}

#[test]
fn monte_carlo_brackets_exact_volumes() {
    for (h, label) in [
        (pentagon_at(1), "pentagon"),
        (
            HPolytope::new(RatMatrix::from_i64_rows(&[&[1, 1, 1]]), vec![rat(2)], true).unwrap(),
            "simplex",
        ),
    ] {
        let exact = volume_via_T(&h, 11).unwrap();
        let target = polyvol::exact::rat_to_f64(&exact);
        let est = mc_volume(&h, 200_000, 17).unwrap();
        assert!(
            (est.mean - target).abs() <= 3.0 * est.std_error,
            "{label}: {} vs {target} (se {})",
            est.mean,
            est.std_error
        );
    }
}

#[test]
fn monte_carlo_brackets_exact_integrals() {
    let h = pentagon_at(1);
    let poly = Polynomial::new(
        2,
        vec![
            (rat(1), ExponentVector::new(vec![1, 0])),
            (rat(1), ExponentVector::new(vec![0, 1])),
            (ratio(3, 2), ExponentVector::new(vec![2, 1])),
        ],
    )
    .unwrap();
    let exact = integrate_polynomial_hrep(&h, &poly).unwrap();
    let target = polyvol::exact::rat_to_f64(&exact);
    let est = mc_integrate(&h, &poly, 200_000, 23).unwrap();
    assert!(
        (est.mean - target).abs() <= 3.0 * est.std_error,
        "{} vs {target} (se {})",
        est.mean,
        est.std_error
    );
}

/// Random bounded simple polytopes in the x ≥ 0 form, by rejection.
fn random_polytopes(count: usize, seed: u64) -> Vec<HPolytope> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 10_000, "rejection sampling stalled");
        let d = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=3usize);
        let entries: Vec<Rat> = (0..m * d).map(|_| rat(rng.gen_range(-3..=3))).collect();
        let b: Vec<Rat> = (0..m).map(|_| rat(rng.gen_range(1..=4))).collect();
        let h = match HPolytope::new(RatMatrix::new(m, d, entries).unwrap(), b, true) {
            Ok(h) => h,
            Err(_) => continue,
        };
        if certify_bounded(&h).is_err() {
            continue;
        }
        match enumerate_vertices(&h) {
            Ok(_) => out.push(h),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    out
}

#[test]
fn free_choices_do_not_change_volumes() {
    // Pivot rule, Brion sampling seed, and the generic vector are all
    // internal choices; every combination must give the same exact value.
    for (i, h) in random_polytopes(30, 99).iter().enumerate() {
        let first = lasserre_volume_with_pivot(h, PivotRule::FirstNonzero).unwrap();
        let last = lasserre_volume_with_pivot(h, PivotRule::LastNonzero).unwrap();
        assert_eq!(first, last, "pivot rules disagree on case {i}");
        let v = enumerate_vertices(h).unwrap();
        assert_eq!(first, brion_volume(&v, 7).unwrap(), "case {i}");
        assert_eq!(first, brion_volume(&v, 77).unwrap(), "case {i}");
        assert_eq!(first, volume_via_T(h, 7).unwrap(), "case {i}");
        assert_eq!(first, volume_via_T(h, 77).unwrap(), "case {i}");
    }
}

#[test]
fn dilating_the_right_hand_side_scales_volumes() {
    for (i, h) in random_polytopes(10, 321).iter().enumerate() {
        let d = h.dim();
        let base = volume_via_T(h, 5).unwrap();
        for rho in [rat(2), ratio(3, 2)] {
            let scaled_b: Vec<Rat> = h.b().iter().map(|bi| bi * &rho).collect();
            let scaled = HPolytope::new(h.a().clone(), scaled_b, true).unwrap();
            let expected = &base * rat_pow(&rho, d);
            assert_eq!(volume_via_T(&scaled, 5).unwrap(), expected, "case {i}");
        }
    }
}

#[test]
fn explicit_and_recurrence_agree_on_random_direction_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 50 {
        attempts += 1;
        assert!(attempts < 20_000, "rejection sampling stalled");
        let s = rng.gen_range(1..=3usize);
        let n = rng.gen_range(s..=7usize);
        let entries: Vec<Rat> = (0..s * n).map(|_| rat(rng.gen_range(-3..=3))).collect();
        let dm = match DirectionMatrix::new(RatMatrix::new(s, n, entries).unwrap()) {
            Ok(dm) => dm,
            Err(_) => continue, // rank-deficient or not pointed
        };
        // An interior-ish point: a strictly positive combination of columns.
        let u: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(1..=5))).collect();
        let x = dm.matrix().mul_vec(&u).unwrap();
        if classify_point(&dm, &x).unwrap() != PointClassification::Interior {
            continue;
        }
        let c = sample_generic_c(&dm, accepted as u64 + 1).unwrap();
        assert_eq!(
            eval_T_explicit(&dm, &x, &c).unwrap(),
            eval_T_recurrence(&dm, &x).unwrap(),
            "s={s}, n={n}, case {accepted}"
        );
        accepted += 1;
    }
}

#[test]
fn report_api_is_consistent_across_methods() {
    let h = pentagon_at(3);
    let mut values = Vec::new();
    for (method, name) in [
        (VolumeMethod::Explicit, "explicit"),
        (VolumeMethod::Recurrence, "recurrence"),
        (VolumeMethod::Lasserre, "lasserre"),
        (VolumeMethod::Brion, "brion"),
    ] {
        let r = volume_report(&h, method, 13).unwrap();
        assert_eq!(r.method, name);
        assert!(r.value.is_rational());
        values.push(r.value.coeff.clone());
    }
    assert!(values.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(values[0], ratio(17 * 9, 48));
}
