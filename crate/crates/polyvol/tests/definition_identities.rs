//! Checks that the computed functions really are the densities they claim
//! to be. T(·|M) is the pushforward of Lebesgue measure on the nonnegative
//! orthant under u ↦ Mu, and the box spline is the density of Mu for u
//! uniform on the unit cube. Both facts are tested through integrals
//! against test sets and test functions whose values are known in closed
//! form, computed here by midpoint quadrature of exact point evaluations.

use polyvol::exact::{rat, rat_to_f64, ratio, Rat, RatMatrix};
use polyvol::{
    eval_box_spline, eval_T_explicit, lasserre_volume, sample_generic_c, DirectionMatrix,
    HPolytope,
};

/// Midpoint rule for f over [0, hi] with `cells` cells.
fn midpoint_1d(hi: f64, cells: usize, mut f: impl FnMut(Rat) -> f64) -> f64 {
    let delta = hi / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let x = Rat::from_float(delta * (i as f64 + 0.5)).unwrap();
        acc += f(x);
    }
    acc * delta
}

#[test]
fn truncated_power_pushes_forward_orthant_measure_on_the_line() {
    // For a single positive row a, ∫₀^R T(t) dt is the volume of the
    // simplex {u ≥ 0 : a·u ≤ R} = Rⁿ/(n!·Πaⱼ), and ∫₀^R t·T(t) dt is
    // n·R^{n+1}/((n+1)!·Πaⱼ). Both integrals are approximated from exact
    // point values of T.
    let cases: [(&[i64], f64, f64); 2] = [
        // a = (1,2): R²/4 = 4 and 2R³/12 = 32/3 at R = 4.
        (&[1, 2], 4.0, 32.0 / 3.0),
        // a = (1,2,3): R³/36 = 16/9 and 3R⁴/144 = 16/3 at R = 4.
        (&[1, 2, 3], 16.0 / 9.0, 16.0 / 3.0),
    ];
    let r = 4.0;
    for (row, mass_target, moment_target) in cases {
        let dm = DirectionMatrix::new(RatMatrix::from_i64_rows(&[row])).unwrap();
        let c = sample_generic_c(&dm, 31).unwrap();
        let mut moment = 0.0;
        let mass = midpoint_1d(r, 4000, |t| {
            let v = rat_to_f64(&eval_T_explicit(&dm, &[t.clone()], &c).unwrap());
            moment += rat_to_f64(&t) * v;
            v
        });
        moment *= r / 4000.0;
        assert!(
            (mass - mass_target).abs() / mass_target < 1e-5,
            "{row:?}: mass {mass} vs {mass_target}"
        );
        assert!(
            (moment - moment_target).abs() / moment_target < 1e-5,
            "{row:?}: moment {moment} vs {moment_target}"
        );
    }
}

#[test]
fn truncated_power_integral_over_a_box_is_a_polytope_volume() {
    // M = [e₁ e₂ e₁+e₂]: integrating T(x|M) over [0,R₁]×[0,R₂] must give
    // vol{u ≥ 0 : u₁+u₃ ≤ R₁, u₂+u₃ ≤ R₂}, which the elimination route
    // computes exactly. T is piecewise linear with a crease along x₁ = x₂,
    // so this exercises genuinely chambered territory.
    let dm =
        DirectionMatrix::new(RatMatrix::from_i64_rows(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
    let c = sample_generic_c(&dm, 37).unwrap();
    let (r1, r2) = (2.0, 3.0);
    let cells = 150;
    let (d1, d2) = (r1 / cells as f64, r2 / cells as f64);
    let mut acc = 0.0;
    for i in 0..cells {
        let x1 = Rat::from_float(d1 * (i as f64 + 0.5)).unwrap();
        for j in 0..cells {
            let x2 = Rat::from_float(d2 * (j as f64 + 0.5)).unwrap();
            acc += rat_to_f64(&eval_T_explicit(&dm, &[x1.clone(), x2.clone()], &c).unwrap());
        }
    }
    acc *= d1 * d2;

    let h = HPolytope::new(
        RatMatrix::from_i64_rows(&[&[1, 0, 1], &[0, 1, 1]]),
        vec![rat(2), rat(3)],
        true,
    )
    .unwrap();
    let target = rat_to_f64(&lasserre_volume(&h).unwrap());
    assert!(
        (acc - target).abs() / target < 1e-2,
        "quadrature {acc} vs exact {target}"
    );
}

#[test]
fn box_spline_matches_moments_of_uniform_sums() {
    // For a single row a, the spline is the density of Σaⱼ·Uⱼ with Uⱼ
    // independent uniform on [0,1]: mass 1, mean Σa/2, raw second moment
    // Σa²/12 + (Σa/2)².
    for row in [vec![1i64, 2], vec![1, 1, 3]] {
        let dm = DirectionMatrix::new(RatMatrix::from_i64_rows(&[&row])).unwrap();
        let total: i64 = row.iter().sum();
        let sumsq: i64 = row.iter().map(|a| a * a).sum();
        let mean_target = total as f64 / 2.0;
        let second_target = sumsq as f64 / 12.0 + mean_target * mean_target;
        let (mut mean, mut second) = (0.0, 0.0);
        let hi = total as f64;
        let cells = 3000;
        let mass = midpoint_1d(hi, cells, |t| {
            let v = rat_to_f64(&eval_box_spline(&dm, &[t.clone()]).unwrap());
            let tf = rat_to_f64(&t);
            mean += tf * v;
            second += tf * tf * v;
            v
        });
        mean *= hi / cells as f64;
        second *= hi / cells as f64;
        assert!((mass - 1.0).abs() < 1e-4, "{row:?}: mass {mass}");
        assert!(
            (mean - mean_target).abs() / mean_target < 1e-4,
            "{row:?}: mean {mean} vs {mean_target}"
        );
        assert!(
            (second - second_target).abs() / second_target < 1e-4,
            "{row:?}: second moment {second} vs {second_target}"
        );
    }
}

#[test]
fn plane_box_spline_matches_uniform_cube_image() {
    // M = [e₁ e₂ e₁+e₂] again: the spline on the plane is the density of
    // (U₁+U₃, U₂+U₃), so its mass is 1 and its mean is (1, 1).
    let dm =
        DirectionMatrix::new(RatMatrix::from_i64_rows(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
    let cells = 100;
    let delta = 2.0 / cells as f64;
    let (mut mass, mut mean1, mut mean2) = (0.0, 0.0, 0.0);
    for i in 0..cells {
        let x1 = Rat::from_float(delta * (i as f64 + 0.5)).unwrap();
        for j in 0..cells {
            let x2 = Rat::from_float(delta * (j as f64 + 0.5)).unwrap();
            let v = rat_to_f64(&eval_box_spline(&dm, &[x1.clone(), x2.clone()]).unwrap());
            mass += v;
            mean1 += rat_to_f64(&x1) * v;
            mean2 += rat_to_f64(&x2) * v;
        }
    }
    let w = delta * delta;
    mass *= w;
    mean1 *= w;
    mean2 *= w;
    assert!((mass - 1.0).abs() < 1e-2, "mass {mass}");
    assert!((mean1 - 1.0).abs() < 1e-2, "first mean {mean1}");
    assert!((mean2 - 1.0).abs() < 1e-2, "second mean {mean2}");
}

#[test]
fn one_fiber_measured_under_three_normalizations() {
    // M = (2,4) at t = 4: the fiber {u ≥ 0 : 2u₁+4u₂ = 4} is the segment
    // from (2,0) to (0,1).
    //   pushforward density: d/dt of t²/16, so T = t/8 = 1/2;
    //   Euclidean length: √(2²+1²) = √5, and √gram·T = √20·(1/2) = √5;
    //   lattice-relative: the column lattice 2ℤ has index 2, and 2·T = 1.
    let dm = DirectionMatrix::new(RatMatrix::from_i64_rows(&[&[2, 4]])).unwrap();
    let t = [rat(4)];
    let c = sample_generic_c(&dm, 41).unwrap();
    assert_eq!(eval_T_explicit(&dm, &t, &c).unwrap(), ratio(1, 2));
    let fiber = polyvol::euclidean_fiber_volume(&dm, &t).unwrap();
    let sq = &fiber.coeff * &fiber.coeff * Rat::from_integer(fiber.radicand.clone());
    assert_eq!(sq, rat(5), "squared fiber length");
    assert_eq!(
        polyvol::exact::maximal_minor_gcd(dm.matrix()).unwrap(),
        num_bigint::BigInt::from(2)
    );
    assert_eq!(polyvol::relative_volume(&dm, &t).unwrap(), rat(1));
}
