//! Randomized invariants: statements that must hold for every mass ratio,
//! every time, and every field, checked over generated inputs.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use feynman_checkers::field::{EdgeField, EdgeMap, FieldMode, FieldRow};
use feynman_checkers::lattice::{huygens_compose, CheckerPath, Move};
use feynman_checkers::{amplitude, amplitude_bruteforce, probability, AmplitudeRow, LatticeParams};

fn rational_mu() -> impl Strategy<Value = (u64, u64)> {
    (0u64..=30, 1u64..=30)
}

proptest! {
    // Sum of P(x, t) over the slice is exactly 1 in exact mode.
    #[test]
    fn probability_is_conserved_exactly((p, q) in rational_mu(), t in 1i64..=40) {
        let params = LatticeParams::exact(p, q).unwrap();
        let row = AmplitudeRow::evolve_to(&params, t).unwrap();
        let total = row.probability_sum_exact().unwrap();
        prop_assert!(total.is_one(), "sum = {total} at t = {t}, mu = {p}/{q}");
    }

    // Amplitudes vanish exactly off the light cone and off the parity class.
    #[test]
    fn support_is_the_even_parity_cone(mu in 0.0f64..=2.0, t in 1i64..=30, x in -35i64..=35) {
        let params = LatticeParams::float(mu).unwrap();
        let a = amplitude(x, t, &params).unwrap();
        if x.abs() > t || (x + t) % 2 != 0 {
            prop_assert_eq!((a.a1, a.a2), (0.0, 0.0));
        } else {
            let p = probability(x, t, &params).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }

    // Each slice satisfies the three mirror identities with zero residual
    // in exact arithmetic.
    #[test]
    fn mirror_identities_hold_exactly((p, q) in rational_mu(), t in 1i64..=30) {
        let params = LatticeParams::exact(p, q).unwrap();
        let report = feynman_checkers::lattice::check_symmetry(t, &params).unwrap();
        prop_assert!(report.exact);
        prop_assert_eq!(report.max_violation(), 0.0);
    }

    // A path's endpoint lies on the support cone and its turn count fits
    // in the path length.
    #[test]
    fn path_geometry_is_consistent(free in proptest::collection::vec(any::<bool>(), 0..=12)) {
        let moves: Vec<Move> = free
            .iter()
            .map(|right| if *right { Move::UpRight } else { Move::UpLeft })
            .collect();
        let path = CheckerPath::new(&moves);
        let (x, t) = path.endpoint();
        prop_assert_eq!(t, moves.len() as i64 + 1);
        prop_assert!(x.abs() <= t);
        prop_assert_eq!((x + t) % 2, 0);
        prop_assert!(path.turns() <= (t - 1) as usize);
    }

    // The slice recurrence reproduces the path sum over all 2^{t-1} paths.
    #[test]
    fn evolution_matches_path_enumeration((p, q) in rational_mu(), t in 1i64..=9, x in -9i64..=9) {
        let params = LatticeParams::exact(p, q).unwrap();
        let fast = amplitude(x, t, &params).unwrap();
        let slow = amplitude_bruteforce(x, t, &params).unwrap();
        prop_assert!((fast.a1 - slow.a1).abs() < 1e-12);
        prop_assert!((fast.a2 - slow.a2).abs() < 1e-12);
    }

    // Rebuilding a slice from any earlier slice gives the same slice.
    #[test]
    fn slice_composition_matches_direct_evolution(
        (p, q) in rational_mu(),
        t_prime in 1i64..=18,
        extra in 1i64..=18,
    ) {
        let params = LatticeParams::exact(p, q).unwrap();
        let t = t_prime + extra;
        let composed = huygens_compose(t_prime, t, &params).unwrap();
        let direct = AmplitudeRow::evolve_to(&params, t).unwrap();
        for x in direct.support() {
            let lhs = composed.exact_at(x).unwrap();
            let rhs = direct.exact_at(x).unwrap();
            prop_assert!(lhs.value_eq(&rhs), "x = {x}, t = {t}");
        }
    }

    // Conservation survives any choice of edge signs: the scaled square
    // sum is exactly 2^{t-1} for every field.
    #[test]
    fn field_conservation_holds_for_random_signs(
        flips in proptest::collection::vec((-30i64..=30, 1i64..=29), 0..=40),
        t_max in 2i64..=30,
    ) {
        let mut map = EdgeMap::with_default(1).unwrap();
        for (x, t) in flips {
            map.set(2 * x + 1, 2 * t + 1, -1).unwrap();
        }
        let u = EdgeField::Custom(map);
        let mut row = FieldRow::initial(FieldMode::Exact);
        while row.t() < t_max {
            row = row.evolve(&u).unwrap();
        }
        let (s1, s2) = row.exact_component_sums().unwrap();
        let expected = BigInt::from(2).pow((t_max - 1) as u32);
        prop_assert_eq!(s1 + s2, expected);
    }

    // The first component is insensitive to the sign of the last move
    // only at the slice edges; overall each probability stays within [0, 1]
    // and the slice total within an ulp of 1 in float mode.
    #[test]
    fn float_mode_probabilities_are_normalized(mu in 0.0f64..=1.5, t in 1i64..=60) {
        let params = LatticeParams::float(mu).unwrap();
        let row = AmplitudeRow::evolve_to(&params, t).unwrap();
        let total = row.probability_sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "total = {total}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Zero mass moves ballistically: all probability sits at x = t.
    #[test]
    fn massless_walk_is_ballistic(t in 1i64..=120) {
        let params = LatticeParams::exact(0, 1).unwrap();
        let row = AmplitudeRow::evolve_to(&params, t).unwrap();
        let p = row.exact_at(t).unwrap().probability();
        prop_assert!(p.is_one());
        for x in row.support() {
            if x != t {
                prop_assert!(row.exact_at(x).unwrap().probability().is_zero());
            }
        }
    }
}
