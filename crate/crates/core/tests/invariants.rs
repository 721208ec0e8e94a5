use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use thermoform_core::parabolic::ParabolicMap;
use thermoform_core::shift::{lattice_test, Lattice};
use thermoform_core::{orbit, transfer, Arc, ArcSet, BlaschkeMap, CirclePoint, Observable};

fn one_zero() -> impl Strategy<Value = BlaschkeMap> {
    (0.0..0.8f64, 0.0..TAU).prop_map(|(r, phi)| BlaschkeMap::one_zero(Complex64::from_polar(r, phi)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn boundary_preimages_map_back(map in one_zero(), target in 0.0..TAU) {
        let pre = map.boundary_preimages(CirclePoint::new(target)).unwrap();
        prop_assert_eq!(pre.len(), map.degree());
        for p in pre {
            prop_assert!(CirclePoint::new(map.circle_map(p.angle())).distance(CirclePoint::new(target)) < 1e-10);
        }
    }

    #[test]
    fn clark_measures_are_probabilities(map in one_zero(), alpha in 0.0..TAU) {
        let mu = map.clark_measure(CirclePoint::new(alpha)).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-10);
        prop_assert!(mu.atoms.iter().all(|(_, m)| *m > 0.0));
    }

    #[test]
    fn lebesgue_is_conformal(map in one_zero()) {
        let op = transfer::assemble_operator(&map, Complex64::new(1.0, 0.0), None, 64).unwrap();
        let s = transfer::leading_eigen(&op, 1e-12).unwrap();
        prop_assert!((s.lambda - 1.0).norm() < 1e-10);
    }

    #[test]
    fn counts_grow_with_t(map in one_zero(), x in 0.0..TAU, t in 0.0..6.0f64) {
        let l = orbit::enumerate(&map, CirclePoint::new(x), t).unwrap();
        let half = ArcSet::new(vec![Arc::new(0.0, 3.0)]).unwrap();
        let rest = ArcSet::new(vec![Arc::new(3.0, TAU)]).unwrap();
        let mut last = 0;
        for k in 0..=12 {
            let n = l.count(t * k as f64 / 12.0, true);
            prop_assert!(n >= last);
            last = n;
        }
        prop_assert_eq!(l.total(), last);
        // the two arcs share only their endpoints, which no preimage hits generically
        let split = l.restrict_arcs(&half).total() + l.restrict_arcs(&rest).total();
        prop_assert!(split >= l.total() && split <= l.total() + 2);
        prop_assert!(l.count(t, false) <= l.count(t, true));
    }

    #[test]
    fn parabolic_preimages_preserve_lebesgue(
        b in -3.0..3.0f64,
        gap in 0.1..4.0f64,
        t1 in 0.05..2.0f64,
        t2 in 0.05..2.0f64,
        y in -50.0..50.0f64,
    ) {
        let f = ParabolicMap::new(vec![(b, t1), (b + gap, t2)], 0.0).unwrap();
        let zs = f.preimages(y).unwrap();
        prop_assert!(zs.windows(2).all(|w| w[0] < w[1]));
        let total: f64 = zs.iter().map(|z| 1.0 / f.derivative(*z)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integer_multiples_form_a_lattice(a in 0.1..3.0f64, ks in prop::collection::vec(1u32..50, 2..12)) {
        let values: Vec<f64> = ks.iter().map(|k| *k as f64 * a).collect();
        match lattice_test(&values, 1e-9) {
            Lattice::Lattice { generator } => {
                let m = (generator / a).round();
                prop_assert!(m >= 1.0 && (generator - m * a).abs() < 1e-8 * a);
                for v in &values {
                    let k = (v / generator).round();
                    prop_assert!((v - k * generator).abs() < 1e-8 * v);
                }
            }
            Lattice::Generic => prop_assert!(false, "multiples of {} judged generic", a),
        }
    }

    #[test]
    fn observables_round_trip(c in -3.0..3.0f64, k in 1u32..8, j in 1u32..8) {
        let h = Observable::cos(k).scaled(c).plus(&Observable::sin(j));
        let back: Observable = h.to_string().parse().unwrap();
        for i in 0..16 {
            let theta = TAU * i as f64 / 16.0;
            prop_assert!((back.eval(theta) - h.eval(theta)).abs() < 1e-12);
        }
    }
}
