use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use thurston_ergopt::closing::{local_anosov_close, r_theta_gap, GapSpec};
use thurston_ergopt::ergopt::livsic::coboundary;
use thurston_ergopt::ergopt::{max_mean_cycle, q_value, ArcGraph, Method};
use thurston_ergopt::geometry::{address_to_point, point_to_addresses_all};
use thurston_ergopt::potential::{ClosedForm, Cylinders, Potential, PotentialTable};
use thurston_ergopt::subdivision::{load_builtin, SubdivisionRule};
use thurston_ergopt::symbolic::{CylinderGraph, PeriodicOrbit, TileWord};
use thurston_ergopt::tpo::{equilibrium_state, locking_test, tpo_pipeline, TpoConfig};

struct Fixture {
    rule: SubdivisionRule,
    cyl2: Cylinders,
    cyl3: Cylinders,
}

fn pillow() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl2 = Cylinders::new(&rule, 2).unwrap();
        let cyl3 = Cylinders::new(&rule, 3).unwrap();
        Fixture { rule, cyl2, cyl3 }
    })
}

fn table(g: &CylinderGraph, values: &[f64]) -> PotentialTable {
    PotentialTable::new(g.level, 1.0, values.iter().cycle().take(g.node_count()).copied().collect()).unwrap()
}

fn small_graph() -> impl Strategy<Value = ArcGraph> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec((0..n, 0..n, -5.0f64..5.0), 0..3 * n),
        )
            .prop_map(move |(ring, extra)| {
                let mut arcs: Vec<(usize, usize, f64)> =
                    ring.iter().enumerate().map(|(v, &w)| (v, (v + 1) % n, w)).collect();
                arcs.extend(extra.into_iter().filter(|&(a, b, _)| b != (a + 1) % n));
                arcs.sort_by_key(|&(a, b, _)| (a, b));
                arcs.dedup_by_key(|&mut (a, b, _)| (a, b));
                ArcGraph::new(n, &arcs)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mean_cycle_solvers_agree(g in small_graph()) {
        let b = max_mean_cycle(&g, Method::Brute).unwrap();
        let k = max_mean_cycle(&g, Method::Karp).unwrap();
        let h = max_mean_cycle(&g, Method::Howard).unwrap();
        prop_assert!((k.q - b.q).abs() < 1e-12);
        prop_assert!((h.q - b.q).abs() < 1e-12);
        prop_assert!((g.cycle_mean(&h.cycle) - h.q).abs() < 1e-12);
    }

    #[test]
    fn q_is_shift_and_scale_covariant(values in prop::collection::vec(-1.0f64..1.0, 32), c in -3.0f64..3.0, s in 0.1f64..4.0) {
        let g = &pillow().cyl2.graph;
        let t = table(g, &values);
        let q = q_value(g, &t, Method::Howard).unwrap().q;
        let shifted = t.plus(1.0, &PotentialTable::constant(g, c)).unwrap();
        prop_assert!((q_value(g, &shifted, Method::Howard).unwrap().q - (q + c)).abs() < 1e-12);
        prop_assert!((q_value(g, &t.scaled(s), Method::Karp).unwrap().q - s * q).abs() < 1e-12);
    }

    #[test]
    fn coboundaries_do_not_move_q(values in prop::collection::vec(-1.0f64..1.0, 128), v in prop::collection::vec(-1.0f64..1.0, 32)) {
        let f = pillow();
        let g = &f.cyl3.graph;
        let t = table(g, &values);
        let cob = coboundary(&f.cyl2.graph, &table(&f.cyl2.graph, &v), g).unwrap();
        let q0 = q_value(g, &t, Method::Howard).unwrap().q;
        let q1 = q_value(g, &t.plus(1.0, &cob).unwrap(), Method::Howard).unwrap().q;
        prop_assert!((q0 - q1).abs() < 1e-12);
    }

    #[test]
    fn decoded_points_carry_their_address(seed in any::<u64>(), n in 1usize..6) {
        let f = pillow();
        let a = &f.cyl3.transition;
        let w = a.random_word(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let inf = a.canonical_extension(&w);
        prop_assert!(inf.check_admissible(&f.rule).is_ok());
        let x = address_to_point(&f.rule, &inf).unwrap();
        prop_assert!(point_to_addresses_all(&f.rule, &x, n).contains(&w));
    }

    #[test]
    fn table_json_round_trips(values in prop::collection::vec(-10.0f64..10.0, 32)) {
        let g = &pillow().cyl2.graph;
        let t = table(g, &values);
        let back = PotentialTable::from_json(g, &t.to_json(g)).unwrap();
        prop_assert_eq!(back.values, t.values);
    }

    #[test]
    fn closing_decays_at_the_expansion_rate(seed in any::<u64>(), l in 4usize..10, extra in 3usize..6) {
        let f = pillow();
        let a = &f.cyl3.transition;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = a.random_word(l, &mut rng).into_symbols();
        prop_assume!(a.admissible(u[l - 1], u[0]));
        let mut s = u.clone();
        s.extend_from_slice(&u[..extra.min(l)]);
        let tail = a.random_word(4, &mut rng).into_symbols();
        prop_assume!(a.admissible(*s.last().unwrap(), tail[0]));
        s.extend(tail);
        let r = local_anosov_close(&f.rule, a, &TileWord::new(s), l, 1.0, 0.0).unwrap();
        // a tail that repeats the period leaves nothing but rounding to fit
        prop_assume!(r.shadow.distances.iter().any(|&d| d > 1e-12));
        prop_assert!((r.shadow.slope + 2f64.ln()).abs() < 0.2 * 2f64.ln(), "{:?}", r.shadow);
        prop_assert!(r.orbit.period <= l);
    }

    #[test]
    fn r_theta_gap_is_capped_by_r(start in 0u16..8, steps in prop::collection::vec(0usize..4, 0..5), r in 0.01f64..2.0, theta in 0.01f64..2.0) {
        let f = pillow();
        let a = &f.cyl3.transition;
        let mut cycle = vec![start];
        for k in steps {
            let succ = a.successors(*cycle.last().unwrap());
            cycle.push(succ[k % succ.len()]);
        }
        prop_assume!(a.admissible(*cycle.last().unwrap(), cycle[0]));
        let orbit = PeriodicOrbit::from_symbols(&f.rule, &cycle).unwrap();
        let g = r_theta_gap(&orbit, &GapSpec::new(r, theta).unwrap());
        prop_assert!(g >= 0.0 && g <= r);
        // two codings can land on the same point, and only then is the gap zero
        let distinct = orbit.points.iter().enumerate().all(|(i, x)| orbit.points[..i].iter().all(|y| y != x));
        prop_assert_eq!(g > 0.0, distinct || orbit.period == 1);
    }

    #[test]
    fn gibbs_weights_are_a_probability_vector(values in prop::collection::vec(-1.0f64..1.0, 32), t in 0.0f64..64.0) {
        let g = &pillow().cyl2.graph;
        let mu = equilibrium_state(g, &table(g, &values), t).unwrap();
        let total: f64 = mu.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(mu.weights.iter().all(|&w| w >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tpo_is_deterministic_and_locks(seed in any::<u64>()) {
        let f = pillow();
        let phi = Potential::Closed(ClosedForm::random_smooth(&f.rule, 6, &mut ChaCha8Rng::seed_from_u64(seed)));
        let cfg = TpoConfig::new(1.0);
        let r1 = tpo_pipeline(&f.rule, &f.cyl3, &phi, &cfg).unwrap();
        let r2 = tpo_pipeline(&f.rule, &f.cyl3, &phi, &cfg).unwrap();
        prop_assert_eq!(&r1.orbit_cycle, &r2.orbit_cycle);
        prop_assert_eq!(r1.q_after, r2.q_after);
        prop_assert!(r1.success, "{:?}", r1.notes);
        let l1 = locking_test(&f.rule, &f.cyl3, &r1.perturbed, 5, r1.epsilon / 10.0, seed).unwrap();
        let l2 = locking_test(&f.rule, &f.cyl3, &r2.perturbed, 5, r2.epsilon / 10.0, seed).unwrap();
        prop_assert_eq!(l1.successes, l2.successes);
        prop_assert_eq!(l1.successes, 5);
    }
}
