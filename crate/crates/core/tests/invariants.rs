use proptest::prelude::*;

use robustmin::comparators::{dd_restart_search, pso_search, DescentParams, PsoParams};
use robustmin::harness::wilcoxon_rank_sum;
use robustmin::leh::{leh_search, GaLeh, RandomLeh, SearchOutcome};
use robustmin::testbed::TestFunction;
use robustmin::voronoi::{vor_leh, VoronoiLeh};
use robustmin::{min_distance_to_set, EvaluationLedger, HighCostSet, PointSet, Problem, RngStream};

fn function() -> impl Strategy<Value = TestFunction> {
    prop::sample::select(TestFunction::ALL.to_vec())
}

fn dim_for(f: TestFunction, pick: usize) -> usize {
    if f == TestFunction::Poly2D {
        2
    } else {
        2 + pick % 4
    }
}

fn run(
    name: &str,
    problem: &Problem,
    budget: usize,
    seed: u64,
    max_search: usize,
) -> (EvaluationLedger, SearchOutcome) {
    let mut ledger = EvaluationLedger::new(problem.dim(), budget);
    let mut rng = RngStream::new(seed);
    let out = match name {
        "rnd" => leh_search(
            problem,
            &mut ledger,
            &mut rng,
            &mut RandomLeh::default(),
            1,
            max_search,
        ),
        "ga" => leh_search(
            problem,
            &mut ledger,
            &mut rng,
            &mut GaLeh::default(),
            1,
            max_search,
        ),
        "vor" => leh_search(
            problem,
            &mut ledger,
            &mut rng,
            &mut VoronoiLeh::default(),
            1,
            max_search,
        ),
        "pso" => pso_search(
            problem,
            &mut ledger,
            &mut rng,
            &PsoParams::default(),
            max_search,
        ),
        _ => dd_restart_search(
            problem,
            &mut ledger,
            &mut rng,
            &DescentParams::default(),
            max_search,
        ),
    };
    (ledger, out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn searches_respect_budget_and_keep_tau_monotone(
        f in function(),
        pick in 0usize..4,
        budget in 20usize..400,
        max_search in 1usize..60,
        seed in any::<u64>(),
        which in 0usize..5,
    ) {
        let dim = dim_for(f, pick);
        let problem = f.make_problem(dim).unwrap();
        let names = ["rnd", "ga", "pso", "ddre", "vor"];
        let name = if dim != 2 && which == 4 { "rnd" } else { names[which] };
        let (ledger, out) = run(name, &problem, budget, seed, max_search);

        prop_assert!(ledger.evaluations_used() <= budget);
        prop_assert_eq!(out.evaluations_used, ledger.evaluations_used());
        prop_assert!(problem.contains(&out.best_point));
        for w in out.trace.windows(2) {
            prop_assert!(w[1].tau <= w[0].tau);
        }
        if let Some(last) = out.trace.last() {
            prop_assert_eq!(last.tau, out.best_value);
        }
    }

    #[test]
    fn same_seed_same_search(f in function(), seed in any::<u64>(), which in 0usize..4) {
        let problem = f.make_problem(2).unwrap();
        let name = ["rnd", "ga", "vor", "ddre"][which];
        let (_, a) = run(name, &problem, 300, seed, 20);
        let (_, b) = run(name, &problem, 300, seed, 20);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn high_cost_members_are_exactly_the_threshold_crossers(
        values in prop::collection::vec(-10.0f64..10.0, 1..80),
        pick in any::<prop::sample::Index>(),
    ) {
        let table = values.clone();
        let problem = Problem::new("lookup", vec![0.0], vec![1000.0], 1.0, move |x| table[x[0] as usize]).unwrap();
        let mut ledger = EvaluationLedger::new(1, values.len());
        for i in 0..values.len() {
            ledger.evaluate(&problem, &[i as f64]).unwrap();
        }
        let tau = values[pick.index(values.len())];
        let set = HighCostSet::from_ledger(&ledger, tau);
        let expected: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= tau).collect();
        prop_assert_eq!(set.members(), expected.as_slice());
        prop_assert!(set.members().contains(&pick.index(values.len())));
    }

    #[test]
    fn voronoi_radius_is_attained_and_not_beaten_by_samples(
        sites in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40),
        seed in any::<u64>(),
    ) {
        let problem = Problem::new("unit", vec![0.0, 0.0], vec![1.0, 1.0], 0.01, |_| 0.0).unwrap();
        let hcps = PointSet::from_rows(2, sites.iter().map(|&(x, y)| [x, y]));
        let leh = vor_leh(&hcps, &problem);
        prop_assert!(problem.contains(&leh.center));
        prop_assert!((min_distance_to_set(&leh.center, &hcps).0 - leh.radius).abs() < 1e-9);
        let mut rng = RngStream::new(seed);
        for _ in 0..500 {
            let q = [rng.uniform(), rng.uniform()];
            prop_assert!(min_distance_to_set(&q, &hcps).0 <= leh.radius + 1e-9);
        }
    }

    #[test]
    fn rank_sum_is_antisymmetric(
        a in prop::collection::vec(-5.0f64..5.0, 1..25),
        b in prop::collection::vec(-5.0f64..5.0, 1..25),
    ) {
        let ab = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        let ba = wilcoxon_rank_sum(&b, &a, 0.05).unwrap();
        let total = (a.len() + b.len()) as f64;
        prop_assert!((ab.statistic + ba.statistic - total * (total + 1.0) / 2.0).abs() < 1e-9);
        prop_assert!((ab.p - ba.p).abs() < 1e-9);
        prop_assert!(ab.p > 0.0 && ab.p <= 1.0);
    }
}
