//! Randomized invariants over generated trees and instances.

use facloc::io::generate::{gen_hierarchy, gen_random, GeneratorParams};
use facloc::mechanisms::{iwmm, position_probabilities, Diagnostics, Instance, Mechanism, PointDistribution};
use facloc::median::{closest_median, is_weighted_median, weighted_cost};
use facloc::oracle::{competitive_report, cost_report, derandomize, expected_cost, social_cost, Ratio};
use facloc::rational::{frac, int, Rational};
use facloc::{PointRef, WeightedMultiset};
use proptest::prelude::*;

fn instance(seed: u64, path_only: bool) -> Instance {
    gen_random(&GeneratorParams {
        seed,
        path_only,
        vertices: (1, 9),
        ..GeneratorParams::default()
    })
    .unwrap()
}

/// Vertices plus every agent and tie-break point of the instance.
fn points(inst: &Instance) -> Vec<PointRef> {
    let mut pts: Vec<PointRef> = inst.metric.vertices().map(PointRef::Vertex).collect();
    pts.push(inst.z.clone());
    for m in &inst.mediators {
        pts.push(m.z.clone());
        pts.extend(m.agents.iter().cloned());
    }
    pts.sort();
    pts.dedup();
    pts
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(96)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn points_along_a_path_split_its_length(seed in any::<u64>(), i in 0usize..64, j in 0usize..64, k in 0u32..=8) {
        let inst = instance(seed, false);
        let pts = points(&inst);
        let (a, b) = (&pts[i % pts.len()], &pts[j % pts.len()]);
        let d = inst.metric.distance(a, b);
        let q = inst.metric.point_along(a, b, &(&d * frac(k as i64, 8)));
        prop_assert_eq!(inst.metric.distance(a, &q) + inst.metric.distance(&q, b), d.clone());
        prop_assert!(inst.metric.on_path(a, b, &q));
        prop_assert_eq!(inst.metric.distance(a, b), inst.metric.distance(b, a));
    }

    #[test]
    fn splitting_preserves_distances(seed in any::<u64>()) {
        let inst = instance(seed, false);
        let pts = points(&inst);
        let split = inst.metric.split_points(&pts).unwrap();
        for (v, p) in split.vertices.iter().zip(&pts) {
            prop_assert_eq!(&split.origin[v.0], p);
        }
        for p in &pts {
            for q in &pts {
                prop_assert_eq!(split.metric.distance(&split.lift(p), &split.lift(q)), inst.metric.distance(p, q));
            }
        }
    }

    #[test]
    fn component_weights_cover_everything_off_the_point(seed in any::<u64>(), i in 0usize..64) {
        let inst = instance(seed, false);
        let pts = points(&inst);
        let p = &pts[i % pts.len()];
        let set = WeightedMultiset::unit(&inst.agents());
        let total: Rational = inst.metric.component_weights(p, &set).into_iter().sum();
        prop_assert_eq!(total, set.total_weight() - set.weight_at(p));
    }

    #[test]
    fn medians_are_exactly_the_minimizers(seed in any::<u64>()) {
        let inst = instance(seed, false);
        let set = WeightedMultiset::unit(&inst.agents());
        let pts = points(&inst);
        let best = pts.iter().map(|p| weighted_cost(&inst.metric, &set, p)).min().unwrap();
        for p in &pts {
            let median = is_weighted_median(&inst.metric, &set, p).unwrap();
            prop_assert_eq!(median, weighted_cost(&inst.metric, &set, p) == best);
        }
        let chosen = closest_median(&inst.metric, &set, &inst.z).unwrap().chosen;
        prop_assert_eq!(weighted_cost(&inst.metric, &set, &chosen), best);
    }

    #[test]
    fn adding_weight_at_the_median_keeps_it(seed in any::<u64>(), extra in 1i64..5) {
        let inst = instance(seed, false);
        let set = WeightedMultiset::unit(&inst.agents());
        let m = closest_median(&inst.metric, &set, &inst.z).unwrap().chosen;
        let mut more = set.clone();
        more.insert(m.clone(), int(extra), 1).unwrap();
        prop_assert_eq!(closest_median(&inst.metric, &more, &inst.z).unwrap().chosen, m);
    }

    #[test]
    fn trm_probabilities_are_a_distribution(seed in any::<u64>()) {
        let inst = instance(seed, false);
        let out = Mechanism::Trm.run(&inst).unwrap();
        let Diagnostics::Trm(diag) = &out.diagnostics else { panic!("trm diagnostics") };
        let total: Rational = diag.vertices.iter().map(|v| v.p.clone()).sum();
        prop_assert_eq!(total, int(1));
        for v in &diag.vertices {
            prop_assert!(v.p >= int(0) && v.p <= int(1));
        }
    }

    #[test]
    fn mediator_based_mechanisms_see_only_medians(seed in any::<u64>(), i in 0usize..8) {
        let inst = instance(seed, false);
        let medians = inst.mediator_medians().unwrap();
        let i = i % inst.mediators.len();
        let (m, n) = &medians[i];
        let collapsed = inst.with_reports(i, vec![m.clone(); *n]);
        for mechanism in [Mechanism::Wmm, Mechanism::Trm] {
            prop_assert_eq!(
                mechanism.run(&inst).unwrap().to_distribution(),
                mechanism.run(&collapsed).unwrap().to_distribution()
            );
        }
    }

    #[test]
    fn ratios_are_at_least_one(seed in any::<u64>()) {
        let inst = instance(seed, false);
        for mechanism in [Mechanism::Wmm, Mechanism::Trm, Mechanism::GlobalMedian] {
            let report = competitive_report(&inst, &mechanism.run(&inst).unwrap()).unwrap();
            prop_assert!(report.ratio >= Ratio::Finite(int(1)));
        }
        let line = instance(seed, true);
        let report = competitive_report(&line, &Mechanism::Tprm.run(&line).unwrap()).unwrap();
        prop_assert!(report.ratio >= Ratio::Finite(int(1)) && report.ratio <= Ratio::Finite(int(2)));
    }

    #[test]
    fn iwmm_respects_its_depth_bound(seed in any::<u64>(), depth in 1usize..=4) {
        let h = gen_hierarchy(&GeneratorParams {
            seed,
            depth: Some(depth),
            mediators: (1, 3),
            agents_per_mediator: (1, 4),
            ..GeneratorParams::default()
        })
        .unwrap();
        let report = cost_report(&h.metric, &h.agents(), &iwmm(&h).unwrap()).unwrap();
        prop_assert!(report.ratio <= Ratio::Finite(int((1 << h.depth()) - 1)));
    }

    #[test]
    fn derandomized_point_dominates(seed in any::<u64>(), weights in proptest::collection::vec(1i64..10, 1..8)) {
        let inst = instance(seed, false);
        let pts = points(&inst);
        let total: i64 = weights.iter().sum();
        let dist = PointDistribution::new(
            &inst.metric,
            weights.iter().enumerate().map(|(i, w)| (pts[(i * 7) % pts.len()].clone(), frac(*w, total))),
        )
        .unwrap();
        let point = derandomize(&inst.metric, &dist).unwrap();
        let agents = inst.agents();
        prop_assert!(social_cost(&inst.metric, &agents, &point) <= expected_cost(&inst.metric, &agents, &dist).unwrap());
        for p in &pts {
            let one = std::slice::from_ref(p);
            prop_assert!(social_cost(&inst.metric, one, &point) <= expected_cost(&inst.metric, one, &dist).unwrap());
        }
    }

    #[test]
    fn tprm_position_mass_is_bounded(n in 1usize..200) {
        let probs = position_probabilities(n);
        prop_assert_eq!(probs.len(), n);
        prop_assert_eq!(probs.iter().cloned().sum::<Rational>(), int(1));
        let mut prefix = int(0);
        for (i, p) in probs.iter().enumerate() {
            prefix += p;
            if n > 1 {
                prop_assert!(prefix <= frac(2 * (i as i64 + 1), n as i64));
            }
            prop_assert_eq!(p, &probs[n - 1 - i]);
        }
    }
}
