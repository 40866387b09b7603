//! Brute-force ground truth: social cost, optimal locations, expected costs,
//! derandomization and competitive ratios.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::mechanisms::{Instance, MechanismOutcome, PointDistribution};
use crate::rational::Rational;
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

/// Sum of distances from `p` to every agent.
pub fn social_cost(metric: &TreeMetric, agents: &[PointRef], p: &PointRef) -> Rational {
    agents.iter().map(|t| metric.distance(p, t)).sum()
}

/// Cheapest location among the vertices and agent locations, with its cost.
/// The first minimizer in point order wins.
pub fn optimal_location(metric: &TreeMetric, agents: &[PointRef]) -> Result<(PointRef, Rational)> {
    if agents.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    let mut candidates: Vec<PointRef> = metric.vertices().map(PointRef::Vertex).collect();
    candidates.extend(agents.iter().cloned());
    candidates.sort();
    candidates.dedup();
    let mut best: Option<(PointRef, Rational)> = None;
    for p in candidates {
        let cost = social_cost(metric, agents, &p);
        if best.as_ref().is_none_or(|(_, b)| &cost < b) {
            best = Some((p, cost));
        }
    }
    Ok(best.expect("candidates are non-empty"))
}

pub fn expected_cost(metric: &TreeMetric, agents: &[PointRef], dist: &PointDistribution) -> Result<Rational> {
    let total: Rational = dist.iter().map(|(_, p)| p.clone()).sum();
    if !total.is_one() {
        return Err(Error::InvalidDistribution("probabilities do not sum to one".into()));
    }
    Ok(dist.iter().map(|(p, prob)| prob * social_cost(metric, agents, p)).sum())
}

/// A single point whose social cost never exceeds the expected cost of
/// `dist`, for any set of agents.
///
/// While more than one support point remains, the two farthest apart are
/// joined by a path and all mass lying on that path moves to its expected
/// position along the path. Distance to a fixed agent is convex along any
/// tree path, so no agent's cost increases at any step.
pub fn derandomize(metric: &TreeMetric, dist: &PointDistribution) -> Result<PointRef> {
    let mut mass: BTreeMap<PointRef, Rational> = dist.iter().map(|(p, q)| (p.clone(), q.clone())).collect();
    if mass.is_empty() {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    while mass.len() > 1 {
        let points: Vec<&PointRef> = mass.keys().collect();
        let mut far = (0, 1, metric.distance(points[0], points[1]));
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = metric.distance(points[i], points[j]);
                if d > far.2 {
                    far = (i, j, d);
                }
            }
        }
        let (a, b) = (points[far.0].clone(), points[far.1].clone());
        let on_path: Vec<PointRef> = mass.keys().filter(|q| metric.on_path(&a, &b, q)).cloned().collect();
        let mut weight = Rational::zero();
        let mut moment = Rational::zero();
        for q in &on_path {
            let w = mass.remove(q).expect("present");
            moment += &w * metric.distance(&a, q);
            weight += w;
        }
        let target = metric.point_along(&a, &b, &(moment / &weight));
        *mass.entry(target).or_insert_with(Rational::zero) += weight;
    }
    Ok(mass.into_keys().next().expect("one point left"))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ratio {
    Finite(Rational),
    /// Positive mechanism cost against a zero optimum.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub cost: Rational,
    pub optimal_location: PointRef,
    pub optimal_cost: Rational,
    pub ratio: Ratio,
}

pub fn ratio(cost: &Rational, optimal: &Rational) -> Ratio {
    if optimal.is_zero() {
        if cost.is_zero() {
            Ratio::Finite(Rational::one())
        } else {
            Ratio::Infinite
        }
    } else {
        Ratio::Finite(cost / optimal)
    }
}

/// Expected cost of `outcome` on `agents` against the optimum.
pub fn cost_report(metric: &TreeMetric, agents: &[PointRef], outcome: &MechanismOutcome) -> Result<CostReport> {
    let cost = expected_cost(metric, agents, &outcome.to_distribution())?;
    let (optimal_location, optimal_cost) = optimal_location(metric, agents)?;
    Ok(CostReport {
        ratio: ratio(&cost, &optimal_cost),
        cost,
        optimal_location,
        optimal_cost,
    })
}

pub fn competitive_report(inst: &Instance, outcome: &MechanismOutcome) -> Result<CostReport> {
    cost_report(&inst.metric, &inst.agents(), outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::families;
    use crate::mechanisms::{tprm, wmm, Mediator};
    use crate::rational::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line() -> TreeMetric {
        TreeMetric::path_graph(&["0", "1", "2"], &[int(1), int(1)]).unwrap()
    }

    fn pts(m: &TreeMetric, names: &[&str]) -> Vec<PointRef> {
        names.iter().map(|n| m.parse_point(n).unwrap()).collect()
    }

    #[test]
    fn costs_and_optimum() {
        let m = line();
        let agents = pts(&m, &["0", "0", "1", "2", "2"]);
        assert_eq!(social_cost(&m, &agents, &m.parse_point("1").unwrap()), int(4));
        assert_eq!(optimal_location(&m, &agents).unwrap(), (m.parse_point("1").unwrap(), int(4)));
        let solo = pts(&m, &["0~1@1/3"]);
        assert_eq!(optimal_location(&m, &solo).unwrap(), (solo[0].clone(), int(0)));
        assert!(optimal_location(&m, &[]).is_err());
    }

    #[test]
    fn ex51_costs() {
        let inst = families::ex51(&int(0), &int(1), 2, 1).unwrap();
        let report = competitive_report(&inst, &wmm(&inst).unwrap()).unwrap();
        assert_eq!(report.cost, int(7));
        assert_eq!(report.ratio, Ratio::Finite(frac(7, 3)));
        let report = competitive_report(&inst, &tprm(&inst).unwrap()).unwrap();
        assert_eq!(report.cost, int(5));
        assert_eq!(report.ratio, Ratio::Finite(frac(5, 3)));

        let mirrored = families::ex51(&int(0), &int(1), 2, 2).unwrap();
        let (p, c) = optimal_location(&mirrored.metric, &mirrored.agents()).unwrap();
        assert_eq!((mirrored.metric.label(&p), c), ("0".to_string(), int(3)));
    }

    #[test]
    fn co_located_agents_have_ratio_one() {
        let m = line();
        let p = m.parse_point("1").unwrap();
        let inst = Instance::new(
            m,
            p.clone(),
            vec![Mediator { name: "d".into(), z: p.clone(), agents: vec![p.clone(); 3] }],
        )
        .unwrap();
        let report = competitive_report(&inst, &wmm(&inst).unwrap()).unwrap();
        assert_eq!(report.ratio, Ratio::Finite(int(1)));
        assert_eq!(ratio(&int(1), &int(0)), Ratio::Infinite);
    }

    #[test]
    fn derandomize_examples() {
        let m = TreeMetric::path_graph(&["0", "1"], &[int(1)]).unwrap();
        let half = PointDistribution::new(&m, [(m.parse_point("0").unwrap(), frac(1, 2)), (m.parse_point("1").unwrap(), frac(1, 2))]).unwrap();
        assert_eq!(m.label(&derandomize(&m, &half).unwrap()), "0~1@1/2");
        let p = m.parse_point("0~1@1/5").unwrap();
        assert_eq!(derandomize(&m, &PointDistribution::point_mass(p.clone())).unwrap(), p);

        let star = TreeMetric::from_named_edges(&["c", "x", "y", "w"], &[("c", "x", int(1)), ("c", "y", int(1)), ("c", "w", int(1))])
            .unwrap();
        let dist = PointDistribution::new(&star, [(star.parse_point("x").unwrap(), frac(1, 2)), (star.parse_point("y").unwrap(), frac(1, 2))])
            .unwrap();
        let center = derandomize(&star, &dist).unwrap();
        assert_eq!(star.label(&center), "c");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vertices: Vec<_> = star.vertices().map(PointRef::Vertex).collect();
        for _ in 0..50 {
            let agents: Vec<_> = (0..rng.gen_range(1..6)).map(|_| vertices[rng.gen_range(0..4)].clone()).collect();
            assert!(social_cost(&star, &agents, &center) <= expected_cost(&star, &agents, &dist).unwrap());
        }
    }

    #[test]
    fn expected_cost_of_a_point_mass() {
        let m = line();
        let agents = pts(&m, &["0", "2"]);
        let p = m.parse_point("1~2@1/2").unwrap();
        assert_eq!(
            expected_cost(&m, &agents, &PointDistribution::point_mass(p.clone())).unwrap(),
            social_cost(&m, &agents, &p)
        );
    }
}
