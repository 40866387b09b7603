//! Named instances used as lower-bound witnesses and worked examples.

use std::sync::Arc;

use num_traits::{One, Signed};

use crate::mechanisms::{HierarchyInstance, HierarchyNode, Instance, Mediator};
use crate::rational::{self, Rational};
use crate::tree_metric::{EdgeId, PointRef, TreeMetric};
use crate::{Error, Result};

fn unit_interval() -> Arc<TreeMetric> {
    Arc::new(TreeMetric::path_graph(&["0", "1"], &[rational::one()]).expect("valid path"))
}

/// Two mediators with `2r + 1` agents each on `[0, 1]`, medians `l` and `h`.
///
/// * variant 1: `d1` has `r + 1` agents at `l` and `r` at `h`; `d2` has all at `h`.
/// * variant 2: `d1` has all at `l`; `d2` has `r` at `l` and `r + 1` at `h`.
/// * variant 3: `d1` all at `l`, `d2` all at `h`.
///
/// Every tie-break point is the vertex `0`.
pub fn ex51(l: &Rational, h: &Rational, r: usize, variant: u8) -> Result<Instance> {
    if l.is_negative() || l >= h || h > &Rational::one() {
        return Err(Error::InvalidParams("need 0 <= l < h <= 1".into()));
    }
    if r == 0 {
        return Err(Error::InvalidParams("r must be at least 1".into()));
    }
    let metric = unit_interval();
    let low = metric.point_on_edge(EdgeId(0), l.clone())?;
    let high = metric.point_on_edge(EdgeId(0), h.clone())?;
    let group = |count: usize, p: &PointRef| vec![p.clone(); count];
    let (d1, d2) = match variant {
        1 => ([group(r + 1, &low), group(r, &high)].concat(), group(2 * r + 1, &high)),
        2 => (group(2 * r + 1, &low), [group(r, &low), group(r + 1, &high)].concat()),
        3 => (group(2 * r + 1, &low), group(2 * r + 1, &high)),
        _ => return Err(Error::InvalidParams(format!("variant must be 1, 2 or 3, got {variant}"))),
    };
    let zero = PointRef::Vertex(metric.vertex("0").expect("vertex 0"));
    Instance::new(
        metric,
        zero.clone(),
        vec![
            Mediator { name: "d1".into(), z: zero.clone(), agents: d1 },
            Mediator { name: "d2".into(), z: zero, agents: d2 },
        ],
    )
}

/// Depth-`s` hierarchy on `[0, 1]`: the center has one child, every mediator
/// above level 1 has two, level-1 mediators hold `r` agents except `d1,1`
/// which holds `r + 1`. Variant 1 puts everyone at `0`; variant 2 puts
/// everyone at `1` except the agents of `d1,1`.
pub fn ex61(r: usize, s: usize, variant: u8) -> Result<HierarchyInstance> {
    if r == 0 || s < 3 {
        return Err(Error::InvalidParams("need r >= 1 and s >= 3".into()));
    }
    if !(1..=2).contains(&variant) {
        return Err(Error::InvalidParams(format!("variant must be 1 or 2, got {variant}")));
    }
    if s > 20 {
        return Err(Error::InvalidParams("s above 20 creates more than a million agents".into()));
    }
    let metric = unit_interval();
    let zero = PointRef::Vertex(metric.vertex("0").expect("vertex 0"));
    let one = PointRef::Vertex(metric.vertex("1").expect("vertex 1"));

    fn build(level: usize, index: usize, r: usize, variant: u8, zero: &PointRef, one: &PointRef) -> HierarchyNode {
        let children = if level == 1 {
            let (count, at) = if index == 1 {
                (r + 1, zero)
            } else if variant == 1 {
                (r, zero)
            } else {
                (r, one)
            };
            vec![HierarchyNode::Agent { name: None, location: at.clone() }; count]
        } else {
            (0..2)
                .map(|k| build(level - 1, 2 * index - 1 + k, r, variant, zero, one))
                .collect()
        };
        HierarchyNode::Mediator {
            name: format!("d{level},{index}"),
            z: zero.clone(),
            children,
        }
    }

    let center = HierarchyNode::Mediator {
        name: "center".into(),
        z: zero.clone(),
        children: vec![build(s - 1, 1, r, variant, &zero, &one)],
    };
    HierarchyInstance::new(metric, center)
}

/// The tree of the TRM illustration: 100 agents, each mediator's agents
/// co-located at the vertex the mediator is named after, unit edges.
pub fn fig1_tree() -> Instance {
    let names = ["R", "E", "F", "A", "B", "B1", "D", "D1"];
    let one = rational::one();
    let edges = [
        ("R", "E", one.clone()),
        ("R", "F", one.clone()),
        ("E", "A", one.clone()),
        ("E", "B", one.clone()),
        ("B", "B1", one.clone()),
        ("F", "D", one.clone()),
        ("D", "D1", one),
    ];
    let metric = TreeMetric::from_named_edges(&names, &edges).expect("valid tree");
    let at = |name: &str| PointRef::Vertex(metric.vertex(name).expect("known vertex"));
    let mediators = [("R", 24), ("A", 10), ("B", 1), ("B1", 25), ("D", 5), ("D1", 25), ("F", 10)]
        .into_iter()
        .map(|(name, count)| Mediator {
            name: name.to_string(),
            z: at(name),
            agents: vec![at(name); count],
        })
        .collect();
    Instance::new(metric.clone(), at("R"), mediators).expect("valid instance")
}

/// Five agents on `[0, 2]`: `A` holds `0, 0, 1`, `B` holds `2, 2`, `C` sits
/// above both and the center above `C`. Every tie-break point is `0`.
pub fn sec6_example() -> HierarchyInstance {
    let metric = TreeMetric::path_graph(&["0", "1", "2"], &[rational::one(), rational::one()]).expect("valid path");
    let at = |name: &str| PointRef::Vertex(metric.vertex(name).expect("known vertex"));
    let agents = |names: &[&str]| {
        names
            .iter()
            .map(|n| HierarchyNode::Agent { name: None, location: at(n) })
            .collect::<Vec<_>>()
    };
    let mediator = |name: &str, children| HierarchyNode::Mediator { name: name.into(), z: at("0"), children };
    let center = mediator(
        "center",
        vec![mediator("C", vec![mediator("A", agents(&["0", "0", "1"])), mediator("B", agents(&["2", "2"]))])],
    );
    HierarchyInstance::new(metric.clone(), center).expect("valid hierarchy")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::median_of_points;
    use crate::oracle::optimal_location;
    use crate::rational::{frac, int};

    #[test]
    fn ex51_shapes() {
        let inst = ex51(&int(0), &int(1), 2, 1).unwrap();
        assert_eq!(inst.agent_count(), 10);
        assert_eq!(labels_of(&inst, 0), ["0", "0", "0", "1", "1"]);
        assert_eq!(labels_of(&inst, 1), ["1"; 5]);
        let inst = ex51(&int(0), &int(1), 1, 3).unwrap();
        assert_eq!(labels_of(&inst, 0), ["0"; 3]);
        assert_eq!(labels_of(&inst, 1), ["1"; 3]);
        assert!(ex51(&int(1), &int(1), 1, 1).is_err());
        assert!(ex51(&int(0), &int(1), 0, 1).is_err());
        assert!(ex51(&int(0), &int(1), 1, 4).is_err());
    }

    fn labels_of(inst: &Instance, i: usize) -> Vec<String> {
        inst.mediators[i].agents.iter().map(|p| inst.metric.label(p)).collect()
    }

    #[test]
    fn ex51_medians_and_optima() {
        for (l, h) in [(int(0), int(1)), (frac(1, 4), frac(2, 3)), (int(0), frac(1, 2))] {
            for r in 1..5 {
                for variant in 1..=3 {
                    let inst = ex51(&l, &h, r, variant).unwrap();
                    let low = inst.metric.point_on_edge(EdgeId(0), l.clone()).unwrap();
                    let high = inst.metric.point_on_edge(EdgeId(0), h.clone()).unwrap();
                    for z in [low.clone(), high.clone()] {
                        assert_eq!(median_of_points(&inst.metric, &inst.mediators[0].agents, &z).unwrap(), low);
                        assert_eq!(median_of_points(&inst.metric, &inst.mediators[1].agents, &z).unwrap(), high);
                    }
                    let (_, cost) = optimal_location(&inst.metric, &inst.agents()).unwrap();
                    if variant != 3 {
                        assert_eq!(cost, (&h - &l) * rational::int(r as i64 + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn ex61_sizes() {
        let h = ex61(2, 3, 2).unwrap();
        assert_eq!(h.agents().len(), 5);
        assert_eq!(h.depth(), 3);
        let labels: Vec<_> = h.agents().iter().map(|p| h.metric.label(p)).collect();
        assert_eq!(labels, ["0", "0", "0", "1", "1"]);
        assert_eq!(ex61(1, 3, 1).unwrap().agents().len(), 3);
        let big = ex61(3, 5, 1).unwrap();
        assert_eq!(big.agents().len(), 3 * 8 + 1);
        assert!(big.agents().iter().all(|p| big.metric.label(p) == "0"));
        assert!(ex61(1, 2, 1).is_err());
    }

    #[test]
    fn sec6_numbers() {
        let h = sec6_example();
        assert_eq!(h.depth(), 3);
        let (p, cost) = optimal_location(&h.metric, &h.agents()).unwrap();
        assert_eq!((h.metric.label(&p), cost), ("1".to_string(), int(4)));
    }

    #[test]
    fn fig1_is_a_hundred_agents() {
        let inst = fig1_tree();
        assert_eq!(inst.agent_count(), 100);
        assert_eq!(inst.mediators.len(), 7);
    }
}
