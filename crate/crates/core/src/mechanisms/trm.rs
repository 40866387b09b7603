use std::collections::VecDeque;

use num_traits::Zero;

use super::{median_multiset, Diagnostics, Instance, MechanismOutcome, OutcomeKind, PointDistribution};
use crate::median::closest_median;
use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric, VertexId};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrmVertex {
    /// Where this vertex of the working tree sits in the input metric.
    pub point: PointRef,
    pub working: VertexId,
    pub parent: Option<VertexId>,
    pub size: usize,
    pub treesize: usize,
    pub in_x: bool,
    pub c: Rational,
    pub p: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrmDiagnostics {
    pub medians: Vec<PointRef>,
    pub root: PointRef,
    /// One record per vertex of the working tree, indexed by working id.
    pub vertices: Vec<TrmVertex>,
    /// Input metric with edges split at the root and at every median.
    pub working_metric: TreeMetric,
}

/// Tree randomized mechanism.
pub fn trm(inst: &Instance) -> Result<MechanismOutcome> {
    trm_from_medians(&inst.metric, &inst.z, &inst.mediator_medians()?)
}

pub fn trm_from_medians(metric: &TreeMetric, z: &PointRef, medians: &[(PointRef, usize)]) -> Result<MechanismOutcome> {
    let root = closest_median(metric, &median_multiset(medians)?, z)?.chosen;

    let mut cut_points = vec![root.clone()];
    cut_points.extend(medians.iter().map(|(p, _)| p.clone()));
    let split = metric.split_points(&cut_points)?;
    let working = &split.metric;
    let root_vertex = split.vertices[0];

    let count = working.vertex_count();
    let mut size = vec![0usize; count];
    for ((_, n), v) in medians.iter().zip(&split.vertices[1..]) {
        size[v.0] += n;
    }
    let n: usize = medians.iter().map(|(_, k)| k).sum();

    let mut parent = vec![None; count];
    let mut order = Vec::with_capacity(count);
    let mut seen = vec![false; count];
    let mut queue = VecDeque::from([root_vertex]);
    seen[root_vertex.0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(w, _) in working.neighbors(u) {
            if !seen[w.0] {
                seen[w.0] = true;
                parent[w.0] = Some(u);
                queue.push_back(w);
            }
        }
    }
    let mut treesize = size.clone();
    for &u in order.iter().rev() {
        if let Some(p) = parent[u.0] {
            treesize[p.0] += treesize[u.0];
        }
    }

    // Membership in X compares treesize(u) >= n/4, i.e. 4 * treesize(u) >= n.
    let in_x: Vec<bool> = treesize.iter().map(|t| 4 * t >= n).collect();
    let half = rational::frac(n as i64, 2);
    let quarter = rational::frac(n as i64, 4);
    let c: Vec<Rational> = (0..count)
        .map(|u| if u == root_vertex.0 { half.clone() } else { quarter.clone() })
        .collect();
    let excess = |u: usize| (rational::int(treesize[u] as i64) - &c[u]) / &half;

    let mut p = vec![Rational::zero(); count];
    for u in 0..count {
        if in_x[u] {
            p[u] += excess(u);
            if let Some(q) = parent[u] {
                p[q.0] -= excess(u);
            }
        }
    }

    let vertices: Vec<TrmVertex> = (0..count)
        .map(|u| TrmVertex {
            point: split.origin[u].clone(),
            working: VertexId(u),
            parent: parent[u],
            size: size[u],
            treesize: treesize[u],
            in_x: in_x[u],
            c: c[u].clone(),
            p: p[u].clone(),
        })
        .collect();
    let distribution = PointDistribution::new(metric, vertices.iter().map(|v| (v.point.clone(), v.p.clone())))?;
    Ok(MechanismOutcome {
        kind: OutcomeKind::Randomized(distribution),
        diagnostics: Diagnostics::Trm(Box::new(TrmDiagnostics {
            medians: medians.iter().map(|(m, _)| m.clone()).collect(),
            root,
            vertices,
            working_metric: split.metric,
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::families;
    use crate::mechanisms::{tprm, Mediator};
    use crate::rational::{frac, int};

    fn diagnostics(outcome: &MechanismOutcome) -> &TrmDiagnostics {
        match &outcome.diagnostics {
            Diagnostics::Trm(d) => d,
            other => panic!("unexpected diagnostics {other:?}"),
        }
    }

    #[test]
    fn figure_one() {
        let inst = families::fig1_tree();
        let out = trm(&inst).unwrap();
        let d = out.distribution().unwrap();
        let at = |name: &str| d.probability(&inst.metric.parse_point(name).unwrap());
        assert_eq!(at("B"), frac(1, 50));
        assert_eq!(at("E"), frac(1, 5));
        assert_eq!(at("R"), frac(12, 25));
        assert_eq!(at("D"), frac(1, 10));
        assert_eq!(at("F"), frac(1, 5));
        assert_eq!(at("B1"), int(0));
        assert_eq!(d.iter().map(|(_, p)| p.clone()).sum::<Rational>(), int(1));

        let diag = diagnostics(&out);
        let record = |name: &str| {
            let v = inst.metric.vertex(name).unwrap();
            diag.vertices.iter().find(|r| r.point == PointRef::Vertex(v)).unwrap().clone()
        };
        assert_eq!(record("R").treesize, 100);
        assert_eq!(record("E").treesize, 36);
        assert_eq!(record("F").treesize, 40);
        assert_eq!(record("B").treesize, 26);
        assert!(record("B1").in_x);
        assert!(!record("A").in_x);
        assert_eq!(diag.root, inst.metric.parse_point("R").unwrap());
    }

    #[test]
    fn line_of_eight_matches_tprm() {
        let base = families::ex51(&int(0), &int(1), 1, 3).unwrap();
        let zero = base.metric.parse_point("0").unwrap();
        let one = base.metric.parse_point("1").unwrap();
        let inst = Instance::new(
            base.metric.clone(),
            zero.clone(),
            vec![
                Mediator { name: "d1".into(), z: zero.clone(), agents: vec![zero.clone(); 4] },
                Mediator { name: "d2".into(), z: zero.clone(), agents: vec![one.clone(); 4] },
            ],
        )
        .unwrap();
        let d = trm(&inst).unwrap().to_distribution();
        assert_eq!(d.probability(&zero), frac(1, 2));
        assert_eq!(d.probability(&one), frac(1, 2));
        assert_eq!(d, tprm(&inst).unwrap().to_distribution());
    }

    #[test]
    fn interior_medians_are_split_points() {
        let metric = TreeMetric::path_graph(&["a", "b"], &[int(4)]).unwrap();
        let p = metric.parse_point("a~b@1").unwrap();
        let q = metric.parse_point("a~b@3").unwrap();
        let out = trm_from_medians(&metric, &p, &[(p.clone(), 3), (q.clone(), 2)]).unwrap();
        let d = out.to_distribution();
        assert_eq!(d.probability(&p) + d.probability(&q), int(1));
        assert_eq!(diagnostics(&out).working_metric.vertex_count(), 4);
    }

    #[test]
    fn single_mediator_is_a_point_mass() {
        let inst = families::fig1_tree();
        let solo = Instance { mediators: vec![inst.mediators[1].clone()], ..inst.clone() };
        let d = trm(&solo).unwrap().to_distribution();
        assert_eq!(d.len(), 1);
        assert_eq!(d.probability(&solo.mediators[0].agents[0]), int(1));
    }
}
