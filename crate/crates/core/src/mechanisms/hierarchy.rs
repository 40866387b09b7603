use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{median_multiset, Diagnostics, Instance, MechanismOutcome, OutcomeKind};
use crate::median::{closest_median, WeightedMultiset};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

/// A node of a mediation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HierarchyNode {
    Mediator {
        name: String,
        z: PointRef,
        children: Vec<HierarchyNode>,
    },
    Agent {
        name: Option<String>,
        location: PointRef,
    },
}

impl HierarchyNode {
    pub fn agent_count(&self) -> usize {
        match self {
            HierarchyNode::Agent { .. } => 1,
            HierarchyNode::Mediator { children, .. } => children.iter().map(HierarchyNode::agent_count).sum(),
        }
    }

    /// Longest number of edges down to an agent.
    pub fn depth(&self) -> usize {
        match self {
            HierarchyNode::Agent { .. } => 0,
            HierarchyNode::Mediator { children, .. } => 1 + children.iter().map(HierarchyNode::depth).max().unwrap_or(0),
        }
    }

    fn collect_agents(&self, out: &mut Vec<PointRef>) {
        match self {
            HierarchyNode::Agent { location, .. } => out.push(location.clone()),
            HierarchyNode::Mediator { children, .. } => children.iter().for_each(|c| c.collect_agents(out)),
        }
    }
}

/// A mediation tree whose root is the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyInstance {
    pub metric: Arc<TreeMetric>,
    pub center: HierarchyNode,
}

/// A mediator's report during a bottom-up pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeReport {
    pub name: String,
    pub point: PointRef,
    pub agents: usize,
}

impl HierarchyInstance {
    pub fn new(metric: impl Into<Arc<TreeMetric>>, center: HierarchyNode) -> Result<HierarchyInstance> {
        let h = HierarchyInstance {
            metric: metric.into(),
            center,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.center, HierarchyNode::Mediator { .. }) {
            return Err(Error::InvalidInstance("the center must be a mediator node".into()));
        }
        let mut names = BTreeSet::new();
        let mut stack = vec![&self.center];
        while let Some(node) = stack.pop() {
            match node {
                HierarchyNode::Agent { location, .. } => self.metric.check_point(location)?,
                HierarchyNode::Mediator { name, z, children } => {
                    if name.is_empty() || !names.insert(name.as_str()) {
                        return Err(Error::InvalidInstance(format!(
                            "mediator names must be non-empty and unique (`{name}`)"
                        )));
                    }
                    if children.is_empty() {
                        return Err(Error::InvalidInstance(format!("mediator `{name}` has no children")));
                    }
                    self.metric.check_point(z)?;
                    stack.extend(children);
                }
            }
        }
        Ok(())
    }

    /// Two-level hierarchy: the center over the instance's mediators.
    pub fn from_instance(inst: &Instance) -> HierarchyInstance {
        let children = inst
            .mediators
            .iter()
            .map(|m| HierarchyNode::Mediator {
                name: m.name.clone(),
                z: m.z.clone(),
                children: m
                    .agents
                    .iter()
                    .map(|a| HierarchyNode::Agent {
                        name: None,
                        location: a.clone(),
                    })
                    .collect(),
            })
            .collect();
        HierarchyInstance {
            metric: inst.metric.clone(),
            center: HierarchyNode::Mediator {
                name: "center".into(),
                z: inst.z.clone(),
                children,
            },
        }
    }

    pub fn depth(&self) -> usize {
        self.center.depth()
    }

    pub fn agents(&self) -> Vec<PointRef> {
        let mut out = Vec::new();
        self.center.collect_agents(&mut out);
        out
    }

    pub fn center_name(&self) -> &str {
        match &self.center {
            HierarchyNode::Mediator { name, .. } => name,
            HierarchyNode::Agent { .. } => unreachable!("validated"),
        }
    }

    /// Mediators below the center, in preorder.
    pub fn strategic_mediators(&self) -> Vec<&HierarchyNode> {
        let mut out = Vec::new();
        let mut stack: Vec<&HierarchyNode> = match &self.center {
            HierarchyNode::Mediator { children, .. } => children.iter().rev().collect(),
            HierarchyNode::Agent { .. } => Vec::new(),
        };
        while let Some(node) = stack.pop() {
            if let HierarchyNode::Mediator { children, .. } = node {
                out.push(node);
                stack.extend(children.iter().rev());
            }
        }
        out
    }
}

/// Iterative weighted median mechanism.
pub fn iwmm(h: &HierarchyInstance) -> Result<MechanismOutcome> {
    iwmm_with_reports(h, &BTreeMap::new())
}

/// IWMM where the named mediators report the given point instead of their
/// weighted median. Everyone else stays straightforward.
pub fn iwmm_with_reports(h: &HierarchyInstance, overrides: &BTreeMap<String, PointRef>) -> Result<MechanismOutcome> {
    let mut reports = Vec::new();
    let (facility, _) = report_up(&h.metric, &h.center, overrides, &mut reports)?;
    Ok(MechanismOutcome {
        kind: OutcomeKind::Deterministic(facility),
        diagnostics: Diagnostics::Iwmm { reports },
    })
}

fn report_up(
    metric: &TreeMetric,
    node: &HierarchyNode,
    overrides: &BTreeMap<String, PointRef>,
    reports: &mut Vec<NodeReport>,
) -> Result<(PointRef, usize)> {
    match node {
        HierarchyNode::Agent { location, .. } => Ok((location.clone(), 1)),
        HierarchyNode::Mediator { name, z, children } => {
            let slot = reports.len();
            reports.push(NodeReport {
                name: name.clone(),
                point: z.clone(),
                agents: 0,
            });
            let below = children
                .iter()
                .map(|c| report_up(metric, c, overrides, reports))
                .collect::<Result<Vec<_>>>()?;
            let count = below.iter().map(|(_, k)| k).sum();
            let point = match overrides.get(name) {
                Some(p) => p.clone(),
                None => closest_median(metric, &median_multiset(&below)?, z)?.chosen,
            };
            reports[slot].point = point.clone();
            reports[slot].agents = count;
            Ok((point, count))
        }
    }
}

/// Center takes the closest median of every agent location that reaches it.
/// Mediators forward their full lists, except those named in `overrides`,
/// which forward the given list instead.
pub fn hierarchy_direct_median(h: &HierarchyInstance, overrides: &BTreeMap<String, Vec<PointRef>>) -> Result<PointRef> {
    fn forward(node: &HierarchyNode, overrides: &BTreeMap<String, Vec<PointRef>>, out: &mut Vec<PointRef>) {
        match node {
            HierarchyNode::Agent { location, .. } => out.push(location.clone()),
            HierarchyNode::Mediator { name, children, .. } => match overrides.get(name) {
                Some(list) => out.extend(list.iter().cloned()),
                None => children.iter().for_each(|c| forward(c, overrides, out)),
            },
        }
    }
    let HierarchyNode::Mediator { z, children, .. } = &h.center else {
        return Err(Error::InvalidInstance("the center must be a mediator node".into()));
    };
    let mut pooled = Vec::new();
    for c in children {
        forward(c, overrides, &mut pooled);
    }
    Ok(closest_median(&h.metric, &WeightedMultiset::unit(&pooled), z)?.chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::families;
    use crate::mechanisms::wmm;
    use crate::oracle::social_cost;
    use crate::rational::int;

    #[test]
    fn section_six_example() {
        let h = families::sec6_example();
        assert_eq!(h.depth(), 3);
        assert_eq!(h.agents().len(), 5);
        let zero = h.metric.parse_point("0").unwrap();
        let one = h.metric.parse_point("1").unwrap();
        let out = iwmm(&h).unwrap();
        assert_eq!(out.point(), Some(&zero));
        assert_eq!(social_cost(&h.metric, &h.agents(), &zero), int(5));

        assert_eq!(hierarchy_direct_median(&h, &BTreeMap::new()).unwrap(), one);
        let overrides = BTreeMap::from([("A".to_string(), vec![zero.clone(); 3])]);
        assert_eq!(hierarchy_direct_median(&h, &overrides).unwrap(), zero);
    }

    #[test]
    fn ex61_second_variant_lands_at_zero() {
        let h = families::ex61(2, 3, 2).unwrap();
        assert_eq!(h.agents().len(), 5);
        assert_eq!(iwmm(&h).unwrap().point(), Some(&h.metric.parse_point("0").unwrap()));
    }

    #[test]
    fn depth_two_matches_wmm() {
        let inst = families::ex51(&int(0), &int(1), 3, 2).unwrap();
        let h = HierarchyInstance::from_instance(&inst);
        assert_eq!(h.depth(), 2);
        assert_eq!(iwmm(&h).unwrap().point(), wmm(&inst).unwrap().point());
    }

    #[test]
    fn single_agent() {
        let metric = TreeMetric::from_named_edges(&["x"], &[]).unwrap();
        let x = metric.parse_point("x").unwrap();
        let h = HierarchyInstance::new(
            metric,
            HierarchyNode::Mediator {
                name: "center".into(),
                z: x.clone(),
                children: vec![HierarchyNode::Agent { name: None, location: x.clone() }],
            },
        )
        .unwrap();
        assert_eq!(hierarchy_direct_median(&h, &BTreeMap::new()).unwrap(), x);
        assert_eq!(h.depth(), 1);
    }

    #[test]
    fn rejects_childless_mediators() {
        let metric = TreeMetric::from_named_edges(&["x"], &[]).unwrap();
        let x = metric.parse_point("x").unwrap();
        let bad = HierarchyNode::Mediator { name: "c".into(), z: x, children: vec![] };
        assert!(HierarchyInstance::new(metric, bad).is_err());
    }
}
