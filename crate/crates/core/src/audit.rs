//! Searches for profitable misreports by agents, mediators and mediators in a
//! hierarchy, over a finite set of candidate reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::median::{closest_median, WeightedMultiset};
use crate::mechanisms::{
    hierarchy_direct_median, iwmm, iwmm_with_reports, HierarchyInstance, HierarchyNode, Instance, Mechanism,
    MechanismOutcome,
};
use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

pub const DEFAULT_SAMPLES_PER_EDGE: usize = 8;

// Interior samples are drawn from a grid of this many steps per edge.
const SAMPLE_GRID: i64 = 1000;

/// Finite, deduplicated set of reports tried by the audits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationCandidateSet {
    points: Vec<PointRef>,
}

impl DeviationCandidateSet {
    pub fn from_points(metric: &TreeMetric, points: impl IntoIterator<Item = PointRef>) -> Result<DeviationCandidateSet> {
        let set: BTreeSet<PointRef> = points.into_iter().collect();
        for p in &set {
            metric.check_point(p)?;
        }
        Ok(DeviationCandidateSet {
            points: set.into_iter().collect(),
        })
    }

    /// Vertices, agent locations, mediator medians, every tie-break point and
    /// `samples_per_edge` seeded interior points on each edge.
    pub fn for_instance(inst: &Instance, samples_per_edge: usize, seed: u64) -> Result<DeviationCandidateSet> {
        let mut points = structural_points(&inst.metric, samples_per_edge, seed);
        points.extend(inst.agents());
        points.extend(inst.mediator_medians()?.into_iter().map(|(p, _)| p));
        points.push(inst.z.clone());
        points.extend(inst.mediators.iter().map(|m| m.z.clone()));
        Self::from_points(&inst.metric, points)
    }

    /// Same idea for a hierarchy: includes every straightforward report.
    pub fn for_hierarchy(h: &HierarchyInstance, samples_per_edge: usize, seed: u64) -> Result<DeviationCandidateSet> {
        let mut points = structural_points(&h.metric, samples_per_edge, seed);
        points.extend(h.agents());
        if let crate::mechanisms::Diagnostics::Iwmm { reports } = iwmm(h)?.diagnostics {
            points.extend(reports.into_iter().map(|r| r.point));
        }
        let mut stack = vec![&h.center];
        while let Some(node) = stack.pop() {
            if let HierarchyNode::Mediator { z, children, .. } = node {
                points.push(z.clone());
                stack.extend(children);
            }
        }
        Self::from_points(&h.metric, points)
    }

    pub fn points(&self) -> &[PointRef] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn structural_points(metric: &TreeMetric, samples_per_edge: usize, seed: u64) -> Vec<PointRef> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<PointRef> = metric.vertices().map(PointRef::Vertex).collect();
    for (i, e) in metric.edges().iter().enumerate() {
        for _ in 0..samples_per_edge {
            let k = rng.gen_range(1..SAMPLE_GRID);
            let offset = &e.length * rational::frac(k, SAMPLE_GRID);
            points.push(metric.point_on_edge(crate::EdgeId(i), offset).expect("interior offset"));
        }
    }
    points
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Agent,
    Mediator,
    Naive,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Agent => "agent",
            Side::Mediator => "mediator",
            Side::Naive => "naive",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Side> {
        [Side::Agent, Side::Mediator, Side::Naive]
            .into_iter()
            .find(|side| side.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown audit side `{s}`")))
    }
}

/// Mechanisms run on a mediation hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HierarchyMechanism {
    Iwmm,
    DirectMedian,
}

impl HierarchyMechanism {
    pub fn name(self) -> &'static str {
        match self {
            HierarchyMechanism::Iwmm => "iwmm",
            HierarchyMechanism::DirectMedian => "direct-median",
        }
    }
}

/// A concrete misreport, enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deviation {
    /// Agent `agent` of mediator `mediator` reports `report`; the mediator is truthful.
    AgentReport { mediator: usize, agent: usize, report: PointRef },
    /// Mediator `mediator` hands the center `median` in place of its true median.
    MedianReport { mediator: usize, median: PointRef },
    /// Mediator `mediator` submits the given list of reports.
    ReportList { mediator: usize, reports: Vec<PointRef> },
    /// A hierarchy mediator reports a single point (IWMM).
    NaivePoint { mediator: String, report: PointRef },
    /// A hierarchy mediator forwards a list of locations (direct median).
    NaiveList { mediator: String, reports: Vec<PointRef> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub deviator: String,
    pub truthful_cost: Rational,
    pub deviating_cost: Rational,
    pub description: String,
    pub deviation: Deviation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub side: Side,
    pub mechanism: String,
    pub deviations_tested: usize,
    pub counterexample: Option<Counterexample>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Ordering key: largest gain first, then deviator, candidate and variant.
type Key = (Rational, usize, usize, usize);

#[derive(Default)]
struct Search {
    tested: usize,
    best: Option<(Key, Counterexample)>,
}

impl Search {
    fn consider(&mut self, key_tail: (usize, usize, usize), truthful: &Rational, deviating: Rational, make: impl FnOnce() -> (String, String, Deviation)) {
        self.tested += 1;
        if &deviating >= truthful {
            return;
        }
        let key = (&deviating - truthful, key_tail.0, key_tail.1, key_tail.2);
        if self.best.as_ref().is_some_and(|(k, _)| k <= &key) {
            return;
        }
        let (deviator, description, deviation) = make();
        self.best = Some((
            key,
            Counterexample {
                deviator,
                truthful_cost: truthful.clone(),
                deviating_cost: deviating,
                description,
                deviation,
            },
        ));
    }

    fn merge(mut self, other: Search) -> Search {
        self.tested += other.tested;
        self.best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    fn report(self, side: Side, mechanism: &str) -> AuditReport {
        AuditReport {
            side,
            mechanism: mechanism.to_string(),
            deviations_tested: self.tested,
            counterexample: self.best.map(|(_, c)| c),
        }
    }
}

fn expected_total(metric: &TreeMetric, outcome: &MechanismOutcome, agents: &[PointRef]) -> Rational {
    agents.iter().map(|t| outcome.expected_distance(metric, t)).sum()
}

fn with_median(medians: &[(PointRef, usize)], i: usize, p: PointRef) -> Vec<(PointRef, usize)> {
    let mut next = medians.to_vec();
    next[i].0 = p;
    next
}

fn replaced(list: &[PointRef], j: usize, p: &PointRef) -> Vec<PointRef> {
    let mut next = list.to_vec();
    next[j] = p.clone();
    next
}

fn merge_all(parts: Vec<Search>) -> Search {
    parts.into_iter().fold(Search::default(), Search::merge)
}

/// Each agent, with her mediator truthful, tries every candidate report.
pub fn audit_agent_side(inst: &Instance, mechanism: Mechanism, candidates: &DeviationCandidateSet) -> Result<AuditReport> {
    let metric = &*inst.metric;
    let truthful = mechanism.run(inst)?;
    let medians = inst.mediator_medians()?;
    let offsets: Vec<usize> = inst
        .mediators
        .iter()
        .scan(0, |acc, m| {
            let start = *acc;
            *acc += m.agents.len();
            Some(start)
        })
        .collect();

    let parts = (0..inst.mediators.len())
        .into_par_iter()
        .map(|i| -> Result<Search> {
            let m = &inst.mediators[i];
            let mut search = Search::default();
            let mut memo: HashMap<PointRef, MechanismOutcome> = HashMap::new();
            for (j, t) in m.agents.iter().enumerate() {
                let truthful_cost = truthful.expected_distance(metric, t);
                for (ci, c) in candidates.points().iter().enumerate() {
                    let reports = replaced(&m.agents, j, c);
                    let cost = if mechanism.is_mediator_based() {
                        let median = closest_median(metric, &WeightedMultiset::unit(&reports), &m.z)?.chosen;
                        if median == medians[i].0 {
                            search.tested += 1;
                            continue;
                        }
                        if !memo.contains_key(&median) {
                            let outcome = mechanism.run_from_medians(metric, &inst.z, &with_median(&medians, i, median.clone()))?;
                            memo.insert(median.clone(), outcome);
                        }
                        memo[&median].expected_distance(metric, t)
                    } else {
                        mechanism.run(&inst.with_reports(i, reports))?.expected_distance(metric, t)
                    };
                    search.consider((offsets[i] + j, ci, 0), &truthful_cost, cost, || {
                        (
                            format!("{}#{}", m.name, j),
                            format!(
                                "agent {j} of mediator `{}` reports {} instead of {}",
                                m.name,
                                metric.label(c),
                                metric.label(t)
                            ),
                            Deviation::AgentReport { mediator: i, agent: j, report: c.clone() },
                        )
                    });
                }
            }
            Ok(search)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_all(parts).report(Side::Agent, mechanism.name()))
}

/// Each mediator, with its agents truthful, tries every candidate median and
/// every list that moves one or all of its reports to a candidate.
pub fn audit_mediator_side(inst: &Instance, mechanism: Mechanism, candidates: &DeviationCandidateSet) -> Result<AuditReport> {
    let metric = &*inst.metric;
    let truthful = mechanism.run(inst)?;
    let medians = inst.mediator_medians()?;

    let parts = (0..inst.mediators.len())
        .into_par_iter()
        .map(|i| -> Result<Search> {
            let m = &inst.mediators[i];
            let n = m.agents.len();
            let truthful_cost = expected_total(metric, &truthful, &m.agents);
            let mut search = Search::default();
            let list_description = |reports: &[PointRef], c: &PointRef, j: Option<usize>| match j {
                None => format!("mediator `{}` reports all {} agents at {}", m.name, reports.len(), metric.label(c)),
                Some(j) => format!(
                    "mediator `{}` moves agent {j} from {} to {}",
                    m.name,
                    metric.label(&m.agents[j]),
                    metric.label(c)
                ),
            };

            if !mechanism.is_mediator_based() {
                for (ci, c) in candidates.points().iter().enumerate() {
                    let lists = std::iter::once((None, vec![c.clone(); n])).chain((0..n).map(|j| (Some(j), replaced(&m.agents, j, c))));
                    for (variant, (j, reports)) in lists.enumerate() {
                        let cost = expected_total(metric, &mechanism.run(&inst.with_reports(i, reports.clone()))?, &m.agents);
                        search.consider((i, ci, variant), &truthful_cost, cost, || {
                            (m.name.clone(), list_description(&reports, c, j), Deviation::ReportList { mediator: i, reports })
                        });
                    }
                }
                return Ok(search);
            }

            // The outcome must not change when the mediator reports its median n times.
            let collapsed = mechanism.run(&inst.with_reports(i, vec![medians[i].0.clone(); n]))?;
            if collapsed.kind != truthful.kind {
                return Err(Error::MechanismMismatch {
                    mechanism: mechanism.name().into(),
                    reason: format!("outcome changed when mediator `{}` reported only its median", m.name),
                });
            }

            let mut memo: HashMap<PointRef, Rational> = HashMap::new();
            let mut cost_at = |median: &PointRef| -> Result<Rational> {
                if let Some(c) = memo.get(median) {
                    return Ok(c.clone());
                }
                let outcome = mechanism.run_from_medians(metric, &inst.z, &with_median(&medians, i, median.clone()))?;
                let cost = expected_total(metric, &outcome, &m.agents);
                memo.insert(median.clone(), cost.clone());
                Ok(cost)
            };
            for (ci, c) in candidates.points().iter().enumerate() {
                let cost = cost_at(c)?;
                search.consider((i, ci, 0), &truthful_cost, cost, || {
                    (
                        m.name.clone(),
                        format!(
                            "mediator `{}` reports median {} instead of {}",
                            m.name,
                            metric.label(c),
                            metric.label(&medians[i].0)
                        ),
                        Deviation::MedianReport { mediator: i, median: c.clone() },
                    )
                });
                for j in 0..n {
                    let reports = replaced(&m.agents, j, c);
                    let median = closest_median(metric, &WeightedMultiset::unit(&reports), &m.z)?.chosen;
                    let cost = cost_at(&median)?;
                    search.consider((i, ci, j + 1), &truthful_cost, cost, || {
                        (m.name.clone(), list_description(&reports, c, Some(j)), Deviation::ReportList { mediator: i, reports })
                    });
                }
            }
            Ok(search)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_all(parts).report(Side::Mediator, mechanism.name()))
}

/// What a hierarchy mediator perceives: its children's straightforward
/// reports, each weighted by the number of agents below that child.
fn perceived_locations(reports: &BTreeMap<String, (PointRef, usize)>, node: &HierarchyNode) -> Vec<(PointRef, usize)> {
    let HierarchyNode::Mediator { children, .. } = node else {
        return Vec::new();
    };
    children
        .iter()
        .map(|c| match c {
            HierarchyNode::Agent { location, .. } => (location.clone(), 1),
            HierarchyNode::Mediator { name, .. } => reports[name].clone(),
        })
        .collect()
}

fn agents_below(node: &HierarchyNode) -> Vec<PointRef> {
    let mut out = Vec::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        match n {
            HierarchyNode::Agent { location, .. } => out.push(location.clone()),
            HierarchyNode::Mediator { children, .. } => stack.extend(children.iter().rev()),
        }
    }
    out
}

fn weighted_distance(metric: &TreeMetric, facility: &PointRef, locations: &[(PointRef, usize)]) -> Rational {
    locations
        .iter()
        .map(|(p, k)| rational::int(*k as i64) * metric.distance(facility, p))
        .sum()
}

fn straightforward_reports(h: &HierarchyInstance) -> Result<BTreeMap<String, (PointRef, usize)>> {
    let crate::mechanisms::Diagnostics::Iwmm { reports } = iwmm(h)?.diagnostics else {
        unreachable!("iwmm emits iwmm diagnostics");
    };
    Ok(reports.into_iter().map(|r| (r.name, (r.point, r.agents))).collect())
}

/// Naive incentive audit: each mediator below the center takes its children's
/// reports at face value and tries every candidate report, with every
/// ascendant straightforward.
pub fn audit_naive(h: &HierarchyInstance, mechanism: HierarchyMechanism, candidates: &DeviationCandidateSet) -> Result<AuditReport> {
    let metric = &*h.metric;
    let reports = straightforward_reports(h)?;
    let mediators = h.strategic_mediators();

    let parts = mediators
        .par_iter()
        .enumerate()
        .map(|(k, node)| -> Result<Search> {
            let HierarchyNode::Mediator { name, .. } = node else {
                unreachable!("strategic mediators are mediator nodes");
            };
            let mut search = Search::default();
            match mechanism {
                HierarchyMechanism::Iwmm => {
                    let perceived = perceived_locations(&reports, node);
                    let truthful_facility = iwmm(h)?.point().cloned().expect("deterministic");
                    let truthful_cost = weighted_distance(metric, &truthful_facility, &perceived);
                    let own = &reports[name].0;
                    for (ci, c) in candidates.points().iter().enumerate() {
                        if c == own {
                            search.tested += 1;
                            continue;
                        }
                        let overrides = BTreeMap::from([(name.clone(), c.clone())]);
                        let facility = iwmm_with_reports(h, &overrides)?.point().cloned().expect("deterministic");
                        let cost = weighted_distance(metric, &facility, &perceived);
                        search.consider((k, ci, 0), &truthful_cost, cost, || {
                            (
                                name.clone(),
                                format!("mediator `{name}` reports {} instead of {}", metric.label(c), metric.label(own)),
                                Deviation::NaivePoint { mediator: name.clone(), report: c.clone() },
                            )
                        });
                    }
                }
                HierarchyMechanism::DirectMedian => {
                    let own = agents_below(node);
                    let perceived: Vec<(PointRef, usize)> = own.iter().map(|p| (p.clone(), 1)).collect();
                    let truthful_facility = hierarchy_direct_median(h, &BTreeMap::new())?;
                    let truthful_cost = weighted_distance(metric, &truthful_facility, &perceived);
                    for (ci, c) in candidates.points().iter().enumerate() {
                        let lists = std::iter::once((None, vec![c.clone(); own.len()]))
                            .chain((0..own.len()).map(|j| (Some(j), replaced(&own, j, c))));
                        for (variant, (j, list)) in lists.enumerate() {
                            let overrides = BTreeMap::from([(name.clone(), list.clone())]);
                            let facility = hierarchy_direct_median(h, &overrides)?;
                            let cost = weighted_distance(metric, &facility, &perceived);
                            search.consider((k, ci, variant), &truthful_cost, cost, || {
                                let description = match j {
                                    None => format!("mediator `{name}` reports all {} agents at {}", list.len(), metric.label(c)),
                                    Some(j) => format!(
                                        "mediator `{name}` moves report {j} from {} to {}",
                                        metric.label(&own[j]),
                                        metric.label(c)
                                    ),
                                };
                                (name.clone(), description, Deviation::NaiveList { mediator: name.clone(), reports: list })
                            });
                        }
                    }
                }
            }
            Ok(search)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_all(parts).report(Side::Naive, mechanism.name()))
}

/// Recomputes `(truthful, deviating)` cost of a single-level deviation from
/// scratch.
pub fn replay(inst: &Instance, mechanism: Mechanism, deviation: &Deviation) -> Result<(Rational, Rational)> {
    let metric = &*inst.metric;
    let truthful = mechanism.run(inst)?;
    match deviation {
        Deviation::AgentReport { mediator, agent, report } => {
            let t = &inst.mediators[*mediator].agents[*agent];
            let deviating = mechanism.run(&inst.with_agent(*mediator, *agent, report.clone()))?;
            Ok((truthful.expected_distance(metric, t), deviating.expected_distance(metric, t)))
        }
        Deviation::MedianReport { mediator, median } => {
            let agents = &inst.mediators[*mediator].agents;
            let medians = with_median(&inst.mediator_medians()?, *mediator, median.clone());
            let deviating = mechanism.run_from_medians(metric, &inst.z, &medians)?;
            Ok((expected_total(metric, &truthful, agents), expected_total(metric, &deviating, agents)))
        }
        Deviation::ReportList { mediator, reports } => {
            let agents = &inst.mediators[*mediator].agents;
            let deviating = mechanism.run(&inst.with_reports(*mediator, reports.clone()))?;
            Ok((expected_total(metric, &truthful, agents), expected_total(metric, &deviating, agents)))
        }
        Deviation::NaivePoint { .. } | Deviation::NaiveList { .. } => Err(Error::InvalidParams(
            "hierarchy deviations are replayed with replay_naive".into(),
        )),
    }
}

/// Recomputes `(truthful, deviating)` perceived cost of a hierarchy deviation.
pub fn replay_naive(h: &HierarchyInstance, mechanism: HierarchyMechanism, deviation: &Deviation) -> Result<(Rational, Rational)> {
    let metric = &*h.metric;
    let name = match deviation {
        Deviation::NaivePoint { mediator, .. } | Deviation::NaiveList { mediator, .. } => mediator,
        _ => return Err(Error::InvalidParams("single-level deviations are replayed with replay".into())),
    };
    let node = h
        .strategic_mediators()
        .into_iter()
        .find(|n| matches!(n, HierarchyNode::Mediator { name: m, .. } if m == name))
        .ok_or_else(|| Error::InvalidParams(format!("no mediator `{name}` below the center")))?;
    match (mechanism, deviation) {
        (HierarchyMechanism::Iwmm, Deviation::NaivePoint { report, .. }) => {
            let perceived = perceived_locations(&straightforward_reports(h)?, node);
            let truthful = iwmm(h)?.point().cloned().expect("deterministic");
            let overrides = BTreeMap::from([(name.clone(), report.clone())]);
            let deviating = iwmm_with_reports(h, &overrides)?.point().cloned().expect("deterministic");
            Ok((weighted_distance(metric, &truthful, &perceived), weighted_distance(metric, &deviating, &perceived)))
        }
        (HierarchyMechanism::DirectMedian, Deviation::NaiveList { reports, .. }) => {
            let perceived: Vec<(PointRef, usize)> = agents_below(node).into_iter().map(|p| (p, 1)).collect();
            let truthful = hierarchy_direct_median(h, &BTreeMap::new())?;
            let overrides = BTreeMap::from([(name.clone(), reports.clone())]);
            let deviating = hierarchy_direct_median(h, &overrides)?;
            Ok((weighted_distance(metric, &truthful, &perceived), weighted_distance(metric, &deviating, &perceived)))
        }
        _ => Err(Error::InvalidParams("deviation kind does not match the mechanism".into())),
    }
}
