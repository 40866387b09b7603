//! Instances, outcomes and the facility location mechanisms.

mod hierarchy;
mod tprm;
mod trm;
mod wmm;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::median::{closest_median, WeightedMultiset};
use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

pub use hierarchy::{hierarchy_direct_median, iwmm, iwmm_with_reports, HierarchyInstance, HierarchyNode, NodeReport};
pub use tprm::{position_probabilities, tprm, tprm_from_medians, TprmDiagnostics};
pub use trm::{trm, trm_from_medians, TrmDiagnostics, TrmVertex};
pub use wmm::{global_median, wmm, wmm_from_medians};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mediator {
    pub name: String,
    /// Tie-break point used when this mediator's median is computed.
    pub z: PointRef,
    pub agents: Vec<PointRef>,
}

/// One level of mediation: every agent belongs to exactly one mediator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub metric: Arc<TreeMetric>,
    /// Global tie-break point.
    pub z: PointRef,
    pub mediators: Vec<Mediator>,
}

impl Instance {
    pub fn new(metric: impl Into<Arc<TreeMetric>>, z: PointRef, mediators: Vec<Mediator>) -> Result<Instance> {
        let inst = Instance {
            metric: metric.into(),
            z,
            mediators,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        self.metric.check_point(&self.z)?;
        if self.mediators.is_empty() {
            return Err(Error::InvalidInstance("at least one mediator is required".into()));
        }
        let mut names = BTreeSet::new();
        for m in &self.mediators {
            if m.name.is_empty() || !names.insert(m.name.as_str()) {
                return Err(Error::InvalidInstance(format!(
                    "mediator names must be non-empty and unique (`{}`)",
                    m.name
                )));
            }
            if m.agents.is_empty() {
                return Err(Error::InvalidInstance(format!("mediator `{}` has no agents", m.name)));
            }
            self.metric.check_point(&m.z)?;
            for a in &m.agents {
                self.metric.check_point(a)?;
            }
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.mediators.iter().map(|m| m.agents.len()).sum()
    }

    /// All agent locations, mediator by mediator.
    pub fn agents(&self) -> Vec<PointRef> {
        self.mediators.iter().flat_map(|m| m.agents.iter().cloned()).collect()
    }

    /// Copy with agent `j` of mediator `i` moved to `location`.
    pub fn with_agent(&self, i: usize, j: usize, location: PointRef) -> Instance {
        let mut next = self.clone();
        next.mediators[i].agents[j] = location;
        next
    }

    /// Copy with mediator `i` reporting `agents`.
    pub fn with_reports(&self, i: usize, agents: Vec<PointRef>) -> Instance {
        let mut next = self.clone();
        next.mediators[i].agents = agents;
        next
    }

    /// Closest median of each mediator's reports toward its own tie-break.
    pub fn mediator_medians(&self) -> Result<Vec<(PointRef, usize)>> {
        self.mediators
            .iter()
            .map(|m| {
                let median = closest_median(&self.metric, &WeightedMultiset::unit(&m.agents), &m.z)?;
                Ok((median.chosen, m.agents.len()))
            })
            .collect()
    }
}

/// A finite probability distribution over points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDistribution {
    support: BTreeMap<PointRef, Rational>,
}

impl PointDistribution {
    /// Aggregates repeated points and drops zero entries. Fails unless every
    /// probability lies in `[0, 1]` and they sum to one.
    pub fn new(metric: &TreeMetric, entries: impl IntoIterator<Item = (PointRef, Rational)>) -> Result<PointDistribution> {
        let mut support: BTreeMap<PointRef, Rational> = BTreeMap::new();
        let mut total = Rational::zero();
        for (p, prob) in entries {
            metric.check_point(&p)?;
            if prob.is_negative() || prob > Rational::one() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {} outside [0, 1]",
                    rational::format(&prob)
                )));
            }
            total += &prob;
            if !prob.is_zero() {
                *support.entry(p).or_insert_with(Rational::zero) += prob;
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}",
                rational::format(&total)
            )));
        }
        Ok(PointDistribution { support })
    }

    pub fn point_mass(p: PointRef) -> PointDistribution {
        PointDistribution {
            support: BTreeMap::from([(p, Rational::one())]),
        }
    }

    pub fn probability(&self, p: &PointRef) -> Rational {
        self.support.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointRef, &Rational)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Expected distance from a facility drawn from `self` to `t`.
    pub fn expected_distance(&self, metric: &TreeMetric, t: &PointRef) -> Rational {
        self.support.iter().map(|(p, prob)| prob * metric.distance(p, t)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    Deterministic(PointRef),
    Randomized(PointDistribution),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostics {
    Wmm { medians: Vec<PointRef> },
    GlobalMedian { candidates_examined: usize },
    Tprm(TprmDiagnostics),
    Trm(Box<TrmDiagnostics>),
    Iwmm { reports: Vec<NodeReport> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MechanismOutcome {
    pub kind: OutcomeKind,
    pub diagnostics: Diagnostics,
}

impl MechanismOutcome {
    pub fn point(&self) -> Option<&PointRef> {
        match &self.kind {
            OutcomeKind::Deterministic(p) => Some(p),
            OutcomeKind::Randomized(_) => None,
        }
    }

    pub fn distribution(&self) -> Option<&PointDistribution> {
        match &self.kind {
            OutcomeKind::Deterministic(_) => None,
            OutcomeKind::Randomized(d) => Some(d),
        }
    }

    pub fn to_distribution(&self) -> PointDistribution {
        match &self.kind {
            OutcomeKind::Deterministic(p) => PointDistribution::point_mass(p.clone()),
            OutcomeKind::Randomized(d) => d.clone(),
        }
    }

    pub fn expected_distance(&self, metric: &TreeMetric, t: &PointRef) -> Rational {
        match &self.kind {
            OutcomeKind::Deterministic(p) => metric.distance(p, t),
            OutcomeKind::Randomized(d) => d.expected_distance(metric, t),
        }
    }
}

/// The single-level mechanisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    Wmm,
    Tprm,
    Trm,
    GlobalMedian,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [Mechanism::Wmm, Mechanism::Tprm, Mechanism::Trm, Mechanism::GlobalMedian];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Wmm => "wmm",
            Mechanism::Tprm => "tprm",
            Mechanism::Trm => "trm",
            Mechanism::GlobalMedian => "global-median",
        }
    }

    /// Whether the outcome depends on reports only through each mediator's
    /// median and agent count.
    pub fn is_mediator_based(self) -> bool {
        !matches!(self, Mechanism::GlobalMedian)
    }

    pub fn run(self, inst: &Instance) -> Result<MechanismOutcome> {
        match self {
            Mechanism::Wmm => wmm(inst),
            Mechanism::Tprm => tprm(inst),
            Mechanism::Trm => trm(inst),
            Mechanism::GlobalMedian => global_median(inst),
        }
    }

    /// Runs a mediator-based mechanism directly on `(median, count)` pairs.
    pub fn run_from_medians(self, metric: &TreeMetric, z: &PointRef, medians: &[(PointRef, usize)]) -> Result<MechanismOutcome> {
        match self {
            Mechanism::Wmm => wmm_from_medians(metric, z, medians),
            Mechanism::Tprm => tprm_from_medians(metric, medians),
            Mechanism::Trm => trm_from_medians(metric, z, medians),
            Mechanism::GlobalMedian => Err(Error::MechanismMismatch {
                mechanism: self.name().into(),
                reason: "not mediator-based".into(),
            }),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mechanism> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown mechanism `{s}`")))
    }
}

/// Weighted multiset of `(median, count)` pairs.
pub(crate) fn median_multiset(medians: &[(PointRef, usize)]) -> Result<WeightedMultiset> {
    WeightedMultiset::from_pairs(medians.iter().map(|(p, n)| (p.clone(), rational::int(*n as i64))))
}
