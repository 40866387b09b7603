use num_traits::One;

use super::{Diagnostics, Instance, MechanismOutcome, OutcomeKind, PointDistribution};
use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TprmDiagnostics {
    pub medians: Vec<PointRef>,
    /// Each median repeated by its agent count, sorted along the line.
    pub u_list: Vec<PointRef>,
    /// Probability attached to each `u_list` entry.
    pub probabilities: Vec<Rational>,
}

/// Two percentiles range mechanism. The metric must be a path.
pub fn tprm(inst: &Instance) -> Result<MechanismOutcome> {
    tprm_from_medians(&inst.metric, &inst.mediator_medians()?)
}

/// Probability of each 1-based position of an `n`-entry sorted list.
pub fn position_probabilities(n: usize) -> Vec<Rational> {
    if n == 1 {
        return vec![Rational::one()];
    }
    let half = rational::frac(n as i64, 2);
    let lo = n / 4 + 1;
    let hi = (3 * n).div_ceil(4);
    let inner = Rational::one() / &half;
    let edge = (Rational::one() - rational::frac((n % 4) as i64, 4)) / &half;
    (1..=n)
        .map(|i| {
            if i == lo || i == hi {
                edge.clone()
            } else if lo < i && i < hi {
                inner.clone()
            } else {
                rational::zero()
            }
        })
        .collect()
}

pub fn tprm_from_medians(metric: &TreeMetric, medians: &[(PointRef, usize)]) -> Result<MechanismOutcome> {
    if !metric.is_path_graph() {
        return Err(Error::NotAPath);
    }
    let origin = PointRef::Vertex(metric.first_leaf());
    let mut u_list: Vec<(Rational, PointRef)> = medians
        .iter()
        .flat_map(|(p, n)| std::iter::repeat_n((metric.distance(&origin, p), p.clone()), *n))
        .collect();
    if u_list.is_empty() {
        return Err(Error::InvalidInstance("no agents".into()));
    }
    u_list.sort_by(|a, b| a.0.cmp(&b.0));
    let probabilities = position_probabilities(u_list.len());
    let distribution = PointDistribution::new(
        metric,
        u_list.iter().map(|(_, p)| p.clone()).zip(probabilities.iter().cloned()),
    )?;
    Ok(MechanismOutcome {
        kind: OutcomeKind::Randomized(distribution),
        diagnostics: Diagnostics::Tprm(TprmDiagnostics {
            medians: medians.iter().map(|(p, _)| p.clone()).collect(),
            u_list: u_list.into_iter().map(|(_, p)| p).collect(),
            probabilities,
        }),
    })
}
