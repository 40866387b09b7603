//! Weighted multisets, the `m_p` statistic and closest-to-`z` weighted medians.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::rational::{self, Rational};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedPoint {
    pub location: PointRef,
    pub weight: Rational,
}

/// A multiset of weighted points. Entries with equal location and weight are
/// counted by multiplicity; per-location totals are kept alongside.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedMultiset {
    entries: BTreeMap<WeightedPoint, u64>,
    by_location: BTreeMap<PointRef, Rational>,
    total: Rational,
}

impl WeightedMultiset {
    pub fn new() -> WeightedMultiset {
        WeightedMultiset::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (PointRef, Rational)>) -> Result<WeightedMultiset> {
        let mut set = WeightedMultiset::new();
        for (location, weight) in pairs {
            set.insert(location, weight, 1)?;
        }
        Ok(set)
    }

    /// Every point with weight one.
    pub fn unit<'a>(points: impl IntoIterator<Item = &'a PointRef>) -> WeightedMultiset {
        let mut set = WeightedMultiset::new();
        for p in points {
            set.insert(p.clone(), Rational::from_integer(1.into()), 1)
                .expect("unit weight is positive");
        }
        set
    }

    pub fn insert(&mut self, location: PointRef, weight: Rational, multiplicity: u64) -> Result<()> {
        if !weight.is_positive() {
            return Err(Error::InvalidInstance(format!(
                "weights must be positive, got {}",
                rational::format(&weight)
            )));
        }
        if multiplicity == 0 {
            return Ok(());
        }
        let mass = &weight * rational::int(multiplicity as i64);
        *self.by_location.entry(location.clone()).or_insert_with(Rational::zero) += &mass;
        self.total += mass;
        *self.entries.entry(WeightedPoint { location, weight }).or_insert(0) += multiplicity;
        Ok(())
    }

    pub fn union(&self, other: &WeightedMultiset) -> WeightedMultiset {
        let mut out = self.clone();
        for (point, &count) in &other.entries {
            out.insert(point.location.clone(), point.weight.clone(), count)
                .expect("stored weights are positive");
        }
        out
    }

    /// Multiplicities become `max(f - f', 0)`.
    pub fn difference(&self, other: &WeightedMultiset) -> WeightedMultiset {
        let mut out = WeightedMultiset::new();
        for (point, &count) in &self.entries {
            let removed = other.multiplicity(point);
            out.insert(point.location.clone(), point.weight.clone(), count.saturating_sub(removed))
                .expect("stored weights are positive");
        }
        out
    }

    pub fn multiplicity(&self, point: &WeightedPoint) -> u64 {
        self.entries.get(point).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&WeightedPoint, u64)> {
        self.entries.iter().map(|(p, c)| (p, *c))
    }

    pub fn total_weight(&self) -> &Rational {
        &self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total weight located at each distinct point.
    pub fn location_weights(&self) -> impl Iterator<Item = (&PointRef, &Rational)> {
        self.by_location.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &PointRef> {
        self.by_location.keys()
    }

    pub fn weight_at(&self, p: &PointRef) -> Rational {
        self.by_location.get(p).cloned().unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MedianResult {
    pub chosen: PointRef,
    /// `m_p` of the chosen point.
    pub certificate: Rational,
    pub candidates: Vec<(PointRef, bool)>,
}

fn check_set(metric: &TreeMetric, set: &WeightedMultiset) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    for p in set.support() {
        metric.check_point(p)?;
    }
    Ok(())
}

/// Heaviest component of `S \ S_p`, or zero when nothing is left.
pub fn m_p(metric: &TreeMetric, set: &WeightedMultiset, p: &PointRef) -> Result<Rational> {
    check_set(metric, set)?;
    metric.check_point(p)?;
    Ok(heaviest_component(metric, set, p))
}

fn heaviest_component(metric: &TreeMetric, set: &WeightedMultiset, p: &PointRef) -> Rational {
    metric
        .component_weights(p, set)
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn is_weighted_median(metric: &TreeMetric, set: &WeightedMultiset, p: &PointRef) -> Result<bool> {
    let m = m_p(metric, set, p)?;
    Ok(m * rational::int(2) <= *set.total_weight())
}

/// Sum of weighted distances from `p` to the multiset.
pub fn weighted_cost(metric: &TreeMetric, set: &WeightedMultiset, p: &PointRef) -> Rational {
    set.location_weights()
        .map(|(q, w)| w * metric.distance(p, q))
        .sum()
}

/// The unique weighted median closest to `z`, searched over the vertices,
/// `z` and the support of `S`.
pub fn closest_median(metric: &TreeMetric, set: &WeightedMultiset, z: &PointRef) -> Result<MedianResult> {
    check_set(metric, set)?;
    metric.check_point(z)?;
    let mut pool: Vec<PointRef> = metric.vertices().map(PointRef::Vertex).collect();
    pool.push(z.clone());
    pool.extend(set.support().cloned());
    pool.sort();
    pool.dedup();

    let total = set.total_weight();
    let mut candidates = Vec::with_capacity(pool.len());
    let mut best: Option<(Rational, PointRef, Rational)> = None;
    let mut tied = false;
    for p in pool {
        let m = heaviest_component(metric, set, &p);
        let is_median = &m * rational::int(2) <= *total;
        if is_median {
            let d = metric.distance(&p, z);
            match &best {
                Some((bd, _, _)) if &d > bd => {}
                Some((bd, _, _)) if &d == bd => tied = true,
                _ => {
                    best = Some((d, p.clone(), m));
                    tied = false;
                }
            }
        }
        candidates.push((p, is_median));
    }
    if tied {
        return Err(Error::TieBreakViolation);
    }
    let (_, chosen, certificate) = best.expect("a weighted median always exists among the candidates");
    Ok(MedianResult {
        chosen,
        certificate,
        candidates,
    })
}

/// Closest median of unit-weight points.
pub fn median_of_points(metric: &TreeMetric, points: &[PointRef], z: &PointRef) -> Result<PointRef> {
    Ok(closest_median(metric, &WeightedMultiset::unit(points), z)?.chosen)
}
