use super::{median_multiset, Diagnostics, Instance, MechanismOutcome, OutcomeKind};
use crate::median::{closest_median, WeightedMultiset};
use crate::tree_metric::{PointRef, TreeMetric};
use crate::Result;

/// Weighted median mechanism: the closest weighted median of the mediators'
/// medians, each weighted by its agent count.
pub fn wmm(inst: &Instance) -> Result<MechanismOutcome> {
    wmm_from_medians(&inst.metric, &inst.z, &inst.mediator_medians()?)
}

pub fn wmm_from_medians(metric: &TreeMetric, z: &PointRef, medians: &[(PointRef, usize)]) -> Result<MechanismOutcome> {
    let chosen = closest_median(metric, &median_multiset(medians)?, z)?.chosen;
    Ok(MechanismOutcome {
        kind: OutcomeKind::Deterministic(chosen),
        diagnostics: Diagnostics::Wmm {
            medians: medians.iter().map(|(p, _)| p.clone()).collect(),
        },
    })
}

/// Ignores mediators and takes the closest median of all agent reports.
pub fn global_median(inst: &Instance) -> Result<MechanismOutcome> {
    let agents = inst.agents();
    let result = closest_median(&inst.metric, &WeightedMultiset::unit(&agents), &inst.z)?;
    Ok(MechanismOutcome {
        kind: OutcomeKind::Deterministic(result.chosen),
        diagnostics: Diagnostics::GlobalMedian {
            candidates_examined: result.candidates.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::families;
    use crate::mechanisms::Mediator;
    use crate::oracle::social_cost;
    use crate::rational::int;

    #[test]
    fn ex51_first_variant() {
        let inst = families::ex51(&int(0), &int(1), 2, 1).unwrap();
        let zero = inst.metric.parse_point("0").unwrap();
        let one = inst.metric.parse_point("1").unwrap();
        let out = wmm(&inst).unwrap();
        assert_eq!(out.point(), Some(&zero));
        assert_eq!(social_cost(&inst.metric, &inst.agents(), &zero), int(7));

        let mut toward_one = inst.clone();
        toward_one.z = one.clone();
        assert_eq!(wmm(&toward_one).unwrap().point(), Some(&one));
        assert_eq!(social_cost(&inst.metric, &inst.agents(), &one), int(3));
        assert_eq!(global_median(&inst).unwrap().point(), Some(&one));
    }

    #[test]
    fn single_mediator_gets_its_median() {
        let inst = families::ex51(&int(0), &int(1), 2, 1).unwrap();
        let solo = Instance::new(
            inst.metric.clone(),
            inst.z.clone(),
            vec![Mediator {
                name: "d".into(),
                ..inst.mediators[0].clone()
            }],
        )
        .unwrap();
        assert_eq!(wmm(&solo).unwrap().point(), Some(&inst.metric.parse_point("0").unwrap()));
    }
}
