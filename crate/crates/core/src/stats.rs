//! Group cardinalities and the distribution verdict.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouping::GroupAssignment;
use crate::verdict::Distribution;

pub const DEFAULT_EPSILON: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub groups: Vec<String>,
    pub cardinalities: Vec<usize>,
    pub fractions: Vec<f64>,
    /// Largest `|p_g - 1/n|`.
    pub max_deviation: f64,
    pub epsilon: f64,
    pub verdict: Distribution,
}

/// Equally distributed iff every share is within `epsilon` (relative) of
/// the uniform share `1/n`.
pub fn statistical_analysis(assignment: &GroupAssignment, epsilon: f64) -> Result<DistributionReport> {
    distribution_of(
        assignment.groups.iter().map(|g| g.name.clone()).collect(),
        assignment.sizes(),
        epsilon,
    )
}

pub fn distribution_of(groups: Vec<String>, cardinalities: Vec<usize>, epsilon: f64) -> Result<DistributionReport> {
    let total: usize = cardinalities.iter().sum();
    if cardinalities.is_empty() || total == 0 {
        return Err(Error::NoGroups);
    }
    let uniform = 1.0 / cardinalities.len() as f64;
    let fractions: Vec<f64> = cardinalities.iter().map(|&c| c as f64 / total as f64).collect();
    let max_deviation = fractions.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    let verdict = if max_deviation <= epsilon * uniform {
        Distribution::EquallyDistributed
    } else {
        Distribution::UnevenlyDistributed
    };
    Ok(DistributionReport {
        groups,
        cardinalities,
        fractions,
        max_deviation,
        epsilon,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn verdict(sizes: &[usize]) -> Distribution {
        let names = (0..sizes.len()).map(|i| i.to_string()).collect();
        distribution_of(names, sizes.to_vec(), DEFAULT_EPSILON).unwrap().verdict
    }

    #[test]
    fn balanced_pair() {
        assert_eq!(verdict(&[50, 50]), Distribution::EquallyDistributed);
    }

    #[test]
    fn election_botscore_split_is_uneven() {
        assert_eq!(verdict(&[709_212, 208_836, 109_257]), Distribution::UnevenlyDistributed);
    }

    #[test]
    fn near_thirds() {
        let r = distribution_of(vec!["a".into(), "b".into(), "c".into()], vec![34, 33, 33], 0.10).unwrap();
        assert!((r.max_deviation - (0.34 - 1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(r.verdict, Distribution::EquallyDistributed);
    }

    #[test]
    fn single_group_and_empty() {
        assert_eq!(verdict(&[7]), Distribution::EquallyDistributed);
        assert!(matches!(distribution_of(vec![], vec![], 0.1), Err(Error::NoGroups)));
        assert!(matches!(distribution_of(vec!["a".into()], vec![0], 0.1), Err(Error::NoGroups)));
    }

    #[test]
    fn from_assignment() {
        let a = GroupAssignment::from_membership(["h", "b"], [("x", Some(0)), ("y", Some(1)), ("z", None)]);
        let r = statistical_analysis(&a, 0.1).unwrap();
        assert_eq!(r.cardinalities, vec![1, 1]);
        assert_eq!(r.verdict, Distribution::EquallyDistributed);
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut sizes in prop::collection::vec(1usize..500, 1..6), seed in any::<u64>()) {
            let before = verdict(&sizes);
            let k = sizes.len();
            sizes.rotate_left((seed as usize) % k);
            prop_assert_eq!(before, verdict(&sizes));
        }
    }
}
