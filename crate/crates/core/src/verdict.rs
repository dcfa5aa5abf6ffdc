//! Categorical outcomes shared by the perspectives and the report.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! verdicts {
    ($($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? })+) => {$(
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant,)+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text,)+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    )+};
}

verdicts! {
    Distribution {
        EquallyDistributed => "Equally distributed",
        UnevenlyDistributed => "Unevenly distributed",
    }
    Ecosystem {
        Maintainer => "Ecosystem maintainer",
        Changer => "Ecosystem changer",
    }
    Behaviour {
        BehaveSimilarly => "Behave similarly",
        BehaveDifferently => "Behave differently",
    }
    Stability {
        NonDestabilizing => "Non-destabilizing",
        Destabilizing => "Destabilizing",
    }
    Influence {
        InfluenceSimilarly => "Influence similarly",
        InfluenceDifferently => "Influence differently",
    }
    Presence {
        Proportionate => "Proportionate",
        HighlyPopulated => "Highly populated",
        Depopulated => "Depopulated",
    }
    Stimulation {
        Normal => "Normally stimulated",
        Under => "Understimulated",
        Over => "Overstimulated",
    }
    Discussion {
        DiscussSimilarly => "Discuss similarly",
        DiscussDifferently => "Discuss differently",
    }
    Influencer {
        Influencer => "Influencer",
        NonInfluencer => "Non-influencer",
    }
    Virality {
        EquallyViral => "Equally viral",
        UnevenlyViral => "Unevenly viral",
    }
}

/// `|value - reference| <= eps * |reference|`, with `0 ~ 0`.
pub fn within(value: f64, reference: f64, eps: f64) -> bool {
    eps == f64::INFINITY || (value - reference).abs() <= eps * reference.abs()
}

/// True when every group mean lies within `eps` of the grand mean, where
/// the grand mean weights each group by `weights` (usually its size).
pub fn near_grand_mean(means: &[f64], weights: &[f64], eps: f64) -> bool {
    let total: f64 = weights.iter().sum();
    if means.len() < 2 || total == 0.0 {
        return true;
    }
    let grand = means.iter().zip(weights).map(|(m, w)| m * w).sum::<f64>() / total;
    means
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .all(|(m, _)| within(*m, grand, eps))
}

/// Three-way comparison of an observed share with its expected share.
pub(crate) fn compare_share(observed: f64, expected: f64, eps: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if within(observed, expected, eps) {
        Ordering::Equal
    } else if observed > expected {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}
