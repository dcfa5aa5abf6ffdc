//! Per-time-unit traffic shares and the stimulation verdict.
//!
//! Each interaction counts toward its retweeter's group. Buckets are UTC
//! calendar days or hours.

use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, SocialGraph};
use crate::grouping::GroupAssignment;
use crate::interactions::InteractionDataset;
use crate::verdict::{compare_share, Stimulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    Day,
    Hour,
}

impl TimeUnit {
    pub fn seconds(self) -> i64 {
        match self {
            TimeUnit::Day => 86_400,
            TimeUnit::Hour => 3_600,
        }
    }

    fn label(self, start: i64) -> String {
        let dt = DateTime::<Utc>::from_timestamp(start, 0).unwrap_or_default();
        match self {
            TimeUnit::Day => dt.format("%Y-%m-%d").to_string(),
            TimeUnit::Hour => dt.format("%Y-%m-%dT%H:00Z").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub label: String,
    pub start: i64,
    pub total: usize,
    pub counts: Vec<usize>,
    /// `p_{g,d}`; all zero for an empty bucket.
    pub shares: Vec<f64>,
    /// `None` for an empty bucket.
    pub verdicts: Vec<Option<Stimulation>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalSeries {
    pub unit: TimeUnit,
    pub groups: Vec<String>,
    /// `|N_g| / |N|` over categorized users, the reference for verdicts.
    pub user_shares: Vec<f64>,
    /// Each group's share of all counted traffic, for context.
    pub traffic_shares: Vec<f64>,
    pub include_uncategorized: bool,
    /// Interactions by uncategorized retweeters.
    pub uncategorized: usize,
    pub epsilon: f64,
    pub buckets: Vec<Bucket>,
}

impl TemporalSeries {
    /// Labels of the buckets where `group` is overstimulated.
    pub fn overstimulated(&self, group: usize) -> Vec<&str> {
        self.buckets
            .iter()
            .filter(|b| b.verdicts[group] == Some(Stimulation::Over))
            .map(|b| b.label.as_str())
            .collect()
    }

    /// `date, total, count_<g>..., p_<g>..., verdict_<g>...`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["date".to_owned(), "total".to_owned()];
        header.extend(self.groups.iter().map(|g| format!("count_{g}")));
        header.extend(self.groups.iter().map(|g| format!("p_{g}")));
        header.extend(self.groups.iter().map(|g| format!("verdict_{g}")));
        w.write_record(header)?;
        for b in &self.buckets {
            let mut row = vec![b.label.clone(), b.total.to_string()];
            row.extend(b.counts.iter().map(|c| c.to_string()));
            row.extend(b.shares.iter().map(|p| p.to_string()));
            row.extend(b.verdicts.iter().map(|v| v.map_or(String::new(), |v| v.to_string())));
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Buckets every interaction by time and retweeter group. With
/// `include_uncategorized`, traffic from users without a group still
/// counts toward each bucket's total.
pub fn temporal_analysis(
    ds: &InteractionDataset,
    assignment: &GroupAssignment,
    unit: TimeUnit,
    epsilon: f64,
    include_uncategorized: bool,
) -> Result<TemporalSeries> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_groups = assignment.n_groups();
    if n_groups == 0 {
        return Err(Error::NoGroups);
    }
    let step = unit.seconds();
    let first = ds.window_start.div_euclid(step);
    let last = ds.window_end.div_euclid(step);
    let n_buckets = (last - first + 1) as usize;
    // one column per group plus one for uncategorized traffic
    let width = n_groups + 1;
    let counts = ds
        .interactions
        .par_iter()
        .fold(
            || vec![0usize; n_buckets * width],
            |mut acc, t| {
                let b = (t.timestamp.div_euclid(step) - first) as usize;
                let g = assignment.group_of(t.retweeter.as_str()).unwrap_or(n_groups);
                acc[b * width + g] += 1;
                acc
            },
        )
        .reduce(
            || vec![0usize; n_buckets * width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let user_shares = assignment.fractions.clone();
    let mut group_totals = vec![0usize; width];
    let mut buckets = Vec::with_capacity(n_buckets);
    for b in 0..n_buckets {
        let row = &counts[b * width..(b + 1) * width];
        group_totals.iter_mut().zip(row).for_each(|(t, c)| *t += c);
        let group_counts = row[..n_groups].to_vec();
        let total = group_counts.iter().sum::<usize>() + if include_uncategorized { row[n_groups] } else { 0 };
        let shares: Vec<f64> = group_counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect();
        let verdicts = shares
            .iter()
            .zip(&user_shares)
            .map(|(p, pg)| {
                (total > 0).then(|| match compare_share(*p, *pg, epsilon) {
                    std::cmp::Ordering::Equal => Stimulation::Normal,
                    std::cmp::Ordering::Greater => Stimulation::Over,
                    std::cmp::Ordering::Less => Stimulation::Under,
                })
            })
            .collect();
        let start = (first + b as i64) * step;
        buckets.push(Bucket {
            label: unit.label(start),
            start,
            total,
            counts: group_counts,
            shares,
            verdicts,
        });
    }
    let uncategorized = group_totals[n_groups];
    let counted = group_totals[..n_groups].iter().sum::<usize>() + if include_uncategorized { uncategorized } else { 0 };
    let traffic_shares = group_totals[..n_groups]
        .iter()
        .map(|&c| if counted == 0 { 0.0 } else { c as f64 / counted as f64 })
        .collect();
    Ok(TemporalSeries {
        unit,
        groups: assignment.groups.iter().map(|g| g.name.clone()).collect(),
        user_shares,
        traffic_shares,
        include_uncategorized,
        uncategorized,
        epsilon,
        buckets,
    })
}

/// Graph of the interactions dated within `from..=to` (UTC days).
pub fn window_subgraph(ds: &InteractionDataset, from: NaiveDate, to: NaiveDate) -> Result<SocialGraph> {
    if from > to {
        return Err(Error::Config(format!("window starts after it ends: {from} > {to}")));
    }
    let lo = from.and_hms_opt(0, 0, 0).unwrap_or_default().and_utc().timestamp();
    let hi = to.and_hms_opt(0, 0, 0).unwrap_or_default().and_utc().timestamp() + 86_400;
    let mut b = GraphBuilder::new();
    let mut any = false;
    for t in ds.interactions.iter().filter(|t| (lo..hi).contains(&t.timestamp)) {
        b.add_edge(t.retweeter.as_str(), t.retweeted.as_str(), 1);
        any = true;
    }
    if !any {
        return Err(Error::EmptyWindow);
    }
    Ok(b.build())
}
