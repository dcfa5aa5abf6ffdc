//! Cascades, per-group topics and the virality verdicts.
//!
//! A cascade is every retweet of one tweet. Its author is the retweeted
//! user, and cascades are attributed to the author's group.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::GroupAssignment;
use crate::interactions::{InteractionDataset, TweetId, UserId};
use crate::verdict::{near_grand_mean, Discussion, Influencer, Virality};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cascade {
    pub tweet: TweetId,
    pub author: UserId,
    /// Number of retweets.
    pub size: usize,
    pub distinct_retweeters: usize,
    pub start: i64,
    pub end: i64,
    /// Seconds from the first retweet, one per retweet, ascending.
    pub retweet_offsets: Vec<i64>,
    /// Seconds from the first retweet to each distinct retweeter's first
    /// retweet, ascending.
    pub retweeter_offsets: Vec<i64>,
}

impl Cascade {
    pub fn duration(&self) -> i64 {
        self.end - self.start
    }
}

/// Groups interactions by tweet, in tweet id order.
pub fn extract_cascades(ds: &InteractionDataset) -> Result<Vec<Cascade>> {
    let mut by_tweet: BTreeMap<&TweetId, (&UserId, Vec<(i64, &UserId)>)> = BTreeMap::new();
    for t in &ds.interactions {
        let entry = by_tweet.entry(&t.tweet).or_insert_with(|| (&t.retweeted, Vec::new()));
        if entry.0 != &t.retweeted {
            return Err(Error::ConflictingAuthor {
                tweet: t.tweet.to_string(),
                first: entry.0.to_string(),
                second: t.retweeted.to_string(),
            });
        }
        entry.1.push((t.timestamp, &t.retweeter));
    }
    Ok(by_tweet
        .into_iter()
        .map(|(tweet, (author, mut events))| {
            events.sort();
            let start = events[0].0;
            let end = events[events.len() - 1].0;
            let mut seen = BTreeSet::new();
            let retweeter_offsets = events
                .iter()
                .filter(|(_, u)| seen.insert(*u))
                .map(|(t, _)| t - start)
                .collect();
            Cascade {
                tweet: tweet.clone(),
                author: author.clone(),
                size: events.len(),
                distinct_retweeters: seen.len(),
                start,
                end,
                retweet_offsets: events.iter().map(|(t, _)| t - start).collect(),
                retweeter_offsets,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InfluencerThresholds {
    pub min_size: f64,
    pub max_hours: f64,
}

impl Default for InfluencerThresholds {
    fn default() -> Self {
        InfluencerThresholds {
            min_size: 50.0,
            max_hours: 24.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupVirality {
    pub group: usize,
    pub name: String,
    pub cascades: usize,
    pub interactions: usize,
    /// `None` when the group authored no cascade.
    pub mean_size: Option<f64>,
    pub mean_distinct_retweeters: Option<f64>,
    pub mean_duration_s: Option<f64>,
    /// Mean seconds to the i-th distinct retweeter, up to the smallest
    /// distinct-retweeter count among the group's cascades.
    pub curve: Vec<f64>,
    pub influencer: Option<Influencer>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViralityReport {
    pub thresholds: InfluencerThresholds,
    pub epsilon: f64,
    pub groups: Vec<GroupVirality>,
    /// Cascades whose author has no group.
    pub uncategorized_cascades: usize,
    pub verdict: Virality,
}

impl ViralityReport {
    /// `group, i, mean_offset_s`.
    pub fn write_curves_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["group", "i", "mean_offset_s"])?;
        for g in &self.groups {
            for (i, v) in g.curve.iter().enumerate() {
                w.write_record([g.name.clone(), (i + 1).to_string(), v.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// `tweet, author, group, size, duration_s`.
pub fn write_cascades_csv(path: &Path, cascades: &[Cascade], assignment: &GroupAssignment) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["tweet", "author", "group", "size", "duration_s"])?;
    for c in cascades {
        let group = assignment
            .group_of(c.author.as_str())
            .map_or(String::new(), |g| assignment.name(g).to_owned());
        w.write_record([
            c.tweet.to_string(),
            c.author.to_string(),
            group,
            c.size.to_string(),
            c.duration().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-group cascade statistics. Groups are equally viral iff mean size
/// and mean duration are both within `epsilon` of their grand means over
/// all categorized cascades; groups that authored nothing are left out of
/// the comparison.
pub fn virality_analysis(
    cascades: &[Cascade],
    assignment: &GroupAssignment,
    epsilon: f64,
    thresholds: InfluencerThresholds,
) -> Result<ViralityReport> {
    if cascades.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if assignment.n_groups() == 0 {
        return Err(Error::NoGroups);
    }
    if let Some(empty) = assignment.sizes().iter().position(|&s| s == 0) {
        return Err(Error::EmptyGroup(empty));
    }
    let mut per_group: Vec<Vec<&Cascade>> = vec![Vec::new(); assignment.n_groups()];
    let mut uncategorized = 0;
    for c in cascades {
        match assignment.group_of(c.author.as_str()) {
            Some(g) => per_group[g].push(c),
            None => uncategorized += 1,
        }
    }
    let groups: Vec<GroupVirality> = per_group
        .iter()
        .enumerate()
        .map(|(g, cs)| {
            let k = cs.len() as f64;
            let mean = |f: &dyn Fn(&Cascade) -> f64| (!cs.is_empty()).then(|| cs.iter().map(|c| f(c)).sum::<f64>() / k);
            let mean_size = mean(&|c| c.size as f64);
            let mean_duration_s = mean(&|c| c.duration() as f64);
            let depth = cs.iter().map(|c| c.retweeter_offsets.len()).min().unwrap_or(0);
            let curve = (0..depth)
                .map(|i| cs.iter().map(|c| c.retweeter_offsets[i] as f64).sum::<f64>() / k)
                .collect();
            let influencer = mean_size.zip(mean_duration_s).map(|(s, d)| {
                if s >= thresholds.min_size && d <= thresholds.max_hours * 3600.0 {
                    Influencer::Influencer
                } else {
                    Influencer::NonInfluencer
                }
            });
            GroupVirality {
                group: g,
                name: assignment.name(g).to_owned(),
                cascades: cs.len(),
                interactions: cs.iter().map(|c| c.size).sum(),
                mean_size,
                mean_distinct_retweeters: mean(&|c| c.distinct_retweeters as f64),
                mean_duration_s,
                curve,
                influencer,
            }
        })
        .collect();
    let active: Vec<&GroupVirality> = groups.iter().filter(|g| g.cascades > 0).collect();
    let weights: Vec<f64> = active.iter().map(|g| g.cascades as f64).collect();
    let sizes: Vec<f64> = active.iter().filter_map(|g| g.mean_size).collect();
    let durations: Vec<f64> = active.iter().filter_map(|g| g.mean_duration_s).collect();
    let equal = near_grand_mean(&sizes, &weights, epsilon) && near_grand_mean(&durations, &weights, epsilon);
    Ok(ViralityReport {
        thresholds,
        epsilon,
        groups,
        uncategorized_cascades: uncategorized,
        verdict: if equal {
            Virality::EquallyViral
        } else {
            Virality::UnevenlyViral
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicProfile {
    pub group: usize,
    pub name: String,
    /// Most frequent topics, count descending then topic ascending.
    pub top_topics: Vec<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicReport {
    pub k: usize,
    pub profiles: Vec<TopicProfile>,
    /// Mean pairwise Jaccard similarity of the top-K sets of groups that
    /// have any topic; 1 with fewer than two such groups.
    pub mean_jaccard: f64,
    pub threshold: f64,
    pub verdict: Discussion,
}

impl TopicReport {
    /// `group, rank, topic, count`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["group", "rank", "topic", "count"])?;
        for p in &self.profiles {
            for (i, (t, c)) in p.top_topics.iter().enumerate() {
                w.write_record([p.name.clone(), (i + 1).to_string(), t.clone(), c.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn jaccard(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        1.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

/// Top-`k` topics per group, attributing each interaction to the group of
/// its cascade's author.
pub fn topic_profiles(
    ds: &InteractionDataset,
    assignment: &GroupAssignment,
    k: usize,
    threshold: f64,
) -> Result<TopicReport> {
    if ds.interactions.iter().all(|t| t.topics.is_empty()) {
        return Err(Error::NoTopics);
    }
    let mut counts: Vec<HashMap<&str, usize>> = vec![HashMap::new(); assignment.n_groups()];
    for t in &ds.interactions {
        if let Some(g) = assignment.group_of(t.retweeted.as_str()) {
            for topic in &t.topics {
                *counts[g].entry(topic.as_str()).or_default() += 1;
            }
        }
    }
    let profiles: Vec<TopicProfile> = counts
        .into_iter()
        .enumerate()
        .map(|(g, c)| {
            let mut ranked: Vec<(&str, usize)> = c.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            ranked.truncate(k);
            TopicProfile {
                group: g,
                name: assignment.name(g).to_owned(),
                top_topics: ranked.into_iter().map(|(t, c)| (t.to_owned(), c)).collect(),
            }
        })
        .collect();
    let sets: Vec<BTreeSet<&str>> = profiles
        .iter()
        .filter(|p| !p.top_topics.is_empty())
        .map(|p| p.top_topics.iter().map(|(t, _)| t.as_str()).collect())
        .collect();
    let mut pairs = 0usize;
    let mut sum = 0.0;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            pairs += 1;
            sum += jaccard(&sets[i], &sets[j]);
        }
    }
    let mean_jaccard = if pairs == 0 { 1.0 } else { sum / pairs as f64 };
    Ok(TopicReport {
        k,
        profiles,
        mean_jaccard,
        threshold,
        verdict: if mean_jaccard >= threshold {
            Discussion::DiscussSimilarly
        } else {
            Discussion::DiscussDifferently
        },
    })
}
