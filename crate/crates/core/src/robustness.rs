//! Staged removal of group members and the destabilization verdict.
//!
//! Groups are processed from most to least automated on one residual
//! graph. Within a group, the first `ceil(r * |N_g|)` members of a fixed
//! ordering are removed for each `r`, so the steps nest. Removing a user
//! removes every edge incident to them.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::grouping::GroupAssignment;
use crate::verdict::Stability;

pub const REMOVAL_FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemovalOrder {
    /// Highest raw score first, ties by user id.
    ScoreDesc,
    /// Seeded shuffle within each group.
    Random { seed: u64 },
}

impl fmt::Display for RemovalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RemovalOrder::ScoreDesc => f.write_str("score_desc"),
            RemovalOrder::Random { seed } => write!(f, "random({seed})"),
        }
    }
}

impl FromStr for RemovalOrder {
    type Err = Error;

    /// Accepts `score_desc`, `random` (seed 0) and `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "score_desc" => Ok(RemovalOrder::ScoreDesc),
            "random" => Ok(RemovalOrder::Random { seed: 0 }),
            other => other
                .strip_prefix("random:")
                .and_then(|x| x.parse().ok())
                .map(|seed| RemovalOrder::Random { seed })
                .ok_or_else(|| Error::InvalidOrder(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Metrics {
    pub edges: f64,
    pub weight: f64,
    pub giant: f64,
}

impl Metrics {
    fn as_array(&self) -> [f64; 3] {
        [self.edges, self.weight, self.giant]
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Metrics {
            edges: f(self.edges),
            weight: f(self.weight),
            giant: f(self.giant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalStep {
    pub group: usize,
    pub r: f64,
    pub removed: usize,
    pub nodes_remaining: usize,
    /// Residual metrics after this step.
    pub measured: Metrics,
    /// `(1 - r) * p_g * total`.
    pub baseline: Metrics,
    /// Residual at the start of the group minus `measured`.
    pub measured_drop: Metrics,
    /// `r * p_g * total`.
    pub expected_drop: Metrics,
    /// Residual metrics as percentages of the original graph.
    pub percent_of_original: Metrics,
    pub nodes_remaining_pct: f64,
    /// Set when some expected drop exceeds what was left at the start of
    /// the group.
    pub baseline_infeasible: bool,
    pub verdict: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRobustness {
    pub group: usize,
    pub name: String,
    pub size: usize,
    /// `|N_g| / |N|`.
    pub share: f64,
    /// Verdict of the step that removes the whole group.
    pub verdict: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub order: RemovalOrder,
    pub epsilon: f64,
    pub original: Metrics,
    pub original_order: usize,
    pub groups: Vec<GroupRobustness>,
    pub steps: Vec<RemovalStep>,
}

impl RobustnessReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "order_mode",
            "group",
            "r",
            "nodes_remaining_pct",
            "giant_pct",
            "edges_pct",
            "weight_pct",
            "verdict",
        ])?;
        for s in &self.steps {
            w.write_record([
                self.order.to_string(),
                self.groups.iter().find(|g| g.group == s.group).map_or(String::new(), |g| g.name.clone()),
                s.r.to_string(),
                s.nodes_remaining_pct.to_string(),
                s.percent_of_original.giant.to_string(),
                s.percent_of_original.edges.to_string(),
                s.percent_of_original.weight.to_string(),
                s.verdict.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

struct Residual<'g> {
    g: &'g SocialGraph,
    alive: Vec<bool>,
    remaining: usize,
    edges: u64,
    weight: u64,
}

impl<'g> Residual<'g> {
    fn new(g: &'g SocialGraph) -> Self {
        Residual {
            g,
            alive: vec![true; g.order()],
            remaining: g.order(),
            edges: g.size() as u64,
            weight: g.total_weight(),
        }
    }

    fn remove(&mut self, x: u32) {
        if !std::mem::replace(&mut self.alive[x as usize], false) {
            return;
        }
        self.remaining -= 1;
        // a self-loop cannot exist, so each incident edge is counted once
        for (v, w) in self.g.out_edges(x).chain(self.g.in_edges(x)) {
            if self.alive[v as usize] {
                self.edges -= 1;
                self.weight -= w;
            }
        }
    }

    fn giant(&self) -> usize {
        let n = self.g.order();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for (u, v, _) in self.g.edges() {
            if self.alive[u as usize] && self.alive[v as usize] {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
        let mut sizes = vec![0usize; n];
        for x in 0..n as u32 {
            if self.alive[x as usize] {
                sizes[find(&mut parent, x) as usize] += 1;
            }
        }
        sizes.into_iter().max().unwrap_or(0)
    }

    fn metrics(&self) -> Metrics {
        Metrics {
            edges: self.edges as f64,
            weight: self.weight as f64,
            giant: self.giant() as f64,
        }
    }
}

/// Runs the removal schedule over every group, most automated first.
pub fn robustness_analysis(
    g: &SocialGraph,
    assignment: &GroupAssignment,
    order: RemovalOrder,
    epsilon: f64,
) -> Result<RobustnessReport> {
    if g.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if assignment.n_groups() == 0 {
        return Err(Error::NoGroups);
    }
    let node_groups = assignment.node_groups(g);
    let node_scores = assignment.node_scores(g);
    let n = g.order();
    let mut residual = Residual::new(g);
    let original = residual.metrics();
    let mut rng = match order {
        RemovalOrder::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        RemovalOrder::ScoreDesc => None,
    };
    let pct = |v: f64, total: f64| if total > 0.0 { 100.0 * v / total } else { 0.0 };

    let mut groups = Vec::new();
    let mut steps = Vec::new();
    for k in (0..assignment.n_groups()).rev() {
        // node indices follow user id order, so a stable sort breaks ties by id
        let mut members: Vec<u32> = (0..n as u32).filter(|&i| node_groups[i as usize] == Some(k)).collect();
        if members.is_empty() {
            return Err(Error::EmptyGroup(k));
        }
        match rng.as_mut() {
            Some(rng) => members.shuffle(rng),
            None => members.sort_by(|a, b| {
                let sa = node_scores[*a as usize].unwrap_or(0.0);
                let sb = node_scores[*b as usize].unwrap_or(0.0);
                sb.total_cmp(&sa)
            }),
        }
        let share = members.len() as f64 / n as f64;
        let start = residual.metrics();
        let mut removed = 0;
        let mut verdict = Stability::NonDestabilizing;
        for r in REMOVAL_FRACTIONS {
            let target = ((r * members.len() as f64) - 1e-9).ceil() as usize;
            for &x in &members[removed..target] {
                residual.remove(x);
            }
            removed = target;
            let measured = residual.metrics();
            let baseline = original.map(|t| (1.0 - r) * share * t);
            let expected_drop = original.map(|t| r * share * t);
            let measured_drop = Metrics {
                edges: start.edges - measured.edges,
                weight: start.weight - measured.weight,
                giant: start.giant - measured.giant,
            };
            let destabilizing = measured_drop
                .as_array()
                .iter()
                .zip(expected_drop.as_array())
                .any(|(m, e)| *m > (1.0 + epsilon) * e);
            let step_verdict = if destabilizing {
                Stability::Destabilizing
            } else {
                Stability::NonDestabilizing
            };
            if r == 1.0 {
                verdict = step_verdict;
            }
            steps.push(RemovalStep {
                group: k,
                r,
                removed,
                nodes_remaining: residual.remaining,
                measured,
                baseline,
                measured_drop,
                expected_drop,
                percent_of_original: Metrics {
                    edges: pct(measured.edges, original.edges),
                    weight: pct(measured.weight, original.weight),
                    giant: pct(measured.giant, original.giant),
                },
                nodes_remaining_pct: pct(residual.remaining as f64, n as f64),
                baseline_infeasible: expected_drop
                    .as_array()
                    .iter()
                    .zip(start.as_array())
                    .any(|(e, s)| *e > s + 1e-9),
                verdict: step_verdict,
            });
        }
        groups.push(GroupRobustness {
            group: k,
            name: assignment.name(k).to_owned(),
            size: members.len(),
            share,
            verdict,
        });
    }
    groups.reverse();
    Ok(RobustnessReport {
        order,
        epsilon,
        original,
        original_order: n,
        groups,
        steps,
    })
}
