//! PageRank, HITS and eigenvector centrality, averaged per group.
//!
//! Every score vector is indexed by node, in the graph's node order.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::grouping::{decile_bin, decile_label, GroupAssignment};
use crate::verdict::{near_grand_mean, Influence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Weighted PageRank; `false` gives the classic unweighted variant.
    pub weighted: bool,
}

impl Default for IterationParams {
    fn default() -> Self {
        IterationParams {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 200,
            weighted: true,
        }
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn normalize_l2(v: &mut [f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}

/// `PR(u) = (1-d)/N + d * sum over in-neighbours v of PR(v) * w(v,u) / str_out(v)`,
/// with the rank of dangling nodes spread evenly over all nodes.
pub fn pagerank(g: &SocialGraph, p: &IterationParams) -> Result<Vec<f64>> {
    let n = g.order();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let nf = n as f64;
    let out: Vec<f64> = (0..n as u32)
        .map(|u| {
            if p.weighted {
                g.out_strength(u) as f64
            } else {
                g.out_degree(u) as f64
            }
        })
        .collect();
    let mut pr = vec![1.0 / nf; n];
    for _ in 0..p.max_iter {
        let dangling: f64 = pr.iter().zip(&out).filter(|(_, o)| **o == 0.0).map(|(x, _)| x).sum();
        let base = (1.0 - p.damping) / nf + p.damping * dangling / nf;
        let next: Vec<f64> = (0..n as u32)
            .into_par_iter()
            .map(|u| {
                let inflow: f64 = g
                    .in_edges(u)
                    .map(|(v, w)| {
                        let w = if p.weighted { w as f64 } else { 1.0 };
                        pr[v as usize] * w / out[v as usize]
                    })
                    .sum();
                base + p.damping * inflow
            })
            .collect();
        let delta = l1(&next, &pr);
        pr = next;
        if delta < p.tol {
            return Ok(pr);
        }
    }
    Err(Error::NoConvergence {
        algorithm: "pagerank",
        max_iter: p.max_iter,
    })
}

/// Weighted HITS with L2 normalization after each half-step. Returns
/// `(hubs, authorities)`.
pub fn hits(g: &SocialGraph, p: &IterationParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = g.order();
    if g.size() == 0 {
        return Err(Error::NoEdges);
    }
    let mut hub = vec![1.0 / (n as f64).sqrt(); n];
    let mut auth = hub.clone();
    for _ in 0..p.max_iter {
        let mut next_auth: Vec<f64> = (0..n as u32)
            .into_par_iter()
            .map(|u| g.in_edges(u).map(|(v, w)| w as f64 * hub[v as usize]).sum())
            .collect();
        normalize_l2(&mut next_auth)?;
        let mut next_hub: Vec<f64> = (0..n as u32)
            .into_par_iter()
            .map(|u| g.out_edges(u).map(|(v, w)| w as f64 * next_auth[v as usize]).sum())
            .collect();
        normalize_l2(&mut next_hub)?;
        let delta = l1(&next_hub, &hub) + l1(&next_auth, &auth);
        hub = next_hub;
        auth = next_auth;
        if delta < p.tol * n as f64 {
            return Ok((hub, auth));
        }
    }
    Err(Error::NoConvergence {
        algorithm: "hits",
        max_iter: p.max_iter,
    })
}

/// Principal eigenvector of the symmetrized weighted adjacency, unit L2
/// norm. Iterates with `A + I`, which has the same eigenvectors but cannot
/// oscillate on bipartite graphs. Isolated nodes get exactly zero.
pub fn eigenvector_centrality(g: &SocialGraph, p: &IterationParams) -> Result<Vec<f64>> {
    let adj = g.symmetrized();
    let n = adj.len();
    if g.size() == 0 {
        return Err(Error::ZeroVector);
    }
    let mut x: Vec<f64> = (0..n as u32).map(|u| if adj.degree(u) > 0 { 1.0 } else { 0.0 }).collect();
    normalize_l2(&mut x)?;
    for _ in 0..p.max_iter {
        let mut next: Vec<f64> = (0..n as u32)
            .into_par_iter()
            .map(|u| {
                let s: f64 = adj
                    .neighbors(u)
                    .iter()
                    .zip(adj.weights(u))
                    .map(|(v, w)| *w as f64 * x[*v as usize])
                    .sum();
                if adj.degree(u) > 0 {
                    s + x[u as usize]
                } else {
                    0.0
                }
            })
            .collect();
        normalize_l2(&mut next)?;
        let delta = l1(&next, &x);
        x = next;
        if delta < p.tol * n as f64 {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        algorithm: "eigenvector",
        max_iter: p.max_iter,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceScores {
    pub pagerank: Vec<f64>,
    pub hub: Vec<f64>,
    pub authority: Vec<f64>,
    pub eigenvector: Vec<f64>,
}

impl InfluenceScores {
    pub fn compute(g: &SocialGraph, p: &IterationParams) -> Result<Self> {
        let pagerank = pagerank(g, p)?;
        let (hub, authority) = hits(g, p)?;
        let eigenvector = eigenvector_centrality(g, p)?;
        Ok(InfluenceScores {
            pagerank,
            hub,
            authority,
            eigenvector,
        })
    }

    fn of(&self, i: usize) -> [f64; 4] {
        [self.pagerank[i], self.hub[i], self.authority[i], self.eigenvector[i]]
    }

    /// `user, score_bin, pagerank, hub, auth, eigenvector`.
    pub fn write_csv(&self, path: &Path, g: &SocialGraph, assignment: &GroupAssignment) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["user", "score_bin", "pagerank", "hub", "auth", "eigenvector"])?;
        for (i, u) in g.users().iter().enumerate() {
            let bin = assignment
                .score_of(u.as_str())
                .map_or(String::new(), |s| decile_label(decile_bin(s)).to_string());
            let mut row = vec![u.to_string(), bin];
            row.extend(self.of(i).iter().map(|v| v.to_string()));
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ScoreMeans {
    pub pagerank: f64,
    pub hub: f64,
    pub authority: f64,
    pub eigenvector: f64,
}

impl ScoreMeans {
    fn of(scores: &InfluenceScores, members: &[usize]) -> Self {
        let mut acc = [0.0; 4];
        for &i in members {
            for (a, v) in acc.iter_mut().zip(scores.of(i)) {
                *a += v;
            }
        }
        let k = members.len().max(1) as f64;
        ScoreMeans {
            pagerank: acc[0] / k,
            hub: acc[1] / k,
            authority: acc[2] / k,
            eigenvector: acc[3] / k,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pagerank, self.hub, self.authority, self.eigenvector]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceBin {
    pub upper: f64,
    pub count: usize,
    pub mean: Option<ScoreMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupInfluence {
    pub group: usize,
    pub name: String,
    pub size: usize,
    pub mean: ScoreMeans,
    pub deciles: Vec<InfluenceBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport {
    pub params: IterationParams,
    pub groups: Vec<GroupInfluence>,
    pub epsilon: f64,
    pub verdict: Influence,
}

/// Influence similarly iff every score's group means lie within `epsilon`
/// of the grand mean over categorized users.
pub fn influence_analysis(
    g: &SocialGraph,
    assignment: &GroupAssignment,
    scores: &InfluenceScores,
    params: IterationParams,
    epsilon: f64,
) -> Result<InfluenceReport> {
    if assignment.n_groups() == 0 {
        return Err(Error::NoGroups);
    }
    let node_groups = assignment.node_groups(g);
    let node_scores = assignment.node_scores(g);
    let mut groups = Vec::new();
    for k in 0..assignment.n_groups() {
        let members: Vec<usize> = (0..g.order()).filter(|&i| node_groups[i] == Some(k)).collect();
        if members.is_empty() {
            return Err(Error::EmptyGroup(k));
        }
        let deciles = if members.iter().any(|&i| node_scores[i].is_some()) {
            let mut bins = vec![Vec::new(); 10];
            for &i in &members {
                if let Some(s) = node_scores[i] {
                    bins[decile_bin(s)].push(i);
                }
            }
            bins.iter()
                .enumerate()
                .map(|(b, m)| InfluenceBin {
                    upper: decile_label(b),
                    count: m.len(),
                    mean: (!m.is_empty()).then(|| ScoreMeans::of(scores, m)),
                })
                .collect()
        } else {
            Vec::new()
        };
        groups.push(GroupInfluence {
            group: k,
            name: assignment.name(k).to_owned(),
            size: members.len(),
            mean: ScoreMeans::of(scores, &members),
            deciles,
        });
    }
    let weights: Vec<f64> = groups.iter().map(|g| g.size as f64).collect();
    let similar = (0..4).all(|s| {
        let means: Vec<f64> = groups.iter().map(|g| g.mean.as_array()[s]).collect();
        near_grand_mean(&means, &weights, epsilon)
    });
    Ok(InfluenceReport {
        params,
        groups,
        epsilon,
        verdict: if similar {
            Influence::InfluenceSimilarly
        } else {
            Influence::InfluenceDifferently
        },
    })
}
