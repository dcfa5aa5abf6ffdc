//! k-shell decomposition and per-shell group presence.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::grouping::GroupAssignment;
use crate::interactions::UserId;
use crate::verdict::{compare_share, Presence};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellAssignment {
    pub users: Vec<UserId>,
    /// Shell index per node, in node order.
    pub shell: Vec<u32>,
    pub max_k: u32,
}

impl ShellAssignment {
    pub fn shell_of(&self, user: &str) -> Option<u32> {
        self.users
            .binary_search_by(|u| u.as_str().cmp(user))
            .ok()
            .map(|i| self.shell[i])
    }
}

/// Core numbers on the symmetrized simple graph (bucket peeling, linear in
/// the number of edges). Isolated nodes land in shell 0.
pub fn kshell_decomposition(g: &SocialGraph) -> ShellAssignment {
    let adj = g.symmetrized();
    let n = adj.len();
    let mut deg: Vec<usize> = (0..n as u32).map(|u| adj.degree(u)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // nodes sorted by degree, with bucket starts and each node's position
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0u32; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v as u32;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    if !bin.is_empty() {
        bin[0] = 0;
    }

    for i in 0..n {
        let v = vert[i];
        for &u in adj.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v as usize] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u as u32 != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w as usize] = pu;
                    vert[pw] = u as u32;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    let shell: Vec<u32> = deg.into_iter().map(|d| d as u32).collect();
    ShellAssignment {
        users: g.users().to_vec(),
        max_k: shell.iter().copied().max().unwrap_or(0),
        shell,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellRow {
    pub k: u32,
    /// Categorized members of the shell.
    pub size: usize,
    /// `p_{g,k}` per group.
    pub fractions: Vec<f64>,
    pub verdicts: Vec<Presence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub max_k: u32,
    /// `p_g` per group over categorized users.
    pub group_shares: Vec<f64>,
    pub groups: Vec<String>,
    pub shells: Vec<ShellRow>,
    /// Shells in `0..=max_k` with no categorized member.
    pub empty_shells: Vec<u32>,
    pub epsilon: f64,
}

impl StructureReport {
    /// Verdicts of the innermost non-empty shell.
    pub fn core_verdicts(&self) -> Option<&[Presence]> {
        self.shells.last().map(|r| r.verdicts.as_slice())
    }

    /// `k, shell_size, p_<group>..., verdict_<group>...`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["k".to_owned(), "shell_size".to_owned()];
        header.extend(self.groups.iter().map(|g| format!("p_{g}")));
        header.extend(self.groups.iter().map(|g| format!("verdict_{g}")));
        w.write_record(header)?;
        for r in &self.shells {
            let mut row = vec![r.k.to_string(), r.size.to_string()];
            row.extend(r.fractions.iter().map(|p| p.to_string()));
            row.extend(r.verdicts.iter().map(|v| v.to_string()));
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Compares each group's share of every shell with its overall share.
/// Users without a group are ignored.
pub fn structure_analysis(shells: &ShellAssignment, assignment: &GroupAssignment, epsilon: f64) -> Result<StructureReport> {
    let n_groups = assignment.n_groups();
    if n_groups == 0 {
        return Err(Error::NoGroups);
    }
    let mut counts = vec![vec![0usize; n_groups]; shells.max_k as usize + 1];
    let mut totals = vec![0usize; n_groups];
    for (u, &k) in shells.users.iter().zip(&shells.shell) {
        if let Some(g) = assignment.group_of(u.as_str()) {
            counts[k as usize][g] += 1;
            totals[g] += 1;
        }
    }
    let categorized: usize = totals.iter().sum();
    if categorized == 0 {
        return Err(Error::NoScores);
    }
    let group_shares: Vec<f64> = totals.iter().map(|&t| t as f64 / categorized as f64).collect();
    let mut rows = Vec::new();
    let mut empty_shells = Vec::new();
    for (k, c) in counts.iter().enumerate() {
        let size: usize = c.iter().sum();
        if size == 0 {
            empty_shells.push(k as u32);
            continue;
        }
        let fractions: Vec<f64> = c.iter().map(|&x| x as f64 / size as f64).collect();
        let verdicts = fractions
            .iter()
            .zip(&group_shares)
            .map(|(p, pg)| match compare_share(*p, *pg, epsilon) {
                std::cmp::Ordering::Equal => Presence::Proportionate,
                std::cmp::Ordering::Greater => Presence::HighlyPopulated,
                std::cmp::Ordering::Less => Presence::Depopulated,
            })
            .collect();
        rows.push(ShellRow {
            k: k as u32,
            size,
            fractions,
            verdicts,
        });
    }
    Ok(StructureReport {
        max_k: rows.last().map_or(0, |r| r.k),
        group_shares,
        groups: assignment.groups.iter().map(|g| g.name.clone()).collect(),
        shells: rows,
        empty_shells,
        epsilon,
    })
}
