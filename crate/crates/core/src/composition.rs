//! Incremental global composition and per-group node composition.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{node_attributes, BetweennessMode, GraphProperties, NodeAttributes, SocialGraph};
use crate::grouping::{decile_bin, decile_label, GroupAssignment};
use crate::verdict::{near_grand_mean, within, Behaviour, Ecosystem};

/// Averages of the node attributes compared between stages and groups.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AttributeMeans {
    pub deg_in: f64,
    pub deg_out: f64,
    pub str_in: f64,
    pub str_out: f64,
    pub farness: f64,
    pub closeness: f64,
    pub betweenness: f64,
    pub betweenness_norm: f64,
}

impl AttributeMeans {
    pub const COMPARED: [&'static str; 6] = ["deg_in", "deg_out", "str_in", "str_out", "closeness", "betweenness_norm"];

    /// The attributes used in verdicts, in [`Self::COMPARED`] order.
    pub fn compared(&self) -> [f64; 6] {
        [
            self.deg_in,
            self.deg_out,
            self.str_in,
            self.str_out,
            self.closeness,
            self.betweenness_norm,
        ]
    }

    fn of<'a>(attrs: impl IntoIterator<Item = &'a NodeAttributes>) -> Self {
        let mut m = AttributeMeans::default();
        let mut n = 0usize;
        for a in attrs {
            n += 1;
            m.deg_in += a.deg_in as f64;
            m.deg_out += a.deg_out as f64;
            m.str_in += a.str_in as f64;
            m.str_out += a.str_out as f64;
            m.farness += a.farness;
            m.closeness += a.closeness;
            m.betweenness += a.betweenness;
            m.betweenness_norm += a.betweenness_norm;
        }
        if n > 0 {
            let n = n as f64;
            for v in m.fields_mut() {
                *v /= n;
            }
        }
        m
    }

    fn median<'a>(attrs: impl IntoIterator<Item = &'a NodeAttributes>) -> Self {
        let attrs: Vec<&NodeAttributes> = attrs.into_iter().collect();
        let med = |f: &dyn Fn(&NodeAttributes) -> f64| {
            let mut v: Vec<f64> = attrs.iter().map(|a| f(a)).collect();
            if v.is_empty() {
                return 0.0;
            }
            v.sort_by(f64::total_cmp);
            let h = v.len() / 2;
            if v.len() % 2 == 1 {
                v[h]
            } else {
                (v[h - 1] + v[h]) / 2.0
            }
        };
        AttributeMeans {
            deg_in: med(&|a| a.deg_in as f64),
            deg_out: med(&|a| a.deg_out as f64),
            str_in: med(&|a| a.str_in as f64),
            str_out: med(&|a| a.str_out as f64),
            farness: med(&|a| a.farness),
            closeness: med(&|a| a.closeness),
            betweenness: med(&|a| a.betweenness),
            betweenness_norm: med(&|a| a.betweenness_norm),
        }
    }

    fn fields_mut(&mut self) -> [&mut f64; 8] {
        [
            &mut self.deg_in,
            &mut self.deg_out,
            &mut self.str_in,
            &mut self.str_out,
            &mut self.farness,
            &mut self.closeness,
            &mut self.betweenness,
            &mut self.betweenness_norm,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionStage {
    /// Group added at this stage.
    pub group: usize,
    pub name: String,
    pub properties: GraphProperties,
    pub averages: AttributeMeans,
    pub verdict: Ecosystem,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalComposition {
    pub stages: Vec<CompositionStage>,
    pub epsilon: f64,
}

impl GlobalComposition {
    pub fn verdicts(&self) -> Vec<Ecosystem> {
        self.stages.iter().map(|s| s.verdict).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(CSV_HEADER)?;
        for s in &self.stages {
            w.write_record(csv_row(&s.name, &s.properties, &s.averages))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

const CSV_HEADER: [&str; 10] = [
    "stage",
    "order",
    "size",
    "density",
    "avg_deg_in",
    "avg_deg_out",
    "avg_str_in",
    "avg_str_out",
    "avg_closeness_norm",
    "avg_betweenness_norm",
];

fn csv_row(label: &str, p: &GraphProperties, m: &AttributeMeans) -> Vec<String> {
    let mut row = vec![label.to_owned(), p.order.to_string(), p.size.to_string(), p.density.to_string()];
    row.extend(m.compared().iter().map(|v| v.to_string()));
    row
}

/// Adds groups one at a time, lowest automation first. Stage `k` is the
/// subgraph induced on the members of groups `0..=k`, so an edge between
/// two groups appears once both endpoints are present.
pub fn global_composition(
    g: &SocialGraph,
    assignment: &GroupAssignment,
    betweenness: BetweennessMode,
    epsilon: f64,
) -> Result<GlobalComposition> {
    if assignment.n_groups() == 0 {
        return Err(Error::NoGroups);
    }
    if let Some(empty) = assignment.sizes().iter().position(|&s| s == 0) {
        return Err(Error::EmptyStage(empty));
    }
    let node_groups = assignment.node_groups(g);
    let mut stages: Vec<CompositionStage> = Vec::with_capacity(assignment.n_groups());
    for k in 0..assignment.n_groups() {
        let mask: Vec<bool> = node_groups.iter().map(|ng| matches!(ng, Some(x) if *x <= k)).collect();
        let stage = g.induced_by_mask(&mask);
        let attrs = node_attributes(&stage, betweenness)?;
        let properties = stage.properties();
        let averages = AttributeMeans::of(&attrs);
        let verdict = match stages.last() {
            Some(prev) => {
                let steady = within(properties.density, prev.properties.density, epsilon)
                    && averages
                        .compared()
                        .iter()
                        .zip(prev.averages.compared())
                        .all(|(now, before)| within(*now, before, epsilon));
                if steady {
                    Ecosystem::Maintainer
                } else {
                    Ecosystem::Changer
                }
            }
            None => Ecosystem::Maintainer,
        };
        stages.push(CompositionStage {
            group: k,
            name: assignment.name(k).to_owned(),
            properties,
            averages,
            verdict,
        });
    }
    Ok(GlobalComposition { stages, epsilon })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecileBin {
    /// Upper edge of the score bin.
    pub upper: f64,
    pub count: usize,
    /// `None` flags an empty bin.
    pub mean: Option<AttributeMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupProfile {
    pub group: usize,
    pub name: String,
    pub size: usize,
    pub mean: AttributeMeans,
    pub median: AttributeMeans,
    /// Empty when the grouping had no raw scores.
    pub deciles: Vec<DecileBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeComposition {
    pub profiles: Vec<GroupProfile>,
    pub epsilon: f64,
    pub verdict: Behaviour,
}

impl NodeComposition {
    /// One row per group: `group, order` then the averaged attributes.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let header: Vec<&str> = ["group", "order"].into_iter().chain(CSV_HEADER[4..].iter().copied()).collect();
        w.write_record(header)?;
        for p in &self.profiles {
            let mut row = vec![p.name.clone(), p.size.to_string()];
            row.extend(p.mean.compared().iter().map(|v| v.to_string()));
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Averages full-graph node attributes per group. `attrs` must be in node
/// index order for `g`.
pub fn node_composition(
    g: &SocialGraph,
    assignment: &GroupAssignment,
    attrs: &[NodeAttributes],
    epsilon: f64,
) -> Result<NodeComposition> {
    if assignment.n_groups() == 0 {
        return Err(Error::NoGroups);
    }
    let node_groups = assignment.node_groups(g);
    let node_scores = assignment.node_scores(g);
    let mut profiles = Vec::with_capacity(assignment.n_groups());
    for k in 0..assignment.n_groups() {
        let members: Vec<usize> = (0..g.order()).filter(|&i| node_groups[i] == Some(k)).collect();
        if members.is_empty() {
            return Err(Error::EmptyGroup(k));
        }
        let deciles = if members.iter().any(|&i| node_scores[i].is_some()) {
            let mut bins: Vec<Vec<&NodeAttributes>> = vec![Vec::new(); 10];
            for &i in &members {
                if let Some(s) = node_scores[i] {
                    bins[decile_bin(s)].push(&attrs[i]);
                }
            }
            bins.into_iter()
                .enumerate()
                .map(|(b, v)| DecileBin {
                    upper: decile_label(b),
                    count: v.len(),
                    mean: (!v.is_empty()).then(|| AttributeMeans::of(v.iter().copied())),
                })
                .collect()
        } else {
            Vec::new()
        };
        profiles.push(GroupProfile {
            group: k,
            name: assignment.name(k).to_owned(),
            size: members.len(),
            mean: AttributeMeans::of(members.iter().map(|&i| &attrs[i])),
            median: AttributeMeans::median(members.iter().map(|&i| &attrs[i])),
            deciles,
        });
    }
    let weights: Vec<f64> = profiles.iter().map(|p| p.size as f64).collect();
    let similar = (0..AttributeMeans::COMPARED.len()).all(|a| {
        let means: Vec<f64> = profiles.iter().map(|p| p.mean.compared()[a]).collect();
        near_grand_mean(&means, &weights, epsilon)
    });
    Ok(NodeComposition {
        profiles,
        epsilon,
        verdict: if similar {
            Behaviour::BehaveSimilarly
        } else {
            Behaviour::BehaveDifferently
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn assign(g: &SocialGraph, f: impl Fn(usize) -> Option<usize>, names: &[&str]) -> GroupAssignment {
        GroupAssignment::from_membership(
            names.iter().copied(),
            g.users().iter().enumerate().map(|(i, u)| (u.clone(), f(i))),
        )
    }

    fn cycle(n: usize) -> SocialGraph {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_edge(&format!("u{i:02}"), &format!("u{:02}", (i + 1) % n), 1);
        }
        b.build()
    }

    #[test]
    fn stage_orders_are_cumulative() {
        let g = cycle(10);
        let a = assign(&g, |i| Some(if i < 7 { 0 } else if i < 9 { 1 } else { 2 }), &["a", "b", "c"]);
        let c = global_composition(&g, &a, BetweennessMode::Exact, 0.1).unwrap();
        let orders: Vec<usize> = c.stages.iter().map(|s| s.properties.order).collect();
        assert_eq!(orders, vec![7, 9, 10]);
        assert_eq!(c.stages[2].properties, g.properties());
        assert_eq!(c.stages[0].verdict, Ecosystem::Maintainer);
    }

    #[test]
    fn single_group_is_maintainer() {
        let g = cycle(5);
        let a = assign(&g, |_| Some(0), &["all"]);
        let c = global_composition(&g, &a, BetweennessMode::Exact, 0.1).unwrap();
        assert_eq!(c.verdicts(), vec![Ecosystem::Maintainer]);
    }

    #[test]
    fn heavy_edge_group_changes_the_ecosystem() {
        // group 0: 20 users on a sparse ring; group 1: 5 users each
        // retweeting 5 ring users, five times the per-node edge count
        let mut b = GraphBuilder::new();
        for i in 0..20 {
            b.add_edge(&format!("h{i:02}"), &format!("h{:02}", (i + 1) % 20), 1);
        }
        for j in 0..5 {
            for t in 0..5 {
                b.add_edge(&format!("x{j}"), &format!("h{:02}", (j * 5 + t) % 20), 1);
            }
        }
        let g = b.build();
        let a = GroupAssignment::from_membership(
            ["humans", "bots"],
            g.users().iter().map(|u| (u.clone(), Some(usize::from(u.as_str().starts_with('x'))))),
        );
        let c = global_composition(&g, &a, BetweennessMode::Exact, 0.1).unwrap();
        assert_eq!(c.stages[0].averages.deg_out, 1.0);
        assert_eq!(c.stages[1].averages.deg_out, 45.0 / 25.0);
        assert_eq!(c.verdicts(), vec![Ecosystem::Maintainer, Ecosystem::Changer]);
    }

    #[test]
    fn empty_group_is_an_empty_stage() {
        let g = cycle(3);
        let a = assign(&g, |_| Some(0), &["a", "b"]);
        assert!(matches!(
            global_composition(&g, &a, BetweennessMode::Exact, 0.1),
            Err(Error::EmptyStage(1))
        ));
        let attrs = node_attributes(&g, BetweennessMode::Exact).unwrap();
        assert!(matches!(node_composition(&g, &a, &attrs, 0.1), Err(Error::EmptyGroup(1))));
    }

    #[test]
    fn symmetric_cycle_behaves_similarly() {
        let g = cycle(12);
        let a = assign(&g, |i| Some(i % 3), &["r", "g", "b"]);
        let attrs = node_attributes(&g, BetweennessMode::Exact).unwrap();
        let c = node_composition(&g, &a, &attrs, 0.1).unwrap();
        assert_eq!(c.verdict, Behaviour::BehaveSimilarly);
        assert_eq!(c.profiles[1].mean.deg_in, 1.0);
        assert_eq!(c.profiles[1].median.deg_in, 1.0);
    }

    #[test]
    fn hubs_behave_differently() {
        let mut b = GraphBuilder::new();
        for h in 0..3 {
            for l in 0..20 {
                b.add_edge(&format!("leaf{h}-{l:02}"), &format!("hub{h}"), 1);
            }
        }
        let g = b.build();
        let a = GroupAssignment::from_membership(
            ["leaves", "hubs"],
            g.users().iter().map(|u| (u.clone(), Some(usize::from(u.as_str().starts_with("hub"))))),
        );
        let attrs = node_attributes(&g, BetweennessMode::Exact).unwrap();
        let c = node_composition(&g, &a, &attrs, 0.1).unwrap();
        assert_eq!(c.profiles[1].mean.deg_in, 20.0);
        assert_eq!(c.profiles[0].mean.deg_in, 0.0);
        assert_eq!(c.verdict, Behaviour::BehaveDifferently);
        let lax = node_composition(&g, &a, &attrs, f64::INFINITY).unwrap();
        assert_eq!(lax.verdict, Behaviour::BehaveSimilarly);
    }

    #[test]
    fn deciles_use_the_upper_edge() {
        let g = cycle(4);
        let mut a = assign(&g, |_| Some(0), &["all"]);
        for (u, s) in g.users().iter().zip([0.05, 0.15, 0.15, 0.95]) {
            a.scores.insert(u.clone(), s);
        }
        let attrs = node_attributes(&g, BetweennessMode::Exact).unwrap();
        let c = node_composition(&g, &a, &attrs, 0.1).unwrap();
        let counts: Vec<usize> = c.profiles[0].deciles.iter().map(|d| d.count).collect();
        assert_eq!(counts, vec![1, 2, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(c.profiles[0].deciles[1].upper, 0.2);
        assert!(c.profiles[0].deciles[2].mean.is_none());
    }
}
