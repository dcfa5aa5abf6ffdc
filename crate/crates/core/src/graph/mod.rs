//! The weighted directed social graph.
//!
//! An edge `(u, v, w)` records that `u` retweeted `v` exactly `w` times.
//! Under this orientation `deg_out(u)` counts the distinct users `u`
//! retweeted and `deg_in(u)` counts the distinct users who retweeted `u`.
//!
//! Nodes are stored in lexicographic order of their ids and addressed by
//! dense `u32` indices; both adjacency directions are kept in CSR form.

mod attributes;

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interactions::{InteractionDataset, UserId};

pub use attributes::{node_attributes, BetweennessMode, NodeAttributes, DEFAULT_PIVOTS, EXACT_BETWEENNESS_LIMIT};

/// Dense node index into a [`SocialGraph`].
pub type NodeIx = u32;

#[derive(Debug, Clone)]
pub struct SocialGraph {
    users: Vec<UserId>,
    index: HashMap<UserId, NodeIx>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeIx>,
    out_weights: Vec<u64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeIx>,
    in_weights: Vec<u64>,
    self_loop_drops: u64,
}

/// Two graphs are equal when they have the same users and the same weighted
/// edges. The self-loop drop counter is construction metadata and is ignored.
impl PartialEq for SocialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.users == other.users
            && self.out_offsets == other.out_offsets
            && self.out_targets == other.out_targets
            && self.out_weights == other.out_weights
    }
}

impl Eq for SocialGraph {}

/// Incremental graph construction; parallel edges are merged by summing
/// their weights and self-loops are dropped.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: HashMap<UserId, NodeIx>,
    names: Vec<UserId>,
    edges: Vec<(NodeIx, NodeIx, u64)>,
    self_loop_drops: u64,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_user(&mut self, user: &str) -> NodeIx {
        if let Some(&ix) = self.ids.get(user) {
            return ix;
        }
        let ix = self.names.len() as NodeIx;
        let id = UserId::from(user);
        self.ids.insert(id.clone(), ix);
        self.names.push(id);
        ix
    }

    pub fn add_edge(&mut self, from: &str, to: &str, weight: u64) {
        let u = self.add_user(from);
        let v = self.add_user(to);
        if u == v {
            self.self_loop_drops += weight;
        } else if weight > 0 {
            self.edges.push((u, v, weight));
        }
    }

    pub fn build(self) -> SocialGraph {
        let GraphBuilder {
            names,
            mut edges,
            self_loop_drops,
            ..
        } = self;
        let mut order: Vec<NodeIx> = (0..names.len() as NodeIx).collect();
        order.sort_unstable_by(|&a, &b| names[a as usize].cmp(&names[b as usize]));
        let mut remap = vec![0 as NodeIx; names.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as NodeIx;
        }
        let mut names: Vec<Option<UserId>> = names.into_iter().map(Some).collect();
        let users: Vec<UserId> = order
            .iter()
            .map(|&old| names[old as usize].take().expect("each user taken once"))
            .collect();
        for e in edges.iter_mut() {
            e.0 = remap[e.0 as usize];
            e.1 = remap[e.1 as usize];
        }
        SocialGraph::from_sorted_parts(users, edges, self_loop_drops)
    }
}

impl SocialGraph {
    /// Assembles CSR arrays. `users` must be sorted and unique; edges may
    /// arrive in any order and with duplicates.
    fn from_sorted_parts(
        users: Vec<UserId>,
        mut edges: Vec<(NodeIx, NodeIx, u64)>,
        self_loop_drops: u64,
    ) -> Self {
        let n = users.len();
        edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
        let mut merged: Vec<(NodeIx, NodeIx, u64)> = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v, _) in &merged {
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = merged.iter().map(|e| e.1).collect();
        let out_weights = merged.iter().map(|e| e.2).collect();

        let m = merged.len();
        let mut in_sources = vec![0 as NodeIx; m];
        let mut in_weights = vec![0u64; m];
        let mut cursor = in_offsets.clone();
        // merged is sorted by source, so each in-list ends up sorted too
        for &(u, v, w) in &merged {
            let slot = &mut cursor[v as usize];
            in_sources[*slot] = u;
            in_weights[*slot] = w;
            *slot += 1;
        }

        let index = users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), i as NodeIx))
            .collect();
        SocialGraph {
            users,
            index,
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
            self_loop_drops,
        }
    }

    /// Convenience constructor from `(retweeter, retweeted, weight)` triples.
    pub fn from_weighted_edges<'a, I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut b = GraphBuilder::new();
        for (u, v, w) in edges {
            b.add_edge(u, v, w);
        }
        b.build()
    }

    pub fn order(&self) -> usize {
        self.users.len()
    }

    pub fn size(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.out_weights.iter().sum()
    }

    pub fn self_loop_drops(&self) -> u64 {
        self.self_loop_drops
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn user(&self, ix: NodeIx) -> &UserId {
        &self.users[ix as usize]
    }

    pub fn node(&self, user: &str) -> Option<NodeIx> {
        self.index.get(user).copied()
    }

    /// Users retweeted by `ix`, with weights.
    pub fn out_edges(&self, ix: NodeIx) -> impl Iterator<Item = (NodeIx, u64)> + '_ {
        let r = self.out_offsets[ix as usize]..self.out_offsets[ix as usize + 1];
        self.out_targets[r.clone()]
            .iter()
            .copied()
            .zip(self.out_weights[r].iter().copied())
    }

    /// Users who retweeted `ix`, with weights.
    pub fn in_edges(&self, ix: NodeIx) -> impl Iterator<Item = (NodeIx, u64)> + '_ {
        let r = self.in_offsets[ix as usize]..self.in_offsets[ix as usize + 1];
        self.in_sources[r.clone()]
            .iter()
            .copied()
            .zip(self.in_weights[r].iter().copied())
    }

    pub(crate) fn out_targets(&self, ix: NodeIx) -> &[NodeIx] {
        &self.out_targets[self.out_offsets[ix as usize]..self.out_offsets[ix as usize + 1]]
    }

    pub(crate) fn in_sources(&self, ix: NodeIx) -> &[NodeIx] {
        &self.in_sources[self.in_offsets[ix as usize]..self.in_offsets[ix as usize + 1]]
    }

    pub fn out_degree(&self, ix: NodeIx) -> usize {
        self.out_offsets[ix as usize + 1] - self.out_offsets[ix as usize]
    }

    pub fn in_degree(&self, ix: NodeIx) -> usize {
        self.in_offsets[ix as usize + 1] - self.in_offsets[ix as usize]
    }

    pub fn out_strength(&self, ix: NodeIx) -> u64 {
        self.out_weights[self.out_offsets[ix as usize]..self.out_offsets[ix as usize + 1]]
            .iter()
            .sum()
    }

    pub fn in_strength(&self, ix: NodeIx) -> u64 {
        self.in_weights[self.in_offsets[ix as usize]..self.in_offsets[ix as usize + 1]]
            .iter()
            .sum()
    }

    /// All edges as `(retweeter, retweeted, weight)`, sorted by source then
    /// target.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIx, NodeIx, u64)> + '_ {
        (0..self.order() as NodeIx).flat_map(move |u| self.out_edges(u).map(move |(v, w)| (u, v, w)))
    }

    pub fn weight(&self, from: &str, to: &str) -> Option<u64> {
        let (u, v) = (self.node(from)?, self.node(to)?);
        let targets = self.out_targets(u);
        let pos = targets.binary_search(&v).ok()?;
        Some(self.out_weights[self.out_offsets[u as usize] + pos])
    }

    /// Subgraph induced on `keep`; weights are unchanged.
    pub fn induced_subgraph<'a, I>(&self, keep: I) -> Result<SocialGraph>
    where
        I: IntoIterator<Item = &'a UserId>,
    {
        let mut mask = vec![false; self.order()];
        for user in keep {
            let ix = self
                .node(user.as_str())
                .ok_or_else(|| Error::UnknownUser(user.to_string()))?;
            mask[ix as usize] = true;
        }
        Ok(self.induced_by_mask(&mask))
    }

    /// Subgraph induced on the nodes whose mask entry is set.
    pub fn induced_by_mask(&self, mask: &[bool]) -> SocialGraph {
        assert_eq!(mask.len(), self.order(), "mask length must equal graph order");
        let mut remap = vec![NodeIx::MAX; self.order()];
        let mut users = Vec::new();
        for (i, &keep) in mask.iter().enumerate() {
            if keep {
                remap[i] = users.len() as NodeIx;
                users.push(self.users[i].clone());
            }
        }
        let edges = self
            .edges()
            .filter(|&(u, v, _)| mask[u as usize] && mask[v as usize])
            .map(|(u, v, w)| (remap[u as usize], remap[v as usize], w))
            .collect();
        SocialGraph::from_sorted_parts(users, edges, 0)
    }

    /// Weakly connected component label per node, labels numbered by first
    /// appearance, plus the size of each component.
    pub fn weak_components(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.order();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        for (u, v, _) in self.edges() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
        let mut label = vec![u32::MAX; n];
        let mut root_label: HashMap<u32, u32> = HashMap::new();
        let mut sizes = Vec::new();
        for i in 0..n as u32 {
            let r = find(&mut parent, i);
            let l = *root_label.entry(r).or_insert_with(|| {
                sizes.push(0);
                (sizes.len() - 1) as u32
            });
            label[i as usize] = l;
            sizes[l as usize] += 1;
        }
        (label, sizes)
    }

    pub fn giant_component_size(&self) -> usize {
        self.weak_components().1.into_iter().max().unwrap_or(0)
    }

    pub fn properties(&self) -> GraphProperties {
        graph_properties(self)
    }

    /// Undirected simple view: for each node the distinct neighbours in
    /// either direction, with the weights of both directions summed.
    pub fn symmetrized(&self) -> SymmetricAdjacency {
        let n = self.order();
        let mut offsets = vec![0usize; n + 1];
        let mut neighbors = Vec::with_capacity(2 * self.size());
        let mut weights = Vec::with_capacity(2 * self.size());
        for u in 0..n as NodeIx {
            // both lists are sorted; merge them
            let mut outs = self.out_edges(u).peekable();
            let mut ins = self.in_edges(u).peekable();
            loop {
                let next = match (outs.peek(), ins.peek()) {
                    (Some(&(a, wa)), Some(&(b, wb))) => {
                        if a == b {
                            outs.next();
                            ins.next();
                            (a, wa + wb)
                        } else if a < b {
                            outs.next();
                            (a, wa)
                        } else {
                            ins.next();
                            (b, wb)
                        }
                    }
                    (Some(&e), None) => {
                        outs.next();
                        e
                    }
                    (None, Some(&e)) => {
                        ins.next();
                        e
                    }
                    (None, None) => break,
                };
                neighbors.push(next.0);
                weights.push(next.1);
            }
            offsets[u as usize + 1] = neighbors.len();
        }
        SymmetricAdjacency {
            offsets,
            neighbors,
            weights,
        }
    }

    /// Writes `u v w` lines for external visualization tools.
    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for (u, v, w) in self.edges() {
            writeln!(out, "{} {} {}", self.user(u), self.user(v), w).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Undirected simple adjacency in CSR form.
#[derive(Debug, Clone)]
pub struct SymmetricAdjacency {
    offsets: Vec<usize>,
    neighbors: Vec<NodeIx>,
    weights: Vec<u64>,
}

impl SymmetricAdjacency {
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, u: NodeIx) -> &[NodeIx] {
        &self.neighbors[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn weights(&self, u: NodeIx) -> &[u64] {
        &self.weights[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn degree(&self, u: NodeIx) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }
}

/// Builds the social graph: one edge per ordered pair of distinct users,
/// weighted by the number of interactions between them.
pub fn build_graph(ds: &InteractionDataset) -> Result<SocialGraph> {
    if ds.interactions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut b = GraphBuilder::new();
    for t in &ds.interactions {
        b.add_edge(t.retweeter.as_str(), t.retweeted.as_str(), 1);
    }
    Ok(b.build())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphProperties {
    pub order: usize,
    pub size: usize,
    pub density: f64,
    pub total_weight: u64,
    pub giant_component_size: usize,
}

/// `density = size / (order * (order - 1))`, zero below two nodes.
pub fn density(order: usize, size: usize) -> f64 {
    if order < 2 {
        0.0
    } else {
        size as f64 / (order as f64 * (order as f64 - 1.0))
    }
}

pub fn graph_properties(g: &SocialGraph) -> GraphProperties {
    GraphProperties {
        order: g.order(),
        size: g.size(),
        density: density(g.order(), g.size()),
        total_weight: g.total_weight(),
        giant_component_size: g.giant_component_size(),
    }
}

/// Convenience for building a keep-set from string ids.
pub fn user_set<'a, I: IntoIterator<Item = &'a str>>(ids: I) -> BTreeSet<UserId> {
    ids.into_iter().map(UserId::from).collect()
}
