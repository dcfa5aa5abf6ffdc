//! Per-node attributes: degrees, strengths, farness and betweenness.
//!
//! Distances are unweighted hop counts along edge direction. Betweenness
//! uses Brandes' accumulation over BFS shortest-path DAGs; in sampled mode
//! only `k` pivot sources are expanded and the sums are scaled by `n / k`.
//! Farness in sampled mode is estimated the same way, from reverse BFS trees
//! rooted at the pivots.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{NodeIx, SocialGraph};
use crate::error::{Error, Result};

/// Exact betweenness is used up to this many nodes by [`BetweennessMode::auto`].
pub const EXACT_BETWEENNESS_LIMIT: usize = 10_000;
/// Pivot count used by [`BetweennessMode::auto`] above the exact limit.
pub const DEFAULT_PIVOTS: usize = 256;

// Fixed, independent of the thread count, so that float reductions happen
// in the same order on every machine.
const CHUNKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BetweennessMode {
    /// Decided per graph by [`BetweennessMode::auto`].
    Auto { seed: u64 },
    Exact,
    Sampled { pivots: usize, seed: u64 },
}

impl BetweennessMode {
    /// Exact for graphs up to 10,000 nodes, 256 sampled pivots above.
    pub fn auto(order: usize, seed: u64) -> Self {
        if order <= EXACT_BETWEENNESS_LIMIT {
            BetweennessMode::Exact
        } else {
            BetweennessMode::Sampled {
                pivots: DEFAULT_PIVOTS.min(order),
                seed,
            }
        }
    }

    /// Replaces `Auto` with the concrete mode for a graph of `order` nodes.
    pub fn resolve(self, order: usize) -> Self {
        match self {
            BetweennessMode::Auto { seed } => Self::auto(order, seed),
            m => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NodeAttributes {
    pub deg_in: usize,
    pub deg_out: usize,
    pub str_in: u64,
    pub str_out: u64,
    /// Sum of hop distances to every node reachable from this one.
    pub farness: f64,
    /// Number of other nodes reachable from this one (estimated when sampled).
    pub reachable: f64,
    /// Wasserman-Faust closeness: `(r / farness) * (r / (n - 1))`.
    pub closeness: f64,
    pub betweenness: f64,
    /// Betweenness divided by `(n - 1)(n - 2)`.
    pub betweenness_norm: f64,
}

struct Workspace {
    dist: Vec<i32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<NodeIx>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            self.dist[v as usize] = -1;
            self.sigma[v as usize] = 0.0;
            self.delta[v as usize] = 0.0;
        }
        self.order.clear();
    }
}

struct Partial {
    betweenness: Vec<f64>,
    farness: Vec<u64>,
    reachable: Vec<u32>,
}

/// One Brandes pass from `s`: BFS along out-edges, then dependency
/// accumulation in reverse BFS order. Returns `(sum of distances, reached)`.
fn brandes_from(g: &SocialGraph, s: NodeIx, ws: &mut Workspace, bc: &mut [f64]) -> (u64, u32) {
    ws.reset();
    ws.dist[s as usize] = 0;
    ws.sigma[s as usize] = 1.0;
    ws.order.push(s);
    let mut head = 0;
    let mut far = 0u64;
    while head < ws.order.len() {
        let v = ws.order[head];
        head += 1;
        let dv = ws.dist[v as usize];
        far += dv as u64;
        for &w in g.out_targets(v) {
            if ws.dist[w as usize] < 0 {
                ws.dist[w as usize] = dv + 1;
                ws.order.push(w);
            }
            if ws.dist[w as usize] == dv + 1 {
                ws.sigma[w as usize] += ws.sigma[v as usize];
            }
        }
    }
    for i in (1..ws.order.len()).rev() {
        let w = ws.order[i];
        let dw = ws.dist[w as usize];
        let coeff = (1.0 + ws.delta[w as usize]) / ws.sigma[w as usize];
        for &v in g.in_sources(w) {
            if ws.dist[v as usize] == dw - 1 {
                ws.delta[v as usize] += ws.sigma[v as usize] * coeff;
            }
        }
        bc[w as usize] += ws.delta[w as usize];
    }
    (far, ws.order.len() as u32 - 1)
}

/// Reverse BFS from `p`: adds `d(u, p)` to `farness[u]` for every `u` that
/// reaches `p`.
fn reverse_distances(g: &SocialGraph, p: NodeIx, ws: &mut Workspace, farness: &mut [u64], reachable: &mut [u32]) {
    ws.reset();
    ws.dist[p as usize] = 0;
    ws.order.push(p);
    let mut head = 0;
    while head < ws.order.len() {
        let v = ws.order[head];
        head += 1;
        let dv = ws.dist[v as usize];
        if v != p {
            farness[v as usize] += dv as u64;
            reachable[v as usize] += 1;
        }
        for &u in g.in_sources(v) {
            if ws.dist[u as usize] < 0 {
                ws.dist[u as usize] = dv + 1;
                ws.order.push(u);
            }
        }
    }
}

fn pick_pivots(n: usize, k: usize, seed: u64) -> Vec<NodeIx> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pivots: Vec<NodeIx> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| i as NodeIx)
        .collect();
    pivots.sort_unstable();
    pivots
}

/// Computes every node attribute, in node index order.
pub fn node_attributes(g: &SocialGraph, mode: BetweennessMode) -> Result<Vec<NodeAttributes>> {
    let n = g.order();
    let (sources, sampled, scale) = match mode.resolve(n) {
        BetweennessMode::Auto { .. } => unreachable!(),
        BetweennessMode::Exact => ((0..n as NodeIx).collect::<Vec<_>>(), false, 1.0),
        BetweennessMode::Sampled { pivots, seed } => {
            if pivots == 0 || pivots > n {
                return Err(Error::InvalidPivotCount { k: pivots, nodes: n });
            }
            (pick_pivots(n, pivots, seed), true, n as f64 / pivots as f64)
        }
    };

    let chunk_len = sources.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Partial> = sources
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut ws = Workspace::new(n);
            let mut p = Partial {
                betweenness: vec![0.0; n],
                farness: vec![0; n],
                reachable: vec![0; n],
            };
            for &s in chunk {
                let (far, reached) = brandes_from(g, s, &mut ws, &mut p.betweenness);
                if sampled {
                    reverse_distances(g, s, &mut ws, &mut p.farness, &mut p.reachable);
                } else {
                    p.farness[s as usize] = far;
                    p.reachable[s as usize] = reached;
                }
            }
            p
        })
        .collect();

    let mut bc = vec![0.0f64; n];
    let mut far = vec![0u64; n];
    let mut reach = vec![0u64; n];
    for p in &partials {
        for i in 0..n {
            bc[i] += p.betweenness[i];
            far[i] += p.farness[i];
            reach[i] += p.reachable[i] as u64;
        }
    }
    drop(partials);

    let norm = if n > 2 {
        1.0 / ((n as f64 - 1.0) * (n as f64 - 2.0))
    } else {
        0.0
    };
    let attrs = (0..n as NodeIx)
        .map(|u| {
            let i = u as usize;
            let farness = far[i] as f64 * scale;
            let reachable = reach[i] as f64 * scale;
            let closeness = if farness > 0.0 && n > 1 {
                (reachable / farness) * (reachable / (n as f64 - 1.0))
            } else {
                0.0
            };
            let betweenness = bc[i] * scale;
            NodeAttributes {
                deg_in: g.in_degree(u),
                deg_out: g.out_degree(u),
                str_in: g.in_strength(u),
                str_out: g.out_strength(u),
                farness,
                reachable,
                closeness,
                betweenness,
                betweenness_norm: betweenness * norm,
            }
        })
        .collect();
    Ok(attrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use std::collections::VecDeque;

    fn attr<'a>(g: &SocialGraph, a: &'a [NodeAttributes], u: &str) -> &'a NodeAttributes {
        &a[g.node(u).unwrap() as usize]
    }

    #[test]
    fn directed_path() {
        let g = SocialGraph::from_weighted_edges([("A", "B", 1), ("B", "C", 1)]);
        let a = node_attributes(&g, BetweennessMode::Exact).unwrap();
        assert_eq!(attr(&g, &a, "A").deg_out, 1);
        assert_eq!(attr(&g, &a, "C").deg_in, 1);
        assert_eq!(attr(&g, &a, "A").farness, 3.0);
        assert_eq!(attr(&g, &a, "A").reachable, 2.0);
        assert_eq!(attr(&g, &a, "B").betweenness, 1.0);
        assert_eq!(attr(&g, &a, "A").betweenness, 0.0);
        assert_eq!(attr(&g, &a, "C").betweenness, 0.0);
        assert_eq!(attr(&g, &a, "B").betweenness_norm, 0.5);
        // A reaches both others: (2/3) * (2/2)
        assert!((attr(&g, &a, "A").closeness - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(attr(&g, &a, "C").closeness, 0.0);
    }

    #[test]
    fn strengths() {
        let g = SocialGraph::from_weighted_edges([("A", "B", 2), ("A", "C", 1)]);
        let a = node_attributes(&g, BetweennessMode::Exact).unwrap();
        assert_eq!(attr(&g, &a, "A").str_out, 3);
        assert_eq!(attr(&g, &a, "A").deg_out, 2);
        assert_eq!(attr(&g, &a, "B").str_in, 2);
    }

    #[test]
    fn pivot_count_validation() {
        let g = SocialGraph::from_weighted_edges([("A", "B", 1)]);
        for k in [0, 3] {
            assert!(matches!(
                node_attributes(&g, BetweennessMode::Sampled { pivots: k, seed: 0 }),
                Err(Error::InvalidPivotCount { .. })
            ));
        }
    }

    #[test]
    fn auto_mode_threshold() {
        assert_eq!(BetweennessMode::auto(10_000, 1), BetweennessMode::Exact);
        assert_eq!(
            BetweennessMode::auto(10_001, 1),
            BetweennessMode::Sampled { pivots: 256, seed: 1 }
        );
    }

    fn random_graph(n: usize, m: usize, seed: u64) -> SocialGraph {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_user(&format!("v{i:03}"));
        }
        for _ in 0..m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            b.add_edge(&format!("v{u:03}"), &format!("v{v:03}"), 1);
        }
        b.build()
    }

    fn bfs(g: &SocialGraph, s: NodeIx) -> (Vec<i64>, Vec<f64>) {
        let n = g.order();
        let mut d = vec![-1i64; n];
        let mut sigma = vec![0.0; n];
        d[s as usize] = 0;
        sigma[s as usize] = 1.0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for (w, _) in g.out_edges(v) {
                if d[w as usize] < 0 {
                    d[w as usize] = d[v as usize] + 1;
                    q.push_back(w);
                }
                if d[w as usize] == d[v as usize] + 1 {
                    sigma[w as usize] += sigma[v as usize];
                }
            }
        }
        (d, sigma)
    }

    #[test]
    fn full_pivot_set_equals_exact() {
        for seed in 0..5 {
            let g = random_graph(30, 80, seed);
            let exact = node_attributes(&g, BetweennessMode::Exact).unwrap();
            let sampled = node_attributes(&g, BetweennessMode::Sampled { pivots: 30, seed: 9 }).unwrap();
            assert_eq!(exact, sampled);
        }
    }

    #[test]
    fn farness_matches_bfs() {
        let g = random_graph(25, 60, 3);
        let a = node_attributes(&g, BetweennessMode::Exact).unwrap();
        for s in 0..g.order() as NodeIx {
            let (d, _) = bfs(&g, s);
            let far: i64 = d.iter().filter(|&&x| x > 0).sum();
            let reach = d.iter().filter(|&&x| x > 0).count();
            assert_eq!(a[s as usize].farness, far as f64);
            assert_eq!(a[s as usize].reachable, reach as f64);
        }
    }

    #[test]
    fn sampled_estimates_are_close_on_dense_graphs() {
        let g = random_graph(200, 3000, 5);
        let exact = node_attributes(&g, BetweennessMode::Exact).unwrap();
        let est = node_attributes(&g, BetweennessMode::Sampled { pivots: 100, seed: 2 }).unwrap();
        let total = |a: &[NodeAttributes]| a.iter().map(|x| x.betweenness).sum::<f64>();
        let rel = (total(&est) - total(&exact)).abs() / total(&exact);
        assert!(rel < 0.1, "relative error {rel}");
        let mean_far = |a: &[NodeAttributes]| a.iter().map(|x| x.farness).sum::<f64>();
        assert!((mean_far(&est) - mean_far(&exact)).abs() / mean_far(&exact) < 0.1);
    }

    #[test]
    fn deterministic_across_runs() {
        let g = random_graph(120, 400, 8);
        let mode = BetweennessMode::Sampled { pivots: 40, seed: 4 };
        let a = node_attributes(&g, mode).unwrap();
        let b = node_attributes(&g, mode).unwrap();
        assert_eq!(a, b);
    }
}
