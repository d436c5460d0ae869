//! Brute-force oracles shared by the integration tests.
//!
//! Each oracle works from a dense adjacency matrix or plain enumeration and
//! shares no code with the library beyond the public tie-key functions.

#![allow(dead_code)]

use std::collections::HashSet;

use lpshift::augment::eps_tie_key;
use lpshift::negatives::{tie_key, Side};
use lpshift::{Edge, Graph, HeuristicKind, NodeId};
use rand::Rng;

pub struct Dense {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Dense {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.num_nodes();
        let mut adj = vec![vec![false; n]; n];
        for e in g.edges() {
            adj[e.u as usize][e.v as usize] = true;
            adj[e.v as usize][e.u as usize] = true;
        }
        Dense { n, adj }
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].iter().filter(|&&b| b).count()
    }

    pub fn cn(&self, u: usize, v: usize) -> f64 {
        (0..self.n).filter(|&w| self.adj[u][w] && self.adj[v][w]).count() as f64
    }

    pub fn pa(&self, u: usize, v: usize) -> f64 {
        (self.degree(u) * self.degree(v)) as f64
    }

    pub fn ra(&self, u: usize, v: usize) -> f64 {
        (0..self.n)
            .filter(|&w| self.adj[u][w] && self.adj[v][w])
            .map(|w| 1.0 / self.degree(w) as f64)
            .sum()
    }

    /// All-pairs hop distances; `None` when unreachable.
    pub fn floyd_warshall(&self) -> Vec<Vec<Option<u32>>> {
        let n = self.n;
        let mut d = vec![vec![None; n]; n];
        for i in 0..n {
            d[i][i] = Some(0);
            for j in 0..n {
                if self.adj[i][j] {
                    d[i][j] = Some(1);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = d[i][k] else { continue };
                for j in 0..n {
                    if let Some(dkj) = d[k][j] {
                        if d[i][j].map_or(true, |cur| dik + dkj < cur) {
                            d[i][j] = Some(dik + dkj);
                        }
                    }
                }
            }
        }
        d
    }

    /// `1/d(u, v)` with the edge `(u, v)` removed first, 0 when disconnected.
    pub fn sp(&self, u: usize, v: usize) -> f64 {
        let mut without = Dense {
            n: self.n,
            adj: self.adj.clone(),
        };
        without.adj[u][v] = false;
        without.adj[v][u] = false;
        match without.floyd_warshall()[u][v] {
            Some(d) => 1.0 / d as f64,
            None => 0.0,
        }
    }

    pub fn score(&self, u: usize, v: usize, kind: HeuristicKind) -> f64 {
        match kind {
            HeuristicKind::CommonNeighbors => self.cn(u, v),
            HeuristicKind::PreferentialAttachment => self.pa(u, v),
            HeuristicKind::ResourceAllocation => self.ra(u, v),
            HeuristicKind::ShortestPathScore => self.sp(u, v),
        }
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> Graph {
    let n = rng.gen_range(2..=max_nodes);
    let p: f64 = rng.gen_range(0.02..0.5);
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(p) {
                edges.push(Edge::new(u, v).unwrap());
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Earth mover's distance as a transportation problem, solved by successive
/// shortest augmenting paths (Bellman-Ford) on the bipartite residual graph.
///
/// Atoms carry integer mass; both sides must have the same total, and the
/// returned cost is divided by it.
pub fn transport_emd(a: &[(f64, u64)], b: &[(f64, u64)]) -> f64 {
    let total: u64 = a.iter().map(|x| x.1).sum();
    assert_eq!(total, b.iter().map(|x| x.1).sum::<u64>(), "unbalanced transport instance");
    let (na, nb) = (a.len(), b.len());
    let source = na + nb;
    let sink = source + 1;
    let nodes = sink + 1;
    // Arc i ^ 1 is the reverse of arc i.
    let mut to = Vec::new();
    let mut cap: Vec<u64> = Vec::new();
    let mut cost = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |from: usize, t: usize, c: u64, w: f64| {
        out[from].push(to.len());
        to.push(t);
        cap.push(c);
        cost.push(w);
        out[t].push(to.len());
        to.push(from);
        cap.push(0);
        cost.push(-w);
    };
    for (i, &(_, m)) in a.iter().enumerate() {
        add(source, i, m, 0.0);
    }
    for (j, &(_, m)) in b.iter().enumerate() {
        add(na + j, sink, m, 0.0);
    }
    for (i, &(x, _)) in a.iter().enumerate() {
        for (j, &(y, _)) in b.iter().enumerate() {
            add(i, na + j, total, (x - y).abs());
        }
    }
    let mut acc = 0.0;
    loop {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[source] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for &arc in &out[u] {
                    let cand = dist[u] + cost[arc];
                    if cap[arc] > 0 && cand < dist[to[arc]] - 1e-12 {
                        dist[to[arc]] = cand;
                        via[to[arc]] = arc;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            break;
        }
        let mut push = u64::MAX;
        let mut v = sink;
        while v != source {
            push = push.min(cap[via[v]]);
            v = to[via[v] ^ 1];
        }
        let mut v = sink;
        while v != source {
            cap[via[v]] -= push;
            cap[via[v] ^ 1] += push;
            v = to[via[v] ^ 1];
        }
        acc += push as f64 * dist[sink];
    }
    acc / total as f64
}

/// Average-tie rank of `pos` among `negs`, counted directly.
pub fn naive_rank(pos: f64, negs: &[f64]) -> f64 {
    let mut rank = 1.0;
    for &s in negs {
        if s > pos {
            rank += 1.0;
        } else if s == pos {
            rank += 0.5;
        }
    }
    rank
}

/// Negatives for one positive by exhaustive corruption enumeration.
pub fn negatives_oracle(
    full: &Graph,
    train: &Graph,
    positives: &HashSet<Edge>,
    positive: Edge,
    m: usize,
    kind: HeuristicKind,
    seed: u64,
) -> Vec<(NodeId, NodeId)> {
    let dense = Dense::from_graph(train);
    let full_dense = Dense::from_graph(full);
    let dist = dense.floyd_warshall();
    let side = |source: NodeId, other: NodeId, which: Side| -> Vec<NodeId> {
        let mut cands: Vec<(f64, u64, NodeId)> = Vec::new();
        for w in 0..train.num_nodes() as NodeId {
            if w == source || w == other || dense.degree(w as usize) == 0 {
                continue;
            }
            if full_dense.adj[source as usize][w as usize] || positives.contains(&Edge::new(source, w).unwrap()) {
                continue;
            }
            let score = match kind {
                HeuristicKind::ShortestPathScore => {
                    match dist[source as usize][w as usize] {
                        Some(d) => 1.0 / d as f64,
                        None => 0.0,
                    }
                }
                _ => dense.score(source as usize, w as usize, kind),
            };
            cands.push((score, tie_key(seed, positive, which, w), w));
        }
        cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        cands.into_iter().map(|c| c.2).collect()
    };
    let u_side = side(positive.u, positive.v, Side::U);
    let v_side = side(positive.v, positive.u, Side::V);
    let mut take_u = u_side.len().min(m.div_ceil(2));
    let mut take_v = v_side.len().min(m / 2);
    let mut spare = m - take_u - take_v;
    let extra_u = (u_side.len() - take_u).min(spare);
    take_u += extra_u;
    spare -= extra_u;
    take_v += (v_side.len() - take_v).min(spare);
    let mut out: Vec<(NodeId, NodeId)> = u_side[..take_u].iter().map(|&w| (positive.u, w)).collect();
    out.extend(v_side[..take_v].iter().map(|&w| (w, positive.v)));
    out
}

/// Top-k non-adjacent pairs with a common neighbor, by exhaustive scan.
pub fn eps_oracle(g: &Graph, kind: HeuristicKind, k: usize, seed: u64) -> (Vec<Edge>, usize) {
    let dense = Dense::from_graph(g);
    let mut pool: Vec<(f64, u64, Edge)> = Vec::new();
    for u in 0..dense.n {
        for w in u + 1..dense.n {
            if dense.adj[u][w] || dense.cn(u, w) == 0.0 {
                continue;
            }
            let e = Edge::new(u as NodeId, w as NodeId).unwrap();
            let score = match kind {
                HeuristicKind::ShortestPathScore => 0.5,
                _ => dense.score(u, w, kind),
            };
            pool.push((score, eps_tie_key(seed, e), e));
        }
    }
    pool.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let size = pool.len();
    (pool.into_iter().take(k).map(|c| c.2).collect(), size)
}

/// Every file under `root` as (relative path, bytes), sorted by path.
pub fn tree_bytes(root: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}
