use std::collections::VecDeque;

use crate::graph::{Graph, NodeId};

pub const UNREACHED: u32 = u32::MAX;

/// Level-synchronous bidirectional BFS with reusable scratch buffers.
///
/// Visited marks are epoch-stamped so a query costs nothing proportional to
/// the node count after the first allocation.
pub struct BidirectionalBfs {
    epoch: u32,
    seen: [Vec<u32>; 2],
    dist: [Vec<u32>; 2],
    frontier: [Vec<NodeId>; 2],
    next: Vec<NodeId>,
}

impl BidirectionalBfs {
    pub fn new(num_nodes: usize) -> Self {
        BidirectionalBfs {
            epoch: 0,
            seen: [vec![0; num_nodes], vec![0; num_nodes]],
            dist: [vec![0; num_nodes], vec![0; num_nodes]],
            frontier: [Vec::new(), Vec::new()],
            next: Vec::new(),
        }
    }

    fn bump_epoch(&mut self) {
        if self.epoch == u32::MAX {
            for s in &mut self.seen {
                s.fill(0);
            }
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Hop distance from `s` to `t`, never traversing the undirected edge
    /// `skip`. `None` when `t` is unreachable.
    pub fn distance(
        &mut self,
        g: &Graph,
        s: NodeId,
        t: NodeId,
        skip: Option<(NodeId, NodeId)>,
    ) -> Option<u32> {
        if s == t {
            return Some(0);
        }
        debug_assert!(self.seen[0].len() >= g.num_nodes());
        self.bump_epoch();
        let epoch = self.epoch;
        let blocked = |x: NodeId, y: NodeId| match skip {
            Some((a, b)) => (x == a && y == b) || (x == b && y == a),
            None => false,
        };

        for (side, root) in [(0usize, s), (1usize, t)] {
            self.seen[side][root as usize] = epoch;
            self.dist[side][root as usize] = 0;
            self.frontier[side].clear();
            self.frontier[side].push(root);
        }

        loop {
            if self.frontier[0].is_empty() || self.frontier[1].is_empty() {
                return None;
            }
            let work = |f: &[NodeId]| f.iter().map(|&x| g.degree(x)).sum::<usize>();
            let side = if work(&self.frontier[0]) <= work(&self.frontier[1]) { 0 } else { 1 };
            let other = 1 - side;

            let mut best = u32::MAX;
            self.next.clear();
            for &x in &self.frontier[side] {
                let dx = self.dist[side][x as usize];
                for &y in g.neighbors(x) {
                    if blocked(x, y) {
                        continue;
                    }
                    let yi = y as usize;
                    if self.seen[other][yi] == epoch {
                        best = best.min(dx + 1 + self.dist[other][yi]);
                    }
                    if self.seen[side][yi] != epoch {
                        self.seen[side][yi] = epoch;
                        self.dist[side][yi] = dx + 1;
                        self.next.push(y);
                    }
                }
            }
            // Every candidate found while expanding one full level has the
            // same, minimal length.
            if best != u32::MAX {
                return Some(best);
            }
            std::mem::swap(&mut self.frontier[side], &mut self.next);
        }
    }
}

/// Hop distances from `source` to every node; [`UNREACHED`] where none.
pub fn single_source_distances(g: &Graph, source: NodeId) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.num_nodes()];
    let mut queue = VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let d = dist[x as usize] + 1;
        for &y in g.neighbors(x) {
            if dist[y as usize] == UNREACHED {
                dist[y as usize] = d;
                queue.push_back(y);
            }
        }
    }
    dist
}
