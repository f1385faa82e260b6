use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Weighted undirected adjacency lists.
pub type Adjacency = Vec<Vec<(u32, f64)>>;

pub const NO_NODE: u32 = u32::MAX;

/// Single-source shortest-path tree. On an undirected graph `next[v]` is the
/// first hop from `v` back toward the source.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub source: usize,
    pub dist: Vec<f64>,
    pub next: Vec<u32>,
}

impl DistanceField {
    pub fn reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// Node sequence from `v` to the source, inclusive.
    pub fn path_from(&self, v: usize) -> Option<Vec<usize>> {
        if !self.reachable(v) {
            return None;
        }
        let mut out = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.next[cur] as usize;
            out.push(cur);
        }
        Some(out)
    }
}

#[derive(PartialEq)]
struct Entry(f64, u32);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn dijkstra(adj: &Adjacency, source: usize) -> DistanceField {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut next = vec![NO_NODE; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source as u32));
    while let Some(Entry(d, u)) = heap.pop() {
        let u = u as usize;
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            let vi = v as usize;
            if nd < dist[vi] {
                dist[vi] = nd;
                next[vi] = u as u32;
                heap.push(Entry(nd, v));
            }
        }
    }
    DistanceField { source, dist, next }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> Adjacency {
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            adj[a].push((b as u32, w));
            adj[b].push((a as u32, w));
        }
        adj
    }

    #[test]
    fn triangle_routes_through_middle() {
        let adj = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]);
        let f = dijkstra(&adj, 2);
        assert_eq!(f.dist[0], 2.0);
        assert_eq!(f.path_from(0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn disconnected_is_unreachable() {
        let adj = graph(3, &[]);
        let f = dijkstra(&adj, 0);
        assert!(!f.reachable(1));
        assert!(f.path_from(2).is_none());
    }
}
