use std::collections::{BTreeMap, BTreeSet};

use super::piece::Span;
use super::{MetricGraph, VertexId};

/// Simple union-find over dense indices.
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

impl MetricGraph {
    /// The combinatorial graph carried by the live material: live vertices and
    /// the edges that are entirely live. Cycles of the live material are
    /// exactly the cycles of this graph.
    fn core(&self) -> (Vec<VertexId>, Vec<(usize, usize)>) {
        let verts: Vec<VertexId> = self.live.vertices().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut edges = Vec::new();
        for e in self.edges() {
            let full = self.live.spans_on(e.id) == [Span::new(0.0, e.length, false, false)];
            if let (true, Some(&a), Some(&b)) = (full, index.get(&e.u), index.get(&e.v)) {
                edges.push((a, b));
            }
        }
        (verts, edges)
    }

    /// `|E| - |V| + c` of the core graph.
    pub fn circuit_rank(&self) -> usize {
        let (verts, edges) = self.core();
        let mut dsu = Dsu::new(verts.len());
        let mut cycles = 0;
        for &(a, b) in &edges {
            if !dsu.union(a, b) {
                cycles += 1;
            }
        }
        cycles
    }

    /// A minimum feedback vertex set, the lexicographically smallest among
    /// those of minimum size. Exhaustive; meant for small graphs.
    pub fn fvs(&self) -> BTreeSet<VertexId> {
        let (verts, edges) = self.core();
        let n = verts.len();
        let acyclic_without = |removed: &[bool]| {
            let mut dsu = Dsu::new(n);
            edges
                .iter()
                .filter(|(a, b)| !removed[*a] && !removed[*b])
                .all(|&(a, b)| dsu.union(a, b))
        };
        if acyclic_without(&vec![false; n]) {
            return BTreeSet::new();
        }
        // vertices outside the 2-core lie on no cycle
        let mut degree = vec![0usize; n];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut alive = vec![true; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
        while let Some(x) = stack.pop() {
            if !alive[x] {
                continue;
            }
            alive[x] = false;
            for &(a, b) in &edges {
                let other = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if alive[other] {
                    degree[other] -= 1;
                    if degree[other] <= 1 {
                        stack.push(other);
                    }
                }
            }
        }
        let candidates: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        for size in 1..=candidates.len() {
            let mut pick: Vec<usize> = (0..size).collect();
            loop {
                let mut removed = vec![false; n];
                for &i in &pick {
                    removed[candidates[i]] = true;
                }
                if acyclic_without(&removed) {
                    return pick.iter().map(|&i| verts[candidates[i]]).collect();
                }
                if !next_combination(&mut pick, candidates.len()) {
                    break;
                }
            }
        }
        candidates.iter().map(|&i| verts[i]).collect()
    }
}

/// Advances `pick` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
