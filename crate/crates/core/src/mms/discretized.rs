use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::{Method, MmsResult};
use crate::allocator::AgentPartition;
use crate::error::{Error, Result};
use crate::metric_graph::{EdgeId, IntervalOnEdge, MetricGraph, Piece, PointRef};
use crate::valuation::Valuation;
use crate::TOLERANCE;

/// Search steps allowed before giving up with [`Error::BudgetExceeded`].
pub const DEFAULT_BUDGET: u64 = 50_000_000;

const MAX_ATOMS: usize = 20_000;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn and_not(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut x = word;
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let i = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + i)
            })
        })
    }
}

/// A closed cell `[a, b]` of an edge between consecutive candidate points.
struct Atom {
    edge: EdgeId,
    a: f64,
    b: f64,
    value: f64,
    /// Node ids of the two ends.
    ends: [usize; 2],
    /// Indices of the graph vertices among the ends.
    hubs: Vec<usize>,
}

/// The cake cut into atoms, with adjacency and separation conflicts.
struct Atoms {
    atoms: Vec<Atom>,
    /// Nodes: graph vertices first (in `g.vertices()` order), then cut points.
    nodes: Vec<PointRef>,
    vertex_count: usize,
    /// Neighbouring atoms, each with the vertex they meet at (if any).
    adj: Vec<Vec<(usize, Option<usize>)>>,
    /// Atoms that no other piece may use once this atom is taken.
    conflict: Vec<Bits>,
}

impl Atoms {
    fn build(v: &Valuation, g: &MetricGraph, delta: f64, s: f64, merge_worthless: bool) -> Result<Atoms> {
        let vertex_count = g.vertices().len();
        let vertex_index = |id| g.vertices().iter().position(|&x| x == id).expect("edge ends are vertices");
        let mut nodes: Vec<PointRef> = g.vertices().iter().map(|&x| PointRef::Vertex(x)).collect();
        let mut atoms = Vec::new();
        for e in g.edges() {
            let len = e.length;
            let m = (len / delta).ceil().max(1.0) as usize;
            let mut pts: Vec<f64> = (0..=m).map(|i| len * i as f64 / m as f64).collect();
            pts.extend(v.breakpoints(e.id));
            pts.sort_by(f64::total_cmp);
            let mut cuts: Vec<f64> = Vec::with_capacity(pts.len());
            for x in pts {
                if x <= 0.0 || x >= len {
                    continue;
                }
                if cuts.last().is_none_or(|&c| x - c > TOLERANCE) && len - x > TOLERANCE && x > TOLERANCE {
                    cuts.push(x);
                }
            }
            let mut cells: Vec<(f64, f64, f64)> = Vec::new();
            let mut prev = 0.0;
            for &x in cuts.iter().chain(std::iter::once(&len)) {
                let value = v.integral(e.id, prev, x);
                match cells.last_mut() {
                    Some(last) if merge_worthless && value <= 0.0 && last.2 <= 0.0 => last.1 = x,
                    _ => cells.push((prev, x, value)),
                }
                prev = x;
            }
            let (u, w) = (vertex_index(e.u), vertex_index(e.v));
            let mut left = u;
            for (i, &(a, b, value)) in cells.iter().enumerate() {
                let right = if i + 1 == cells.len() {
                    w
                } else {
                    nodes.push(PointRef::interior(e.id, b));
                    nodes.len() - 1
                };
                let mut hubs = Vec::new();
                if left < vertex_count {
                    hubs.push(left);
                }
                if right < vertex_count {
                    hubs.push(right);
                }
                atoms.push(Atom {
                    edge: e.id,
                    a,
                    b,
                    value,
                    ends: [left, right],
                    hubs,
                });
                left = right;
            }
            if atoms.len() > MAX_ATOMS {
                return Err(Error::InvalidParameters(format!(
                    "resolution {delta} yields more than {MAX_ATOMS} cells"
                )));
            }
        }
        let n = atoms.len();
        let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (i, a) in atoms.iter().enumerate() {
            at_node[a.ends[0]].push(i);
            at_node[a.ends[1]].push(i);
        }
        let mut adj: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); n];
        for (node, list) in at_node.iter().enumerate() {
            let hub = (node < vertex_count).then_some(node);
            for &x in list {
                for &y in list {
                    if x != y {
                        adj[x].push((y, hub));
                    }
                }
            }
        }
        let conflict = if s > 0.0 {
            let mut graph: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
            for a in &atoms {
                graph[a.ends[0]].push((a.ends[1], a.b - a.a));
                graph[a.ends[1]].push((a.ends[0], a.b - a.a));
            }
            let mut rows = Vec::with_capacity(n);
            for a in &atoms {
                let d0 = dijkstra(&graph, a.ends[0]);
                let d1 = dijkstra(&graph, a.ends[1]);
                let mut row = Bits::new(n);
                for (j, b) in atoms.iter().enumerate() {
                    let d = b.ends.iter().map(|&x| d0[x].min(d1[x])).fold(f64::INFINITY, f64::min);
                    if d < s - TOLERANCE {
                        row.set(j);
                    }
                }
                rows.push(row);
            }
            rows
        } else {
            (0..n)
                .map(|i| {
                    let mut row = Bits::new(n);
                    row.set(i);
                    row
                })
                .collect()
        };
        Ok(Atoms {
            atoms,
            nodes,
            vertex_count,
            adj,
            conflict,
        })
    }
}

fn dijkstra(graph: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Ordered(0.0), src)));
    while let Some(Reverse((Ordered(d), x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, w) in &graph[x] {
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((Ordered(nd), y)));
            }
        }
    }
    dist
}

#[derive(Clone, Copy, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Exhaustive search for `k` separated connected atom sets each worth `t`.
///
/// Pieces are chosen in increasing order of their smallest atom. Candidate
/// pieces are connected sets grown from that atom through larger atoms,
/// stopping as soon as they are worth `t`. At separation zero, pieces may
/// touch at cut points; at most one piece may run through any vertex.
struct Search<'a> {
    grid: &'a Atoms,
    s: f64,
    k: usize,
    t: f64,
    steps: u64,
    budget: u64,
    failed: HashSet<(usize, Bits, Bits)>,
    /// Atoms of the piece being grown at each vertex.
    at_hub: Vec<u32>,
    passed: Bits,
}

impl<'a> Search<'a> {
    fn new(grid: &'a Atoms, s: f64, k: usize, t: f64, budget: u64) -> Search<'a> {
        Search {
            grid,
            s,
            k,
            t,
            steps: 0,
            budget,
            failed: HashSet::new(),
            at_hub: vec![0; grid.vertex_count],
            passed: Bits::new(grid.vertex_count),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn enough(&self, value: f64) -> bool {
        value >= self.t * (1.0 - 1e-12)
    }

    fn run(&mut self) -> Result<Option<Vec<Vec<usize>>>> {
        let n = self.grid.atoms.len();
        let mut pieces = Vec::with_capacity(self.k);
        let found = self.place(self.k, 0, Bits::full(n), Bits::new(self.grid.vertex_count), &mut pieces)?;
        Ok(found.then_some(pieces))
    }

    /// Connected components of `mask` usable by one piece, with their values.
    fn components(&self, mask: &Bits, passed: &Bits) -> (Vec<usize>, Vec<f64>) {
        let n = self.grid.atoms.len();
        let mut comp = vec![usize::MAX; n];
        let mut values = Vec::new();
        for start in mask.ones() {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = values.len();
            let mut total = 0.0;
            let mut stack = vec![start];
            comp[start] = c;
            while let Some(x) = stack.pop() {
                total += self.grid.atoms[x].value;
                for &(y, hub) in &self.grid.adj[x] {
                    if comp[y] != usize::MAX || !mask.get(y) || hub.is_some_and(|h| passed.get(h)) {
                        continue;
                    }
                    comp[y] = c;
                    stack.push(y);
                }
            }
            values.push(total);
        }
        (comp, values)
    }

    fn place(
        &mut self,
        remaining: usize,
        from: usize,
        avail: Bits,
        passed: Bits,
        pieces: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        self.tick()?;
        let mut mask = avail.clone();
        for i in 0..from.min(self.grid.atoms.len()) {
            mask.clear(i);
        }
        let key = (remaining, mask.clone(), passed.clone());
        if self.failed.contains(&key) {
            return Ok(false);
        }
        let (comp, values) = self.components(&mask, &passed);
        if self.t > 0.0 {
            let fits: f64 = values.iter().map(|&v| (v / self.t * (1.0 + 1e-12)).floor()).sum();
            if fits < remaining as f64 {
                self.failed.insert(key);
                return Ok(false);
            }
        }
        let seeds: Vec<usize> = mask.ones().collect();
        for seed in seeds {
            if !self.enough(values[comp[seed]]) {
                continue;
            }
            self.passed = passed.clone();
            let candidates = self.grow(seed, &mask)?;
            for set in candidates {
                let mut next = avail.clone();
                let mut passed_next = passed.clone();
                let mut count = vec![0u32; self.grid.vertex_count];
                for &x in &set {
                    next.and_not(&self.grid.conflict[x]);
                    for &h in &self.grid.atoms[x].hubs {
                        count[h] += 1;
                    }
                }
                if self.s == 0.0 {
                    for (h, &c) in count.iter().enumerate() {
                        if c >= 2 {
                            passed_next.set(h);
                        }
                    }
                }
                pieces.push(set);
                if self.place(remaining - 1, seed + 1, next, passed_next, pieces)? {
                    return Ok(true);
                }
                pieces.pop();
            }
        }
        self.failed.insert(key);
        Ok(false)
    }

    /// Connected sets containing `seed`, otherwise made of larger atoms of
    /// `mask`, that first reach the target along their growth.
    fn grow(&mut self, seed: usize, mask: &Bits) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut set = vec![seed];
        let value = self.grid.atoms[seed].value;
        if self.enough(value) {
            out.push(set);
            return Ok(out);
        }
        let mut closed = Bits::new(self.grid.atoms.len());
        closed.set(seed);
        let mut ext = Vec::new();
        for &(u, _) in &self.grid.adj[seed] {
            if mask.get(u) && !closed.get(u) {
                closed.set(u);
                if u > seed {
                    ext.push(u);
                }
            }
        }
        self.enter(seed);
        self.extend(&mut set, value, ext, closed, seed, mask, &mut out)?;
        self.leave(seed);
        Ok(out)
    }

    fn enter(&mut self, x: usize) {
        for &h in &self.grid.atoms[x].hubs {
            self.at_hub[h] += 1;
        }
    }

    fn leave(&mut self, x: usize) {
        for &h in &self.grid.atoms[x].hubs {
            self.at_hub[h] -= 1;
        }
    }

    /// At separation zero a set may hold two atoms at a vertex only when no
    /// earlier piece runs through it.
    fn admissible(&self, x: usize) -> bool {
        self.s > 0.0
            || self.grid.atoms[x]
                .hubs
                .iter()
                .all(|&h| !(self.passed.get(h) && self.at_hub[h] > 0))
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        set: &mut Vec<usize>,
        value: f64,
        mut ext: Vec<usize>,
        closed: Bits,
        seed: usize,
        mask: &Bits,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        while let Some(w) = ext.pop() {
            self.tick()?;
            if !self.admissible(w) {
                continue;
            }
            let mut ext2 = ext.clone();
            let mut closed2 = closed.clone();
            for &(u, _) in &self.grid.adj[w] {
                if mask.get(u) && !closed.get(u) && !closed2.get(u) {
                    closed2.set(u);
                    if u > seed {
                        ext2.push(u);
                    }
                }
            }
            let value2 = value + self.grid.atoms[w].value;
            set.push(w);
            if self.enough(value2) {
                out.push(set.clone());
            } else {
                self.enter(w);
                self.extend(set, value2, ext2, closed2, seed, mask, out)?;
                self.leave(w);
            }
            set.pop();
        }
        Ok(())
    }
}

/// Pieces of the witness partition: closed unions of atoms, with shared
/// points handed to a single owner at separation zero.
fn witness(g: &MetricGraph, grid: &Atoms, sets: &[Vec<usize>], s: f64) -> Result<Vec<Piece>> {
    let mut parts = Vec::with_capacity(sets.len());
    for set in sets {
        let ivs: Vec<IntervalOnEdge> = set
            .iter()
            .map(|&x| {
                let a = &grid.atoms[x];
                IntervalOnEdge::closed(a.edge, a.a, a.b)
            })
            .collect();
        parts.push(Piece::from_intervals(g, &ivs)?);
    }
    if s == 0.0 {
        for (node, point) in grid.nodes.iter().enumerate() {
            let owners: Vec<(usize, usize)> = sets
                .iter()
                .enumerate()
                .map(|(j, set)| (j, set.iter().filter(|&&x| grid.atoms[x].ends.contains(&node)).count()))
                .filter(|&(_, c)| c > 0)
                .collect();
            if owners.len() < 2 {
                continue;
            }
            let keeper = owners.iter().find(|&&(_, c)| c >= 2).unwrap_or(&owners[0]).0;
            let pt = match *point {
                PointRef::Interior { edge, offset } => g.point(edge, offset)?,
                p => p,
            };
            let dot = Piece::point(g, &pt)?;
            for &(j, _) in &owners {
                if j != keeper {
                    parts[j] = parts[j].difference(&dot);
                }
            }
        }
    }
    Ok(parts)
}

/// `min(s, shortest edge, shortest valuation segment) / 20`, ignoring `s`
/// when it is zero, but never finer than a 200-cell grid over the whole
/// graph.
pub fn default_resolution(v: &Valuation, g: &MetricGraph, s: f64) -> f64 {
    let shortest_edge = g.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
    let mut base = shortest_edge.min(v.shortest_feature());
    if s > 0.0 {
        base = base.min(s);
    }
    (base / 20.0).max(g.total_length() / 200.0)
}

/// Brute-force maximin share on a small graph with [`DEFAULT_BUDGET`].
///
/// The value is witnessed by the returned partition, so it never exceeds the
/// true share; it falls short by at most `max_density * k * resolution`
/// because every cut can be moved to a grid point.
pub fn mms_discretized(
    v: &Valuation,
    g: &MetricGraph,
    k: usize,
    s: f64,
    resolution: Option<f64>,
) -> Result<MmsResult> {
    mms_discretized_with_budget(v, g, k, s, resolution, DEFAULT_BUDGET)
}

/// [`mms_discretized`] with an explicit step budget per feasibility test.
pub fn mms_discretized_with_budget(
    v: &Valuation,
    g: &MetricGraph,
    k: usize,
    s: f64,
    resolution: Option<f64>,
    budget: u64,
) -> Result<MmsResult> {
    if k == 0 {
        return Err(Error::InvalidParameters("k must be positive".into()));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameters(format!("separation {s} must be finite and nonnegative")));
    }
    if !g.is_pristine() {
        return Err(Error::Precondition("oracle needs a graph without removed material".into()));
    }
    let delta = resolution.unwrap_or_else(|| default_resolution(v, g, s));
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameters(format!("resolution {delta} must be positive")));
    }
    let grid = Atoms::build(v, g, delta, s, true)?;
    let mut best = Search::new(&grid, s, k, 0.0, budget).run()?;
    let mut best_grid = &grid;
    let fine;
    if best.is_none() {
        // merged worthless cells hide room for worthless parts
        fine = Atoms::build(v, g, delta, s, false)?;
        best = Search::new(&fine, s, k, 0.0, budget).run()?;
        best_grid = &fine;
    }
    let Some(mut sets) = best else {
        return Err(Error::NoPartition { k });
    };
    let value_of = |grid: &Atoms, sets: &[Vec<usize>]| {
        sets.iter()
            .map(|set| set.iter().map(|&x| grid.atoms[x].value).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    let mut lo = value_of(best_grid, &sets);
    let mut hi = v.total_value() / k as f64;
    if hi > lo {
        if let Some(w) = Search::new(&grid, s, k, hi, budget).run()? {
            lo = value_of(&grid, &w);
            sets = w;
            best_grid = &grid;
        }
        let mut iterations = 0;
        while hi - lo > 1e-9 * hi.max(1.0) && iterations < 60 {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            match Search::new(&grid, s, k, mid, budget).run()? {
                Some(w) => {
                    lo = value_of(&grid, &w).max(mid);
                    sets = w;
                    best_grid = &grid;
                }
                None => hi = mid,
            }
        }
    }
    let parts = witness(g, best_grid, &sets, s)?;
    let partition = AgentPartition::new(0, parts, s);
    partition
        .validate(g)
        .map_err(|e| Error::Invariant(format!("witness partition is invalid: {e}")))?;
    let value = partition
        .parts
        .iter()
        .map(|p| v.piece_value(p))
        .fold(f64::INFINITY, f64::min);
    Ok(MmsResult {
        value,
        partition,
        method: Method::Discretized,
        resolution: Some(delta),
    })
}
