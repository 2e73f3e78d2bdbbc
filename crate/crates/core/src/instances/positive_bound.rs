use std::collections::BTreeSet;

use super::InstanceDoc;
use crate::error::{Error, Result};
use crate::metric_graph::{EdgeId, MetricGraph, VertexId};
use crate::valuation::Valuation;
use crate::TOLERANCE;

const BUDGET: u64 = 200_000_000;

/// A valuable cycle in arc-length coordinates.
struct Ring {
    circumference: f64,
    /// Per agent, maximal arcs `[lo, hi]` of positive density with
    /// `0 <= lo < circumference` and `hi - lo < circumference`.
    regions: Vec<Vec<(f64, f64)>>,
}

/// Walks a component whose vertices all have degree two, from its smallest
/// vertex; `None` when the component is not a cycle.
fn walk_cycle(g: &MetricGraph, start: VertexId) -> Option<Vec<(EdgeId, bool, f64)>> {
    let mut out = Vec::new();
    let mut at = start;
    let mut prev: Option<EdgeId> = None;
    let mut x = 0.0;
    loop {
        let inc = g.incident(at);
        if inc.len() != 2 {
            return None;
        }
        let e = *inc.iter().find(|&&e| Some(e) != prev).unwrap_or(&inc[0]);
        let edge = g.edge(e).ok()?;
        let reversed = edge.u != at;
        out.push((e, reversed, x));
        x += edge.length;
        at = if reversed { edge.u } else { edge.v };
        prev = Some(e);
        if at == start {
            return Some(out);
        }
        if out.len() > g.edges().len() {
            return None;
        }
    }
}

fn rings(g: &MetricGraph, vals: &[Valuation]) -> Result<Vec<Ring>> {
    let mut out = Vec::new();
    for comp in g.components() {
        let verts: Vec<VertexId> = comp.vertices().collect();
        let Some(&start) = verts.first() else { continue };
        let edges: Vec<EdgeId> = comp.edges().collect();
        let worthless = vals
            .iter()
            .all(|v| edges.iter().all(|&e| v.segments(e).iter().all(|s| s.density <= 0.0)));
        if worthless {
            continue;
        }
        let walk = walk_cycle(g, start)
            .ok_or_else(|| Error::Precondition("valuable components must be cycles".into()))?;
        let c: f64 = walk.iter().map(|&(e, _, _)| g.edge(e).map(|x| x.length).unwrap_or(0.0)).sum();
        let mut regions = Vec::with_capacity(vals.len());
        for v in vals {
            let mut arcs: Vec<(f64, f64)> = Vec::new();
            for &(e, rev, x0) in &walk {
                let len = g.edge(e)?.length;
                for s in v.segments(e).iter().filter(|s| s.density > 0.0) {
                    let (a, b) = if rev { (len - s.end, len - s.start) } else { (s.start, s.end) };
                    arcs.push((x0 + a, x0 + b));
                }
            }
            arcs.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut merged: Vec<(f64, f64)> = Vec::new();
            for (a, b) in arcs {
                match merged.last_mut() {
                    Some(last) if a <= last.1 + 1e-12 => last.1 = last.1.max(b),
                    _ => merged.push((a, b)),
                }
            }
            if merged.len() >= 2 && merged[0].0 <= 1e-12 && merged[merged.len() - 1].1 >= c - 1e-12 {
                let first = merged.remove(0);
                let last = merged.last_mut().expect("two arcs");
                last.1 = c + first.1;
            }
            regions.push(merged);
        }
        out.push(Ring {
            circumference: c,
            regions,
        });
    }
    Ok(out)
}

/// Distance between two arcs of a cycle; zero when they meet.
fn arc_distance(c: f64, p: (f64, f64), q: (f64, f64)) -> f64 {
    let g1 = (q.0 - p.1).rem_euclid(c);
    let g2 = (p.0 - q.1).rem_euclid(c);
    if (g1 + g2 + (p.1 - p.0) + (q.1 - q.0) - c).abs() > 1e-9 {
        return 0.0;
    }
    g1.min(g2)
}

struct Counter {
    steps: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > BUDGET {
            return Err(Error::BudgetExceeded(BUDGET));
        }
        Ok(())
    }
}

/// Whether some choice of one point per agent, each in one of her closed
/// regions, has all pairwise cycle distances at least `s`. This relaxes the
/// real question (pieces of positive length inside the regions), so an
/// infeasible answer is exact.
fn relaxed_feasible(ring: &Ring, agents: &[usize], s: f64, counter: &mut Counter) -> Result<bool> {
    let m = agents.len();
    if m <= 1 {
        return Ok(agents.iter().all(|&a| !ring.regions[a].is_empty()));
    }
    let c = ring.circumference;
    let mut order: Vec<usize> = agents.to_vec();
    let first = order.remove(0);
    let mut perms = Vec::new();
    permutations(&mut order, 0, &mut perms);
    for rest in perms {
        let seq: Vec<usize> = std::iter::once(first).chain(rest).collect();
        let choices: Vec<Vec<(f64, f64)>> = seq
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                ring.regions[a]
                    .iter()
                    .flat_map(|&(lo, hi)| {
                        let wraps: &[f64] = if j == 0 { &[0.0] } else { &[0.0, 1.0, 2.0] };
                        wraps.iter().map(move |&t| (lo + t * c, hi + t * c))
                    })
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; m];
        loop {
            counter.tick()?;
            let boxes: Vec<(f64, f64)> = (0..m).map(|j| choices[j][pick[j]]).collect();
            if difference_constraints_hold(&boxes, s, c) {
                return Ok(true);
            }
            let mut j = 0;
            while j < m {
                pick[j] += 1;
                if pick[j] < choices[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == m {
                break;
            }
        }
    }
    Ok(false)
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Points `y_j` in `boxes[j]`, increasing by at least `s`, with the last
/// within `c - s` of the first.
fn difference_constraints_hold(boxes: &[(f64, f64)], s: f64, c: f64) -> bool {
    let m = boxes.len();
    let z = m;
    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    for (j, &(lo, hi)) in boxes.iter().enumerate() {
        arcs.push((j, z, -lo));
        arcs.push((z, j, hi));
    }
    for j in 0..m - 1 {
        arcs.push((j + 1, j, -s));
    }
    arcs.push((0, m - 1, c - s));
    let mut dist = vec![0.0f64; m + 1];
    for _ in 0..=m {
        let mut changed = false;
        for &(a, b, w) in &arcs {
            if dist[a] + w < dist[b] - TOLERANCE {
                dist[b] = dist[a] + w;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    false
}

/// Whether grid cells of width at most `delta`, one inside a region of each
/// agent, can be pairwise `s`-separated. A feasible answer is exact.
fn grid_feasible(ring: &Ring, agents: &[usize], s: f64, delta: f64, counter: &mut Counter) -> Result<bool> {
    let cells: Vec<Vec<(f64, f64)>> = agents
        .iter()
        .map(|&a| {
            ring.regions[a]
                .iter()
                .flat_map(|&(lo, hi)| {
                    let k = ((hi - lo) / delta).ceil().max(1.0) as usize;
                    let w = (hi - lo) / k as f64;
                    (0..k).map(move |i| (lo + i as f64 * w, lo + (i + 1) as f64 * w))
                })
                .collect()
        })
        .collect();
    let mut chosen = Vec::with_capacity(agents.len());
    place_cells(ring.circumference, &cells, s, &mut chosen, counter)
}

fn place_cells(
    c: f64,
    cells: &[Vec<(f64, f64)>],
    s: f64,
    chosen: &mut Vec<(f64, f64)>,
    counter: &mut Counter,
) -> Result<bool> {
    let j = chosen.len();
    if j == cells.len() {
        return Ok(true);
    }
    for &cell in &cells[j] {
        counter.tick()?;
        if chosen.iter().all(|&p| arc_distance(c, p, cell) >= s - TOLERANCE) {
            chosen.push(cell);
            if place_cells(c, cells, s, chosen, counter)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

/// Largest number of agents that an `s`-separated allocation of the
/// instance can give positive value to.
///
/// Every component carrying value must be a cycle. A piece giving an agent
/// positive value can be shrunk to a short arc inside one of her regions, so
/// the question is which sets of agents can place pairwise separated arcs on
/// each cycle. The answer is bracketed from below by arcs on a grid of
/// spacing `resolution` (default: a quarter of the shortest region) and from
/// above by points in closed regions; the two must agree.
pub fn check_positive_value_bound(doc: &InstanceDoc, resolution: Option<f64>) -> Result<usize> {
    let g = doc.graph()?;
    let vals = doc.valuations(&g)?;
    let s = doc.separation;
    let n = vals.len();
    if n > 16 {
        return Err(Error::InvalidParameters("at most 16 agents supported".into()));
    }
    let rings = rings(&g, &vals)?;
    let shortest = rings
        .iter()
        .flat_map(|r| r.regions.iter().flatten())
        .map(|&(lo, hi)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    let delta = resolution.unwrap_or(shortest / 4.0);
    if !(delta > 0.0) {
        return Err(Error::InvalidParameters(format!("resolution {delta} must be positive")));
    }
    let mut counter = Counter { steps: 0 };
    let mut lower: BTreeSet<u32> = BTreeSet::from([0]);
    let mut upper: BTreeSet<u32> = BTreeSet::from([0]);
    for ring in &rings {
        let present: Vec<usize> = (0..n).filter(|&a| !ring.regions[a].is_empty()).collect();
        let mut low_ok = Vec::new();
        let mut up_ok = Vec::new();
        for sub in 1u32..(1 << present.len()) {
            let agents: Vec<usize> = (0..present.len())
                .filter(|&i| sub >> i & 1 == 1)
                .map(|i| present[i])
                .collect();
            let mask: u32 = agents.iter().map(|&a| 1u32 << a).sum();
            if relaxed_feasible(ring, &agents, s, &mut counter)? {
                up_ok.push(mask);
                if grid_feasible(ring, &agents, s, delta, &mut counter)? {
                    low_ok.push(mask);
                }
            }
        }
        for (states, ok) in [(&mut lower, &low_ok), (&mut upper, &up_ok)] {
            let mut next = states.clone();
            for &m in states.iter() {
                for &f in ok {
                    if m & f == 0 {
                        next.insert(m | f);
                    }
                }
            }
            *states = next;
        }
    }
    let best = |states: &BTreeSet<u32>| states.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0);
    let (lo, hi) = (best(&lower), best(&upper));
    if lo != hi {
        return Err(Error::Precondition(format!(
            "bounds {lo} and {hi} differ at resolution {delta}; refine it"
        )));
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_cycle_counterexample;

    #[test]
    fn arc_distances() {
        assert!((arc_distance(4.0, (0.0, 1.0), (2.0, 2.5)) - 1.0).abs() < 1e-12);
        assert!((arc_distance(4.0, (0.0, 1.0), (2.5, 3.5)) - 0.5).abs() < 1e-12);
        assert_eq!(arc_distance(4.0, (0.0, 1.0), (0.5, 2.0)), 0.0);
        assert!((arc_distance(4.0, (3.5, 4.5), (1.0, 2.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_agents_two_cycles_serve_one() {
        let doc = gen_cycle_counterexample(2, 2, 1.0, 0.05).unwrap();
        assert_eq!(check_positive_value_bound(&doc, None).unwrap(), 1);
    }

    #[test]
    fn lone_agent_has_nothing() {
        let doc = gen_cycle_counterexample(1, 1, 1.0, 0.05).unwrap();
        assert_eq!(check_positive_value_bound(&doc, None).unwrap(), 0);
    }

    #[test]
    fn three_agents_many_cycles() {
        let doc = gen_cycle_counterexample(3, 4, 1.0, 0.05).unwrap();
        assert_eq!(check_positive_value_bound(&doc, None).unwrap(), 2);
    }
}
