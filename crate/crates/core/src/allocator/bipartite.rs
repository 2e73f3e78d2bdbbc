use serde::Serialize;

use crate::error::{Error, Result};

/// Agents on the left, components on the right; `adj[a]` lists the
/// components adjacent to agent `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub agents: usize,
    pub components: usize,
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(agents: usize, components: usize, edges: &[(usize, usize)]) -> Result<BipartiteGraph> {
        let mut adj = vec![Vec::new(); agents];
        for &(a, c) in edges {
            if a >= agents || c >= components {
                return Err(Error::InvalidParameters(format!("edge ({a}, {c}) out of range")));
            }
            adj[a].push(c);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(BipartiteGraph { agents, components, adj })
    }

    fn has_edge(&self, a: usize, c: usize) -> bool {
        self.adj[a].binary_search(&c).is_ok()
    }
}

/// Split of agents `X = X_S ∪ X_L` and components `Y = Y_S ∪ Y_L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteDecomposition {
    pub x_small: Vec<usize>,
    pub x_large: Vec<usize>,
    pub y_small: Vec<usize>,
    pub y_large: Vec<usize>,
    /// `(agent, component)` pairs matching every agent of `x_large`.
    pub matching: Vec<(usize, usize)>,
}

impl BipartiteDecomposition {
    /// Exhaustive check of the three defining properties.
    pub fn verify(&self, h: &BipartiteGraph) -> std::result::Result<(), String> {
        for &a in &self.x_small {
            if let Some(&c) = self.y_large.iter().find(|&&c| h.has_edge(a, c)) {
                return Err(format!("edge between small agent {a} and large component {c}"));
            }
        }
        if !self.x_small.is_empty() && self.x_small.len() <= self.y_small.len() {
            return Err(format!(
                "{} small agents but {} small components",
                self.x_small.len(),
                self.y_small.len()
            ));
        }
        let mut used = vec![false; h.components];
        for &a in &self.x_large {
            let Some(&(_, c)) = self.matching.iter().find(|(x, _)| *x == a) else {
                return Err(format!("large agent {a} is unmatched"));
            };
            if !h.has_edge(a, c) || !self.y_large.contains(&c) || used[c] {
                return Err(format!("bad match ({a}, {c})"));
            }
            used[c] = true;
        }
        let mut xs: Vec<usize> = self.x_small.iter().chain(&self.x_large).copied().collect();
        xs.sort_unstable();
        let mut ys: Vec<usize> = self.y_small.iter().chain(&self.y_large).copied().collect();
        ys.sort_unstable();
        if xs != (0..h.agents).collect::<Vec<_>>() || ys != (0..h.components).collect::<Vec<_>>() {
            return Err("sides are not partitions".into());
        }
        Ok(())
    }
}

fn augment(h: &BipartiteGraph, a: usize, seen: &mut [bool], match_of_comp: &mut [Option<usize>]) -> bool {
    for &c in &h.adj[a] {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        if match_of_comp[c].is_none_or(|b| augment(h, b, seen, match_of_comp)) {
            match_of_comp[c] = Some(a);
            return true;
        }
    }
    false
}

/// Maximum matching, then alternating reachability from unmatched agents:
/// the reached agents and components form the small sides.
pub fn bipartite_decompose(h: &BipartiteGraph) -> Result<BipartiteDecomposition> {
    let mut match_of_comp: Vec<Option<usize>> = vec![None; h.components];
    for a in 0..h.agents {
        let mut seen = vec![false; h.components];
        augment(h, a, &mut seen, &mut match_of_comp);
    }
    let mut match_of_agent = vec![None; h.agents];
    for (c, a) in match_of_comp.iter().enumerate() {
        if let Some(a) = a {
            match_of_agent[*a] = Some(c);
        }
    }
    let mut reached_agent = vec![false; h.agents];
    let mut reached_comp = vec![false; h.components];
    let mut stack: Vec<usize> = (0..h.agents).filter(|&a| match_of_agent[a].is_none()).collect();
    for &a in &stack {
        reached_agent[a] = true;
    }
    while let Some(a) = stack.pop() {
        for &c in &h.adj[a] {
            if reached_comp[c] {
                continue;
            }
            reached_comp[c] = true;
            if let Some(b) = match_of_comp[c] {
                if !reached_agent[b] {
                    reached_agent[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    let x_small: Vec<usize> = (0..h.agents).filter(|&a| reached_agent[a]).collect();
    let x_large: Vec<usize> = (0..h.agents).filter(|&a| !reached_agent[a]).collect();
    let y_small: Vec<usize> = (0..h.components).filter(|&c| reached_comp[c]).collect();
    let y_large: Vec<usize> = (0..h.components).filter(|&c| !reached_comp[c]).collect();
    let matching = x_large
        .iter()
        .map(|&a| (a, match_of_agent[a].expect("large agents are matched")))
        .collect();
    let d = BipartiteDecomposition {
        x_small,
        x_large,
        y_small,
        y_large,
        matching,
    };
    d.verify(h).map_err(Error::Invariant)?;
    Ok(d)
}
