use serde::Serialize;

use super::{AgentPartition, Allocation, IntersectionMode};
use crate::metric_graph::{MetricGraph, Piece, PointRef};
use crate::valuation::Valuation;
use crate::TOLERANCE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    OnGraph,
    DuplicateAgent,
    Connectivity,
    Disjointness,
    FiniteOverlap,
    Separation,
    Containment,
    Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Point { point: PointRef },
    Pair { a: PointRef, b: PointRef, distance: f64 },
    Value { value: f64, threshold: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub check: CheckKind,
    pub agents: Vec<usize>,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks_run: usize,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    fn new() -> Self {
        VerificationReport {
            passed: true,
            checks_run: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        self.checks_run += 1;
        if !ok {
            self.passed = false;
            self.failures.push(failure());
        }
    }
}

/// Checks pairwise relations among labelled pieces; shared by allocation and
/// partition verification.
fn pairwise(
    g: &MetricGraph,
    labelled: &[(usize, &Piece)],
    s: f64,
    mode: IntersectionMode,
    report: &mut VerificationReport,
) {
    for a in 0..labelled.len() {
        for b in a + 1..labelled.len() {
            let (la, x) = labelled[a];
            let (lb, y) = labelled[b];
            if s > 0.0 {
                let found = g.closest_points(x, y).ok().flatten();
                let d = found.map(|f| f.2).unwrap_or(f64::INFINITY);
                report.record(d >= s - TOLERANCE, || Failure {
                    check: CheckKind::Separation,
                    agents: vec![la, lb],
                    detail: format!("distance {d} below separation {s}"),
                    witness: found.map(|(p, q, distance)| Witness::Pair { a: p, b: q, distance }),
                });
            } else {
                let common = x.intersection(y);
                let ok = match mode {
                    IntersectionMode::Disjoint => common.is_empty(),
                    IntersectionMode::FiniteOverlap => x.intersection_is_finite(y),
                };
                let kind = match mode {
                    IntersectionMode::Disjoint => CheckKind::Disjointness,
                    IntersectionMode::FiniteOverlap => CheckKind::FiniteOverlap,
                };
                report.record(ok, || Failure {
                    check: kind,
                    agents: vec![la, lb],
                    detail: "pieces share material".into(),
                    witness: common.sample_point().map(|point| Witness::Point { point }),
                });
            }
        }
    }
}

fn single_piece_checks(g: &MetricGraph, label: usize, p: &Piece, report: &mut VerificationReport) {
    let on = g.check_piece(p);
    report.record(on.is_ok(), || Failure {
        check: CheckKind::OnGraph,
        agents: vec![label],
        detail: on.err().map(|e| e.to_string()).unwrap_or_default(),
        witness: None,
    });
    report.record(!p.is_empty() && g.is_connected_piece(p), || Failure {
        check: CheckKind::Connectivity,
        agents: vec![label],
        detail: "piece is empty or disconnected".into(),
        witness: None,
    });
}

/// Checks an allocation: each piece lies on `g` and is connected, pieces are
/// pairwise disjoint (or overlap finitely) at `s = 0` and at distance at
/// least `s` otherwise, each piece contains one of its agent's parts when
/// partitions are given, and each agent's value reaches her threshold when
/// valuations and thresholds are given (both indexed by agent id).
pub fn verify_allocation(
    g: &MetricGraph,
    allocation: &Allocation,
    s: f64,
    mode: IntersectionMode,
    partitions: Option<&[AgentPartition]>,
    valuations: Option<&[Valuation]>,
    thresholds: Option<&[f64]>,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let mut agents: Vec<usize> = allocation.pieces.iter().map(|p| p.agent).collect();
    agents.sort_unstable();
    let dup = agents.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
    report.record(dup.is_none(), || Failure {
        check: CheckKind::DuplicateAgent,
        agents: dup.into_iter().collect(),
        detail: "agent holds more than one piece".into(),
        witness: None,
    });
    for p in &allocation.pieces {
        single_piece_checks(g, p.agent, &p.piece, &mut report);
    }
    let labelled: Vec<(usize, &Piece)> = allocation.pieces.iter().map(|p| (p.agent, &p.piece)).collect();
    pairwise(g, &labelled, s, mode, &mut report);
    if let Some(parts) = partitions {
        for p in &allocation.pieces {
            let owned = parts.iter().find(|q| q.agent == p.agent);
            let hit = owned.and_then(|q| {
                q.parts
                    .iter()
                    .position(|x| x.is_subset(&p.piece) || (s > 0.0 && x.closure(g).is_subset(&p.piece)))
            });
            report.record(hit.is_some(), || Failure {
                check: CheckKind::Containment,
                agents: vec![p.agent],
                detail: "piece contains none of the agent's parts".into(),
                witness: None,
            });
        }
    }
    if let (Some(vals), Some(ts)) = (valuations, thresholds) {
        for p in &allocation.pieces {
            let (Some(v), Some(&t)) = (vals.get(p.agent), ts.get(p.agent)) else {
                report.record(false, || Failure {
                    check: CheckKind::Value,
                    agents: vec![p.agent],
                    detail: "no valuation or threshold for agent".into(),
                    witness: None,
                });
                continue;
            };
            let value = v.piece_value(&p.piece);
            report.record(value >= t - TOLERANCE, || Failure {
                check: CheckKind::Value,
                agents: vec![p.agent],
                detail: format!("value {value} below threshold {t}"),
                witness: Some(Witness::Value { value, threshold: t }),
            });
        }
    }
    report
}

/// Checks one agent's partition: parts on `g`, connected and pairwise
/// separated at its declared separation, plus an optional minimum part value.
pub fn verify_partition(
    g: &MetricGraph,
    partition: &AgentPartition,
    valuation: Option<&Valuation>,
    min_value: Option<f64>,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let s = partition.separation;
    let parts: Vec<Piece> = if s > 0.0 {
        partition.parts.iter().map(|p| p.closure(g)).collect()
    } else {
        partition.parts.clone()
    };
    for (j, p) in parts.iter().enumerate() {
        single_piece_checks(g, j, p, &mut report);
    }
    let labelled: Vec<(usize, &Piece)> = parts.iter().enumerate().collect();
    pairwise(g, &labelled, s, partition.mode, &mut report);
    if let (Some(v), Some(t)) = (valuation, min_value) {
        for (j, p) in parts.iter().enumerate() {
            let value = v.piece_value(p);
            report.record(value >= t - TOLERANCE, || Failure {
                check: CheckKind::Value,
                agents: vec![j],
                detail: format!("part {j} of agent {} is worth {value} < {t}", partition.agent),
                witness: Some(Witness::Value { value, threshold: t }),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::AllocatedPiece;
    use crate::metric_graph::EdgeId;

    fn alloc_of(pieces: Vec<Piece>, s: f64) -> Allocation {
        Allocation {
            separation: s,
            pieces: pieces
                .into_iter()
                .enumerate()
                .map(|(agent, piece)| AllocatedPiece {
                    agent,
                    piece,
                    contains_part: None,
                })
                .collect(),
        }
    }

    #[test]
    fn shared_interior_fails_disjointness() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.6).unwrap();
        let b = Piece::closed_interval(&g, EdgeId(0), 0.4, 1.0).unwrap();
        let r = verify_allocation(&g, &alloc_of(vec![a, b], 0.0), 0.0, IntersectionMode::Disjoint, None, None, None);
        assert!(!r.passed);
        assert_eq!(r.failures[0].check, CheckKind::Disjointness);
        match &r.failures[0].witness {
            Some(Witness::Point { point: PointRef::Interior { offset, .. } }) => {
                assert!((0.4..=0.6).contains(offset))
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn finite_overlap_mode_allows_shared_points() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.5).unwrap();
        let b = Piece::closed_interval(&g, EdgeId(0), 0.5, 1.0).unwrap();
        let alloc = alloc_of(vec![a, b], 0.0);
        assert!(!verify_allocation(&g, &alloc, 0.0, IntersectionMode::Disjoint, None, None, None).passed);
        assert!(verify_allocation(&g, &alloc, 0.0, IntersectionMode::FiniteOverlap, None, None, None).passed);
    }

    #[test]
    fn near_pieces_fail_separation() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.3).unwrap();
        let b = Piece::closed_interval(&g, EdgeId(0), 0.49, 1.0).unwrap();
        let r = verify_allocation(&g, &alloc_of(vec![a, b], 0.2), 0.2, IntersectionMode::Disjoint, None, None, None);
        assert!(!r.passed);
        assert_eq!(r.failures[0].check, CheckKind::Separation);
        match &r.failures[0].witness {
            Some(Witness::Pair { distance, .. }) => assert!((distance - 0.19).abs() < 1e-12),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn value_thresholds() {
        let g = MetricGraph::from_edges(&[(0, 1, 1.0)]).unwrap();
        let v = Valuation::uniform(&g, 1.0).unwrap();
        let a = Piece::closed_interval(&g, EdgeId(0), 0.0, 0.3).unwrap();
        let alloc = alloc_of(vec![a], 0.0);
        let vals = [v];
        let ok = verify_allocation(&g, &alloc, 0.0, IntersectionMode::Disjoint, None, Some(&vals), Some(&[0.3]));
        assert!(ok.passed);
        let bad = verify_allocation(&g, &alloc, 0.0, IntersectionMode::Disjoint, None, Some(&vals), Some(&[0.5]));
        assert_eq!(bad.failures[0].check, CheckKind::Value);
    }
}
