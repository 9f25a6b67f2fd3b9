//! Brute-force oracles shared by the integration tests. None of them call
//! into the algorithms they check.
#![allow(dead_code)]

use std::collections::BTreeSet;

use iad::motif::{DyadClass, TriadClass};
use iad::{NodeId, NodeSet, Sign, SignedDigraph};

/// Ordered pairs `(u, v)`, `u != v`, in row-major order.
pub fn ordered_pairs(n: usize) -> Vec<(NodeId, NodeId)> {
    (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect()
}

/// Graph whose base-3 digits over `ordered_pairs(n)` are 0 = absent,
/// 1 = endorse, 2 = accuse.
pub fn decode(n: usize, mut code: u64) -> SignedDigraph {
    let mut g = SignedDigraph::new(n);
    for (u, v) in ordered_pairs(n) {
        match code % 3 {
            1 => g.endorse(u, v).unwrap(),
            2 => g.accuse(u, v).unwrap(),
            _ => {}
        }
        code /= 3;
    }
    g
}

/// Complete digraph with bit `i` of `bits` making the `i`-th ordered pair an
/// accusation.
pub fn complete_from_bits(n: usize, bits: u64) -> SignedDigraph {
    let mut g = SignedDigraph::new(n);
    for (i, (u, v)) in ordered_pairs(n).into_iter().enumerate() {
        if bits >> i & 1 == 1 {
            g.accuse(u, v).unwrap();
        } else {
            g.endorse(u, v).unwrap();
        }
    }
    g
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BruteCensus {
    pub dyads: [u64; 5],
    pub triads: [u64; 12],
    pub dyad_weights: [f64; 5],
    pub triad_weights: [f64; 12],
}

fn dyad_slot(class: DyadClass) -> usize {
    DyadClass::ALL.iter().position(|&c| c == class).unwrap()
}

fn triad_slot(class: TriadClass) -> usize {
    TriadClass::ALL.iter().position(|&c| c == class).unwrap()
}

/// Classifies one edge triangle by trying every assignment of the three
/// nodes to roles and matching the edge set against the two shapes.
fn triangle_class(edges: &[(NodeId, NodeId, Sign)]) -> TriadClass {
    let nodes: BTreeSet<NodeId> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
    let nodes: Vec<NodeId> = nodes.into_iter().collect();
    let has = |a: NodeId, b: NodeId| edges.iter().find(|e| e.0 == a && e.1 == b).map(|e| e.2);
    for perm in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let (x, y, z) = (nodes[perm[0]], nodes[perm[1]], nodes[perm[2]]);
        if let (Some(a), Some(b), Some(c)) = (has(x, y), has(y, z), has(x, z)) {
            return TriadClass::Transitive {
                source_mid: a,
                mid_sink: b,
                source_sink: c,
            };
        }
        if let (Some(a), Some(b), Some(c)) = (has(x, y), has(y, z), has(z, x)) {
            let accusations = [a, b, c].iter().filter(|&&s| s == Sign::Accuse).count() as u8;
            return TriadClass::Cyclic { accusations };
        }
    }
    unreachable!("three edges on three nodes form a transitive or cyclic triangle")
}

pub fn brute_census(g: &SignedDigraph) -> BruteCensus {
    let n = g.node_count();
    let mut out = BruteCensus::default();
    let pair = |a: NodeId, b: NodeId| -> Vec<(NodeId, NodeId, Sign, f64)> {
        [(a, b), (b, a)]
            .into_iter()
            .filter_map(|(x, y)| g.edge(x, y).map(|e| (x, y, e.sign, e.weight)))
            .collect()
    };
    for a in 0..n {
        for b in a + 1..n {
            let es = pair(a, b);
            let class = match es.as_slice() {
                [] => continue,
                [(_, _, Sign::Endorse, _)] => DyadClass::SingleEndorse,
                [(_, _, Sign::Accuse, _)] => DyadClass::SingleAccuse,
                [(_, _, s, _), (_, _, t, _)] if s == t && *s == Sign::Endorse => {
                    DyadClass::MutualEndorse
                }
                [(_, _, s, _), (_, _, t, _)] if s == t => DyadClass::MutualAccuse,
                _ => DyadClass::Mixed,
            };
            out.dyads[dyad_slot(class)] += 1;
            out.dyad_weights[dyad_slot(class)] +=
                es.iter().map(|e| e.3).fold(f64::INFINITY, f64::min);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (ab, bc, ac) = (pair(a, b), pair(b, c), pair(a, c));
                for e1 in &ab {
                    for e2 in &bc {
                        for e3 in &ac {
                            let class = triangle_class(&[
                                (e1.0, e1.1, e1.2),
                                (e2.0, e2.1, e2.2),
                                (e3.0, e3.1, e3.2),
                            ]);
                            out.triads[triad_slot(class)] += 1;
                            out.triad_weights[triad_slot(class)] += e1.3.min(e2.3).min(e3.3);
                        }
                    }
                }
            }
        }
    }
    out
}

/// True when the library census agrees with [`brute_census`] on `g`.
pub fn census_matches(g: &SignedDigraph) -> bool {
    let lib = iad::motif::census(g);
    let brute = brute_census(g);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
    DyadClass::ALL.iter().all(|&c| {
        let t = lib.dyad(c);
        t.count == brute.dyads[dyad_slot(c)] && close(t.weight, brute.dyad_weights[dyad_slot(c)])
    }) && TriadClass::ALL.iter().all(|&c| {
        let t = lib.triad(c);
        t.count == brute.triads[triad_slot(c)]
            && close(t.weight, brute.triad_weights[triad_slot(c)])
    })
}

fn mask_nodes(mask: u32) -> NodeSet {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

fn self_consistent_mask(g: &SignedDigraph, mask: u32) -> bool {
    g.edges()
        .all(|(u, v, e)| !(e.sign == Sign::Accuse && mask >> u & 1 == 1 && mask >> v & 1 == 1))
}

fn insular_mask(g: &SignedDigraph, mask: u32) -> bool {
    g.edges()
        .all(|(u, v, e)| !(e.sign == Sign::Endorse && mask >> u & 1 == 1 && mask >> v & 1 == 0))
}

/// `a` beats `b` on equal weight when it holds the lowest node where they
/// differ.
fn wins_tie(a: u32, b: u32) -> bool {
    let d = a ^ b;
    d != 0 && a & (d & d.wrapping_neg()) != 0
}

fn best_subset(
    g: &SignedDigraph,
    weights: &[f64],
    feasible: impl Fn(u32) -> bool,
) -> (NodeSet, f64) {
    let n = g.node_count();
    assert!(n <= 20, "subset enumeration over {n} nodes");
    let mut best: Option<(f64, u32)> = None;
    for mask in 0..(1u32 << n) {
        if !feasible(mask) {
            continue;
        }
        let w: f64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| weights[i])
            .sum();
        best = match best {
            None => Some((w, mask)),
            Some((bw, bm)) if w > bw || (w == bw && wins_tie(mask, bm)) => Some((w, mask)),
            keep => keep,
        };
    }
    let (w, m) = best.expect("the empty set is feasible");
    (mask_nodes(m), w)
}

pub fn brute_largest_self_consistent(g: &SignedDigraph, weights: Option<&[f64]>) -> (NodeSet, f64) {
    let unit = vec![1.0; g.node_count()];
    best_subset(g, weights.unwrap_or(&unit), |m| self_consistent_mask(g, m))
}

pub fn brute_largest_insular(g: &SignedDigraph) -> (NodeSet, f64) {
    let unit = vec![1.0; g.node_count()];
    best_subset(g, &unit, |m| {
        self_consistent_mask(g, m) && insular_mask(g, m)
    })
}

/// Every set partition of `0..n`, as block lists.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<NodeId>>> {
    fn grow(i: usize, n: usize, blocks: &mut Vec<Vec<NodeId>>, out: &mut Vec<Vec<Vec<NodeId>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            grow(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        grow(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

/// Some partition of the nodes into blocks that are each free of internal
/// accusations and send no endorsement outside.
pub fn splits_into_insular_communities(g: &SignedDigraph) -> bool {
    set_partitions(g.node_count()).iter().any(|blocks| {
        blocks.iter().all(|b| {
            let mask = b.iter().fold(0u32, |m, &u| m | 1 << u);
            self_consistent_mask(g, mask) && insular_mask(g, mask)
        })
    })
}
