//! Dyad and triad motifs: classification, census, implications and the
//! Erdős–Rényi baseline.
//!
//! Triads are counted over *edge triangles*: sets of three directed edges, one
//! on each pair of a node triple. A triple whose pairs are reciprocated
//! contributes one instance per choice of direction on every pair, so a fully
//! reciprocated triple yields eight instances (six transitive, two cyclic).
//! Under the independent-ordered-pair null model this gives the closed forms
//! in [`null_expectations`] with no correction for reverse edges.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Closure, NodeId, NodeSet, Sign, SignedDigraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DyadClass {
    /// `u -> v` and `v -> u`, both endorsements.
    MutualEndorse,
    /// One endorsement and one accusation in opposite directions.
    Mixed,
    MutualAccuse,
    SingleEndorse,
    SingleAccuse,
}

impl DyadClass {
    pub const ALL: [DyadClass; 5] = [
        DyadClass::MutualEndorse,
        DyadClass::Mixed,
        DyadClass::MutualAccuse,
        DyadClass::SingleEndorse,
        DyadClass::SingleAccuse,
    ];

    /// The reciprocated classes, in table order.
    pub const RECIPROCATED: [DyadClass; 3] = [
        DyadClass::MutualEndorse,
        DyadClass::Mixed,
        DyadClass::MutualAccuse,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short table label (`a`, `b`, `c`) for reciprocated classes.
    pub fn table_label(self) -> &'static str {
        match self {
            DyadClass::MutualEndorse => "a",
            DyadClass::Mixed => "b",
            DyadClass::MutualAccuse => "c",
            DyadClass::SingleEndorse => "single+",
            DyadClass::SingleAccuse => "single-",
        }
    }
}

impl fmt::Display for DyadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DyadClass::MutualEndorse => "mutual(+,+)",
            DyadClass::Mixed => "mixed(+,\u{2212})",
            DyadClass::MutualAccuse => "mutual(\u{2212},\u{2212})",
            DyadClass::SingleEndorse => "single(+)",
            DyadClass::SingleAccuse => "single(\u{2212})",
        };
        f.write_str(s)
    }
}

/// Classifies the edges between `u` and `v`; `None` when there are none.
pub fn classify_dyad(g: &SignedDigraph, u: NodeId, v: NodeId) -> Option<DyadClass> {
    match (g.sign(u, v), g.sign(v, u)) {
        (None, None) => None,
        (Some(Sign::Endorse), Some(Sign::Endorse)) => Some(DyadClass::MutualEndorse),
        (Some(Sign::Accuse), Some(Sign::Accuse)) => Some(DyadClass::MutualAccuse),
        (Some(_), Some(_)) => Some(DyadClass::Mixed),
        (Some(s), None) | (None, Some(s)) => Some(match s {
            Sign::Endorse => DyadClass::SingleEndorse,
            Sign::Accuse => DyadClass::SingleAccuse,
        }),
    }
}

/// The three inconsistent triangle arrangements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriangleType {
    /// `u -> a`, `u -> b`, `a ⊣ b`: `u` endorses both sides of an accusation.
    TypeI,
    /// `u -> a`, `a -> b`, `u ⊣ b`: `u` disputes an endorsement of its endorsee.
    TypeII,
    /// `u -> a`, `a -> b`, `b ⊣ u`: `u` lends credibility to its own accuser.
    TypeIII,
}

/// Isomorphism class of an edge triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriadClass {
    /// `s -> m`, `m -> t`, `s -> t` with the given signs.
    Transitive {
        source_mid: Sign,
        mid_sink: Sign,
        source_sink: Sign,
    },
    /// `x -> y -> z -> x`, classified by number of accusations (0..=3).
    Cyclic { accusations: u8 },
}

const fn tr(a: Sign, b: Sign, c: Sign) -> TriadClass {
    TriadClass::Transitive {
        source_mid: a,
        mid_sink: b,
        source_sink: c,
    }
}

const P: Sign = Sign::Endorse;
const N: Sign = Sign::Accuse;

impl TriadClass {
    pub const ALL: [TriadClass; 12] = [
        tr(P, P, P),
        tr(P, N, P),
        tr(P, P, N),
        tr(N, P, P),
        tr(N, N, P),
        tr(P, N, N),
        tr(N, P, N),
        tr(N, N, N),
        TriadClass::Cyclic { accusations: 0 },
        TriadClass::Cyclic { accusations: 1 },
        TriadClass::Cyclic { accusations: 2 },
        TriadClass::Cyclic { accusations: 3 },
    ];

    pub fn index(self) -> usize {
        TriadClass::ALL
            .iter()
            .position(|&c| c == self)
            .expect("every triad class is listed in ALL")
    }

    pub fn accusations(self) -> u8 {
        match self {
            TriadClass::Transitive {
                source_mid,
                mid_sink,
                source_sink,
            } => [source_mid, mid_sink, source_sink]
                .iter()
                .filter(|s| s.is_accuse())
                .count() as u8,
            TriadClass::Cyclic { accusations } => accusations,
        }
    }

    /// Number of distinct edge triangles of this class on a fixed node triple.
    pub fn labeled_multiplicity(self) -> u32 {
        match self {
            TriadClass::Transitive { .. } => 6,
            TriadClass::Cyclic { accusations } => 2 * binomial3(accusations),
        }
    }

    pub fn inconsistency(self) -> Option<TriangleType> {
        match self {
            TriadClass::Transitive {
                source_mid: Sign::Endorse,
                mid_sink: Sign::Accuse,
                source_sink: Sign::Endorse,
            } => Some(TriangleType::TypeI),
            TriadClass::Transitive {
                source_mid: Sign::Endorse,
                mid_sink: Sign::Endorse,
                source_sink: Sign::Accuse,
            } => Some(TriangleType::TypeII),
            TriadClass::Cyclic { accusations: 1 } => Some(TriangleType::TypeIII),
            _ => None,
        }
    }
}

fn binomial3(k: u8) -> u32 {
    match k {
        0 | 3 => 1,
        1 | 2 => 3,
        _ => 0,
    }
}

impl fmt::Display for TriadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriadClass::Transitive {
                source_mid,
                mid_sink,
                source_sink,
            } => write!(f, "transitive({source_mid},{mid_sink},{source_sink})"),
            TriadClass::Cyclic { accusations } => write!(f, "cyclic({accusations})"),
        }
    }
}

/// Short labels (`1a` … `4c`) for the twelve triad classes.
///
/// The all-positive, all-negative and cyclic 0/3 labels are pinned by their
/// distinct null expectations. Inside the one- and two-accusation groups the
/// assignment is a convention and can be permuted with [`TriadLabels::swap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriadLabels {
    labels: [(TriadClass, &'static str); 12],
}

impl Default for TriadLabels {
    fn default() -> Self {
        TriadLabels {
            labels: [
                (tr(P, P, P), "1a"),
                (tr(P, N, P), "2a"),
                (tr(P, P, N), "3a"),
                (tr(N, P, P), "4a"),
                (tr(N, N, P), "1b"),
                (tr(P, N, N), "2b"),
                (tr(N, P, N), "3b"),
                (tr(N, N, N), "4b"),
                (TriadClass::Cyclic { accusations: 0 }, "1c"),
                (TriadClass::Cyclic { accusations: 1 }, "2c"),
                (TriadClass::Cyclic { accusations: 2 }, "3c"),
                (TriadClass::Cyclic { accusations: 3 }, "4c"),
            ],
        }
    }
}

impl TriadLabels {
    pub fn label(&self, class: TriadClass) -> &'static str {
        self.labels
            .iter()
            .find(|(c, _)| *c == class)
            .map(|(_, l)| *l)
            .expect("label table covers every class")
    }

    pub fn class(&self, label: &str) -> Option<TriadClass> {
        self.labels
            .iter()
            .find(|(_, l)| *l == label)
            .map(|(c, _)| *c)
    }

    /// Exchanges the labels of two classes with the same accusation count.
    pub fn swap(&mut self, a: TriadClass, b: TriadClass) -> Result<()> {
        if a.accusations() != b.accusations() {
            return Err(Error::InvalidConfig(format!(
                "cannot swap labels of {a} and {b}: different accusation counts"
            )));
        }
        let ia = self
            .labels
            .iter()
            .position(|(c, _)| *c == a)
            .expect("class listed");
        let ib = self
            .labels
            .iter()
            .position(|(c, _)| *c == b)
            .expect("class listed");
        let (la, lb) = (self.labels[ia].1, self.labels[ib].1);
        self.labels[ia].1 = lb;
        self.labels[ib].1 = la;
        Ok(())
    }
}

/// A classified edge triangle with its nodes in role order.
///
/// For transitive classes `nodes` is `[source, mid, sink]`. For cyclic classes
/// the edges are `nodes[0] -> nodes[1] -> nodes[2] -> nodes[0]`, rotated so
/// that a lone accusation is `nodes[2] ⊣ nodes[0]`, a lone endorsement is
/// `nodes[0] -> nodes[1]`, and otherwise the smallest id comes first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriadInstance {
    pub class: TriadClass,
    pub nodes: [NodeId; 3],
}

impl TriadInstance {
    /// The node an inconsistent instance implicates.
    pub fn implicated(&self) -> Option<NodeId> {
        self.class.inconsistency().map(|_| self.nodes[0])
    }
}

/// Classifies three directed edges that cover the three pairs of a node
/// triple.
pub fn classify_edge_triangle(edges: [(NodeId, NodeId, Sign); 3]) -> TriadInstance {
    let mut nodes: Vec<NodeId> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    debug_assert_eq!(nodes.len(), 3, "edge triangle must span three nodes");
    let out_deg = |x: NodeId| edges.iter().filter(|e| e.0 == x).count();
    let sign_of = |a: NodeId, b: NodeId| {
        edges
            .iter()
            .find(|e| e.0 == a && e.1 == b)
            .map(|e| e.2)
            .expect("edge present in triangle")
    };

    if let Some(&source) = nodes.iter().find(|&&x| out_deg(x) == 2) {
        let sink = *nodes
            .iter()
            .find(|&&x| out_deg(x) == 0)
            .expect("transitive triangle has a sink");
        let mid = *nodes
            .iter()
            .find(|&&x| x != source && x != sink)
            .expect("three nodes");
        return TriadInstance {
            class: tr(
                sign_of(source, mid),
                sign_of(mid, sink),
                sign_of(source, sink),
            ),
            nodes: [source, mid, sink],
        };
    }

    // Cyclic: walk the cycle starting from the smallest node.
    let next = |x: NodeId| {
        edges
            .iter()
            .find(|e| e.0 == x)
            .map(|e| e.1)
            .expect("cycle edge")
    };
    let start = nodes[0];
    let cycle = [start, next(start), next(next(start))];
    let signs = [
        sign_of(cycle[0], cycle[1]),
        sign_of(cycle[1], cycle[2]),
        sign_of(cycle[2], cycle[0]),
    ];
    let accusations = signs.iter().filter(|s| s.is_accuse()).count() as u8;
    let rotate_to = |first: usize| [cycle[first], cycle[(first + 1) % 3], cycle[(first + 2) % 3]];
    let nodes = match accusations {
        1 => {
            // accusation on edge i goes cycle[i] -> cycle[i+1]; its target leads.
            let i = signs
                .iter()
                .position(|s| s.is_accuse())
                .expect("one accusation");
            rotate_to((i + 1) % 3)
        }
        2 => {
            let i = signs
                .iter()
                .position(|s| s.is_endorse())
                .expect("one endorsement");
            rotate_to(i)
        }
        _ => cycle,
    };
    TriadInstance {
        class: TriadClass::Cyclic { accusations },
        nodes,
    }
}

/// Classifies a node triple. `None` unless every pair of the triple carries
/// exactly one directed edge.
pub fn classify_triad(g: &SignedDigraph, triple: [NodeId; 3]) -> Option<TriadInstance> {
    let [a, b, c] = triple;
    if a == b || b == c || a == c {
        return None;
    }
    let one = |x: NodeId, y: NodeId| match (g.sign(x, y), g.sign(y, x)) {
        (Some(s), None) => Some((x, y, s)),
        (None, Some(s)) => Some((y, x, s)),
        _ => None,
    };
    Some(classify_edge_triangle([one(a, b)?, one(b, c)?, one(a, c)?]))
}

/// Instance count and summed motif weight (minimum edge weight per instance).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tally {
    pub count: u64,
    pub weight: f64,
}

impl Tally {
    fn add(&mut self, weight: f64) {
        self.count += 1;
        self.weight += weight;
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MotifCensus {
    pub dyads: [Tally; 5],
    pub triads: [Tally; 12],
    /// Node triples with all three pairs connected.
    pub closed_triples: u64,
    /// Closed triples with at least one reciprocated pair; these contribute
    /// more than one edge triangle each.
    pub reciprocated_triples: u64,
}

impl MotifCensus {
    pub fn dyad(&self, class: DyadClass) -> Tally {
        self.dyads[class.index()]
    }

    pub fn triad(&self, class: TriadClass) -> Tally {
        self.triads[class.index()]
    }

    pub fn total_triads(&self) -> u64 {
        self.triads.iter().map(|t| t.count).sum()
    }
}

/// Counts every connected pair once and every edge triangle once.
pub fn census(g: &SignedDigraph) -> MotifCensus {
    let n = g.node_count();
    let mut out = MotifCensus::default();

    // Undirected neighbour lists, sorted.
    let mut nbrs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (u, v, _) in g.edges() {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    for list in &mut nbrs {
        list.sort_unstable();
        list.dedup();
    }

    let pair_edges = |x: NodeId, y: NodeId| {
        let mut es: Vec<(NodeId, NodeId, Sign, f64)> = Vec::with_capacity(2);
        if let Some(e) = g.edge(x, y) {
            es.push((x, y, e.sign, e.weight));
        }
        if let Some(e) = g.edge(y, x) {
            es.push((y, x, e.sign, e.weight));
        }
        es
    };

    for u in 0..n {
        for &v in nbrs[u].iter().filter(|&&v| v > u) {
            if let Some(class) = classify_dyad(g, u, v) {
                let w = pair_edges(u, v)
                    .iter()
                    .map(|e| e.3)
                    .fold(f64::INFINITY, f64::min);
                out.dyads[class.index()].add(w);
            }
        }
    }

    for a in 0..n {
        for &b in nbrs[a].iter().filter(|&&b| b > a) {
            // common neighbours c > b
            let (na, nb) = (&nbrs[a], &nbrs[b]);
            let (mut i, mut j) = (
                na.partition_point(|&x| x <= b),
                nb.partition_point(|&x| x <= b),
            );
            while i < na.len() && j < nb.len() {
                match na[i].cmp(&nb[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let c = na[i];
                        let (ab, bc, ac) = (pair_edges(a, b), pair_edges(b, c), pair_edges(a, c));
                        out.closed_triples += 1;
                        if ab.len() > 1 || bc.len() > 1 || ac.len() > 1 {
                            out.reciprocated_triples += 1;
                        }
                        for e1 in &ab {
                            for e2 in &bc {
                                for e3 in &ac {
                                    let inst = classify_edge_triangle([
                                        (e1.0, e1.1, e1.2),
                                        (e2.0, e2.1, e2.2),
                                        (e3.0, e3.1, e3.2),
                                    ]);
                                    out.triads[inst.class.index()].add(e1.3.min(e2.3).min(e3.3));
                                }
                            }
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MotifKind {
    InconsistentDyad,
    TypeI,
    TypeII,
    TypeIII,
    /// `v ⊣ u` for some `v` endorsement-downstream of `u`.
    DeepAccusedByDownstream,
    /// `u ⊣ v` for some `v` endorsement-downstream of `u`.
    DeepAccusesDownstream,
    /// `v ⊣ w` for `v, w` both endorsement-downstream of `u`.
    DeepDownstreamConflict,
}

impl MotifKind {
    pub fn is_deep(self) -> bool {
        matches!(
            self,
            MotifKind::DeepAccusedByDownstream
                | MotifKind::DeepAccusesDownstream
                | MotifKind::DeepDownstreamConflict
        )
    }
}

impl From<TriangleType> for MotifKind {
    fn from(t: TriangleType) -> Self {
        match t {
            TriangleType::TypeI => MotifKind::TypeI,
            TriangleType::TypeII => MotifKind::TypeII,
            TriangleType::TypeIII => MotifKind::TypeIII,
        }
    }
}

/// A node implicated by a motif instance.
///
/// Witness layouts: dyad `[u, v]` with `u -> v`, `v ⊣ u`; triangles
/// `[u, a, b]` as in [`TriangleType`]; deep accusation motifs `[u, v]`;
/// deep conflicts `[u, v, w]` with `v ⊣ w`. The implicated node is always
/// `witness[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Implication {
    pub implicated: NodeId,
    pub motif: MotifKind,
    pub witness: Vec<NodeId>,
}

impl Implication {
    /// Re-checks the witness against `g`.
    pub fn replay(&self, g: &SignedDigraph) -> bool {
        let w = &self.witness;
        if w.first() != Some(&self.implicated) {
            return false;
        }
        let reach = |from: NodeId, to: NodeId| {
            g.downstream_set(&NodeSet::from([from]), Closure::Strict)
                .map(|s| s.contains(&to))
                .unwrap_or(false)
        };
        match (self.motif, w.as_slice()) {
            (MotifKind::InconsistentDyad, &[u, v]) => g.endorses(u, v) && g.accuses(v, u),
            (MotifKind::TypeI, &[u, a, b]) => {
                g.endorses(u, a) && g.endorses(u, b) && g.accuses(a, b)
            }
            (MotifKind::TypeII, &[u, a, b]) => {
                g.endorses(u, a) && g.endorses(a, b) && g.accuses(u, b)
            }
            (MotifKind::TypeIII, &[u, a, b]) => {
                g.endorses(u, a) && g.endorses(a, b) && g.accuses(b, u)
            }
            (MotifKind::DeepAccusesDownstream, &[u, v]) => g.accuses(u, v) && reach(u, v),
            (MotifKind::DeepAccusedByDownstream, &[u, v]) => g.accuses(v, u) && reach(u, v),
            (MotifKind::DeepDownstreamConflict, &[u, v, x]) => {
                v != u && x != u && g.accuses(v, x) && reach(u, v) && reach(u, x)
            }
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// Edges and triangles only.
    Local,
    /// Endorsement paths of any length.
    Deep,
}

/// Inconsistent triangles in which `u` is the implicated node, as
/// `(type, [u, a, b])`, in ascending witness order.
pub fn implicating_triangles(g: &SignedDigraph, u: NodeId) -> Vec<(TriangleType, [NodeId; 3])> {
    let mut out = Vec::new();
    let endorsed = g.out_endorsements(u);
    for &a in endorsed {
        for &b in g.out_accusations(a) {
            if b != u && endorsed.contains(&b) {
                out.push((TriangleType::TypeI, [u, a, b]));
            }
        }
        for &b in g.out_endorsements(a) {
            if b == u {
                continue;
            }
            if g.accuses(u, b) {
                out.push((TriangleType::TypeII, [u, a, b]));
            }
            if g.accuses(b, u) {
                out.push((TriangleType::TypeIII, [u, a, b]));
            }
        }
    }
    out.sort_unstable_by_key(|&(t, w)| (w, t));
    out
}

/// Mixed dyads `u -> v`, `v ⊣ u` in which `u` is the endorser.
pub fn implicating_dyads(g: &SignedDigraph, u: NodeId) -> Vec<NodeId> {
    g.out_endorsements(u)
        .iter()
        .copied()
        .filter(|&v| g.accuses(v, u))
        .collect()
}

/// Path-depth implications of `u`: accusations between `u` and a node it
/// reaches by endorsements, and accusations between two such nodes.
pub fn deep_implications_of(g: &SignedDigraph, u: NodeId) -> Vec<Implication> {
    let down = g
        .downstream_set(&NodeSet::from([u]), Closure::Strict)
        .expect("single valid node");
    let mut out = Vec::new();
    for &v in down.iter().filter(|&&v| v != u) {
        if g.accuses(u, v) {
            out.push(Implication {
                implicated: u,
                motif: MotifKind::DeepAccusesDownstream,
                witness: vec![u, v],
            });
        }
        if g.accuses(v, u) {
            out.push(Implication {
                implicated: u,
                motif: MotifKind::DeepAccusedByDownstream,
                witness: vec![u, v],
            });
        }
        for &w in g.out_accusations(v) {
            if w != u && down.contains(&w) {
                out.push(Implication {
                    implicated: u,
                    motif: MotifKind::DeepDownstreamConflict,
                    witness: vec![u, v, w],
                });
            }
        }
    }
    out
}

fn local_implications_of(g: &SignedDigraph, u: NodeId) -> Vec<Implication> {
    let dyads = implicating_dyads(g, u).into_iter().map(|v| Implication {
        implicated: u,
        motif: MotifKind::InconsistentDyad,
        witness: vec![u, v],
    });
    let triangles = implicating_triangles(g, u)
        .into_iter()
        .map(|(t, w)| Implication {
            implicated: u,
            motif: t.into(),
            witness: w.to_vec(),
        });
    dyads.chain(triangles).collect()
}

/// Every implication in the graph. At [`Depth::Deep`] local records are kept
/// and deep records are added unless a record with the same implicated node
/// and node set already exists.
pub fn inconsistent_implications(g: &SignedDigraph, depth: Depth) -> Vec<Implication> {
    let mut keyed: BTreeMap<(NodeId, Vec<NodeId>, MotifKind), Implication> = BTreeMap::new();
    let mut seen: std::collections::HashSet<(NodeId, Vec<NodeId>)> = Default::default();
    for u in g.nodes() {
        let mut records = local_implications_of(g, u);
        if depth == Depth::Deep {
            records.extend(deep_implications_of(g, u));
        }
        for imp in records {
            let mut sorted = imp.witness.clone();
            sorted.sort_unstable();
            if seen.insert((imp.implicated, sorted.clone())) {
                keyed.insert((imp.implicated, sorted, imp.motif), imp);
            }
        }
    }
    keyed.into_values().collect()
}

/// Expected count and expected summed weight of one motif class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Expectation {
    pub count: f64,
    pub weight: f64,
}

/// Erdős–Rényi baseline: every ordered pair independently carries an
/// endorsement with probability `p_plus`, an accusation with `p_minus`, and
/// nothing otherwise. Weights are drawn from the observed per-sign weights.
#[derive(Clone, Debug, PartialEq)]
pub struct NullExpectation {
    pub n: usize,
    pub p_plus: f64,
    pub p_minus: f64,
    pub positive_weights: Vec<f64>,
    pub negative_weights: Vec<f64>,
    /// The graph had no edges; every expectation is zero.
    pub degenerate: bool,
    pub dyads: [Expectation; 5],
    pub triads: [Expectation; 12],
}

impl NullExpectation {
    pub fn dyad(&self, class: DyadClass) -> Expectation {
        self.dyads[class.index()]
    }

    pub fn triad(&self, class: TriadClass) -> Expectation {
        self.triads[class.index()]
    }
}

/// Exact expectation of the minimum of independent draws, one from each of
/// the given empirical distributions (each sorted ascending).
pub fn expected_min(dists: &[&[f64]]) -> f64 {
    if dists.is_empty() || dists.iter().any(|d| d.is_empty()) {
        return 0.0;
    }
    let mut values: Vec<f64> = dists.iter().flat_map(|d| d.iter().copied()).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let survival = |x: f64| -> f64 {
        dists
            .iter()
            .map(|d| (d.len() - d.partition_point(|&y| y < x)) as f64 / d.len() as f64)
            .product()
    };
    let mut total = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let next = values.get(i + 1).map_or(0.0, |&y| survival(y));
        total += x * (survival(x) - next);
    }
    total
}

pub fn null_expectations(g: &SignedDigraph) -> Result<NullExpectation> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "null model needs at least 3 nodes, got {n}"
        )));
    }
    let ordered_pairs = (n * (n - 1)) as f64;
    let mut positive_weights = Vec::new();
    let mut negative_weights = Vec::new();
    for (_, _, e) in g.edges() {
        match e.sign {
            Sign::Endorse => positive_weights.push(e.weight),
            Sign::Accuse => negative_weights.push(e.weight),
        }
    }
    positive_weights.sort_by(f64::total_cmp);
    negative_weights.sort_by(f64::total_cmp);
    let p_plus = positive_weights.len() as f64 / ordered_pairs;
    let p_minus = negative_weights.len() as f64 / ordered_pairs;
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    let triples = nf * (nf - 1.0) * (nf - 2.0) / 6.0;
    let pos = positive_weights.as_slice();
    let neg = negative_weights.as_slice();
    let absent = 1.0 - p_plus - p_minus;

    let mut dyads = [Expectation::default(); 5];
    for class in DyadClass::ALL {
        let (count, draws): (f64, Vec<&[f64]>) = match class {
            DyadClass::MutualEndorse => (pairs * p_plus * p_plus, vec![pos, pos]),
            DyadClass::Mixed => (pairs * 2.0 * p_plus * p_minus, vec![pos, neg]),
            DyadClass::MutualAccuse => (pairs * p_minus * p_minus, vec![neg, neg]),
            DyadClass::SingleEndorse => (pairs * 2.0 * p_plus * absent, vec![pos]),
            DyadClass::SingleAccuse => (pairs * 2.0 * p_minus * absent, vec![neg]),
        };
        dyads[class.index()] = Expectation {
            count,
            weight: count * expected_min(&draws),
        };
    }

    let mut triads = [Expectation::default(); 12];
    for class in TriadClass::ALL {
        let k = class.accusations() as i32;
        let count =
            triples * class.labeled_multiplicity() as f64 * p_plus.powi(3 - k) * p_minus.powi(k);
        let mut draws: Vec<&[f64]> = vec![pos; (3 - k) as usize];
        draws.extend(std::iter::repeat_n(neg, k as usize));
        triads[class.index()] = Expectation {
            count,
            weight: count * expected_min(&draws),
        };
    }

    Ok(NullExpectation {
        n,
        p_plus,
        p_minus,
        positive_weights,
        negative_weights,
        degenerate: g.edge_count() == 0,
        dyads,
        triads,
    })
}

/// One row of an observed-versus-expected table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub class: String,
    pub observed: u64,
    pub expected: f64,
    pub ratio: f64,
    pub normalized_ratio: f64,
    pub observed_weight: f64,
    pub expected_weight: f64,
    pub weight_ratio: f64,
    pub normalized_weight_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusReport {
    pub nodes: usize,
    pub edges: usize,
    pub p_plus: f64,
    pub p_minus: f64,
    pub dyads: Vec<ReportRow>,
    pub triads: Vec<ReportRow>,
}

fn ratio(observed: f64, expected: f64) -> f64 {
    if expected > 0.0 {
        observed / expected
    } else if observed > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// Median of the finite values; the mean of the two middle values for an
/// even count.
pub fn finite_median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

fn normalize(rows: &mut [ReportRow]) {
    let m = finite_median(&rows.iter().map(|r| r.ratio).collect::<Vec<_>>());
    let mw = finite_median(&rows.iter().map(|r| r.weight_ratio).collect::<Vec<_>>());
    for r in rows {
        r.normalized_ratio = m.map_or(f64::NAN, |m| r.ratio / m);
        r.normalized_weight_ratio = mw.map_or(f64::NAN, |m| r.weight_ratio / m);
    }
}

fn row(label: &str, class: String, observed: Tally, expected: Expectation) -> ReportRow {
    ReportRow {
        label: label.to_string(),
        class,
        observed: observed.count,
        expected: expected.count,
        ratio: ratio(observed.count as f64, expected.count),
        normalized_ratio: f64::NAN,
        observed_weight: observed.weight,
        expected_weight: expected.weight,
        weight_ratio: ratio(observed.weight, expected.weight),
        normalized_weight_ratio: f64::NAN,
    }
}

/// Observed versus expected motif table: the three reciprocated dyad classes
/// and all twelve triad classes, each table scaled by its own median ratio.
pub fn census_report(g: &SignedDigraph) -> Result<CensusReport> {
    census_report_with(
        g,
        &census(g),
        &null_expectations(g)?,
        &TriadLabels::default(),
    )
}

pub fn census_report_with(
    g: &SignedDigraph,
    observed: &MotifCensus,
    expected: &NullExpectation,
    labels: &TriadLabels,
) -> Result<CensusReport> {
    let mut dyads: Vec<ReportRow> = DyadClass::RECIPROCATED
        .iter()
        .map(|&c| {
            row(
                c.table_label(),
                c.to_string(),
                observed.dyad(c),
                expected.dyad(c),
            )
        })
        .collect();
    let mut triads: Vec<ReportRow> = TriadClass::ALL
        .iter()
        .map(|&c| {
            row(
                labels.label(c),
                c.to_string(),
                observed.triad(c),
                expected.triad(c),
            )
        })
        .collect();
    normalize(&mut dyads);
    normalize(&mut triads);
    Ok(CensusReport {
        nodes: g.node_count(),
        edges: g.edge_count(),
        p_plus: expected.p_plus,
        p_minus: expected.p_minus,
        dyads,
        triads,
    })
}
