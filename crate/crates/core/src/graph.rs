//! Signed directed graph plus the reachability, SCC and set predicates the
//! rest of the crate is built on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Dense node index; ids of a graph with `n` nodes are `0..n`.
pub type NodeId = usize;

/// Ordered node set. Ordered so that every derived output is deterministic.
pub type NodeSet = BTreeSet<NodeId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Endorse,
    Accuse,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Endorse => Sign::Accuse,
            Sign::Accuse => Sign::Endorse,
        }
    }

    pub fn is_endorse(self) -> bool {
        self == Sign::Endorse
    }

    pub fn is_accuse(self) -> bool {
        self == Sign::Accuse
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Endorse => f.write_str("+"),
            Sign::Accuse => f.write_str("\u{2212}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub sign: Sign,
    pub weight: f64,
}

/// Which closure of a reachability query to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// Only nodes reached by a non-empty endorsement path.
    Strict,
    /// The strict set plus the query set itself.
    Reflexive,
}

/// A simple signed digraph: no self-loops and at most one edge per ordered
/// pair. Both `u -> v` and `v -> u` may exist, with independent signs.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedDigraph {
    n: usize,
    edges: BTreeMap<(NodeId, NodeId), Edge>,
    out_endorse: Vec<BTreeSet<NodeId>>,
    out_accuse: Vec<BTreeSet<NodeId>>,
    in_endorse: Vec<BTreeSet<NodeId>>,
    in_accuse: Vec<BTreeSet<NodeId>>,
}

impl SignedDigraph {
    pub fn new(n: usize) -> Self {
        SignedDigraph {
            n,
            edges: BTreeMap::new(),
            out_endorse: vec![BTreeSet::new(); n],
            out_accuse: vec![BTreeSet::new(); n],
            in_endorse: vec![BTreeSet::new(); n],
            in_accuse: vec![BTreeSet::new(); n],
        }
    }

    /// Builds a graph from unit-weight signed edges.
    pub fn from_signed_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Sign)>,
    {
        let mut g = SignedDigraph::new(n);
        for (u, v, s) in edges {
            g.add_edge(u, v, s, 1.0)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endorsement_count(&self) -> usize {
        self.out_endorse.iter().map(BTreeSet::len).sum()
    }

    pub fn accusation_count(&self) -> usize {
        self.out_accuse.iter().map(BTreeSet::len).sum()
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if u < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: u, n: self.n })
        }
    }

    /// Inserts `u -> v`, replacing any edge already on that ordered pair.
    /// Returns the replaced edge.
    pub fn add_edge(
        &mut self,
        u: NodeId,
        v: NodeId,
        sign: Sign,
        weight: f64,
    ) -> Result<Option<Edge>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight(weight));
        }
        let previous = self.remove_edge(u, v);
        self.edges.insert((u, v), Edge { sign, weight });
        self.index_insert(u, v, sign);
        Ok(previous)
    }

    pub fn endorse(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.add_edge(u, v, Sign::Endorse, 1.0).map(|_| ())
    }

    pub fn accuse(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.add_edge(u, v, Sign::Accuse, 1.0).map(|_| ())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Option<Edge> {
        let removed = self.edges.remove(&(u, v))?;
        self.index_remove(u, v, removed.sign);
        Some(removed)
    }

    /// Changes the sign of an existing edge, keeping its weight. Returns the
    /// previous sign.
    pub fn set_sign(&mut self, u: NodeId, v: NodeId, sign: Sign) -> Result<Sign> {
        let edge = self
            .edges
            .get_mut(&(u, v))
            .ok_or_else(|| Error::Precondition(format!("no edge {u} -> {v} to re-sign")))?;
        let previous = edge.sign;
        if previous != sign {
            edge.sign = sign;
            self.index_remove(u, v, previous);
            self.index_insert(u, v, sign);
        }
        Ok(previous)
    }

    /// Flips the sign of an existing edge and returns the new sign.
    pub fn flip(&mut self, u: NodeId, v: NodeId) -> Result<Sign> {
        let current = self
            .sign(u, v)
            .ok_or_else(|| Error::Precondition(format!("no edge {u} -> {v} to flip")))?;
        self.set_sign(u, v, current.flipped())?;
        Ok(current.flipped())
    }

    fn index_insert(&mut self, u: NodeId, v: NodeId, sign: Sign) {
        match sign {
            Sign::Endorse => {
                self.out_endorse[u].insert(v);
                self.in_endorse[v].insert(u);
            }
            Sign::Accuse => {
                self.out_accuse[u].insert(v);
                self.in_accuse[v].insert(u);
            }
        }
    }

    fn index_remove(&mut self, u: NodeId, v: NodeId, sign: Sign) {
        match sign {
            Sign::Endorse => {
                self.out_endorse[u].remove(&v);
                self.in_endorse[v].remove(&u);
            }
            Sign::Accuse => {
                self.out_accuse[u].remove(&v);
                self.in_accuse[v].remove(&u);
            }
        }
    }

    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<Edge> {
        self.edges.get(&(u, v)).copied()
    }

    pub fn sign(&self, u: NodeId, v: NodeId) -> Option<Sign> {
        self.edges.get(&(u, v)).map(|e| e.sign)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains_key(&(u, v))
    }

    pub fn endorses(&self, u: NodeId, v: NodeId) -> bool {
        self.sign(u, v) == Some(Sign::Endorse)
    }

    pub fn accuses(&self, u: NodeId, v: NodeId) -> bool {
        self.sign(u, v) == Some(Sign::Accuse)
    }

    pub fn out_endorsements(&self, u: NodeId) -> &BTreeSet<NodeId> {
        &self.out_endorse[u]
    }

    pub fn out_accusations(&self, u: NodeId) -> &BTreeSet<NodeId> {
        &self.out_accuse[u]
    }

    pub fn in_endorsements(&self, u: NodeId) -> &BTreeSet<NodeId> {
        &self.in_endorse[u]
    }

    pub fn in_accusations(&self, u: NodeId) -> &BTreeSet<NodeId> {
        &self.in_accuse[u]
    }

    /// All edges in ascending `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Edge)> + '_ {
        self.edges.iter().map(|(&(u, v), &e)| (u, v, e))
    }

    /// Every ordered pair has an edge.
    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1)
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> SignedDigraph {
        let mut r = SignedDigraph::new(self.n);
        for (u, v, e) in self.edges() {
            r.edges.insert((v, u), e);
            r.index_insert(v, u, e.sign);
        }
        r
    }

    /// Subgraph induced by `nodes`. Returns the subgraph together with the
    /// map from new ids to original ids (ascending).
    pub fn induced_subgraph(&self, nodes: &NodeSet) -> Result<(SignedDigraph, Vec<NodeId>)> {
        for &u in nodes {
            self.check_node(u)?;
        }
        let original: Vec<NodeId> = nodes.iter().copied().collect();
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in original.iter().enumerate() {
            local[u] = i;
        }
        let mut sub = SignedDigraph::new(original.len());
        for (u, v, e) in self.edges() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                sub.add_edge(local[u], local[v], e.sign, e.weight)?;
            }
        }
        Ok((sub, original))
    }

    /// Checks that the adjacency indexes agree with the edge map.
    pub fn audit(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        let mut indexed = 0;
        for u in self.nodes() {
            for (set, sign) in [
                (&self.out_endorse[u], Sign::Endorse),
                (&self.out_accuse[u], Sign::Accuse),
            ] {
                for &v in set {
                    indexed += 1;
                    if self.sign(u, v) != Some(sign) {
                        return fail(format!(
                            "out-index has {u} -> {v} as {sign} but edge map disagrees"
                        ));
                    }
                }
            }
            for (set, sign) in [
                (&self.in_endorse[u], Sign::Endorse),
                (&self.in_accuse[u], Sign::Accuse),
            ] {
                for &w in set {
                    if self.sign(w, u) != Some(sign) {
                        return fail(format!(
                            "in-index has {w} -> {u} as {sign} but edge map disagrees"
                        ));
                    }
                }
            }
        }
        if indexed != self.edges.len() {
            return fail(format!(
                "{indexed} indexed edges but {} stored",
                self.edges.len()
            ));
        }
        for (&(u, v), e) in &self.edges {
            if u == v || u >= self.n || v >= self.n {
                return fail(format!("malformed edge {u} -> {v}"));
            }
            if !(e.weight > 0.0) {
                return fail(format!("non-positive weight on {u} -> {v}"));
            }
        }
        Ok(())
    }

    fn check_set(&self, set: &NodeSet) -> Result<()> {
        if set.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        set.iter().try_for_each(|&u| self.check_node(u))
    }

    /// Nodes reachable from `from` along endorsement edges.
    pub fn downstream_set(&self, from: &NodeSet, closure: Closure) -> Result<NodeSet> {
        self.check_set(from)?;
        Ok(self.reach(from, closure, |u| &self.out_endorse[u], None))
    }

    /// Nodes with an endorsement path into `to`. With `restrict`, only paths
    /// inside the subgraph induced by `restrict` count, and query nodes outside
    /// it are ignored.
    pub fn upstream_set(
        &self,
        to: &NodeSet,
        restrict: Option<&NodeSet>,
        closure: Closure,
    ) -> Result<NodeSet> {
        self.check_set(to)?;
        if let Some(r) = restrict {
            r.iter().try_for_each(|&u| self.check_node(u))?;
        }
        Ok(self.reach(to, closure, |u| &self.in_endorse[u], restrict))
    }

    fn reach<'a, F>(
        &'a self,
        seeds: &NodeSet,
        closure: Closure,
        next: F,
        restrict: Option<&NodeSet>,
    ) -> NodeSet
    where
        F: Fn(NodeId) -> &'a BTreeSet<NodeId>,
    {
        let allowed = |u: NodeId| restrict.is_none_or(|r| r.contains(&u));
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in seeds.iter().filter(|&&s| allowed(s)) {
            for &w in next(s) {
                if allowed(w) && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in next(u) {
                if allowed(w) && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut out: NodeSet = (0..self.n).filter(|&u| seen[u]).collect();
        if closure == Closure::Reflexive {
            out.extend(seeds.iter().copied().filter(|&s| allowed(s)));
        }
        out
    }

    /// Strongly connected components of the endorsement subgraph. Each
    /// component is sorted and components are ordered by smallest member.
    pub fn endorsement_sccs(&self) -> Vec<Vec<NodeId>> {
        let mut comps = tarjan(self.n, |u| self.out_endorse[u].iter().copied());
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort_unstable_by_key(|c| c[0]);
        comps
    }

    /// Condensation of the endorsement subgraph. Meta-node weights are
    /// component sizes, or sums of `node_weights` when supplied.
    pub fn scc_condense(&self, node_weights: Option<&[f64]>) -> Result<CondensedGraph> {
        if let Some(w) = node_weights {
            if w.len() != self.n {
                return Err(Error::Precondition(format!(
                    "{} node weights supplied for {} nodes",
                    w.len(),
                    self.n
                )));
            }
        }
        let components = self.endorsement_sccs();
        let mut membership = vec![0; self.n];
        for (i, c) in components.iter().enumerate() {
            for &u in c {
                membership[u] = i;
            }
        }
        let weights = components
            .iter()
            .map(|c| match node_weights {
                Some(w) => c.iter().map(|&u| w[u]).sum(),
                None => c.len() as f64,
            })
            .collect();
        let mut endorse_edges = BTreeSet::new();
        let mut accuse_edges = BTreeSet::new();
        for (u, v, e) in self.edges() {
            let (a, b) = (membership[u], membership[v]);
            if a == b {
                continue;
            }
            match e.sign {
                Sign::Endorse => endorse_edges.insert((a, b)),
                Sign::Accuse => accuse_edges.insert((a, b)),
            };
        }
        Ok(CondensedGraph {
            components,
            membership,
            weights,
            endorse_edges,
            accuse_edges,
        })
    }

    /// No member of `q` accuses another member of `q`.
    pub fn is_self_consistent(&self, q: &NodeSet) -> bool {
        q.iter()
            .all(|&u| self.out_accuse[u].iter().all(|v| !q.contains(v)))
    }

    /// No member of `q` endorses a node outside `q`.
    pub fn is_insular(&self, q: &NodeSet) -> bool {
        q.iter()
            .all(|&u| self.out_endorse[u].iter().all(|v| q.contains(v)))
    }
}

/// Iterative Tarjan SCC over an adjacency function.
fn tarjan<F, I>(n: usize, succ: F) -> Vec<Vec<NodeId>>
where
    F: Fn(NodeId) -> I,
    I: Iterator<Item = NodeId>,
{
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(NodeId, Vec<NodeId>, usize)> = Vec::new();
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root).collect(), 0));

        while let Some((v, children, pos)) = call.last_mut() {
            let v = *v;
            if *pos < children.len() {
                let w = children[*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some((parent, _, _)) = call.last() {
                low[*parent] = low[*parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

/// Condensation of the endorsement subgraph.
#[derive(Clone, Debug, PartialEq)]
pub struct CondensedGraph {
    /// Sorted members of each meta-node.
    pub components: Vec<Vec<NodeId>>,
    /// Meta-node of every original node.
    pub membership: Vec<usize>,
    pub weights: Vec<f64>,
    /// Endorsement edges between distinct meta-nodes.
    pub endorse_edges: BTreeSet<(usize, usize)>,
    /// Accusation edges between distinct meta-nodes.
    pub accuse_edges: BTreeSet<(usize, usize)>,
}

impl CondensedGraph {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Kahn order of the endorsement meta-edges, `None` if they contain a
    /// cycle (which would mean the condensation is broken).
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let k = self.len();
        let mut indeg = vec![0usize; k];
        let mut succ = vec![Vec::new(); k];
        for &(a, b) in &self.endorse_edges {
            indeg[b] += 1;
            succ[a].push(b);
        }
        let mut queue: VecDeque<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &d in &succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        (order.len() == k).then_some(order)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Honest,
    Cheater,
}

/// Ground-truth split of the nodes into honest players and cheaters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    roles: Vec<Role>,
}

impl Partition {
    pub fn new(roles: Vec<Role>) -> Self {
        Partition { roles }
    }

    pub fn from_honest(n: usize, honest: &NodeSet) -> Self {
        Partition {
            roles: (0..n)
                .map(|u| {
                    if honest.contains(&u) {
                        Role::Honest
                    } else {
                        Role::Cheater
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn role(&self, u: NodeId) -> Role {
        self.roles[u]
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn is_honest(&self, u: NodeId) -> bool {
        self.roles[u] == Role::Honest
    }

    pub fn honest(&self) -> NodeSet {
        (0..self.roles.len())
            .filter(|&u| self.is_honest(u))
            .collect()
    }

    pub fn cheaters(&self) -> NodeSet {
        (0..self.roles.len())
            .filter(|&u| !self.is_honest(u))
            .collect()
    }

    pub fn honest_count(&self) -> usize {
        self.roles.iter().filter(|&&r| r == Role::Honest).count()
    }

    pub fn cheater_count(&self) -> usize {
        self.roles.len() - self.honest_count()
    }

    /// Honest nodes endorse only honest nodes and accuse only cheaters.
    pub fn honest_constraint_holds(&self, g: &SignedDigraph) -> bool {
        self.roles.len() == g.node_count()
            && g.edges().all(|(u, v, e)| {
                !self.is_honest(u)
                    || match e.sign {
                        Sign::Endorse => self.is_honest(v),
                        Sign::Accuse => !self.is_honest(v),
                    }
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Accuse as A, Endorse as E};

    fn set(xs: &[NodeId]) -> NodeSet {
        xs.iter().copied().collect()
    }

    fn graph(n: usize, edges: &[(NodeId, NodeId, Sign)]) -> SignedDigraph {
        SignedDigraph::from_signed_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn add_edge_basic_and_replacement() {
        let mut g = SignedDigraph::new(2);
        g.add_edge(0, 1, E, 1.0).unwrap();
        assert_eq!(g.endorsement_count(), 1);
        let prev = g.add_edge(0, 1, A, 1.0).unwrap();
        assert_eq!(prev.map(|e| e.sign), Some(E));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.accusation_count(), 1);
        assert_eq!(g.endorsement_count(), 0);
        g.audit().unwrap();
    }

    #[test]
    fn add_edge_rejects_bad_input() {
        let mut g = SignedDigraph::new(2);
        assert!(matches!(g.add_edge(0, 0, E, 1.0), Err(Error::SelfLoop(0))));
        assert!(matches!(
            g.add_edge(0, 2, E, 1.0),
            Err(Error::NodeOutOfRange { node: 2, n: 2 })
        ));
        assert!(matches!(
            g.add_edge(0, 1, E, 0.0),
            Err(Error::InvalidWeight(_))
        ));
        assert!(matches!(
            g.add_edge(0, 1, E, -2.0),
            Err(Error::InvalidWeight(_))
        ));
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn both_directions_are_independent() {
        let g = graph(2, &[(0, 1, E), (1, 0, A)]);
        assert!(g.endorses(0, 1));
        assert!(g.accuses(1, 0));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn downstream_examples() {
        let g = graph(3, &[(0, 1, E), (1, 2, E)]);
        assert_eq!(
            g.downstream_set(&set(&[0]), Closure::Reflexive).unwrap(),
            set(&[0, 1, 2])
        );
        assert_eq!(
            g.downstream_set(&set(&[0]), Closure::Strict).unwrap(),
            set(&[1, 2])
        );

        let g = graph(3, &[(0, 1, E), (1, 2, A)]);
        assert_eq!(
            g.downstream_set(&set(&[0]), Closure::Reflexive).unwrap(),
            set(&[0, 1])
        );

        let g = graph(3, &[(0, 1, E), (1, 2, E), (2, 0, E)]);
        assert_eq!(
            g.downstream_set(&set(&[1]), Closure::Reflexive).unwrap(),
            set(&[0, 1, 2])
        );
        // On a cycle the strict closure contains the seed too.
        assert_eq!(
            g.downstream_set(&set(&[1]), Closure::Strict).unwrap(),
            set(&[0, 1, 2])
        );

        assert!(matches!(
            g.downstream_set(&NodeSet::new(), Closure::Strict),
            Err(Error::EmptyNodeSet)
        ));
    }

    #[test]
    fn upstream_examples() {
        let g = graph(3, &[(0, 1, E), (1, 2, E)]);
        assert_eq!(
            g.upstream_set(&set(&[2]), None, Closure::Strict).unwrap(),
            set(&[0, 1])
        );
        assert_eq!(
            g.upstream_set(&set(&[2]), None, Closure::Reflexive)
                .unwrap(),
            set(&[0, 1, 2])
        );

        let g = graph(2, &[(0, 1, E)]);
        let r = g
            .upstream_set(&set(&[1]), Some(&set(&[1])), Closure::Reflexive)
            .unwrap();
        assert_eq!(r, set(&[1]));
        assert!(g
            .upstream_set(&NodeSet::new(), None, Closure::Strict)
            .is_err());
    }

    #[test]
    fn condense_examples() {
        let g = graph(3, &[(0, 1, E), (1, 2, E), (2, 0, E)]);
        let c = g.scc_condense(None).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.weights, vec![3.0]);

        let g = graph(2, &[(0, 1, E), (1, 0, A)]);
        let c = g.scc_condense(None).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.endorse_edges.len(), 1);
        assert_eq!(c.accuse_edges.len(), 1);

        let g = graph(4, &[(0, 1, E), (1, 0, E), (2, 3, E), (3, 2, E), (1, 2, E)]);
        let c = g.scc_condense(None).unwrap();
        assert_eq!(c.components, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(c.weights, vec![2.0, 2.0]);
        assert_eq!(
            c.endorse_edges.iter().copied().collect::<Vec<_>>(),
            vec![(0, 1)]
        );
        assert_eq!(c.topological_order(), Some(vec![0, 1]));

        let w = [0.5, 1.0, 2.0, 4.0];
        let c = g.scc_condense(Some(&w)).unwrap();
        assert_eq!(c.weights, vec![1.5, 6.0]);
        assert!(g.scc_condense(Some(&w[..2])).is_err());
    }

    #[test]
    fn self_consistency_and_insularity_examples() {
        let g = graph(3, &[(0, 1, A)]);
        assert!(!g.is_self_consistent(&set(&[0, 1])));
        assert!(g.is_self_consistent(&set(&[0, 2])));
        let g = graph(3, &[(0, 2, A)]);
        assert!(g.is_self_consistent(&set(&[0, 1])));

        let g = graph(2, &[(0, 1, E)]);
        assert!(!g.is_insular(&set(&[0])));
        assert!(g.is_insular(&set(&[0, 1])));
        let g = graph(2, &[(0, 1, A)]);
        assert!(g.is_insular(&set(&[0])));
    }

    #[test]
    fn tarjan_handles_long_chains_without_recursion() {
        let n = 50_000;
        let edges = (0..n - 1)
            .map(|u| (u, u + 1, E))
            .chain(std::iter::once((n - 1, 0, E)));
        let g = SignedDigraph::from_signed_edges(n, edges).unwrap();
        assert_eq!(g.endorsement_sccs().len(), 1);
    }

    #[test]
    fn induced_subgraph_and_reverse() {
        let g = graph(4, &[(0, 1, E), (1, 2, A), (2, 3, E), (3, 0, A)]);
        let (sub, map) = g.induced_subgraph(&set(&[1, 2, 3])).unwrap();
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.edge_count(), 2);
        assert!(sub.accuses(0, 1));
        assert!(sub.endorses(1, 2));
        let r = g.reversed();
        assert!(r.endorses(1, 0));
        assert!(r.accuses(0, 3));
        r.audit().unwrap();
    }

    #[test]
    fn partition_honest_constraint() {
        let part = Partition::from_honest(3, &set(&[0, 1]));
        let ok = graph(3, &[(0, 1, E), (1, 2, A), (2, 0, E), (2, 1, A)]);
        assert!(part.honest_constraint_holds(&ok));
        let bad = graph(3, &[(0, 2, E)]);
        assert!(!part.honest_constraint_holds(&bad));
        let bad = graph(3, &[(0, 1, A)]);
        assert!(!part.honest_constraint_holds(&bad));
        assert_eq!(part.cheaters(), set(&[2]));
    }
}
