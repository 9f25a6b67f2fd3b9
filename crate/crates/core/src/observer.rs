//! Identification strategies and checkers for the identification hypotheses.
//!
//! Exact searches run over `u128` bitmasks, so they handle at most 128 nodes;
//! [`SearchBudget`] caps them further and turns any overrun into
//! [`Error::BudgetExceeded`].

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{Closure, NodeId, NodeSet, Partition, SignedDigraph};
use crate::motif::{inconsistent_implications, Depth};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    CredibleH,
    ImplicatedC,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CredibleH => "credible_h",
            Verdict::ImplicatedC => "implicated_c",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// One verdict per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictLabels {
    labels: Vec<Verdict>,
}

impl VerdictLabels {
    pub fn uniform(n: usize, v: Verdict) -> Self {
        VerdictLabels { labels: vec![v; n] }
    }

    pub fn set(&mut self, u: NodeId, v: Verdict) {
        self.labels[u] = v;
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, u: NodeId) -> Verdict {
        self.labels[u]
    }

    pub fn as_slice(&self) -> &[Verdict] {
        &self.labels
    }

    pub fn nodes_with(&self, v: Verdict) -> NodeSet {
        (0..self.labels.len())
            .filter(|&u| self.labels[u] == v)
            .collect()
    }
}

/// Hard caps for exact searches. Exceeding one is an error, never an
/// approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest set whose subsets may be enumerated exhaustively.
    pub max_subset_bits: u32,
    /// Largest graph handed to an exact search (at most 128).
    pub max_nodes_exact: usize,
    pub time_cap: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_subset_bits: 20,
            max_nodes_exact: 128,
            time_cap: None,
        }
    }
}

impl SearchBudget {
    fn check_nodes(&self, n: usize, what: &str) -> Result<()> {
        if n > self.max_nodes_exact.min(128) {
            return Err(Error::BudgetExceeded(format!(
                "{what}: {n} nodes exceeds exact-search cap {}",
                self.max_nodes_exact.min(128)
            )));
        }
        Ok(())
    }

    fn check_subset_bits(&self, bits: usize, what: &str) -> Result<()> {
        if bits > self.max_subset_bits as usize || bits >= 64 {
            return Err(Error::BudgetExceeded(format!(
                "{what}: enumerating subsets of {bits} elements exceeds cap {}",
                self.max_subset_bits
            )));
        }
        Ok(())
    }

    fn deadline(&self) -> Option<Instant> {
        self.time_cap.map(|d| Instant::now() + d)
    }
}

fn out_of_time(deadline: Option<Instant>, what: &str) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() > d => {
            Err(Error::BudgetExceeded(format!("{what}: time cap reached")))
        }
        _ => Ok(()),
    }
}

/// Marks implicated nodes and everything that endorses its way to them as
/// [`Verdict::ImplicatedC`], repeating until nothing new is marked. All
/// other nodes are [`Verdict::Undetermined`].
pub fn implication_screen(g: &SignedDigraph, depth: Depth) -> VerdictLabels {
    let mut marked = NodeSet::new();
    for _ in 0..=g.node_count() {
        let mut next = marked.clone();
        let implicated: NodeSet = inconsistent_implications(g, depth)
            .iter()
            .map(|i| i.implicated)
            .collect();
        if !implicated.is_empty() {
            next.extend(
                g.upstream_set(&implicated, None, Closure::Reflexive)
                    .expect("implicated nodes are valid"),
            );
        }
        if next == marked {
            break;
        }
        marked = next;
    }
    let mut labels = VerdictLabels::uniform(g.node_count(), Verdict::Undetermined);
    for u in marked {
        labels.labels[u] = Verdict::ImplicatedC;
    }
    labels
}

/// Labels the reflexive downstream set of the largest endorsement SCC as
/// credible and everything else as implicated.
///
/// When several SCCs share the largest size, the one whose downstream set
/// contains all the others is chosen; if none does, the call is refused.
pub fn identify_by_largest_scc(g: &SignedDigraph) -> Result<VerdictLabels> {
    if g.node_count() == 0 {
        return Err(Error::Precondition("empty graph has no components".into()));
    }
    let sccs = g.endorsement_sccs();
    let largest = sccs.iter().map(Vec::len).max().expect("nonempty graph");
    let tied: Vec<NodeSet> = sccs
        .iter()
        .filter(|c| c.len() == largest)
        .map(|c| c.iter().copied().collect())
        .collect();
    let mut chosen = None;
    for c in &tied {
        let down = g.downstream_set(c, Closure::Reflexive)?;
        if tied.iter().all(|other| other.is_subset(&down)) {
            chosen = Some(down);
            break;
        }
    }
    let credible = chosen.ok_or_else(|| {
        Error::Ambiguous(format!(
            "{} endorsement components tie at size {largest}",
            tied.len()
        ))
    })?;
    let mut labels = VerdictLabels::uniform(g.node_count(), Verdict::ImplicatedC);
    for u in credible {
        labels.labels[u] = Verdict::CredibleH;
    }
    Ok(labels)
}

/// Labels as credible the reflexive downstream set of an endorsement SCC
/// whose induced split passes [`verify_thm_scc`]. Every such split is a
/// candidate; the call is refused unless they all agree.
///
/// The largest SCC need not be the component the hypothesis is about, so
/// [`identify_by_largest_scc`] can miss `H` where this does not.
pub fn identify_by_scc_candidates(g: &SignedDigraph) -> Result<VerdictLabels> {
    let n = g.node_count();
    let mut candidates: Vec<NodeSet> = Vec::new();
    for scc in g.endorsement_sccs() {
        let u: NodeSet = scc.into_iter().collect();
        let down = g.downstream_set(&u, Closure::Reflexive)?;
        if !candidates.contains(&down) && verify_thm_scc(g, &Partition::from_honest(n, &down))? {
            candidates.push(down);
        }
    }
    match candidates.len() {
        0 => Err(Error::Precondition(
            "no endorsement component satisfies the identification hypothesis".into(),
        )),
        1 => {
            let mut labels = VerdictLabels::uniform(n, Verdict::ImplicatedC);
            for &u in &candidates[0] {
                labels.labels[u] = Verdict::CredibleH;
            }
            Ok(labels)
        }
        k => Err(Error::Ambiguous(format!(
            "{k} different honest sets satisfy the identification hypothesis"
        ))),
    }
}

fn check_partition(g: &SignedDigraph, part: &Partition) -> Result<()> {
    if part.len() != g.node_count() {
        return Err(Error::Precondition(format!(
            "partition labels {} nodes, graph has {}",
            part.len(),
            g.node_count()
        )));
    }
    Ok(())
}

/// `|H| > |C|` and the honest subgraph has an endorsement SCC `U` with
/// `|U| > |C|` whose reflexive downstream set (within the honest subgraph)
/// covers `H`. Returns false when the honest constraint is violated.
pub fn verify_thm_scc(g: &SignedDigraph, part: &Partition) -> Result<bool> {
    check_partition(g, part)?;
    let (nh, nc) = (part.honest_count(), part.cheater_count());
    if nh <= nc || !part.honest_constraint_holds(g) {
        return Ok(false);
    }
    let (gh, _) = g.induced_subgraph(&part.honest())?;
    for comp in gh.endorsement_sccs() {
        if comp.len() > nc {
            let down = gh.downstream_set(&comp.iter().copied().collect(), Closure::Reflexive)?;
            if down.len() == nh {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

type Mask = u128;

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

fn bit(i: usize) -> Mask {
    1u128 << i
}

fn node_mask(nodes: impl IntoIterator<Item = NodeId>) -> Mask {
    nodes.into_iter().fold(0, |m, u| m | bit(u))
}

fn mask_to_set(m: Mask) -> NodeSet {
    bits(m).collect()
}

/// Weighted selection over items with closure and conflict constraints:
/// picking an item forces everything in its `down` closure, dropping one
/// drops everything in its `up` closure, and conflicting items never coexist.
/// Nodes map to exactly one item.
struct ItemProblem {
    weight: Vec<f64>,
    nodes: Vec<Mask>,
    down: Vec<Mask>,
    up: Vec<Mask>,
    conflict: Vec<Mask>,
    blocked: Mask,
    item_of: Vec<usize>,
    all: Mask,
    eps: f64,
    deadline: Option<Instant>,
}

impl ItemProblem {
    fn new(
        weight: Vec<f64>,
        nodes: Vec<Mask>,
        down: Vec<Mask>,
        up: Vec<Mask>,
        conflict: Vec<Mask>,
        item_of: Vec<usize>,
        deadline: Option<Instant>,
    ) -> Self {
        let k = weight.len();
        let all = if k == 128 { Mask::MAX } else { bit(k) - 1 };
        let total: f64 = weight.iter().sum();
        let mut p = ItemProblem {
            weight,
            nodes,
            down,
            up,
            conflict,
            blocked: 0,
            item_of,
            all,
            eps: 1e-9 * total.max(1.0),
            deadline,
        };
        let self_inconsistent: Mask = (0..k)
            .filter(|&i| p.conflict_of(p.down[i]) & p.down[i] != 0)
            .fold(0, |m, i| m | bit(i));
        p.blocked = p.close_up(self_inconsistent);
        p
    }

    fn close_up(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, i| acc | self.up[i])
    }

    fn close_down(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, i| acc | self.down[i])
    }

    fn conflict_of(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, i| acc | self.conflict[i])
    }

    fn weight_of(&self, m: Mask) -> f64 {
        bits(m).map(|i| self.weight[i]).sum()
    }

    fn nodes_of(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, i| acc | self.nodes[i])
    }

    /// Best feasible item set containing `force_in` and avoiding `force_out`.
    fn solve(&self, force_in: Mask, force_out: Mask) -> Result<Option<(f64, Mask)>> {
        let chosen = self.close_down(force_in);
        let conflicts = self.conflict_of(chosen);
        if conflicts & chosen != 0 {
            return Ok(None);
        }
        let out = self.close_up(force_out | conflicts) | self.blocked;
        if out & chosen != 0 {
            return Ok(None);
        }
        let mut search = BranchAndBound {
            p: self,
            best: None,
            visited: 0,
        };
        search.dfs(chosen, out, self.weight_of(chosen))?;
        Ok(search.best)
    }

    /// The optimum preferring, node by node in ascending order, the set that
    /// contains the node.
    fn lex_optimum(&self, n: usize) -> Result<Option<(f64, Mask)>> {
        let Some((opt, _)) = self.solve(0, 0)? else {
            return Ok(None);
        };
        let (mut fin, mut fout) = (0, 0);
        for u in 0..n {
            let item = self.item_of[u];
            if self.close_down(fin) & bit(item) != 0
                || self.close_up(fout | self.blocked) & bit(item) != 0
            {
                continue;
            }
            match self.solve(fin | bit(item), fout)? {
                Some((w, _)) if w >= opt - self.eps => fin |= bit(item),
                _ => fout |= bit(item),
            }
        }
        Ok(Some((opt, self.close_down(fin))))
    }

    /// Best weight over feasible sets different from `best`.
    fn runner_up(&self, best: Mask) -> Result<Option<f64>> {
        let mut out: Option<f64> = None;
        for i in bits(self.all) {
            let alt = if best & bit(i) != 0 {
                self.solve(0, bit(i))?
            } else {
                self.solve(bit(i), 0)?
            };
            if let Some((w, _)) = alt {
                out = Some(out.map_or(w, |o: f64| o.max(w)));
            }
        }
        Ok(out)
    }
}

struct BranchAndBound<'a> {
    p: &'a ItemProblem,
    best: Option<(f64, Mask)>,
    visited: u64,
}

impl BranchAndBound<'_> {
    fn dfs(&mut self, chosen: Mask, out: Mask, w: f64) -> Result<()> {
        self.visited += 1;
        if self.visited.is_multiple_of(4096) {
            out_of_time(self.p.deadline, "exact set search")?;
        }
        let p = self.p;
        if self.best.is_none_or(|(b, _)| w > b + p.eps) {
            self.best = Some((w, chosen));
        }
        let undecided = p.all & !chosen & !out;
        if undecided == 0 {
            return Ok(());
        }
        if let Some((b, _)) = self.best {
            if w + p.weight_of(undecided) <= b + p.eps {
                return Ok(());
            }
        }
        let m = undecided.trailing_zeros() as usize;
        let add = p.down[m] & !chosen;
        if add & out == 0 {
            let conflicts = p.conflict_of(add);
            let next = chosen | add;
            if conflicts & next == 0 {
                self.dfs(next, out | p.close_up(conflicts), w + p.weight_of(add))?;
            }
        }
        self.dfs(chosen, out | p.up[m], w)
    }
}

fn conflict_masks(g: &SignedDigraph) -> Vec<Mask> {
    let mut conflict = vec![0; g.node_count()];
    for u in g.nodes() {
        for &v in g.out_accusations(u) {
            conflict[u] |= bit(v);
            conflict[v] |= bit(u);
        }
    }
    conflict
}

fn checked_weights(g: &SignedDigraph, node_weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match node_weights {
        None => Ok(vec![1.0; g.node_count()]),
        Some(w) if w.len() != g.node_count() => Err(Error::Precondition(format!(
            "{} node weights for {} nodes",
            w.len(),
            g.node_count()
        ))),
        Some(w) => {
            if let Some(&bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidWeight(bad));
            }
            Ok(w.to_vec())
        }
    }
}

fn self_consistent_problem(
    g: &SignedDigraph,
    weights: Vec<f64>,
    budget: &SearchBudget,
) -> Result<ItemProblem> {
    budget.check_nodes(g.node_count(), "largest self-consistent set")?;
    let n = g.node_count();
    let singles: Vec<Mask> = (0..n).map(bit).collect();
    Ok(ItemProblem::new(
        weights,
        singles.clone(),
        singles.clone(),
        singles,
        conflict_masks(g),
        (0..n).collect(),
        budget.deadline(),
    ))
}

fn insular_problem(g: &SignedDigraph, budget: &SearchBudget) -> Result<ItemProblem> {
    budget.check_nodes(g.node_count(), "largest self-consistent insular set")?;
    let cond = g.scc_condense(None)?;
    let k = cond.len();
    let order = cond.topological_order().expect("condensation is acyclic");
    let mut down: Vec<Mask> = (0..k).map(bit).collect();
    let mut succ = vec![Vec::new(); k];
    for &(a, b) in &cond.endorse_edges {
        succ[a].push(b);
    }
    for &c in order.iter().rev() {
        for &d in &succ[c] {
            down[c] |= down[d];
        }
    }
    let mut up: Vec<Mask> = (0..k).map(bit).collect();
    for c in 0..k {
        for d in bits(down[c]) {
            up[d] |= bit(c);
        }
    }
    let node_conflict = conflict_masks(g);
    let nodes: Vec<Mask> = cond
        .components
        .iter()
        .map(|c| node_mask(c.iter().copied()))
        .collect();
    let conflict: Vec<Mask> = (0..k)
        .map(|c| {
            let touched = bits(nodes[c]).fold(0, |acc, u| acc | node_conflict[u]);
            (0..k)
                .filter(|&d| nodes[d] & touched != 0)
                .fold(0, |m, d| m | bit(d))
        })
        .collect();
    let weight = cond.components.iter().map(|c| c.len() as f64).collect();
    Ok(ItemProblem::new(
        weight,
        nodes,
        down,
        up,
        conflict,
        cond.membership.clone(),
        budget.deadline(),
    ))
}

/// Best set together with the weight of the best *different* set.
#[derive(Clone, Debug, PartialEq)]
pub struct TopTwo {
    pub best: NodeSet,
    pub best_weight: f64,
    pub runner_up_weight: Option<f64>,
}

impl TopTwo {
    /// True when another set reaches the optimum weight.
    pub fn is_tied(&self, eps: f64) -> bool {
        self.runner_up_weight
            .is_some_and(|r| r >= self.best_weight - eps)
    }
}

/// Exact maximum-weight set with no accusation between members. Among
/// optimal sets, the one containing the smallest node where they differ.
pub fn largest_self_consistent_set(
    g: &SignedDigraph,
    node_weights: Option<&[f64]>,
    budget: &SearchBudget,
) -> Result<NodeSet> {
    let p = self_consistent_problem(g, checked_weights(g, node_weights)?, budget)?;
    let (_, m) = p
        .lex_optimum(g.node_count())?
        .expect("the empty set is always feasible");
    Ok(mask_to_set(p.nodes_of(m)))
}

pub fn self_consistent_top_two(
    g: &SignedDigraph,
    node_weights: Option<&[f64]>,
    budget: &SearchBudget,
) -> Result<TopTwo> {
    let p = self_consistent_problem(g, checked_weights(g, node_weights)?, budget)?;
    top_two(&p, g.node_count())
}

/// Exact maximum-cardinality set that is self-consistent and insular, with
/// the same tie-break as [`largest_self_consistent_set`].
pub fn largest_self_consistent_insular_set(
    g: &SignedDigraph,
    budget: &SearchBudget,
) -> Result<NodeSet> {
    let p = insular_problem(g, budget)?;
    let (_, m) = p
        .lex_optimum(g.node_count())?
        .expect("the empty set is always feasible");
    Ok(mask_to_set(p.nodes_of(m)))
}

pub fn self_consistent_insular_top_two(g: &SignedDigraph, budget: &SearchBudget) -> Result<TopTwo> {
    let p = insular_problem(g, budget)?;
    top_two(&p, g.node_count())
}

fn top_two(p: &ItemProblem, n: usize) -> Result<TopTwo> {
    let (w, m) = p.lex_optimum(n)?.expect("the empty set is always feasible");
    Ok(TopTwo {
        best: mask_to_set(p.nodes_of(m)),
        best_weight: w,
        runner_up_weight: p.runner_up(m)?,
    })
}

/// For every nonempty `S ⊆ C`, the honest accusers of `S` cover `S` and
/// outweigh it. Returns false when the honest constraint is violated.
pub fn verify_outnumbering(
    g: &SignedDigraph,
    part: &Partition,
    node_weights: Option<&[f64]>,
    budget: &SearchBudget,
) -> Result<bool> {
    check_partition(g, part)?;
    let weights = checked_weights(g, node_weights)?;
    let cheaters: Vec<NodeId> = part.cheaters().into_iter().collect();
    budget.check_subset_bits(cheaters.len(), "outnumbering check")?;
    if !part.honest_constraint_holds(g) {
        return Ok(false);
    }
    let accusers: Vec<NodeSet> = cheaters
        .iter()
        .map(|&c| {
            g.in_accusations(c)
                .iter()
                .copied()
                .filter(|&h| part.is_honest(h))
                .collect()
        })
        .collect();
    if accusers.iter().any(NodeSet::is_empty) {
        return Ok(false);
    }
    let deadline = budget.deadline();
    for s in 1u64..(1u64 << cheaters.len()) {
        if s % 4096 == 0 {
            out_of_time(deadline, "outnumbering check")?;
        }
        let mut u_star = NodeSet::new();
        let mut w_s = 0.0;
        for (i, &c) in cheaters.iter().enumerate() {
            if s >> i & 1 == 1 {
                u_star.extend(accusers[i].iter().copied());
                w_s += weights[c];
            }
        }
        let w_u: f64 = u_star.iter().map(|&h| weights[h]).sum();
        if w_u <= w_s {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An alternating chain `h1 ⊣ c1 ⊢ h2 ⊣ c2 … ⊢ hk` through every cheater
/// exactly once with `|C| + 1` distinct honest nodes. Returns the chain as
/// `[h1, c1, h2, …, hk]`.
pub fn find_hamiltonian_accusation_path(
    g: &SignedDigraph,
    part: &Partition,
    budget: &SearchBudget,
) -> Result<Option<Vec<NodeId>>> {
    check_partition(g, part)?;
    let cheaters = part.cheaters();
    budget.check_nodes(cheaters.len(), "accusation path search")?;
    if !part.honest_constraint_holds(g) {
        return Ok(None);
    }
    let honest = part.honest();
    if honest.len() < cheaters.len() + 1 {
        return Ok(None);
    }
    let deadline = budget.deadline();
    let mut path = Vec::with_capacity(2 * cheaters.len() + 1);
    let mut used = vec![false; g.node_count()];
    for &h in &honest {
        path.push(h);
        used[h] = true;
        if extend_path(g, part, cheaters.len(), &mut path, &mut used, deadline)? {
            return Ok(Some(path));
        }
        used[h] = false;
        path.pop();
    }
    Ok(None)
}

fn extend_path(
    g: &SignedDigraph,
    part: &Partition,
    nc: usize,
    path: &mut Vec<NodeId>,
    used: &mut [bool],
    deadline: Option<Instant>,
) -> Result<bool> {
    if path.len() == 2 * nc + 1 {
        return Ok(true);
    }
    out_of_time(deadline, "accusation path search")?;
    let h = *path.last().expect("path starts with an honest node");
    let targets: Vec<NodeId> = g
        .out_accusations(h)
        .iter()
        .copied()
        .filter(|&c| !part.is_honest(c) && !used[c])
        .collect();
    for c in targets {
        let next: Vec<NodeId> = g
            .in_accusations(c)
            .iter()
            .copied()
            .filter(|&x| part.is_honest(x) && !used[x])
            .collect();
        for h2 in next {
            path.extend([c, h2]);
            used[c] = true;
            used[h2] = true;
            if extend_path(g, part, nc, path, used, deadline)? {
                return Ok(true);
            }
            used[c] = false;
            used[h2] = false;
            path.truncate(path.len() - 2);
        }
    }
    Ok(false)
}

pub fn verify_hamiltonian_condition(
    g: &SignedDigraph,
    part: &Partition,
    budget: &SearchBudget,
) -> Result<bool> {
    Ok(find_hamiltonian_accusation_path(g, part, budget)?.is_some())
}

/// Largest graph [`verify_tree_condition`] accepts.
pub const TREE_CONDITION_MAX_NODES: usize = 12;

/// For every nonempty `S ⊆ C` some `K ⊆ V` satisfies: `S ⊆ ρ̄(K)`, every
/// `k ∈ K` has `S ∩ ρ̄(k) ≠ ∅`, and the honest accusers `U*` of `K` cover
/// `K` with `|ρ̄_H(U*)| > |ρ̄(K)|` (bars denote reflexive closures). Returns
/// false when the honest constraint is violated.
pub fn verify_tree_condition(
    g: &SignedDigraph,
    part: &Partition,
    budget: &SearchBudget,
) -> Result<bool> {
    check_partition(g, part)?;
    let n = g.node_count();
    if n > TREE_CONDITION_MAX_NODES {
        return Err(Error::BudgetExceeded(format!(
            "tree condition: {n} nodes exceeds the {TREE_CONDITION_MAX_NODES}-node limit"
        )));
    }
    budget.check_subset_bits(n, "tree condition")?;
    if !part.honest_constraint_holds(g) {
        return Ok(false);
    }
    let honest = node_mask(part.honest());
    let cheaters = node_mask(part.cheaters());
    let rho: Vec<u32> = (0..n)
        .map(|u| {
            let up = g
                .upstream_set(&NodeSet::from([u]), None, Closure::Reflexive)
                .expect("valid node");
            node_mask(up) as u32
        })
        .collect();
    let sigma: Vec<u32> = (0..n)
        .map(|u| {
            node_mask(
                g.downstream_set(&NodeSet::from([u]), Closure::Reflexive)
                    .expect("valid node"),
            ) as u32
        })
        .collect();
    let accusers: Vec<u32> = (0..n)
        .map(|k| node_mask(g.in_accusations(k).iter().copied()) as u32 & honest as u32)
        .collect();

    let size = 1usize << n;
    let mut rho_k = vec![0u32; size];
    let mut u_star = vec![0u32; size];
    let mut covered = vec![true; size];
    for k in 1..size {
        let low = k.trailing_zeros() as usize;
        let rest = k & (k - 1);
        rho_k[k] = rho_k[rest] | rho[low];
        u_star[k] = u_star[rest] | accusers[low];
        covered[k] = covered[rest] && accusers[low] != 0;
    }
    let rho_h =
        |m: u32| -> u32 { bits(m as Mask).fold(0u32, |acc, u| acc | rho[u]) & honest as u32 };

    let deadline = budget.deadline();
    let cheater_list: Vec<usize> = bits(cheaters).collect();
    for s_idx in 1u64..(1u64 << cheater_list.len()) {
        out_of_time(deadline, "tree condition")?;
        let s: u32 = cheater_list
            .iter()
            .enumerate()
            .filter(|(i, _)| s_idx >> i & 1 == 1)
            .fold(0, |m, (_, &c)| m | 1 << c);
        // every k must have an endorsement path from S, so K ⊆ σ̄(S)
        let reach: u32 = bits(s as Mask).fold(0, |acc, u| acc | sigma[u]);
        let mut found = false;
        let mut k = reach;
        while k != 0 {
            let ku = k as usize;
            if covered[ku]
                && s & !rho_k[ku] == 0
                && bits(k as Mask).all(|x| rho[x] & s != 0)
                && rho_h(u_star[ku]).count_ones() > rho_k[ku].count_ones()
            {
                found = true;
                break;
            }
            k = (k - 1) & reach;
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}
