//! Implication-avoiding dynamics: nodes flip their own outgoing edges to
//! escape the motifs that implicate them.
//!
//! Every move changes a sign and never adds or removes an edge, so the edge
//! count is conserved along a trajectory. Mixed dyads are resolved at once,
//! before the first step and after every move, by the endorser turning its
//! endorsement into an accusation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Closure, NodeId, NodeSet, Sign, SignedDigraph};
use crate::motif::{
    deep_implications_of, implicating_triangles, Implication, MotifKind, TriangleType,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Dyads and triangles only.
    Local,
    /// Endorsement paths of every depth.
    Strong,
}

/// How the acting node is drawn each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Uniform over all nodes; non-implicated draws are no-op steps.
    AllNodes,
    /// Uniform over currently implicated nodes.
    ImplicatedOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsConfig {
    /// Probability that a Type II move turns the accusation into an
    /// endorsement.
    pub alpha: f64,
    /// Probability that a Type I move sides with the accuser.
    pub beta: f64,
    pub mode: Mode,
    pub max_steps: u64,
    pub seed: u64,
    /// RNG stream; replicates sharing a seed use distinct streams.
    pub stream: u64,
    /// Record every `thinning`-th step (the first and last are always kept).
    pub thinning: u64,
    pub sampling: Sampling,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            alpha: 0.5,
            beta: 0.5,
            mode: Mode::Local,
            max_steps: 1500,
            seed: 0,
            stream: 0,
            thinning: 1,
            sampling: Sampling::AllNodes,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub step: u64,
    pub endorsements: usize,
    pub accusations: usize,
    pub implicated_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryStats {
    pub records: Vec<StepRecord>,
    pub converged: bool,
    /// Node-selection events, no-ops included.
    pub steps_used: u64,
    /// Steps that resolved a motif.
    pub resolutions: u64,
}

impl TrajectoryStats {
    pub fn last(&self) -> &StepRecord {
        self.records
            .last()
            .expect("a trajectory records its initial state")
    }
}

/// What a single step did.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEvent {
    pub node: Option<NodeId>,
    /// The motif that was resolved, if any.
    pub resolved: Option<Implication>,
    /// Sign changes in order, including the edge sweep that follows the move.
    pub flips: Vec<(NodeId, NodeId, Sign)>,
}

impl StepEvent {
    fn noop(node: Option<NodeId>) -> Self {
        StepEvent {
            node,
            resolved: None,
            flips: Vec::new(),
        }
    }
}

/// Flips `u -> v` to `u ⊣ v` for every mixed dyad (`u -> v`, `v ⊣ u`), in
/// ascending `(u, v)` order, until none is left. Returns the flipped pairs.
pub fn resolve_edge_inconsistencies(g: &mut SignedDigraph) -> Vec<(NodeId, NodeId)> {
    let mut flips = Vec::new();
    loop {
        let mixed: Vec<(NodeId, NodeId)> = g
            .nodes()
            .flat_map(|u| g.out_endorsements(u).iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| g.accuses(v, u))
            .collect();
        if mixed.is_empty() {
            return flips;
        }
        for (u, v) in mixed {
            if g.endorses(u, v) && g.accuses(v, u) {
                g.set_sign(u, v, Sign::Accuse).expect("edge exists");
                flips.push((u, v));
            }
        }
    }
}

/// Sets `(u, v)` to `sign`, then restores the edge fixpoint on that pair.
fn apply(
    g: &mut SignedDigraph,
    u: NodeId,
    v: NodeId,
    sign: Sign,
    flips: &mut Vec<(NodeId, NodeId, Sign)>,
) {
    g.set_sign(u, v, sign)
        .expect("dynamics only touch existing edges");
    flips.push((u, v, sign));
    // only this pair can have become mixed
    for (a, b) in [(u, v), (v, u)] {
        if g.endorses(a, b) && g.accuses(b, a) {
            g.set_sign(a, b, Sign::Accuse).expect("edge exists");
            flips.push((a, b, Sign::Accuse));
        }
    }
}

fn has_mixed_dyad_at(g: &SignedDigraph, u: NodeId) -> bool {
    g.out_endorsements(u).iter().any(|&v| g.accuses(v, u))
}

fn locally_implicated(g: &SignedDigraph, u: NodeId) -> bool {
    has_mixed_dyad_at(g, u) || !implicating_triangles(g, u).is_empty()
}

/// Violations of strong consistency implicating `u`: accusations between `u`
/// and nodes it reaches by endorsement, and between two such nodes. Dyad and
/// triangle cases appear as their depth-one instances.
pub fn strong_violations(g: &SignedDigraph, u: NodeId) -> Vec<Implication> {
    deep_implications_of(g, u)
}

fn strongly_implicated(g: &SignedDigraph, u: NodeId) -> bool {
    !strong_violations(g, u).is_empty()
}

fn draw_node<R: Rng>(
    g: &SignedDigraph,
    cfg: &DynamicsConfig,
    rng: &mut R,
    implicated: &dyn Fn(NodeId) -> bool,
) -> Option<NodeId> {
    match cfg.sampling {
        Sampling::AllNodes => (g.node_count() > 0).then(|| rng.gen_range(0..g.node_count())),
        Sampling::ImplicatedOnly => {
            let pool: Vec<NodeId> = g.nodes().filter(|&u| implicated(u)).collect();
            (!pool.is_empty()).then(|| pool[rng.gen_range(0..pool.len())])
        }
    }
}

/// One local move: draw a node, draw one triangle implicating it, resolve.
///
/// Type I (`u -> a`, `u -> b`, `a ⊣ b`): with probability beta `u` turns on
/// `b`, otherwise on `a`. Type II (`u -> a -> b`, `u ⊣ b`): with probability
/// alpha `u` endorses `b`, otherwise turns on `a`. Type III (`u -> a -> b`,
/// `b ⊣ u`): `u` turns on `a`.
pub fn local_step<R: Rng>(g: &mut SignedDigraph, cfg: &DynamicsConfig, rng: &mut R) -> StepEvent {
    let Some(u) = draw_node(g, cfg, rng, &|x| !implicating_triangles(g, x).is_empty()) else {
        return StepEvent::noop(None);
    };
    resolve_local_at(g, cfg, rng, u)
}

fn resolve_local_at<R: Rng>(
    g: &mut SignedDigraph,
    cfg: &DynamicsConfig,
    rng: &mut R,
    u: NodeId,
) -> StepEvent {
    let instances = implicating_triangles(g, u);
    if instances.is_empty() {
        return StepEvent::noop(Some(u));
    }
    let (kind, [_, a, b]) = instances[rng.gen_range(0..instances.len())];
    let (x, y, sign) = match kind {
        TriangleType::TypeI => {
            if rng.gen::<f64>() < cfg.beta {
                (u, b, Sign::Accuse)
            } else {
                (u, a, Sign::Accuse)
            }
        }
        TriangleType::TypeII => {
            if rng.gen::<f64>() < cfg.alpha {
                (u, b, Sign::Endorse)
            } else {
                (u, a, Sign::Accuse)
            }
        }
        TriangleType::TypeIII => (u, a, Sign::Accuse),
    };
    let mut flips = Vec::new();
    apply(g, x, y, sign, &mut flips);
    StepEvent {
        node: Some(u),
        resolved: Some(Implication {
            implicated: u,
            motif: kind.into(),
            witness: vec![u, a, b],
        }),
        flips,
    }
}

/// First-hop endorsements `u -> y` with `target` in the reflexive downstream
/// set of `y`.
pub fn repair_edges(g: &SignedDigraph, u: NodeId, target: NodeId) -> Vec<NodeId> {
    g.out_endorsements(u)
        .iter()
        .copied()
        .filter(|&y| {
            y == target
                || g.downstream_set(&NodeSet::from([y]), Closure::Reflexive)
                    .expect("valid node")
                    .contains(&target)
        })
        .collect()
}

/// One strong move: draw a node, draw one of its strong violations, resolve.
///
/// `u ⊣ v` below `u`: with probability alpha `u` endorses `v`, otherwise cuts
/// a first-hop endorsement leading to `v`. `v ⊣ u` below `u`: cut toward `v`.
/// `v ⊣ w` both below `u`: with probability beta cut toward `w`, otherwise
/// toward `v`. The cut edge is uniform among qualifying first hops.
pub fn strong_step<R: Rng>(g: &mut SignedDigraph, cfg: &DynamicsConfig, rng: &mut R) -> StepEvent {
    let Some(u) = draw_node(g, cfg, rng, &|x| strongly_implicated(g, x)) else {
        return StepEvent::noop(None);
    };
    resolve_strong_at(g, cfg, rng, u)
}

fn resolve_strong_at<R: Rng>(
    g: &mut SignedDigraph,
    cfg: &DynamicsConfig,
    rng: &mut R,
    u: NodeId,
) -> StepEvent {
    let violations = strong_violations(g, u);
    if violations.is_empty() {
        return StepEvent::noop(Some(u));
    }
    let chosen = violations[rng.gen_range(0..violations.len())].clone();
    let cut_toward = |target: NodeId, rng: &mut R| {
        let hops = repair_edges(g, u, target);
        debug_assert!(!hops.is_empty(), "a downstream target has a first hop");
        (u, hops[rng.gen_range(0..hops.len())], Sign::Accuse)
    };
    let (x, y, sign) = match (chosen.motif, chosen.witness.as_slice()) {
        (MotifKind::DeepAccusesDownstream, &[_, v]) => {
            if rng.gen::<f64>() < cfg.alpha {
                (u, v, Sign::Endorse)
            } else {
                cut_toward(v, rng)
            }
        }
        (MotifKind::DeepAccusedByDownstream, &[_, v]) => cut_toward(v, rng),
        (MotifKind::DeepDownstreamConflict, &[_, v, w]) => {
            if rng.gen::<f64>() < cfg.beta {
                cut_toward(w, rng)
            } else {
                cut_toward(v, rng)
            }
        }
        _ => unreachable!("strong violations are deep motifs"),
    };
    let mut flips = Vec::new();
    apply(g, x, y, sign, &mut flips);
    StepEvent {
        node: Some(u),
        resolved: Some(chosen),
        flips,
    }
}

/// No mixed dyad and no implicating triangle anywhere.
pub fn is_local_equilibrium(g: &SignedDigraph) -> bool {
    g.nodes().all(|u| !locally_implicated(g, u))
}

/// No node has a strong violation.
pub fn is_strong_consistent(g: &SignedDigraph) -> bool {
    g.nodes().all(|u| !strongly_implicated(g, u))
}

fn record(g: &SignedDigraph, step: u64, implicated: usize) -> StepRecord {
    StepRecord {
        step,
        endorsements: g.endorsement_count(),
        accusations: g.accusation_count(),
        implicated_nodes: implicated,
    }
}

/// Runs the dynamics from `g` until equilibrium or `max_steps` node
/// selections.
pub fn run(g: &SignedDigraph, cfg: &DynamicsConfig) -> Result<(SignedDigraph, TrajectoryStats)> {
    run_observed(g, cfg, |_, _| {})
}

/// [`run`] with a callback invoked after every step.
pub fn run_observed<F>(
    g: &SignedDigraph,
    cfg: &DynamicsConfig,
    mut observe: F,
) -> Result<(SignedDigraph, TrajectoryStats)>
where
    F: FnMut(&SignedDigraph, &StepEvent),
{
    cfg.validate()?;
    let mut g = g.clone();
    let mut rng = cfg.rng();
    resolve_edge_inconsistencies(&mut g);
    let edges = g.edge_count();
    let check = |g: &SignedDigraph, u: NodeId| match cfg.mode {
        Mode::Local => locally_implicated(g, u),
        Mode::Strong => strongly_implicated(g, u),
    };
    let mut flagged: Vec<bool> = g.nodes().map(|u| check(&g, u)).collect();
    let mut count = flagged.iter().filter(|&&f| f).count();
    let mut stats = TrajectoryStats {
        records: vec![record(&g, 0, count)],
        converged: count == 0,
        steps_used: 0,
        resolutions: 0,
    };
    if stats.converged {
        return Ok((g, stats));
    }

    for step in 1..=cfg.max_steps {
        let node = match cfg.sampling {
            Sampling::AllNodes => rng.gen_range(0..g.node_count()),
            Sampling::ImplicatedOnly => {
                let pool: Vec<NodeId> = (0..flagged.len()).filter(|&u| flagged[u]).collect();
                pool[rng.gen_range(0..pool.len())]
            }
        };
        let event = match cfg.mode {
            Mode::Local => resolve_local_at(&mut g, cfg, &mut rng, node),
            Mode::Strong => resolve_strong_at(&mut g, cfg, &mut rng, node),
        };
        assert_eq!(
            g.endorsement_count() + g.accusation_count(),
            edges,
            "dynamics must conserve edges"
        );
        if event.resolved.is_some() {
            stats.resolutions += 1;
        }
        if !event.flips.is_empty() {
            match cfg.mode {
                Mode::Local => {
                    let mut touched = NodeSet::new();
                    for &(x, y, _) in &event.flips {
                        touched.extend([x, y]);
                        touched.extend(g.in_endorsements(x).iter().copied());
                    }
                    for u in touched {
                        let now = check(&g, u);
                        if now != flagged[u] {
                            flagged[u] = now;
                            if now {
                                count += 1;
                            } else {
                                count -= 1;
                            }
                        }
                    }
                }
                Mode::Strong => {
                    flagged = g.nodes().map(|u| check(&g, u)).collect();
                    count = flagged.iter().filter(|&&f| f).count();
                }
            }
        }
        observe(&g, &event);
        stats.steps_used = step;
        stats.converged = count == 0;
        if stats.converged || step % cfg.thinning == 0 || step == cfg.max_steps {
            stats.records.push(record(&g, step, count));
        }
        if stats.converged {
            break;
        }
    }
    Ok((g, stats))
}

/// Splits a complete graph at local equilibrium into its endorsement
/// communities, checking that each is self-consistent and insular and that
/// every edge is reciprocated in kind.
pub fn decompose_equilibrium(g: &SignedDigraph) -> Result<Vec<NodeSet>> {
    if !g.is_complete() {
        return Err(Error::Precondition(
            "equilibrium decomposition needs a complete graph".into(),
        ));
    }
    if !is_local_equilibrium(g) {
        return Err(Error::NotAtEquilibrium);
    }
    for (u, v, e) in g.edges() {
        if g.sign(v, u) != Some(e.sign) {
            return Err(Error::InvariantViolation(format!(
                "edge ({u},{v}) is not reciprocated in kind at equilibrium"
            )));
        }
    }
    let mut community = vec![usize::MAX; g.node_count()];
    let mut out = Vec::new();
    for start in g.nodes() {
        if community[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = NodeSet::new();
        let mut queue = VecDeque::from([start]);
        community[start] = id;
        while let Some(x) = queue.pop_front() {
            members.insert(x);
            for &y in g.out_endorsements(x).iter().chain(g.in_endorsements(x)) {
                if community[y] == usize::MAX {
                    community[y] = id;
                    queue.push_back(y);
                }
            }
        }
        if !g.is_self_consistent(&members) || !g.is_insular(&members) {
            return Err(Error::InvariantViolation(format!(
                "equilibrium community {members:?} is not self-consistent and insular"
            )));
        }
        out.push(members);
    }
    Ok(out)
}

/// Sign pattern on a fixed set of ordered pairs, packed in base 3
/// (0 = no edge, 1 = endorsement, 2 = accusation).
fn encode(g: &SignedDigraph, pairs: &[(NodeId, NodeId)]) -> u64 {
    pairs.iter().rev().fold(0, |acc, &(u, v)| {
        acc * 3
            + match g.sign(u, v) {
                None => 0,
                Some(Sign::Endorse) => 1,
                Some(Sign::Accuse) => 2,
            }
    })
}

fn decode(n: usize, pairs: &[(NodeId, NodeId)], mut code: u64) -> SignedDigraph {
    let mut g = SignedDigraph::new(n);
    for &(u, v) in pairs {
        match code % 3 {
            1 => g.add_edge(u, v, Sign::Endorse, 1.0).expect("valid pair"),
            2 => g.add_edge(u, v, Sign::Accuse, 1.0).expect("valid pair"),
            _ => None,
        };
        code /= 3;
    }
    g
}

/// Every state reachable in one local move with positive probability when
/// `0 < beta < 1` and the given alpha is 0, 1, or strictly between.
pub fn local_successors(g: &SignedDigraph, alpha: f64) -> Vec<SignedDigraph> {
    let mut out = Vec::new();
    for u in g.nodes() {
        for (kind, [_, a, b]) in implicating_triangles(g, u) {
            let moves: Vec<(NodeId, Sign)> = match kind {
                TriangleType::TypeI => vec![(b, Sign::Accuse), (a, Sign::Accuse)],
                TriangleType::TypeII => {
                    let mut m = Vec::new();
                    if alpha > 0.0 {
                        m.push((b, Sign::Endorse));
                    }
                    if alpha < 1.0 {
                        m.push((a, Sign::Accuse));
                    }
                    m
                }
                TriangleType::TypeIII => vec![(a, Sign::Accuse)],
            };
            for (y, sign) in moves {
                let mut next = g.clone();
                apply(&mut next, u, y, sign, &mut Vec::new());
                out.push(next);
            }
        }
    }
    out
}

/// A starting graph from which local dynamics can never reach equilibrium.
#[derive(Clone, Debug, PartialEq)]
pub struct NonConvergenceWitness {
    pub graph: SignedDigraph,
    /// The closed class of states the dynamics is trapped in, none of them
    /// an equilibrium.
    pub trap: Vec<SignedDigraph>,
}

/// Exhaustive search over every sign pattern on `n` nodes (each ordered pair
/// empty, endorsing or accusing) for a closed communicating class of the
/// local dynamics with no equilibrium. Prefers traps with more than one state.
pub fn find_nonconvergence_witness(n: usize, alpha: f64) -> Option<NonConvergenceWitness> {
    assert!(n <= 4, "the state space has 3^(n(n-1)) states");
    let pairs: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let total = 3u64.pow(pairs.len() as u32);
    let succ: Vec<Vec<u64>> = (0..total)
        .map(|code| {
            let g = decode(n, &pairs, code);
            if g.nodes().any(|u| has_mixed_dyad_at(&g, u)) {
                // outside the swept state space
                return Vec::new();
            }
            let mut s: Vec<u64> = local_successors(&g, alpha)
                .iter()
                .map(|h| encode(h, &pairs))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();

    let comps = tarjan(&succ);
    let mut comp_of = vec![0usize; succ.len()];
    for (i, c) in comps.iter().enumerate() {
        for &s in c {
            comp_of[s as usize] = i;
        }
    }
    let mut best: Option<&Vec<u64>> = None;
    for c in &comps {
        let closed = c.iter().all(|&s| {
            succ[s as usize]
                .iter()
                .all(|&t| comp_of[t as usize] == comp_of[c[0] as usize])
        });
        let trapped = c.iter().all(|&s| !succ[s as usize].is_empty());
        if closed && trapped && best.is_none_or(|b| c.len() > b.len() && b.len() == 1) {
            best = Some(c);
            if c.len() > 1 {
                break;
            }
        }
    }
    best.map(|c| {
        let mut trap: Vec<u64> = c.clone();
        trap.sort_unstable();
        NonConvergenceWitness {
            graph: decode(n, &pairs, trap[0]),
            trap: trap.iter().map(|&s| decode(n, &pairs, s)).collect(),
        }
    })
}

/// Iterative Tarjan over an explicit successor table.
fn tarjan(succ: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = succ.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u64> = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0u32;
    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root as u64);
        on_stack[root] = true;
        while let Some(&(v, pos)) = call.last() {
            if pos < succ[v].len() {
                call.last_mut().expect("nonempty").1 += 1;
                let w = succ[v][pos] as usize;
                if index[w] == u32::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w as u64);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w as usize == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Counts of the distinct outcomes of repeated seeded runs; handy for
/// distributional checks in tests.
pub fn outcome_histogram(
    g: &SignedDigraph,
    cfg: &DynamicsConfig,
    runs: u64,
) -> Result<BTreeMap<Vec<(NodeId, NodeId, Sign)>, u64>> {
    let mut hist: HashMap<Vec<(NodeId, NodeId, Sign)>, u64> = HashMap::new();
    for r in 0..runs {
        let c = DynamicsConfig { stream: r, ..*cfg };
        let (h, _) = run(g, &c)?;
        *hist
            .entry(h.edges().map(|(u, v, e)| (u, v, e.sign)).collect())
            .or_default() += 1;
    }
    Ok(hist.into_iter().collect())
}
