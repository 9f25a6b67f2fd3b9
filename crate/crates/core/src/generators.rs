//! Seeded graph constructions: Erdős–Rényi endorsement graphs, planted
//! honest/cheater scenarios and the mirror attack.
//!
//! Every generator is a pure function of its arguments. Every generator that
//! returns a [`Partition`] checks the honest constraint before returning.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Partition, Role, Sign, SignedDigraph};
use crate::observer::{verify_outnumbering, SearchBudget};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{name} must lie in [0, 1], got {p}"
        )))
    }
}

/// Each ordered pair independently carries an endorsement with probability
/// `p`; then `accusations` endorsements chosen uniformly become accusations.
pub fn er_endorsement(n: usize, p: f64, accusations: usize, seed: u64) -> Result<SignedDigraph> {
    er_endorsement_with(n, p, accusations, &mut rng_for(seed))
}

pub fn er_endorsement_with<R: Rng>(
    n: usize,
    p: f64,
    accusations: usize,
    rng: &mut R,
) -> Result<SignedDigraph> {
    check_probability("p", p)?;
    let mut g = SignedDigraph::new(n);
    let mut endorsed = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < p {
                g.add_edge(u, v, Sign::Endorse, 1.0)?;
                endorsed.push((u, v));
            }
        }
    }
    if accusations > endorsed.len() {
        return Err(Error::Infeasible(format!(
            "cannot turn {accusations} of {} endorsements into accusations",
            endorsed.len()
        )));
    }
    let mut picks = index::sample(rng, endorsed.len(), accusations).into_vec();
    picks.sort_unstable();
    for i in picks {
        let (u, v) = endorsed[i];
        g.set_sign(u, v, Sign::Accuse)?;
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HonestStrategy {
    /// Endorsements between honest nodes with per-pair probability
    /// `expected_degree / (nH - 1)`.
    RandomEndorse { expected_degree: f64 },
    /// `h1 ⊣ c1 ⊢ h2 ⊣ c2 … ⊢ hk` over all cheaters with `k = |C| + 1`.
    HamiltonianAccusePath,
    /// Two honest accusers per cheater, disjoint across cheaters.
    FullAccuseCoverage,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CheaterStrategy {
    Silent,
    /// Every edge out of a cheater is an endorsement with probability
    /// `p_pos`, an accusation with probability `p_neg`, absent otherwise.
    RandomMixed {
        p_pos: f64,
        p_neg: f64,
    },
    /// Cheaters copy the edges of as many honest nodes, mapped through a
    /// random pairing.
    Mirror,
    /// Each cheater accuses each honest node with probability `rate`.
    AccuseHonest {
        rate: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub n_honest: usize,
    pub n_cheaters: usize,
    /// Applied in order.
    pub honest: Vec<HonestStrategy>,
    pub cheater: CheaterStrategy,
    /// Randomly relabel nodes so roles cannot be read off the ids.
    pub shuffle: bool,
    pub seed: u64,
}

/// Builds a graph with a planted honest set. Before shuffling, honest nodes
/// are `0..nH` and cheaters follow.
pub fn planted_scenario(spec: &ScenarioSpec) -> Result<(SignedDigraph, Partition)> {
    let (nh, nc) = (spec.n_honest, spec.n_cheaters);
    if nh == 0 {
        return Err(Error::InvalidConfig(
            "a scenario needs at least one honest node".into(),
        ));
    }
    let n = nh + nc;
    let mut rng = rng_for(spec.seed);
    let mut g = SignedDigraph::new(n);
    let cheaters: Vec<NodeId> = (nh..n).collect();

    for strategy in &spec.honest {
        match *strategy {
            HonestStrategy::RandomEndorse { expected_degree } => {
                if !(expected_degree >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "expected degree {expected_degree} is negative"
                    )));
                }
                if nh > 1 {
                    let p = (expected_degree / (nh - 1) as f64).min(1.0);
                    for u in 0..nh {
                        for v in 0..nh {
                            if u != v && rng.gen::<f64>() < p {
                                g.add_edge(u, v, Sign::Endorse, 1.0)?;
                            }
                        }
                    }
                }
            }
            HonestStrategy::HamiltonianAccusePath => {
                if nh < nc + 1 {
                    return Err(Error::Infeasible(format!(
                        "an accusation path over {nc} cheaters needs {} honest nodes, have {nh}",
                        nc + 1
                    )));
                }
                let mut hs: Vec<NodeId> = (0..nh).collect();
                hs.shuffle(&mut rng);
                let mut cs = cheaters.clone();
                cs.shuffle(&mut rng);
                for (i, &c) in cs.iter().enumerate() {
                    g.add_edge(hs[i], c, Sign::Accuse, 1.0)?;
                    g.add_edge(hs[i + 1], c, Sign::Accuse, 1.0)?;
                }
            }
            HonestStrategy::FullAccuseCoverage => {
                if nh < 2 * nc {
                    return Err(Error::Infeasible(format!(
                        "two disjoint accusers per cheater need {} honest nodes, have {nh}",
                        2 * nc
                    )));
                }
                let mut hs: Vec<NodeId> = (0..nh).collect();
                hs.shuffle(&mut rng);
                for (i, &c) in cheaters.iter().enumerate() {
                    g.add_edge(hs[2 * i], c, Sign::Accuse, 1.0)?;
                    g.add_edge(hs[2 * i + 1], c, Sign::Accuse, 1.0)?;
                }
            }
        }
    }

    match spec.cheater {
        CheaterStrategy::Silent => {}
        CheaterStrategy::RandomMixed { p_pos, p_neg } => {
            check_probability("p_pos", p_pos)?;
            check_probability("p_neg", p_neg)?;
            check_probability("p_pos + p_neg", p_pos + p_neg)?;
            for &c in &cheaters {
                for v in (0..n).filter(|&v| v != c) {
                    let r = rng.gen::<f64>();
                    if r < p_pos {
                        g.add_edge(c, v, Sign::Endorse, 1.0)?;
                    } else if r < p_pos + p_neg {
                        g.add_edge(c, v, Sign::Accuse, 1.0)?;
                    }
                }
            }
        }
        CheaterStrategy::Mirror => {
            let mut hs: Vec<NodeId> = (0..nh).collect();
            hs.shuffle(&mut rng);
            let k = nh.min(nc);
            // image[h] = cheater copying h; preimage[c - nh] = honest node copied by c
            let mut image = vec![None; nh];
            let mut preimage = vec![None; nc];
            for i in 0..k {
                image[hs[i]] = Some(cheaters[i]);
                preimage[i] = Some(hs[i]);
            }
            let honest_edges: Vec<(NodeId, NodeId, Sign)> =
                g.edges().map(|(u, v, e)| (u, v, e.sign)).collect();
            for (h, x, sign) in honest_edges {
                let Some(c) = image[h] else { continue };
                let target = match sign {
                    Sign::Endorse => image[x].unwrap_or(x),
                    Sign::Accuse => match preimage[x - nh] {
                        Some(t) => t,
                        None => continue,
                    },
                };
                g.add_edge(c, target, sign, 1.0)?;
            }
        }
        CheaterStrategy::AccuseHonest { rate } => {
            check_probability("rate", rate)?;
            for &c in &cheaters {
                for h in 0..nh {
                    if rng.gen::<f64>() < rate {
                        g.add_edge(c, h, Sign::Accuse, 1.0)?;
                    }
                }
            }
        }
    }

    let mut roles: Vec<Role> = (0..n)
        .map(|u| if u < nh { Role::Honest } else { Role::Cheater })
        .collect();
    if spec.shuffle {
        let mut perm: Vec<NodeId> = (0..n).collect();
        perm.shuffle(&mut rng);
        g = relabel(&g, &perm)?;
        let mut shuffled = vec![Role::Honest; n];
        for u in 0..n {
            shuffled[perm[u]] = roles[u];
        }
        roles = shuffled;
    }
    let part = Partition::new(roles);
    ensure_honest_constraint(&g, &part)?;
    if spec.honest.contains(&HonestStrategy::FullAccuseCoverage)
        && !verify_outnumbering(&g, &part, None, &SearchBudget::default())?
    {
        return Err(Error::InvariantViolation(
            "full accusation coverage failed the outnumbering check".into(),
        ));
    }
    Ok((g, part))
}

fn ensure_honest_constraint(g: &SignedDigraph, part: &Partition) -> Result<()> {
    if part.honest_constraint_holds(g) {
        Ok(())
    } else {
        Err(Error::InvariantViolation(
            "generated honest edges break the honest constraint".into(),
        ))
    }
}

/// Copies `g` with node `u` renamed to `perm[u]`.
pub fn relabel(g: &SignedDigraph, perm: &[NodeId]) -> Result<SignedDigraph> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    if perm.len() != n
        || perm
            .iter()
            .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::Precondition(
            "relabelling must be a permutation of the nodes".into(),
        ));
    }
    let mut h = SignedDigraph::new(n);
    for (u, v, e) in g.edges() {
        h.add_edge(perm[u], perm[v], e.sign, e.weight)?;
    }
    Ok(h)
}

/// True when `map` sends every edge to an edge of the same sign and is a
/// permutation.
pub fn is_automorphism(g: &SignedDigraph, map: &[NodeId]) -> bool {
    match relabel(g, map) {
        Ok(h) => h
            .edges()
            .map(|(u, v, e)| (u, v, e.sign))
            .eq(g.edges().map(|(u, v, e)| (u, v, e.sign))),
        Err(_) => false,
    }
}

/// Accusations placed between the honest camp and its mirror image. Each one
/// is added together with its mirror so the camp swap stays an automorphism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorAccusations {
    /// Every honest node and its double accuse each other.
    pub doppelganger: bool,
    /// Probability of `h ⊣ m(h')` (and `m(h) ⊣ h'`) for each ordered
    /// honest pair `h != h'`.
    pub random_rate: f64,
}

impl MirrorAccusations {
    pub const NONE: MirrorAccusations = MirrorAccusations {
        doppelganger: false,
        random_rate: 0.0,
    };
}

/// `H ∪ H'` where `H'` is a copy of the endorsement graph `g_h` under
/// `m(i) = i + |H|`, with mirrored cross accusations. Returns the graph, the
/// partition (`H` honest) and the camp swap map.
pub fn mirror_attack(
    g_h: &SignedDigraph,
    pattern: MirrorAccusations,
    seed: u64,
) -> Result<(SignedDigraph, Partition, Vec<NodeId>)> {
    if g_h.accusation_count() > 0 {
        return Err(Error::Precondition(
            "the mirrored honest graph must contain only endorsements".into(),
        ));
    }
    check_probability("random_rate", pattern.random_rate)?;
    let k = g_h.node_count();
    let mut rng = rng_for(seed);
    let mut g = SignedDigraph::new(2 * k);
    for (u, v, e) in g_h.edges() {
        g.add_edge(u, v, e.sign, e.weight)?;
        g.add_edge(u + k, v + k, e.sign, e.weight)?;
    }
    for h in 0..k {
        for h2 in 0..k {
            let add = if h == h2 {
                pattern.doppelganger
            } else {
                rng.gen::<f64>() < pattern.random_rate
            };
            if add {
                g.add_edge(h, h2 + k, Sign::Accuse, 1.0)?;
                g.add_edge(h + k, h2, Sign::Accuse, 1.0)?;
            }
        }
    }
    let swap: Vec<NodeId> = (0..2 * k)
        .map(|u| if u < k { u + k } else { u - k })
        .collect();
    if !is_automorphism(&g, &swap) {
        return Err(Error::InvariantViolation(
            "mirror construction is not symmetric".into(),
        ));
    }
    let part = Partition::new(
        (0..2 * k)
            .map(|u| if u < k { Role::Honest } else { Role::Cheater })
            .collect(),
    );
    ensure_honest_constraint(&g, &part)?;
    Ok((g, part, swap))
}

/// Eight nodes: five honest nodes endorse a sixth, which accuses the head of
/// a two-cheater endorsement chain. The tree condition holds while the plain
/// outnumbering condition fails (the chain's tail has no honest accuser).
pub fn tree_condition_instance(seed: u64) -> Result<(SignedDigraph, Partition)> {
    let mut g = SignedDigraph::new(8);
    for h in 0..5 {
        g.endorse(h, 5)?;
    }
    g.accuse(5, 7)?;
    g.endorse(6, 7)?;
    let roles: Vec<Role> = (0..8)
        .map(|u| if u < 6 { Role::Honest } else { Role::Cheater })
        .collect();
    let mut perm: Vec<NodeId> = (0..8).collect();
    perm.shuffle(&mut rng_for(seed));
    let g = relabel(&g, &perm)?;
    let mut shuffled = vec![Role::Honest; 8];
    for u in 0..8 {
        shuffled[perm[u]] = roles[u];
    }
    let part = Partition::new(shuffled);
    ensure_honest_constraint(&g, &part)?;
    Ok((g, part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observer::{
        identify_by_largest_scc, largest_self_consistent_insular_set,
        self_consistent_insular_top_two, verify_hamiltonian_condition, verify_tree_condition,
    };

    fn spec(
        nh: usize,
        nc: usize,
        honest: Vec<HonestStrategy>,
        cheater: CheaterStrategy,
        seed: u64,
    ) -> ScenarioSpec {
        ScenarioSpec {
            n_honest: nh,
            n_cheaters: nc,
            honest,
            cheater,
            shuffle: true,
            seed,
        }
    }

    #[test]
    fn er_extremes() {
        assert_eq!(er_endorsement(5, 0.0, 0, 1).unwrap().edge_count(), 0);
        assert!(er_endorsement(5, 0.0, 1, 1).is_err());
        let g = er_endorsement(5, 1.0, 0, 1).unwrap();
        assert!(g.is_complete());
        assert_eq!(g.accusation_count(), 0);
        let g = er_endorsement(6, 1.0, 3, 1).unwrap();
        assert_eq!(g.accusation_count(), 3);
        assert!(er_endorsement(3, 1.5, 0, 1).is_err());
    }

    #[test]
    fn er_edge_count_within_three_sigma() {
        let (n, p, runs) = (30usize, 0.27, 200);
        let pairs = (n * (n - 1)) as f64;
        let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        let counts: Vec<f64> = (0..runs)
            .map(|s| er_endorsement(n, p, 1, s).unwrap().edge_count() as f64)
            .collect();
        let sample_mean = counts.iter().sum::<f64>() / runs as f64;
        assert!(
            (sample_mean - mean).abs() <= 3.0 * sd / (runs as f64).sqrt(),
            "{sample_mean}"
        );
        let outside = counts
            .iter()
            .filter(|&&m| (m - mean).abs() > 3.0 * sd)
            .count();
        assert!(outside <= 3, "{outside} of {runs} beyond 3 sigma");
    }

    #[test]
    fn er_is_deterministic() {
        assert_eq!(
            er_endorsement(20, 0.3, 2, 42).unwrap(),
            er_endorsement(20, 0.3, 2, 42).unwrap()
        );
        assert_ne!(
            er_endorsement(20, 0.3, 2, 42).unwrap(),
            er_endorsement(20, 0.3, 2, 43).unwrap()
        );
    }

    #[test]
    fn hamiltonian_path_scenario() {
        for seed in 0..20 {
            let (g, p) = planted_scenario(&spec(
                3,
                2,
                vec![HonestStrategy::HamiltonianAccusePath],
                CheaterStrategy::Silent,
                seed,
            ))
            .unwrap();
            assert!(verify_hamiltonian_condition(&g, &p, &SearchBudget::default()).unwrap());
        }
        assert!(matches!(
            planted_scenario(&spec(
                2,
                2,
                vec![HonestStrategy::HamiltonianAccusePath],
                CheaterStrategy::Silent,
                0
            )),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn coverage_scenario_outnumbers() {
        let (g, p) = planted_scenario(&spec(
            5,
            2,
            vec![HonestStrategy::FullAccuseCoverage],
            CheaterStrategy::Silent,
            3,
        ))
        .unwrap();
        assert!(verify_outnumbering(&g, &p, None, &SearchBudget::default()).unwrap());
        assert!(planted_scenario(&spec(
            3,
            2,
            vec![HonestStrategy::FullAccuseCoverage],
            CheaterStrategy::Silent,
            3
        ))
        .is_err());
    }

    #[test]
    fn every_strategy_keeps_the_honest_constraint() {
        let cheaters = [
            CheaterStrategy::Silent,
            CheaterStrategy::RandomMixed {
                p_pos: 0.3,
                p_neg: 0.3,
            },
            CheaterStrategy::Mirror,
            CheaterStrategy::AccuseHonest { rate: 0.5 },
        ];
        for (i, &c) in cheaters.iter().enumerate() {
            for seed in 0..10 {
                let s = spec(
                    7,
                    3,
                    vec![
                        HonestStrategy::RandomEndorse {
                            expected_degree: 2.0,
                        },
                        HonestStrategy::HamiltonianAccusePath,
                    ],
                    c,
                    seed * 10 + i as u64,
                );
                let (g, p) = planted_scenario(&s).unwrap();
                assert!(p.honest_constraint_holds(&g));
                assert_eq!(planted_scenario(&s).unwrap().0, g);
            }
        }
    }

    #[test]
    fn mirror_cheaters_copy_honest_structure() {
        let s = ScenarioSpec {
            shuffle: false,
            ..spec(
                3,
                3,
                vec![HonestStrategy::RandomEndorse {
                    expected_degree: 2.0,
                }],
                CheaterStrategy::Mirror,
                5,
            )
        };
        let (g, _) = planted_scenario(&s).unwrap();
        // with |C| = |H| and no accusations the honest and cheater endorsement counts match
        let inside = |lo: usize| {
            g.edges()
                .filter(|&(u, v, _)| (u >= 3) == (lo >= 3) && (v >= 3) == (lo >= 3))
                .count()
        };
        assert_eq!(inside(0), inside(3));
    }

    #[test]
    fn mirror_attack_examples() {
        let cycle = SignedDigraph::from_signed_edges(
            3,
            [
                (0, 1, Sign::Endorse),
                (1, 2, Sign::Endorse),
                (2, 0, Sign::Endorse),
            ],
        )
        .unwrap();
        let (g, p, swap) = mirror_attack(&cycle, MirrorAccusations::NONE, 0).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.endorsement_sccs().len(), 2);
        assert!(is_automorphism(&g, &swap));
        assert_eq!(p.cheater_count(), 3);
        assert!(matches!(
            identify_by_largest_scc(&g),
            Err(Error::Ambiguous(_))
        ));

        let pattern = MirrorAccusations {
            doppelganger: true,
            random_rate: 0.3,
        };
        let (g, _, swap) = mirror_attack(&cycle, pattern, 4).unwrap();
        assert!(is_automorphism(&g, &swap));
        let top = self_consistent_insular_top_two(&g, &SearchBudget::default()).unwrap();
        assert!(top.is_tied(1e-9));

        let bad = SignedDigraph::from_signed_edges(2, [(0, 1, Sign::Accuse)]).unwrap();
        assert!(mirror_attack(&bad, MirrorAccusations::NONE, 0).is_err());
    }

    #[test]
    fn tree_instance_separates_the_conditions() {
        for seed in 0..5 {
            let (g, p) = tree_condition_instance(seed).unwrap();
            let b = SearchBudget::default();
            assert!(verify_tree_condition(&g, &p, &b).unwrap());
            assert!(!verify_outnumbering(&g, &p, None, &b).unwrap());
            assert_eq!(
                largest_self_consistent_insular_set(&g, &b).unwrap(),
                p.honest()
            );
        }
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        let g = SignedDigraph::new(3);
        assert!(relabel(&g, &[0, 0, 1]).is_err());
        assert!(relabel(&g, &[0, 1]).is_err());
        assert!(!is_automorphism(&g, &[0, 3, 1]));
    }
}
