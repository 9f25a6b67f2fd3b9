//! Seeded experiments over Erdős–Rényi endorsement graphs and the census
//! table for an ingested network.
//!
//! Stream discipline: replicate `r` of grid point `i` builds its graph from
//! stream `2k` and runs its dynamics on stream `2k + 1` of the base seed,
//! where `k = i * replicates + r`. Replicates run in parallel and are
//! collected in `(i, r)` order.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dynamics::{run, DynamicsConfig, Mode, Sampling, TrajectoryStats};
use crate::error::{Error, Result};
use crate::generators::er_endorsement_with;
use crate::graph::SignedDigraph;
use crate::io::{Dedup, Metadata};

#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    /// One trajectory on one graph.
    Fracture,
    /// Final accusation fraction across a grid of edge probabilities.
    PhaseSweep,
    /// Motif census of an ingested edge list.
    CensusTable { input: PathBuf, dedup: Dedup },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub p: f64,
    pub p_grid: Vec<f64>,
    pub accusations: usize,
    pub replicates: usize,
    pub steps: u64,
    pub alpha: f64,
    pub beta: f64,
    pub mode: Mode,
    pub sampling: Sampling,
    pub thinning: u64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Fracture,
            n: 30,
            p: 0.27,
            p_grid: (1..=10).map(|i| i as f64 * 0.05).collect(),
            accusations: 1,
            replicates: 200,
            steps: 1500,
            alpha: 0.9,
            beta: 0.5,
            mode: Mode::Local,
            sampling: Sampling::AllNodes,
            thinning: 1,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p must lie in [0, 1], got {}", self.p));
        }
        if let Some(q) = self.p_grid.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return bad(format!("p-grid value {q} outside [0, 1]"));
        }
        if matches!(self.experiment, Experiment::PhaseSweep) && self.p_grid.is_empty() {
            return bad("p-grid must not be empty".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        self.dynamics(0).validate()
    }

    fn dynamics(&self, stream: u64) -> DynamicsConfig {
        DynamicsConfig {
            alpha: self.alpha,
            beta: self.beta,
            mode: self.mode,
            max_steps: self.steps,
            seed: self.seed,
            stream,
            thinning: self.thinning,
            sampling: self.sampling,
        }
    }

    /// SHA-256 of the canonical rendering of every field.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Provenance lines for CSV outputs.
    pub fn metadata(&self) -> Metadata {
        let mut m: Metadata = vec![
            (
                "software".into(),
                format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            ),
            ("cfg_sha256".into(), self.hash()),
            ("seed".into(), self.seed.to_string()),
        ];
        match &self.experiment {
            Experiment::Fracture => m.push(("experiment".into(), "fracture".into())),
            Experiment::PhaseSweep => m.push(("experiment".into(), "sweep".into())),
            Experiment::CensusTable { input, dedup } => {
                m.push(("experiment".into(), "census".into()));
                m.push(("input".into(), input.display().to_string()));
                m.push(("dedup".into(), format!("{dedup:?}")));
            }
        }
        if !matches!(self.experiment, Experiment::CensusTable { .. }) {
            m.extend([
                ("n".into(), self.n.to_string()),
                ("p".into(), self.p.to_string()),
                ("accusations".into(), self.accusations.to_string()),
                ("steps".into(), self.steps.to_string()),
                ("alpha".into(), self.alpha.to_string()),
                ("beta".into(), self.beta.to_string()),
                ("mode".into(), format!("{:?}", self.mode)),
                ("sampling".into(), format!("{:?}", self.sampling)),
            ]);
        }
        if matches!(self.experiment, Experiment::PhaseSweep) {
            m.push(("replicates".into(), self.replicates.to_string()));
            let grid: Vec<String> = self.p_grid.iter().map(f64::to_string).collect();
            m.push(("p_grid".into(), grid.join(" ")));
        }
        m
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractureRun {
    pub initial: SignedDigraph,
    pub last: SignedDigraph,
    pub stats: TrajectoryStats,
}

/// One ER graph and one trajectory from it; replicate `index` of `p`.
pub fn fracture_replicate(cfg: &ExperimentConfig, p: f64, index: u64) -> Result<FractureRun> {
    let initial = er_endorsement_with(
        cfg.n,
        p,
        cfg.accusations,
        &mut stream_rng(cfg.seed, 2 * index),
    )?;
    let (last, stats) = run(&initial, &cfg.dynamics(2 * index + 1))?;
    Ok(FractureRun {
        initial,
        last,
        stats,
    })
}

/// The single-trajectory experiment at `cfg.p`.
pub fn fracture(cfg: &ExperimentConfig) -> Result<FractureRun> {
    cfg.validate()?;
    fracture_replicate(cfg, cfg.p, 0)
}

/// Final state summary of one replicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub p: f64,
    pub replicate: usize,
    pub endorsements: usize,
    pub accusations: usize,
    pub converged: bool,
    pub steps_used: u64,
}

impl Outcome {
    /// Accusations over all edges; zero for an edgeless graph.
    pub fn accusation_fraction(&self) -> f64 {
        let total = self.endorsements + self.accusations;
        if total == 0 {
            0.0
        } else {
            self.accusations as f64 / total as f64
        }
    }
}

/// `replicates` runs at every `p` of the grid.
pub fn replicate_outcomes(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<Outcome>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..cfg.replicates).map(move |r| (i, r)))
        .collect();
    jobs.par_iter()
        .map(|&(i, r)| {
            let k = (i * cfg.replicates + r) as u64;
            let run = fracture_replicate(cfg, grid[i], k)?;
            let last = run.stats.last();
            Ok(Outcome {
                p: grid[i],
                replicate: r,
                endorsements: last.endorsements,
                accusations: last.accusations,
                converged: run.stats.converged,
                steps_used: run.stats.steps_used,
            })
        })
        .collect()
}

/// Quantile by linear interpolation between order statistics of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Distribution-free 95% confidence interval for the median: the order
/// statistics at ranks `n/2 ∓ 1.96·√n/2`.
pub fn median_ci(sorted: &[f64]) -> (f64, f64) {
    let n = sorted.len() as f64;
    let half = 1.96 * n.sqrt() / 2.0;
    let lo = ((n / 2.0 - half).floor().max(1.0) as usize).min(sorted.len()) - 1;
    let hi = ((n / 2.0 + half).ceil() as usize).clamp(1, sorted.len()) - 1;
    (sorted[lo], sorted[hi])
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub converged: usize,
    pub fractions: Vec<f64>,
}

pub fn phase_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    let outcomes = replicate_outcomes(cfg, &cfg.p_grid)?;
    Ok(summarize(&outcomes, cfg.replicates))
}

/// Per-grid-point summary of `replicate_outcomes` output (chunks of
/// `replicates` consecutive outcomes share one `p`).
pub fn summarize(outcomes: &[Outcome], replicates: usize) -> Vec<SweepPoint> {
    outcomes
        .chunks(replicates.max(1))
        .map(|chunk| {
            let fractions: Vec<f64> = chunk.iter().map(Outcome::accusation_fraction).collect();
            let mut sorted = fractions.clone();
            sorted.sort_by(f64::total_cmp);
            let (ci_low, ci_high) = median_ci(&sorted);
            SweepPoint {
                p: chunk[0].p,
                median: quantile(&sorted, 0.5),
                q1: quantile(&sorted, 0.25),
                q3: quantile(&sorted, 0.75),
                ci_low,
                ci_high,
                converged: chunk.iter().filter(|o| o.converged).count(),
                fractions,
            }
        })
        .collect()
}

/// Medians never drop by more than confidence intervals allow: whenever a
/// later grid point has a lower median than an earlier one, their intervals
/// overlap.
pub fn is_monotone_within_ci(points: &[SweepPoint]) -> bool {
    points.iter().enumerate().all(|(i, a)| {
        points[i + 1..]
            .iter()
            .all(|b| b.median >= a.median || b.ci_high >= a.ci_low)
    })
}

/// As `is_monotone_within_ci` with the interquartile band in place of the
/// median interval.
pub fn is_monotone_within_iqr(points: &[SweepPoint]) -> bool {
    points.iter().enumerate().all(|(i, a)| {
        points[i + 1..]
            .iter()
            .all(|b| b.median >= a.median || b.q3 >= a.q1)
    })
}

/// The median starts below one half and ends above it.
pub fn crosses_half_inside(points: &[SweepPoint]) -> bool {
    match (points.first(), points.last()) {
        (Some(a), Some(b)) => points.len() >= 3 && a.median < 0.5 && b.median > 0.5,
        _ => false,
    }
}

pub fn write_sweep<W: std::io::Write>(
    points: &[SweepPoint],
    meta: &Metadata,
    mut out: W,
) -> Result<()> {
    crate::io::write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "p",
        "median",
        "q1",
        "q3",
        "ci_low",
        "ci_high",
        "converged",
        "replicates",
    ])?;
    for pt in points {
        w.write_record([
            pt.p.to_string(),
            format!("{:.6}", pt.median),
            format!("{:.6}", pt.q1),
            format!("{:.6}", pt.q3),
            format!("{:.6}", pt.ci_low),
            format!("{:.6}", pt.ci_high),
            pt.converged.to_string(),
            pt.fractions.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outcomes<W: std::io::Write>(
    outcomes: &[Outcome],
    meta: &Metadata,
    mut out: W,
) -> Result<()> {
    crate::io::write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "p",
        "replicate",
        "endorsements",
        "accusations",
        "accusation_fraction",
        "converged",
        "steps_used",
    ])?;
    for o in outcomes {
        w.write_record([
            o.p.to_string(),
            o.replicate.to_string(),
            o.endorsements.to_string(),
            o.accusations.to_string(),
            format!("{:.6}", o.accusation_fraction()),
            o.converged.to_string(),
            o.steps_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.25), 1.75);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn median_ci_brackets_median() {
        let xs: Vec<f64> = (0..200).map(f64::from).collect();
        let (lo, hi) = median_ci(&xs);
        assert!(lo < 99.5 && hi > 99.5);
        assert!(hi - lo < 30.0);
        assert_eq!(median_ci(&[3.0]), (3.0, 3.0));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            experiment: Experiment::PhaseSweep,
            p_grid: vec![0.1, 1.2],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            replicates: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn hash_tracks_every_field() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig {
            seed: 1,
            ..Default::default()
        };
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), ExperimentConfig::default().hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn replicates_are_reproducible_and_ordered() {
        let cfg = ExperimentConfig {
            n: 12,
            replicates: 4,
            steps: 200,
            ..Default::default()
        };
        let a = replicate_outcomes(&cfg, &[0.2, 0.4]).unwrap();
        let b = replicate_outcomes(&cfg, &[0.2, 0.4]).unwrap();
        assert_eq!(a, b);
        let order: Vec<(f64, usize)> = a.iter().map(|o| (o.p, o.replicate)).collect();
        assert_eq!(order[..2], [(0.2, 0), (0.2, 1)]);
        assert_eq!(order[4], (0.4, 0));
    }

    #[test]
    fn sweep_shape_checks() {
        let pt = |median: f64, lo: f64, hi: f64| SweepPoint {
            p: 0.0,
            median,
            q1: lo,
            q3: hi,
            ci_low: lo,
            ci_high: hi,
            converged: 0,
            fractions: vec![],
        };
        let rising = [pt(0.1, 0.0, 0.2), pt(0.4, 0.3, 0.5), pt(0.8, 0.7, 0.9)];
        assert!(is_monotone_within_ci(&rising));
        assert!(crosses_half_inside(&rising));
        let dip = [pt(0.6, 0.55, 0.65), pt(0.2, 0.1, 0.3)];
        assert!(!is_monotone_within_ci(&dip));
        assert!(!crosses_half_inside(&dip));
    }
}
