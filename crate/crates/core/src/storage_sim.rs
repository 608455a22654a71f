//! Seeded simulation of a storage cluster protected by a quasi affine
//! cartesian code.
//!
//! Each node stores one symbol of every stripe, so a node failure erases the
//! same position in all stripes. Repairs go through [`recover_all`] and are
//! checked symbol by symbol against the stored codeword.
//!
//! # Random numbers
//!
//! All randomness comes from [`SplitMix64`]: the state advances by
//! `0x9E3779B97F4A7C15` and each output is the state passed through the
//! finalizer
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! Trial `t` (0-based) is seeded with output `t + 1` of the generator started
//! at the master seed. Integers below `n` are drawn by rejecting outputs
//! smaller than `2^64 mod n` and reducing the rest mod `n`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::Elem;
use crate::local_recovery::{recover_all, repair_groups, ErasedCodeword, RecoveryError};
use crate::qac_code::{generator_matrix, CodeDescriptor, CodeError, CodeSpec};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Output `index` (1-based) of the generator seeded with `seed`, without
    /// stepping through the earlier ones.
    pub fn nth_output(seed: u64, index: u64) -> u64 {
        mix(seed.wrapping_add(GAMMA.wrapping_mul(index)))
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// First `count` entries of a uniform random permutation of `0..n`.
    pub fn sample(&mut self, n: usize, count: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

fn trial_rng(seed: u64, trial: u64) -> SplitMix64 {
    SplitMix64::new(SplitMix64::nth_output(seed, trial + 1))
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error("scenario file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureModel {
    /// Exactly `failure_count` distinct nodes fail.
    UniformRandom { failure_count: usize },
    /// `failure_count` distinct nodes of one repair group fail.
    TargetedGroup { group: usize, failure_count: usize },
    /// Each node fails independently with probability `numerator / denominator`.
    IidPerNode { numerator: u64, denominator: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterScenario {
    #[serde(flatten)]
    pub code: CodeDescriptor,
    pub stripes: usize,
    pub failure_model: FailureModel,
    pub seed: u64,
    pub trials: usize,
}

impl ClusterScenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        Ok(serde_json::from_str(text)?)
    }

    fn validate(&self, spec: &CodeSpec) -> Result<(), SimError> {
        let m = spec.m();
        let bad = |msg: String| Err(SimError::InvalidScenario(msg));
        match self.failure_model {
            FailureModel::UniformRandom { failure_count } if failure_count > m => {
                bad(format!("failure_count {failure_count} exceeds length {m}"))
            }
            FailureModel::TargetedGroup { group, failure_count } => {
                let groups = m / spec.group_size();
                if group >= groups {
                    bad(format!("group {group} out of range, code has {groups} groups"))
                } else if failure_count > spec.group_size() {
                    bad(format!(
                        "failure_count {failure_count} exceeds group size {}",
                        spec.group_size()
                    ))
                } else {
                    Ok(())
                }
            }
            FailureModel::IidPerNode { numerator, denominator } if denominator == 0 || numerator > denominator => {
                bad(format!("probability {numerator}/{denominator} is not in [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub trials: usize,
    pub stripes: usize,
    pub succeeded: u64,
    pub failed: u64,
    /// Trials whose failure pattern leaves some group with fewer than `r` survivors.
    pub unrecoverable_patterns: u64,
    pub repaired_symbols: u64,
    pub symbols_read: u64,
    pub mean_reads_per_repair: f64,
    pub max_reads_per_repair: u64,
    /// Failed nodes per repair group, summed over trials.
    pub group_failures: Vec<u64>,
    /// Repaired stripes differing from the stored codeword; always 0 for a correct decoder.
    pub mismatches: u64,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let total = self.succeeded + self.failed;
        let rate = if total == 0 {
            1.0
        } else {
            self.succeeded as f64 / total as f64
        };
        writeln!(f, "trials: {}  stripes per trial: {}", self.trials, self.stripes)?;
        writeln!(f, "stripes recovered: {}/{} ({:.4})", self.succeeded, total, rate)?;
        writeln!(f, "unrecoverable patterns: {}", self.unrecoverable_patterns)?;
        writeln!(
            f,
            "repaired symbols: {}  reads: {}  mean reads/repair: {:.3}  max: {}",
            self.repaired_symbols, self.symbols_read, self.mean_reads_per_repair, self.max_reads_per_repair
        )?;
        let hist: Vec<String> = self.group_failures.iter().map(u64::to_string).collect();
        writeln!(f, "failures per group: [{}]", hist.join(" "))?;
        writeln!(f, "mismatches: {}", self.mismatches)
    }
}

struct TrialOutcome {
    succeeded: u64,
    failed: u64,
    unrecoverable: bool,
    repaired: u64,
    reads: u64,
    max_reads: u64,
    mismatches: u64,
    failed_nodes: Vec<usize>,
}

fn group_of_positions(spec: &CodeSpec) -> (Vec<usize>, usize) {
    let groups = repair_groups(spec);
    let mut of = vec![0; spec.m()];
    for g in &groups {
        for &p in &g.members {
            of[p] = g.index;
        }
    }
    (of, groups.len())
}

fn draw_failures(spec: &CodeSpec, model: &FailureModel, rng: &mut SplitMix64) -> Vec<usize> {
    let m = spec.m();
    match *model {
        FailureModel::UniformRandom { failure_count } => rng.sample(m, failure_count),
        FailureModel::TargetedGroup { group, failure_count } => {
            let members = &repair_groups(spec)[group].members;
            rng.sample(members.len(), failure_count)
                .into_iter()
                .map(|i| members[i])
                .collect()
        }
        FailureModel::IidPerNode { numerator, denominator } => {
            (0..m).filter(|_| rng.below(denominator) < numerator).collect()
        }
    }
}

pub fn run_scenario(scenario: &ClusterScenario) -> Result<SimReport, SimError> {
    let spec = scenario.code.build()?;
    scenario.validate(&spec)?;
    let field = spec.field().clone();
    let q = field.order() as u64;
    let g = generator_matrix(&spec);
    let (group_of, groups) = group_of_positions(&spec);
    let r = spec.r() as usize;
    let group_size = spec.group_size();

    let outcomes: Vec<Result<TrialOutcome, SimError>> = (0..scenario.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(scenario.seed, trial);
            let failed_nodes = draw_failures(&spec, &scenario.failure_model, &mut rng);
            let mut per_group = vec![0usize; groups];
            for &p in &failed_nodes {
                per_group[group_of[p]] += 1;
            }
            let unrecoverable = per_group.iter().any(|&c| group_size - c < r);
            let mut out = TrialOutcome {
                succeeded: 0,
                failed: 0,
                unrecoverable,
                repaired: 0,
                reads: 0,
                max_reads: 0,
                mismatches: 0,
                failed_nodes,
            };
            for _ in 0..scenario.stripes {
                let msg: Vec<Elem> = (0..g.kappa()).map(|_| Elem::from_raw(rng.below(q) as u32)).collect();
                let stored = g.encode(&msg)?;
                let word = ErasedCodeword::new(&stored, &out.failed_nodes)?;
                match recover_all(&spec, &word) {
                    Ok((fixed, stats)) => {
                        out.succeeded += 1;
                        out.repaired += stats.repaired as u64;
                        out.reads += stats.symbols_read as u64;
                        if let Some(per) = stats.symbols_read.checked_div(stats.repaired) {
                            out.max_reads = out.max_reads.max(per as u64);
                        }
                        if fixed != stored {
                            out.mismatches += 1;
                        }
                    }
                    Err(RecoveryError::InsufficientSurvivors { .. }) => out.failed += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(out)
        })
        .collect();

    let mut report = SimReport {
        trials: scenario.trials,
        stripes: scenario.stripes,
        succeeded: 0,
        failed: 0,
        unrecoverable_patterns: 0,
        repaired_symbols: 0,
        symbols_read: 0,
        mean_reads_per_repair: 0.0,
        max_reads_per_repair: 0,
        group_failures: vec![0; groups],
        mismatches: 0,
    };
    for out in outcomes {
        let out = out?;
        report.succeeded += out.succeeded;
        report.failed += out.failed;
        report.unrecoverable_patterns += out.unrecoverable as u64;
        report.repaired_symbols += out.repaired;
        report.symbols_read += out.reads;
        report.max_reads_per_repair = report.max_reads_per_repair.max(out.max_reads);
        report.mismatches += out.mismatches;
        for p in out.failed_nodes {
            report.group_failures[group_of[p]] += 1;
        }
    }
    if report.repaired_symbols > 0 {
        report.mean_reads_per_repair = report.symbols_read as f64 / report.repaired_symbols as f64;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub failures: usize,
    pub recovered: usize,
    pub trials: usize,
    pub rate: f64,
}

/// Recovery rate against `f = 0..=max_failures` uniform node failures.
///
/// Each trial draws one random ordering of the nodes and fails its prefixes,
/// so the failure set at `f + 1` contains the one at `f` and the rate cannot
/// increase with `f`.
pub fn survivability_sweep(spec: &CodeSpec, max_failures: usize, trials: usize, seed: u64) -> Vec<SweepPoint> {
    let m = spec.m();
    let max_failures = max_failures.min(m);
    let (group_of, groups) = group_of_positions(spec);
    let limit = spec.group_size() - spec.r() as usize;

    // first f at which each trial becomes unrecoverable
    let breaking: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let order = trial_rng(seed, trial).sample(m, max_failures);
            let mut per_group = vec![0usize; groups];
            for (i, &p) in order.iter().enumerate() {
                per_group[group_of[p]] += 1;
                if per_group[group_of[p]] > limit {
                    return i + 1;
                }
            }
            usize::MAX
        })
        .collect();

    let points: Vec<SweepPoint> = (0..=max_failures)
        .map(|f| {
            let recovered = breaking.iter().filter(|&&b| b > f).count();
            let rate = if trials == 0 {
                1.0
            } else {
                recovered as f64 / trials as f64
            };
            SweepPoint {
                failures: f,
                recovered,
                trials,
                rate,
            }
        })
        .collect();
    assert!(
        points.windows(2).all(|w| w[1].recovered <= w[0].recovered),
        "coupled sweep must be monotone"
    );
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // reference outputs for seed 0
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(SplitMix64::nth_output(0, 2), 0x6E78_9E6A_A1B9_65F4);
        let mut rng = SplitMix64::new(7);
        let s = rng.sample(10, 10);
        let mut sorted = s.clone();
        sorted.sort();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert!((0..1000).all(|_| rng.below(3) < 3));
    }

    fn scenario(model: FailureModel) -> ClusterScenario {
        let json = r#"{"field": "3", "factors": [1, 1], "d": 2, "delta": 2, "s": 2,
            "stripes": 3, "failure_model": {"kind": "uniform_random", "failure_count": 0},
            "seed": 11, "trials": 20}"#;
        let mut sc = ClusterScenario::from_json(json).unwrap();
        sc.failure_model = model;
        sc
    }

    #[test]
    fn no_failures() {
        let rep = run_scenario(&scenario(FailureModel::UniformRandom { failure_count: 0 })).unwrap();
        assert_eq!((rep.succeeded, rep.failed, rep.symbols_read), (60, 0, 0));
    }

    #[test]
    fn targeted_group() {
        let rep = run_scenario(&scenario(FailureModel::TargetedGroup {
            group: 1,
            failure_count: 1,
        }))
        .unwrap();
        assert_eq!((rep.succeeded, rep.failed, rep.mismatches), (60, 0, 0));
        assert_eq!(rep.max_reads_per_repair, 2);
        assert_eq!(rep.mean_reads_per_repair, 2.0);
        assert_eq!(rep.group_failures, vec![0, 20, 0]);

        let rep = run_scenario(&scenario(FailureModel::TargetedGroup {
            group: 1,
            failure_count: 2,
        }))
        .unwrap();
        assert_eq!((rep.succeeded, rep.failed, rep.unrecoverable_patterns), (0, 60, 20));
    }

    #[test]
    fn rejects_bad_scenarios() {
        for model in [
            FailureModel::UniformRandom { failure_count: 10 },
            FailureModel::TargetedGroup {
                group: 3,
                failure_count: 1,
            },
            FailureModel::TargetedGroup {
                group: 0,
                failure_count: 4,
            },
            FailureModel::IidPerNode {
                numerator: 3,
                denominator: 2,
            },
            FailureModel::IidPerNode {
                numerator: 0,
                denominator: 0,
            },
        ] {
            assert!(matches!(
                run_scenario(&scenario(model)),
                Err(SimError::InvalidScenario(_))
            ));
        }
    }

    #[test]
    fn sweep_endpoints() {
        let sc = scenario(FailureModel::UniformRandom { failure_count: 0 });
        let spec = sc.code.build().unwrap();
        let pts = survivability_sweep(&spec, 9, 50, 3);
        assert_eq!(pts.len(), 10);
        assert_eq!(pts[1].rate, 1.0);
        assert_eq!(pts[9].rate, 0.0);
    }
}
