use serde::{Deserialize, Serialize};

use super::config::{AdversarySpec, AssignmentSource, RunSeeds, SimulationConfig, StrategyName};
use super::run::{metrics_csv, simulate_with, RunMetrics};
use super::HarnessError;
use crate::algebra::DEFAULT_MODULUS;
use crate::assignment::AssignmentKind;
use crate::par::{self, Execution};
use crate::protocol::GroupingOrder;

/// A cartesian parameter grid. `u` defaults to every admissible value
/// `1..=min(s+1, n-s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n: Vec<usize>,
    pub s: Vec<usize>,
    pub u: Option<Vec<usize>>,
    pub p: Vec<usize>,
    pub d: Vec<usize>,
    pub q: u64,
    pub assignments: Vec<AssignmentKind>,
    pub adversaries: Vec<StrategyName>,
    /// Runs per grid point, with seeds `base_seed..base_seed + seeds`.
    pub seeds: u64,
    pub base_seed: u64,
    pub grouping: GroupingOrder,
}

impl Default for GridSpec {
    /// The bound suite: every small instance against the standard adversaries.
    fn default() -> Self {
        Self {
            n: (4..=8).collect(),
            s: vec![1, 2, 3],
            u: None,
            p: vec![1, 4, 9, 16],
            d: vec![1, 3],
            q: DEFAULT_MODULUS,
            assignments: vec![
                AssignmentKind::Cyclic,
                AssignmentKind::Fractional,
                AssignmentKind::Random,
            ],
            adversaries: vec![
                StrategyName::Honest,
                StrategyName::RandomAlways,
                StrategyName::RandomInitialOnly,
                StrategyName::TournamentLiar,
            ],
            seeds: 20,
            base_seed: 0,
            grouping: GroupingOrder::Lowest,
        }
    }
}

impl GridSpec {
    pub fn empty() -> Self {
        Self {
            n: Vec::new(),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Expands the grid. Parameter combinations the scheme or the assignment
    /// family does not support are returned separately and never run.
    pub fn expand(&self) -> (Vec<SimulationConfig>, Vec<Rejection>) {
        let mut runs = Vec::new();
        let mut rejected = Vec::new();
        for &n in &self.n {
            for &s in &self.s {
                let us: Vec<usize> = match &self.u {
                    Some(us) => us.clone(),
                    None => (1..=(s + 1).min(n.saturating_sub(s))).collect(),
                };
                for &u in &us {
                    for &p in &self.p {
                        for &d in &self.d {
                            for &kind in &self.assignments {
                                let base = SimulationConfig {
                                    n,
                                    s,
                                    u,
                                    p,
                                    d,
                                    q: self.q,
                                    assignment: AssignmentSource::Generated(kind),
                                    grouping: self.grouping,
                                    ..SimulationConfig::default()
                                };
                                if let Err(reason) = feasible(&base) {
                                    rejected.push(Rejection {
                                        n,
                                        s,
                                        u,
                                        p,
                                        d,
                                        assignment: kind.to_string(),
                                        reason,
                                    });
                                    continue;
                                }
                                for &strategy in &self.adversaries {
                                    for k in 0..self.seeds {
                                        runs.push(SimulationConfig {
                                            adversary: AdversarySpec::named(strategy),
                                            seed: self.base_seed.wrapping_add(k),
                                            ..base.clone()
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        (runs, rejected)
    }
}

fn feasible(config: &SimulationConfig) -> Result<(), String> {
    config.validate().map_err(|e| e.to_string())?;
    let AssignmentSource::Generated(kind) = config.assignment else {
        return Ok(());
    };
    // The random generator is seed dependent only in which layout it finds,
    // never in whether one exists; probe with the first seed.
    kind.generate(
        config.n,
        config.p,
        config.rho(),
        RunSeeds::from(config.seed).assignment,
    )
    .map(|_| ())
    .map_err(|e| e.to_string())
}

/// A grid point that was not run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub n: usize,
    pub s: usize,
    pub u: usize,
    pub p: usize,
    pub d: usize,
    pub assignment: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub runs: usize,
    pub incorrect: usize,
    pub bound_violations: usize,
    /// Runs that aborted with an error.
    pub failures: usize,
    pub max_c: usize,
    pub max_c_oh: usize,
    pub max_rounds: usize,
    pub max_downlink_bits: usize,
    pub mean_c: f64,
    pub mean_c_oh: f64,
    pub mean_rounds: f64,
    pub mean_downlink_bits: f64,
}

impl Aggregates {
    pub fn of(rows: &[RunMetrics]) -> Self {
        let mean = |f: fn(&RunMetrics) -> usize| {
            if rows.is_empty() {
                0.0
            } else {
                rows.iter().map(f).sum::<usize>() as f64 / rows.len() as f64
            }
        };
        let max = |f: fn(&RunMetrics) -> usize| rows.iter().map(f).max().unwrap_or(0);
        Self {
            runs: rows.len(),
            incorrect: rows.iter().filter(|r| !r.correct).count(),
            bound_violations: rows
                .iter()
                .filter(|r| r.error.is_none() && !r.within_bounds)
                .count(),
            failures: rows.iter().filter(|r| r.error.is_some()).count(),
            max_c: max(|r| r.c),
            max_c_oh: max(|r| r.c_oh),
            max_rounds: max(|r| r.rounds),
            max_downlink_bits: max(|r| r.downlink_bits),
            mean_c: mean(|r| r.c),
            mean_c_oh: mean(|r| r.c_oh),
            mean_rounds: mean(|r| r.rounds),
            mean_downlink_bits: mean(|r| r.downlink_bits),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs: Vec<RunMetrics>,
    pub rejected: Vec<Rejection>,
    pub summary: Aggregates,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        let s = &self.summary;
        s.incorrect == 0 && s.bound_violations == 0 && s.failures == 0
    }

    pub fn to_csv(&self) -> String {
        metrics_csv(&self.runs)
    }

    pub fn failing(&self) -> impl Iterator<Item = &RunMetrics> {
        self.runs.iter().filter(|r| !r.ok())
    }
}

/// Runs every grid point. Results are in grid order regardless of `execution`.
pub fn sweep(grid: &GridSpec, execution: Execution) -> SweepReport {
    let (configs, rejected) = grid.expand();
    // Runs are the unit of parallelism; each one is sequential inside.
    let runs = par::map(execution, &configs, |cfg| {
        simulate_with(cfg, None, Execution::Sequential)
            .map(|o| o.metrics)
            .unwrap_or_else(|e| RunMetrics::failed(cfg, &e))
    });
    let summary = Aggregates::of(&runs);
    SweepReport {
        runs,
        rejected,
        summary,
    }
}
