use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{RunSeeds, SimulationConfig};
use super::HarnessError;
use crate::algebra::{Matrix, PrimeField};
use crate::coding::CodeContext;
use crate::par::Execution;
use crate::protocol::{run_protocol, true_gradient, Bounds, ProtocolConfig, Transcript};

pub const CSV_HEADER: &str =
    "n,s,u,p,d,q,assignment,adversary,seed,correct,c,C_oh,rounds,downlink_bits,eliminated";

/// Figures of merit of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub n: usize,
    pub s: usize,
    pub u: usize,
    pub p: usize,
    pub d: usize,
    pub q: u64,
    pub assignment: String,
    pub adversary: String,
    pub seed: u64,
    pub correct: bool,
    pub c: usize,
    pub c_oh: usize,
    pub rounds: usize,
    pub downlink_bits: usize,
    /// 1-based.
    pub eliminated: Vec<usize>,
    pub within_bounds: bool,
    /// Set when the run aborted; the counters are then zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunMetrics {
    fn blank(config: &SimulationConfig) -> Self {
        Self {
            n: config.n,
            s: config.s,
            u: config.u,
            p: config.p,
            d: config.d,
            q: config.q,
            assignment: config.assignment.to_string(),
            adversary: config.adversary.strategy.to_string(),
            seed: config.seed,
            correct: false,
            c: 0,
            c_oh: 0,
            rounds: 0,
            downlink_bits: 0,
            eliminated: Vec::new(),
            within_bounds: false,
            error: None,
        }
    }

    pub(crate) fn failed(config: &SimulationConfig, error: &HarnessError) -> Self {
        Self {
            error: Some(error.to_string()),
            ..Self::blank(config)
        }
    }

    pub fn bounds(&self) -> Bounds {
        let r = self.n - self.s - self.u;
        Bounds::for_params(self.s, self.u, r, self.p)
    }

    /// Correct output within the guaranteed limits.
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.correct && self.within_bounds
    }

    /// One CSV line matching [`CSV_HEADER`]; eliminated workers are `;`-separated.
    pub fn csv_row(&self) -> String {
        let eliminated = self
            .eliminated
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let mut row = String::new();
        write!(
            row,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.s,
            self.u,
            self.p,
            self.d,
            self.q,
            self.assignment,
            self.adversary,
            self.seed,
            self.correct,
            self.c,
            self.c_oh,
            self.rounds,
            self.downlink_bits,
            eliminated
        )
        .expect("writing to a String");
        row
    }
}

pub fn metrics_csv<'a>(rows: impl IntoIterator<Item = &'a RunMetrics>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug)]
pub struct SimulationOutcome {
    pub metrics: RunMetrics,
    pub transcript: Transcript,
}

/// Partial gradients drawn uniformly from the field, `d x p`.
pub fn random_gradients(field: PrimeField, d: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(field, d, p, |_, _| field.random(&mut rng))
}

/// Runs the protocol once; `gradients` overrides the seeded random data.
pub fn simulate_with(
    config: &SimulationConfig,
    gradients: Option<&Matrix>,
    execution: Execution,
) -> Result<SimulationOutcome, HarnessError> {
    config.validate()?;
    let seeds = RunSeeds::from(config.seed);
    let ctx = CodeContext::new(config.n, config.s, config.u, config.q)?;
    let a = config.assignment_matrix()?;
    let generated;
    let g = match gradients {
        Some(g) => {
            if g.rows() != config.d || g.cols() != config.p || g.field() != ctx.field() {
                return Err(HarnessError::Config("gradient matrix does not fit the config".into()));
            }
            g
        }
        None => {
            generated = random_gradients(ctx.field(), config.d, config.p, seeds.gradients);
            &generated
        }
    };
    let mut adversary = config
        .adversary
        .build(config.n, config.s, seeds.adversary)?;
    let protocol = ProtocolConfig {
        grouping: config.grouping,
        execution,
    };
    let out = run_protocol(&ctx, &a, g, adversary.as_mut(), protocol)?;
    let totals = &out.transcript.totals;
    let mut metrics = RunMetrics {
        correct: out.gradient == true_gradient(g),
        c: totals.c,
        c_oh: totals.c_oh,
        rounds: totals.rounds,
        downlink_bits: totals.downlink_bits,
        eliminated: totals.eliminated.iter().map(|j| j + 1).collect(),
        ..RunMetrics::blank(config)
    };
    metrics.within_bounds = metrics.bounds().holds(totals);
    Ok(SimulationOutcome {
        metrics,
        transcript: out.transcript,
    })
}

pub fn simulate(config: &SimulationConfig) -> Result<SimulationOutcome, HarnessError> {
    simulate_with(config, None, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{AdversarySpec, StrategyName};

    #[test]
    fn csv_row_shape() {
        let cfg = SimulationConfig {
            adversary: AdversarySpec::named(StrategyName::WorkedExample),
            q: 7,
            ..Default::default()
        };
        let out = simulate(&cfg).unwrap();
        let row = out.metrics.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("3,1,1,3,1,7,cyclic,worked-example,0,true,1,"));
        assert!(row.ends_with(",3"));
    }

    #[test]
    fn identical_configs_give_identical_output() {
        let cfg = SimulationConfig {
            n: 7,
            s: 2,
            u: 1,
            p: 9,
            d: 2,
            seed: 17,
            adversary: AdversarySpec::named(StrategyName::RandomCoin),
            ..Default::default()
        };
        let a = simulate(&cfg).unwrap();
        let b = simulate_with(&cfg, None, Execution::Sequential).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.transcript.to_jsonl(), b.transcript.to_jsonl());
    }
}
