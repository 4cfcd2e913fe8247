use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::adversary::{
    worked_example, Adversary, Honest, LiePlan, Persistence, RandomCorruption, Symmetrizing,
    TournamentLiar,
};
use crate::algebra::DEFAULT_MODULUS;
use crate::assignment::{AssignmentKind, AssignmentMatrix};
use crate::protocol::GroupingOrder;

/// Where the data assignment comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AssignmentSource {
    Generated(AssignmentKind),
    /// Plain-text assignment file.
    File(PathBuf),
}

impl Default for AssignmentSource {
    fn default() -> Self {
        AssignmentSource::Generated(AssignmentKind::Cyclic)
    }
}

impl FromStr for AssignmentSource {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(AssignmentSource::File(path.into()));
        }
        match s.parse::<AssignmentKind>() {
            Ok(kind) => Ok(AssignmentSource::Generated(kind)),
            Err(_) if std::path::Path::new(s).exists() => Ok(AssignmentSource::File(s.into())),
            Err(_) => Err(HarnessError::Config(format!(
                "unknown assignment `{s}` (cyclic, fractional, random, or a file path)"
            ))),
        }
    }
}

impl TryFrom<String> for AssignmentSource {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<AssignmentSource> for String {
    fn from(a: AssignmentSource) -> String {
        a.to_string()
    }
}

impl fmt::Display for AssignmentSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentSource::Generated(kind) => write!(f, "{kind}"),
            AssignmentSource::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Honest,
    RandomAlways,
    RandomInitialOnly,
    RandomCoin,
    TournamentLiar,
    WorkedExample,
    Symmetrization,
}

impl StrategyName {
    pub const ALL: [StrategyName; 7] = [
        StrategyName::Honest,
        StrategyName::RandomAlways,
        StrategyName::RandomInitialOnly,
        StrategyName::RandomCoin,
        StrategyName::TournamentLiar,
        StrategyName::WorkedExample,
        StrategyName::Symmetrization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::Honest => "honest",
            StrategyName::RandomAlways => "random-always",
            StrategyName::RandomInitialOnly => "random-initial-only",
            StrategyName::RandomCoin => "random-coin",
            StrategyName::TournamentLiar => "tournament-liar",
            StrategyName::WorkedExample => "worked-example",
            StrategyName::Symmetrization => "symmetrization",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown adversary `{s}`; expected one of {}",
                    Self::ALL.map(StrategyName::as_str).join(", ")
                ))
            })
    }
}

/// Which workers the adversary takes over.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "workers", rename_all = "snake_case")]
pub enum ControlledRule {
    /// `count` workers drawn uniformly with the run's seed.
    #[default]
    Random,
    Lowest,
    Highest,
    /// Explicit 1-based worker indices.
    List(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdversarySpec {
    pub strategy: StrategyName,
    pub controlled: ControlledRule,
    /// Number of controlled workers; defaults to `s`.
    pub count: Option<usize>,
    /// Overrides the adversary's own seed, which is otherwise derived from the run seed.
    pub seed: Option<u64>,
    /// Common offset of the symmetrization attack.
    pub lambda: u64,
    pub lie_plan: LiePlan,
    /// Fixed error value for scripted liars; random when absent.
    pub offset: Option<u64>,
    /// Groups the symmetrization attack targets; defaults to `s`.
    pub groups: Option<usize>,
}

impl Default for AdversarySpec {
    fn default() -> Self {
        Self {
            strategy: StrategyName::Honest,
            controlled: ControlledRule::Random,
            count: None,
            seed: None,
            lambda: 1,
            lie_plan: LiePlan::Consistent,
            offset: None,
            groups: None,
        }
    }
}

impl AdversarySpec {
    pub fn named(strategy: StrategyName) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }

    fn controlled_set(
        &self,
        n: usize,
        s: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<BTreeSet<usize>, HarnessError> {
        let k = self.count.unwrap_or(s).min(n);
        Ok(match &self.controlled {
            ControlledRule::Random => rand::seq::index::sample(rng, n, k).into_iter().collect(),
            ControlledRule::Lowest => (0..k).collect(),
            ControlledRule::Highest => (n - k..n).collect(),
            ControlledRule::List(list) => {
                if let Some(&bad) = list.iter().find(|&&j| j == 0 || j > n) {
                    return Err(HarnessError::Config(format!(
                        "controlled worker {bad} is outside 1..={n}"
                    )));
                }
                list.iter().map(|j| j - 1).collect()
            }
        })
    }

    /// Instantiates the strategy for one run.
    pub fn build(&self, n: usize, s: usize, seed: u64) -> Result<Box<dyn Adversary>, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let controlled = self.controlled_set(n, s, &mut rng)?;
        let own_seed = self.seed.unwrap_or_else(|| rng.gen());
        let random = |p| Box::new(RandomCorruption::new(controlled.clone(), own_seed, p));
        Ok(match self.strategy {
            StrategyName::Honest => Box::new(Honest::new()),
            StrategyName::RandomAlways => random(Persistence::Always),
            StrategyName::RandomInitialOnly => random(Persistence::InitialOnly),
            StrategyName::RandomCoin => random(Persistence::PerQueryCoin),
            StrategyName::TournamentLiar => {
                let liar = TournamentLiar::new(controlled.clone(), self.lie_plan.clone(), own_seed);
                Box::new(match self.offset {
                    Some(e) => liar.with_offset(e),
                    None => liar,
                })
            }
            StrategyName::WorkedExample => {
                if n < 3 {
                    return Err(HarnessError::Config(
                        "the worked-example adversary needs at least 3 workers".into(),
                    ));
                }
                Box::new(worked_example(self.offset.unwrap_or(1)))
            }
            StrategyName::Symmetrization => Box::new(Symmetrizing::new(self.groups, self.lambda)),
        })
    }
}

/// Everything needed for one simulated run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub n: usize,
    pub s: usize,
    pub u: usize,
    pub p: usize,
    pub d: usize,
    pub q: u64,
    pub assignment: AssignmentSource,
    pub adversary: AdversarySpec,
    pub seed: u64,
    pub grouping: GroupingOrder,
    /// JSONL transcript destination.
    pub transcript: Option<PathBuf>,
    /// CSV metrics destination.
    pub metrics: Option<PathBuf>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n: 3,
            s: 1,
            u: 1,
            p: 3,
            d: 1,
            q: DEFAULT_MODULUS,
            assignment: AssignmentSource::default(),
            adversary: AdversarySpec::default(),
            seed: 0,
            grouping: GroupingOrder::Lowest,
            transcript: None,
            metrics: None,
        }
    }
}

/// Independent streams derived from the run seed.
pub(crate) struct RunSeeds {
    pub assignment: u64,
    pub gradients: u64,
    pub adversary: u64,
}

impl RunSeeds {
    pub fn from(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            assignment: rng.gen(),
            gradients: rng.gen(),
            adversary: rng.gen(),
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn rho(&self) -> usize {
        self.s + self.u
    }

    /// Rejects parameter combinations the scheme is not defined for.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.u == 0 || self.u > self.s + 1 {
            return bad(format!("need 1 <= u <= s+1, got s={}, u={}", self.s, self.u));
        }
        if self.n < self.s + self.u {
            return bad(format!(
                "need n >= s+u, got n={}, s={}, u={}",
                self.n, self.s, self.u
            ));
        }
        if self.p == 0 || self.d == 0 {
            return bad("p and d must be positive".into());
        }
        if self.q as u128 <= self.n.max(self.p) as u128 {
            return bad(format!("q={} must exceed max(n, p)", self.q));
        }
        Ok(())
    }

    pub fn assignment_matrix(&self) -> Result<AssignmentMatrix, HarnessError> {
        let seeds = RunSeeds::from(self.seed);
        match &self.assignment {
            AssignmentSource::Generated(kind) => {
                Ok(kind.generate(self.n, self.p, self.rho(), seeds.assignment)?)
            }
            AssignmentSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
                let (a, rho) = AssignmentMatrix::from_text(&text)?;
                if a.workers() != self.n || a.samples() != self.p || rho != self.rho() {
                    return Err(HarnessError::Config(format!(
                        "assignment file is {}x{} with rho={rho}, config wants {}x{} with rho={}",
                        a.workers(),
                        a.samples(),
                        self.n,
                        self.p,
                        self.rho()
                    )));
                }
                Ok(a)
            }
        }
    }
}
