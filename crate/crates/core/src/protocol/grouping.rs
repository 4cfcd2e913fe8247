use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProtocolError;

/// A set of `r + 1` workers whose responses are combined into one claimed value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    members: Vec<usize>,
}

impl Group {
    /// Panics on duplicate members.
    pub fn new(members: Vec<usize>) -> Self {
        let unique: BTreeSet<_> = members.iter().collect();
        assert_eq!(unique.len(), members.len(), "duplicate group member");
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, worker: usize) -> bool {
        self.members.contains(&worker)
    }

    /// 1-based member indices, for logs and transcripts.
    pub fn display_members(&self) -> Vec<usize> {
        self.members.iter().map(|j| j + 1).collect()
    }
}

/// How the main node orders active workers before picking root and satellites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GroupingOrder {
    /// Lowest-index active workers form the root, the next ones the satellites.
    #[default]
    Lowest,
    /// Active workers are shuffled with a per-round seeded permutation.
    Shuffled { seed: u64 },
}

/// `s_t + 1` groups sharing an `r`-worker root, each adding one satellite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupingPlan {
    pub root: Vec<usize>,
    pub satellites: Vec<usize>,
}

impl GroupingPlan {
    pub fn groups(&self) -> Vec<Group> {
        self.satellites
            .iter()
            .map(|&sat| {
                let mut members = self.root.clone();
                members.push(sat);
                Group::new(members)
            })
            .collect()
    }

    /// The first `m` groups only; fewer than `s_t + 1` groups can be fooled.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            root: self.root.clone(),
            satellites: self.satellites[..m.min(self.satellites.len())].to_vec(),
        }
    }
}

/// Forms the round's groups from the active workers.
pub fn form_groups(
    active: &BTreeSet<usize>,
    r: usize,
    unidentified: usize,
    order: GroupingOrder,
    round: usize,
) -> Result<GroupingPlan, ProtocolError> {
    let needed = r + unidentified + 1;
    if active.len() < needed {
        return Err(ProtocolError::InfeasibleState(format!(
            "{} active workers cannot form {} groups of size {} (need {needed})",
            active.len(),
            unidentified + 1,
            r + 1
        )));
    }
    let mut ordered: Vec<usize> = active.iter().copied().collect();
    if let GroupingOrder::Shuffled { seed } = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        ordered.shuffle(&mut rng);
    }
    Ok(GroupingPlan {
        root: ordered[..r].to_vec(),
        satellites: ordered[r..needed].to_vec(),
    })
}
