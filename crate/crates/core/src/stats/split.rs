//! Per-PSE mission split assignment.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Per-PSE choice of validation and test missions; everything else trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSplit {
    pub train: Vec<String>,
    pub val: String,
    pub test: String,
}

/// The full assignment, one entry per PSE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub seed: u64,
    pub per_pse: BTreeMap<u8, MissionSplit>,
}

impl SplitAssignment {
    pub fn classify(&self, pse: u8, mission_id: &str) -> Result<Split> {
        let entry = self
            .per_pse
            .get(&pse)
            .ok_or_else(|| Error::invalid(format!("PSE {pse} has no split entry")))?;
        if entry.val == mission_id {
            Ok(Split::Val)
        } else if entry.test == mission_id {
            Ok(Split::Test)
        } else if entry.train.iter().any(|m| m == mission_id) {
            Ok(Split::Train)
        } else {
            Err(Error::invalid(format!(
                "mission '{mission_id}' not part of the split for PSE {pse}"
            )))
        }
    }
}

/// For each PSE, shuffle the missions with a per-PSE substream of `seed`
/// and hold the last two out as validation and test; the rest train. With
/// the default seven missions that is the 5/1/1 split.
pub fn split_assign(pses: &[u8], mission_ids: &[String], seed: u64) -> Result<SplitAssignment> {
    if mission_ids.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 missions to split, got {}",
            mission_ids.len()
        )));
    }
    if pses.is_empty() {
        return Err(Error::invalid("no PSEs to split over"));
    }
    let mut per_pse = BTreeMap::new();
    for &pse in pses {
        let mut order = mission_ids.to_vec();
        order.shuffle(&mut stream_rng(seed, 3_000 + pse as u64));
        let test = order.pop().unwrap();
        let val = order.pop().unwrap();
        per_pse.insert(
            pse,
            MissionSplit {
                train: order,
                val,
                test,
            },
        );
    }
    Ok(SplitAssignment { seed, per_pse })
}
