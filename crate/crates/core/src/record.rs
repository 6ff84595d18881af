use serde::{Deserialize, Serialize};

use crate::character::Distribution;

/// One verified PDS and its analysis annotations, persisted as a JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdsRecord {
    pub group_id: String,
    /// Sorted element indices.
    pub elements: Vec<usize>,
    /// Elements per coset, in the order used by the search.
    pub distribution: Vec<usize>,
    pub eps: Vec<i64>,
    #[serde(default)]
    pub class_id: Option<usize>,
    #[serde(default)]
    pub breakdown: Option<bool>,
    /// Positions (within the same group's records) of disjoint partners.
    #[serde(default)]
    pub disjoint_with: Vec<usize>,
    #[serde(default)]
    pub srg_hash: Option<String>,
}

impl PdsRecord {
    pub fn new(group_id: &str, mut elements: Vec<usize>, distribution: Distribution) -> Self {
        elements.sort_unstable();
        Self {
            group_id: group_id.to_string(),
            elements,
            distribution: distribution.counts,
            eps: distribution.eps,
            class_id: None,
            breakdown: None,
            disjoint_with: Vec::new(),
            srg_hash: None,
        }
    }

    pub fn source_distribution(&self) -> Distribution {
        Distribution { counts: self.distribution.clone(), eps: self.eps.clone() }
    }
}
