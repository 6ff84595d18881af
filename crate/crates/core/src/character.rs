//! Characters of `C₂^m` and the coset distributions they allow.
//!
//! If `D` is a PDS and `φ: G → G/N ≅ C₂^m`, then `χ(φ(D))` is `k` for the
//! principal character and `θ₊` or `θ₋` otherwise. Writing `v_j` for the
//! number of elements of `D` in coset `j`, `H·v = u` with `u = [k, ε₂, …]`,
//! so every admissible `v` is `H⁻¹u = 2⁻ᵐ·Hᵀu` for some sign pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupTable, QuotientMap};
use crate::ring::PdsParams;

/// Sign patterns are enumerated exhaustively, so the quotient rank is capped.
pub const MAX_ENUMERATION_RANK: u32 = 4;

/// Quotient elements in column order, as bitmasks over the generators.
///
/// For rank 3 this is `{1, x, y, z, xy, yz, xz, xyz}`; otherwise elements are
/// sorted by weight, then by mask.
pub fn quotient_element_masks(rank: u32) -> Vec<u32> {
    if rank == 3 {
        return vec![0, 1, 2, 4, 3, 6, 5, 7];
    }
    by_weight(rank)
}

/// Characters in row order, each identified by the mask of generators it
/// sends to −1. For rank 3 this is `{1, x*, y*, z*, yz*, xz*, xy*, xyz*}`.
pub fn character_masks(rank: u32) -> Vec<u32> {
    if rank == 3 {
        return vec![0, 1, 2, 4, 6, 5, 3, 7];
    }
    by_weight(rank)
}

fn by_weight(rank: u32) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..1u32 << rank).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

/// `h[i][j] = χ_i(f_j)`, entries ±1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterMatrix {
    pub rank: u32,
    pub h: Vec<Vec<i64>>,
}

impl CharacterMatrix {
    pub fn size(&self) -> usize {
        self.h.len()
    }

    /// `H·x`
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.h.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

pub fn character_matrix(rank: u32) -> CharacterMatrix {
    let rows = character_masks(rank);
    let cols = quotient_element_masks(rank);
    let h = rows
        .iter()
        .map(|&c| {
            cols.iter()
                .map(|&f| if (c & f).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect();
    CharacterMatrix { rank, h }
}

/// Number of PDS elements per coset, with the sign pattern `[ε₂, …]` whose
/// inverse transform produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Distribution {
    pub counts: Vec<usize>,
    pub eps: Vec<i64>,
}

impl Distribution {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// All sign patterns in binary-counter order (`θ₊` for a clear bit, bit 0
/// driving `ε₂`), kept when `2⁻ᵐ·Hᵀu` is a nonnegative integer vector.
pub fn enumerate_distributions(h: &CharacterMatrix, p: &PdsParams) -> Result<Vec<Distribution>> {
    if h.rank > MAX_ENUMERATION_RANK {
        return Err(Error::InvalidParams(format!(
            "quotient rank {} exceeds the enumeration limit {MAX_ENUMERATION_RANK}",
            h.rank
        )));
    }
    let size = h.size();
    let scale = size as i64;
    let patterns = 1u64 << (size - 1);
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    'pattern: for pattern in 0..patterns {
        let mut u = Vec::with_capacity(size);
        u.push(p.k);
        for i in 0..size - 1 {
            u.push(if (pattern >> i) & 1 == 0 { p.theta_plus } else { p.theta_minus });
        }
        let mut counts = Vec::with_capacity(size);
        for j in 0..size {
            let s: i64 = (0..size).map(|i| h.h[i][j] * u[i]).sum();
            if s < 0 || s % scale != 0 {
                continue 'pattern;
            }
            counts.push((s / scale) as usize);
        }
        // H is invertible, so distinct patterns never collide.
        let fresh = seen.insert(counts.clone());
        debug_assert!(fresh, "duplicate distribution {counts:?}");
        if fresh {
            out.push(Distribution { counts, eps: u[1..].to_vec() });
        }
    }
    Ok(out)
}

/// Inverse-closure capacity of one coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetCapacity {
    /// Elements of order 2 (the identity never counts).
    pub involutions: usize,
    /// Unordered pairs `{g, g⁻¹}` with `g ≠ g⁻¹`.
    pub pairs: usize,
}

impl CosetCapacity {
    pub fn size(&self) -> usize {
        self.involutions + 2 * self.pairs
    }

    /// Whether some inverse-closed subset of this coset has exactly `count`
    /// elements: `count = s + 2j` with `s ≤ involutions`, `j ≤ pairs`.
    pub fn admits(&self, count: usize) -> bool {
        (0..=self.involutions.min(count))
            .any(|s| (count - s) % 2 == 0 && (count - s) / 2 <= self.pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityProfile {
    pub cosets: Vec<CosetCapacity>,
}

pub fn involution_profile(group: &GroupTable, quotient: &QuotientMap) -> FeasibilityProfile {
    let cosets = quotient
        .cosets
        .iter()
        .map(|coset| {
            let mut involutions = 0;
            let mut others = 0;
            for &g in coset {
                match group.elt_order(g) {
                    1 => {}
                    2 => involutions += 1,
                    _ => others += 1,
                }
            }
            CosetCapacity { involutions, pairs: others / 2 }
        })
        .collect();
    FeasibilityProfile { cosets }
}

/// How strictly [`filter_distributions`] prunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FilterMode {
    /// Keep a distribution only if every coset has an inverse-closed subset
    /// of the required size.
    #[default]
    Exact,
    /// Only reject odd counts in cosets without involutions.
    PaperFaithful,
}

pub fn filter_distributions(
    distributions: &[Distribution],
    profile: &FeasibilityProfile,
    mode: FilterMode,
) -> Vec<Distribution> {
    distributions
        .iter()
        .filter(|d| {
            d.counts.iter().zip(&profile.cosets).all(|(&count, cap)| match mode {
                FilterMode::Exact => cap.admits(count),
                FilterMode::PaperFaithful => count % 2 == 0 || cap.involutions > 0,
            })
        })
        .cloned()
        .collect()
}
