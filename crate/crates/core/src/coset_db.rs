//! Per-coset tables of inverse-closed subsets.
//!
//! Inverses stay inside their coset of `N` when `G/N` is elementary abelian,
//! so a candidate PDS is assembled by picking one inverse-closed subset from
//! each coset independently.

use crate::group::{GroupTable, QuotientMap};

/// `choices[c][s]` lists every inverse-closed `s`-subset of coset `c`
/// (identity excluded), each sorted, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetChoiceDB {
    pub choices: Vec<Vec<Vec<Vec<usize>>>>,
}

impl CosetChoiceDB {
    pub fn num_cosets(&self) -> usize {
        self.choices.len()
    }

    /// Stored list for `(coset, size)`; empty when no such subset exists.
    pub fn choices(&self, coset: usize, size: usize) -> &[Vec<usize>] {
        self.choices
            .get(coset)
            .and_then(|by_size| by_size.get(size))
            .map_or(&[], |v| v.as_slice())
    }
}

fn combinations<T: Copy>(items: &[T], k: usize, out: &mut Vec<Vec<T>>) {
    fn rec<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    if k > items.len() {
        return;
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), out);
}

/// Inverse-closed subsets of `elements` (identity skipped) grouped by size,
/// sizes `0..=elements.len()`.
pub fn inverse_closed_subsets(group: &GroupTable, elements: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut involutions = Vec::new();
    let mut pairs = Vec::new();
    for &g in elements {
        let gi = group.inv(g);
        if g == 0 {
            continue;
        }
        if gi == g {
            involutions.push(g);
        } else if g < gi {
            pairs.push((g, gi));
        }
    }
    involutions.sort_unstable();
    pairs.sort_unstable();
    let max_size = elements.len();
    let mut by_size = vec![Vec::new(); max_size + 1];
    for (size, slot) in by_size.iter_mut().enumerate() {
        for j in 0..=pairs.len().min(size / 2) {
            let singles = size - 2 * j;
            if singles > involutions.len() {
                continue;
            }
            let mut inv_choices = Vec::new();
            combinations(&involutions, singles, &mut inv_choices);
            let mut pair_choices = Vec::new();
            combinations(&pairs, j, &mut pair_choices);
            for a in &inv_choices {
                for b in &pair_choices {
                    let mut set = a.clone();
                    for &(x, y) in b {
                        set.push(x);
                        set.push(y);
                    }
                    set.sort_unstable();
                    slot.push(set);
                }
            }
        }
        slot.sort();
    }
    by_size
}

pub fn build_choices(group: &GroupTable, quotient: &QuotientMap) -> CosetChoiceDB {
    CosetChoiceDB {
        choices: quotient
            .cosets
            .iter()
            .map(|coset| inverse_closed_subsets(group, coset))
            .collect(),
    }
}
