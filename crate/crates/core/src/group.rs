//! Finite groups given by Cayley table, plus the subgroup and quotient
//! machinery used to locate elementary abelian 2-quotients.
//!
//! Elements are indices `0..order`; index 0 is always the identity. Products
//! are looked up in a flat row-major table, `mult[g * order + h] = g·h`.

use std::collections::VecDeque;

use crate::character::quotient_element_masks;
use crate::error::{Error, Result};

/// Tables above this order skip the cubic associativity check unless asked.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 256;

/// A finite group stored as its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mult: Vec<u32>,
    inv: Vec<u32>,
    elt_order: Vec<u32>,
    id_label: String,
}

impl GroupTable {
    /// Validates `table` and precomputes inverses and element orders.
    ///
    /// Associativity is checked exhaustively for order up to
    /// [`ASSOCIATIVITY_CHECK_LIMIT`]; use [`GroupTable::from_table_paranoid`]
    /// to force it for larger tables.
    pub fn from_table(table: &[Vec<usize>], id_label: impl Into<String>) -> Result<Self> {
        let paranoid = table.len() <= ASSOCIATIVITY_CHECK_LIMIT;
        Self::build(table, id_label.into(), paranoid)
    }

    /// Like [`GroupTable::from_table`] but always checks associativity.
    pub fn from_table_paranoid(table: &[Vec<usize>], id_label: impl Into<String>) -> Result<Self> {
        Self::build(table, id_label.into(), true)
    }

    fn build(table: &[Vec<usize>], id_label: String, check_assoc: bool) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::NotAGroup("table too large".into()));
        }
        let mut mult = Vec::with_capacity(n * n);
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RowLengthMismatch { row: g, expected: n, found: row.len() });
            }
            for &x in row {
                if x >= n {
                    return Err(Error::NotAGroup(format!("entry {x} out of range in row {g}")));
                }
                mult.push(x as u32);
            }
        }
        for g in 0..n {
            if mult[g] as usize != g || mult[g * n] as usize != g {
                return Err(Error::NotAGroup("index 0 is not the identity".into()));
            }
        }
        // Latin square: every row and column is a permutation.
        let mut seen = vec![usize::MAX; n];
        for g in 0..n {
            for h in 0..n {
                let x = mult[g * n + h] as usize;
                if seen[x] == g {
                    return Err(Error::NotAGroup(format!("row {g} repeats element {x}")));
                }
                seen[x] = g;
            }
        }
        seen.fill(usize::MAX);
        for h in 0..n {
            for g in 0..n {
                let x = mult[g * n + h] as usize;
                if seen[x] == h {
                    return Err(Error::NotAGroup(format!("column {h} repeats element {x}")));
                }
                seen[x] = h;
            }
        }
        if check_assoc {
            for a in 0..n {
                for b in 0..n {
                    let ab = mult[a * n + b] as usize;
                    for c in 0..n {
                        let bc = mult[b * n + c] as usize;
                        if mult[ab * n + c] != mult[a * n + bc] {
                            return Err(Error::NotAGroup(format!(
                                "not associative at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        let mut inv = vec![0u32; n];
        for g in 0..n {
            // Latin rows guarantee exactly one solution.
            let h = (0..n).find(|&h| mult[g * n + h] == 0).unwrap();
            inv[g] = h as u32;
        }
        for g in 0..n {
            if mult[inv[g] as usize * n + g] != 0 {
                return Err(Error::NotAGroup(format!("left and right inverses of {g} differ")));
            }
        }
        let mut elt_order = vec![0u32; n];
        for g in 0..n {
            let mut x = g;
            let mut k = 1u32;
            while x != 0 {
                x = mult[x * n + g] as usize;
                k += 1;
                if k as usize > n {
                    return Err(Error::NotAGroup(format!("element {g} has no finite order")));
                }
            }
            elt_order[g] = k;
        }
        Ok(Self { order: n, mult, inv, elt_order, id_label })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn id_label(&self) -> &str {
        &self.id_label
    }

    pub fn set_id_label(&mut self, label: impl Into<String>) {
        self.id_label = label.into();
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g * self.order + h] as usize
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g] as usize
    }

    /// `g · h⁻¹`
    #[inline]
    pub fn div(&self, g: usize, h: usize) -> usize {
        self.mul(g, self.inv(h))
    }

    #[inline]
    pub fn elt_order(&self, g: usize) -> usize {
        self.elt_order[g] as usize
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Row `g` of the table as plain indices.
    pub fn row(&self, g: usize) -> Vec<usize> {
        self.mult[g * self.order..(g + 1) * self.order].iter().map(|&x| x as usize).collect()
    }

    pub fn to_table(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|g| self.row(g)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..g).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn involutions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order).filter(move |&g| self.elt_order(g) == 2)
    }

    pub fn commutator(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }

    pub fn conjugate(&self, g: usize, s: usize) -> usize {
        self.mul(self.mul(g, s), self.inv(g))
    }
}

/// A subgroup as a sorted element list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupHandle {
    pub elements: Vec<usize>,
    pub is_normal: bool,
}

impl SubgroupHandle {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    fn from_elements(group: &GroupTable, mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        let mut member = vec![false; group.order()];
        for &s in &elements {
            member[s] = true;
        }
        let is_normal = elements
            .iter()
            .all(|&s| group.elements().all(|g| member[group.conjugate(g, s)]));
        Self { elements, is_normal }
    }
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure(group: &GroupTable, gens: &[usize]) -> SubgroupHandle {
    let mut gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut member = vec![false; group.order()];
    member[0] = true;
    let mut elements = vec![0];
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &s in &gens {
            let y = group.mul(x, s);
            if !member[y] {
                member[y] = true;
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    SubgroupHandle::from_elements(group, elements)
}

/// The subgroup generated by all squares and commutators. For a 2-group
/// this is the Frattini subgroup; `G/K` is the largest elementary abelian
/// 2-quotient.
pub fn agemo_commutator_subgroup(group: &GroupTable) -> SubgroupHandle {
    let n = group.order();
    let mut gens = vec![false; n];
    for g in 0..n {
        gens[group.mul(g, g)] = true;
        for h in 0..g {
            gens[group.commutator(g, h)] = true;
        }
    }
    let gens: Vec<usize> = (0..n).filter(|&g| gens[g]).collect();
    subgroup_closure(group, &gens)
}

/// Coordinates of every element in `G/K` over a greedily chosen basis, where
/// `K` is the agemo-commutator subgroup. Returns `(coords, rank)`.
fn frattini_coordinates(group: &GroupTable, k: &SubgroupHandle) -> (Vec<u64>, u32) {
    let n = group.order();
    let mut coords = vec![u64::MAX; n];
    let mut span: Vec<usize> = k.elements.clone();
    for &s in &span {
        coords[s] = 0;
    }
    let mut rank = 0u32;
    for g in 0..n {
        if coords[g] != u64::MAX {
            continue;
        }
        let bit = 1u64 << rank;
        rank += 1;
        let mut added = Vec::with_capacity(span.len());
        for &s in &span {
            let y = group.mul(s, g);
            coords[y] = coords[s] | bit;
            added.push(y);
        }
        span.extend(added);
    }
    (coords, rank)
}

/// Enumerates all `dim`-dimensional subspaces of `F_2^ambient` as sorted
/// vectors of bitmasks, using reduced row echelon forms (pivot = lowest set bit).
fn subspaces(ambient: u32, dim: u32) -> Vec<Vec<u64>> {
    fn rec(
        ambient: u32,
        dim: u32,
        start: u32,
        pivots: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pivots.len() as u32 == dim {
            out.push(pivots.clone());
            return;
        }
        for p in start..ambient {
            pivots.push(p);
            rec(ambient, dim, p + 1, pivots, out);
            pivots.pop();
        }
    }
    let mut pivot_sets = Vec::new();
    rec(ambient, dim, 0, &mut Vec::new(), &mut pivot_sets);
    let mut result = Vec::new();
    for pivots in pivot_sets {
        let pivot_mask: u64 = pivots.iter().fold(0, |m, &p| m | (1 << p));
        // Free positions of each row: non-pivot columns above its pivot.
        let free: Vec<Vec<u32>> = pivots
            .iter()
            .map(|&p| ((p + 1)..ambient).filter(|c| pivot_mask & (1 << c) == 0).collect())
            .collect();
        let total_free: u32 = free.iter().map(|f| f.len() as u32).sum();
        for assignment in 0u64..(1u64 << total_free) {
            let mut bits = assignment;
            let basis: Vec<u64> = pivots
                .iter()
                .zip(&free)
                .map(|(&p, cols)| {
                    let mut row = 1u64 << p;
                    for &c in cols {
                        if bits & 1 == 1 {
                            row |= 1 << c;
                        }
                        bits >>= 1;
                    }
                    row
                })
                .collect();
            let mut span = vec![0u64];
            for b in basis {
                let more: Vec<u64> = span.iter().map(|&x| x ^ b).collect();
                span.extend(more);
            }
            span.sort_unstable();
            result.push(span);
        }
    }
    result
}

/// All normal subgroups `N` with `G/N ≅ C₂^rank`, sorted lexicographically by
/// element list. Uses `N ⊇ K` and `[G:N] = 2^rank`, where `K` is the
/// agemo-commutator subgroup.
pub fn elementary_abelian_quotients(group: &GroupTable, rank: u32) -> Vec<SubgroupHandle> {
    let k = agemo_commutator_subgroup(group);
    let (coords, d) = frattini_coordinates(group, &k);
    if rank > d {
        return Vec::new();
    }
    let mut found: Vec<SubgroupHandle> = subspaces(d, d - rank)
        .into_iter()
        .map(|space| {
            let elements: Vec<usize> = group
                .elements()
                .filter(|&g| space.binary_search(&coords[g]).is_ok())
                .collect();
            SubgroupHandle { elements, is_normal: true }
        })
        .collect();
    found.sort();
    found
}

/// Rank of the largest elementary abelian 2-quotient of `group`.
pub fn elementary_abelian_rank(group: &GroupTable) -> u32 {
    // G/K has exponent 2, so its order is a power of two.
    let k = agemo_commutator_subgroup(group);
    (group.order() / k.order()).trailing_zeros()
}

/// The projection `G → G/N ≅ C₂^m` with cosets laid out in character-matrix
/// column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    pub subgroup: SubgroupHandle,
    /// Coset index of each element.
    pub coset_of: Vec<usize>,
    /// Cosets in column order; coset 0 is the subgroup itself.
    pub cosets: Vec<Vec<usize>>,
    /// Exponent vector of each coset over the chosen generators, packed as a
    /// bitmask (bit `i` = exponent of generator `i`).
    pub quotient_log: Vec<u32>,
    /// Smallest element of each generating coset, in generator order.
    pub generators: Vec<usize>,
    pub rank: u32,
}

impl QuotientMap {
    pub fn num_cosets(&self) -> usize {
        self.cosets.len()
    }

    /// Exponents of coset `c` as a vector of 0/1 entries.
    pub fn exponents(&self, c: usize) -> Vec<u8> {
        (0..self.rank).map(|i| ((self.quotient_log[c] >> i) & 1) as u8).collect()
    }

    /// Number of elements of `set` in each coset.
    pub fn counts(&self, set: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_cosets()];
        for &g in set {
            counts[self.coset_of[g]] += 1;
        }
        counts
    }
}

/// Builds the quotient map for a normal subgroup with elementary abelian
/// 2-group quotient.
pub fn quotient_map(group: &GroupTable, subgroup: &SubgroupHandle) -> Result<QuotientMap> {
    if !subgroup.is_normal {
        return Err(Error::NotNormal);
    }
    let n = group.order();
    let index = n / subgroup.order();
    if index * subgroup.order() != n || !index.is_power_of_two() {
        return Err(Error::NotElementaryAbelianQuotient);
    }
    let mut member = vec![false; n];
    for &s in &subgroup.elements {
        member[s] = true;
    }
    for g in 0..n {
        if !member[group.mul(g, g)] {
            return Err(Error::NotElementaryAbelianQuotient);
        }
        for h in 0..g {
            if !member[group.commutator(g, h)] {
                return Err(Error::NotElementaryAbelianQuotient);
            }
        }
    }
    let rank = index.trailing_zeros();

    // Cosets labelled by smallest element, in increasing order.
    let mut raw_of = vec![usize::MAX; n];
    let mut reps = Vec::with_capacity(index);
    for g in 0..n {
        if raw_of[g] != usize::MAX {
            continue;
        }
        let label = reps.len();
        reps.push(g);
        for &s in &subgroup.elements {
            raw_of[group.mul(s, g)] = label;
        }
    }

    // Greedy generators: first coset outside the span so far.
    let mut mask_of = vec![u32::MAX; index];
    mask_of[0] = 0;
    let mut assigned = vec![0usize];
    let mut generators = Vec::new();
    for c in 1..index {
        if mask_of[c] != u32::MAX {
            continue;
        }
        let bit = 1u32 << generators.len();
        generators.push(reps[c]);
        let mut added = Vec::new();
        for &a in &assigned {
            let product = raw_of[group.mul(reps[a], reps[c])];
            mask_of[product] = mask_of[a] | bit;
            added.push(product);
        }
        assigned.extend(added);
    }
    debug_assert_eq!(generators.len() as u32, rank);

    let column_masks = quotient_element_masks(rank);
    let mut position_of_mask = vec![0usize; index];
    for (j, &m) in column_masks.iter().enumerate() {
        position_of_mask[m as usize] = j;
    }
    let coset_of: Vec<usize> = (0..n).map(|g| position_of_mask[mask_of[raw_of[g]] as usize]).collect();
    let mut cosets = vec![Vec::new(); index];
    for g in 0..n {
        cosets[coset_of[g]].push(g);
    }
    Ok(QuotientMap {
        subgroup: subgroup.clone(),
        coset_of,
        cosets,
        quotient_log: column_masks,
        generators,
        rank,
    })
}
