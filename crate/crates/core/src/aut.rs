//! Automorphisms of Cayley-table groups, and the PDS classifications built
//! on them: equivalence under automorphisms, disjoint pairs, and splittings
//! into Hadamard difference sets over a `C₂²` quotient.
//!
//! An automorphism is determined by the images of a generating set. Images
//! are searched by backtracking: a candidate assignment is extended along the
//! Cayley graph of the generators (`φ(x·gᵢ) = φ(x)·hᵢ`) and rejected at the
//! first inconsistency or collision.

use std::collections::{HashMap, VecDeque};

use crate::bitset::ElementSet;
use crate::error::{Error, Result};
use crate::group::{elementary_abelian_quotients, quotient_map, subgroup_closure, GroupTable, SubgroupHandle};

/// Materializing more automorphisms than this is refused.
pub const MATERIALIZE_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub perm: Vec<usize>,
}

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Self { perm: (0..order).collect() }
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.perm[g]
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self { perm: other.perm.iter().map(|&x| self.perm[x]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        for (g, &x) in self.perm.iter().enumerate() {
            perm[x] = g;
        }
        Self { perm }
    }

    /// Checks `σ(gh) = σ(g)σ(h)` on all pairs and bijectivity.
    pub fn is_automorphism_of(&self, group: &GroupTable) -> bool {
        let n = group.order();
        if self.perm.len() != n || self.perm[0] != 0 {
            return false;
        }
        let mut seen = vec![false; n];
        for &x in &self.perm {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return false;
            }
        }
        (0..n).all(|g| (0..n).all(|h| self.perm[group.mul(g, h)] == group.mul(self.perm[g], self.perm[h])))
    }

    pub fn map_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&g| self.perm[g]).collect();
        out.sort_unstable();
        out
    }
}

/// Generators chosen greedily by descending element order: an element is
/// taken when it lies outside the subgroup generated so far.
pub fn generating_set(group: &GroupTable) -> Vec<usize> {
    let mut candidates: Vec<usize> = group.elements().collect();
    candidates.sort_by_key(|&g| (std::cmp::Reverse(group.elt_order(g)), g));
    let mut gens = Vec::new();
    let mut current = subgroup_closure(group, &[]);
    for g in candidates {
        if current.order() == group.order() {
            break;
        }
        if !current.contains(g) {
            gens.push(g);
            current = subgroup_closure(group, &gens);
        }
    }
    gens
}

const UNMAPPED: usize = usize::MAX;

/// A partial homomorphism defined on the subgroup generated by the first
/// few generators.
struct PartialHom<'a> {
    group: &'a GroupTable,
    gens: &'a [usize],
    images: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    mapped: Vec<usize>,
    /// Length of `mapped` before each level was assigned.
    marks: Vec<usize>,
}

impl<'a> PartialHom<'a> {
    fn new(group: &'a GroupTable, gens: &'a [usize]) -> Self {
        let n = group.order();
        let mut map = vec![UNMAPPED; n];
        let mut used = vec![false; n];
        map[0] = 0;
        used[0] = true;
        Self { group, gens, images: Vec::new(), map, used, mapped: vec![0], marks: Vec::new() }
    }

    fn level(&self) -> usize {
        self.images.len()
    }

    /// Assigns the next generator's image; on inconsistency the state is
    /// left unchanged and `false` is returned.
    fn assign(&mut self, image: usize) -> bool {
        let g = self.group;
        let j = self.images.len();
        self.marks.push(self.mapped.len());
        self.images.push(image);
        let mut queue: VecDeque<usize> = self.mapped.iter().copied().collect();
        let mut ok = true;
        'bfs: while let Some(x) = queue.pop_front() {
            let fx = self.map[x];
            for i in 0..=j {
                let y = g.mul(x, self.gens[i]);
                let fy = g.mul(fx, self.images[i]);
                match self.map[y] {
                    UNMAPPED => {
                        if self.used[fy] {
                            ok = false;
                            break 'bfs;
                        }
                        self.map[y] = fy;
                        self.used[fy] = true;
                        self.mapped.push(y);
                        queue.push_back(y);
                    }
                    existing if existing != fy => {
                        ok = false;
                        break 'bfs;
                    }
                    _ => {}
                }
            }
        }
        if !ok {
            self.unassign();
        }
        ok
    }

    fn unassign(&mut self) {
        let mark = self.marks.pop().expect("unassign without assign");
        self.images.pop();
        for &y in &self.mapped[mark..] {
            self.used[self.map[y]] = false;
            self.map[y] = UNMAPPED;
        }
        self.mapped.truncate(mark);
    }

    fn to_automorphism(&self) -> Automorphism {
        debug_assert!(self.map.iter().all(|&x| x != UNMAPPED));
        Automorphism { perm: self.map.clone() }
    }
}

/// Candidate images for each generator: same element order.
fn candidates(group: &GroupTable, gens: &[usize]) -> Vec<Vec<usize>> {
    gens.iter()
        .map(|&g| group.elements().filter(|&h| group.elt_order(h) == group.elt_order(g)).collect())
        .collect()
}

/// Visits every automorphism; stops early when `visit` returns `false`.
pub fn for_each_automorphism(group: &GroupTable, mut visit: impl FnMut(&Automorphism) -> bool) {
    let gens = generating_set(group);
    let cands = candidates(group, &gens);
    let mut hom = PartialHom::new(group, &gens);
    if gens.is_empty() {
        visit(&Automorphism::identity(group.order()));
        return;
    }
    let r = gens.len();
    let mut cursor = vec![0usize; r];
    loop {
        let level = hom.level();
        if level == r {
            if !visit(&hom.to_automorphism()) {
                return;
            }
            hom.unassign();
            continue;
        }
        if cursor[level] < cands[level].len() {
            let h = cands[level][cursor[level]];
            cursor[level] += 1;
            if hom.assign(h) && level + 1 < r {
                cursor[level + 1] = 0;
            }
        } else {
            if level == 0 {
                return;
            }
            hom.unassign();
        }
    }
}

/// Finds one automorphism extending the current partial assignment.
fn extend_to_automorphism(hom: &mut PartialHom<'_>, cands: &[Vec<usize>]) -> Option<Automorphism> {
    let level = hom.level();
    if level == hom.gens.len() {
        return Some(hom.to_automorphism());
    }
    for &h in &cands[level] {
        if hom.assign(h) {
            let found = extend_to_automorphism(hom, cands);
            hom.unassign();
            if found.is_some() {
                return found;
            }
        }
    }
    None
}

fn orbit_of(point: usize, gens: &[Automorphism], order: usize) -> Vec<bool> {
    let mut seen = vec![false; order];
    seen[point] = true;
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = s.apply(x);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// `Aut(G)` given by generators, with its order from the stabilizer chain
/// along the generating set.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    pub generators: Vec<Automorphism>,
    /// Orbit length of each group generator under the pointwise stabilizer
    /// of the earlier ones.
    pub orbit_sizes: Vec<usize>,
}

impl AutomorphismGroup {
    pub fn order(&self) -> u128 {
        self.orbit_sizes.iter().map(|&o| o as u128).product()
    }
}

/// Computes generators of `Aut(G)` level by level from the bottom of the
/// stabilizer chain: at each level, the orbit of the generator under the
/// automorphisms found so far is grown by searching for an automorphism
/// hitting each missing candidate image.
pub fn automorphism_generators(group: &GroupTable) -> AutomorphismGroup {
    let gens = generating_set(group);
    let cands = candidates(group, &gens);
    let n = group.order();
    let r = gens.len();
    let mut generators: Vec<Automorphism> = Vec::new();
    let mut orbit_sizes = vec![1usize; r];
    for j in (0..r).rev() {
        let mut hom = PartialHom::new(group, &gens);
        for &g in &gens[..j] {
            let ok = hom.assign(g);
            debug_assert!(ok);
        }
        let mut orbit = orbit_of(gens[j], &generators, n);
        for &h in &cands[j] {
            if orbit[h] {
                continue;
            }
            if hom.assign(h) {
                if let Some(sigma) = extend_to_automorphism(&mut hom, &cands) {
                    generators.push(sigma);
                    orbit = orbit_of(gens[j], &generators, n);
                }
                hom.unassign();
            }
        }
        orbit_sizes[j] = orbit.iter().filter(|&&b| b).count();
    }
    AutomorphismGroup { generators, orbit_sizes }
}

/// Every automorphism, materialized. Fails with `AutTooLarge` above
/// [`MATERIALIZE_LIMIT`].
pub fn automorphism_group(group: &GroupTable) -> Result<Vec<Automorphism>> {
    let order = automorphism_generators(group).order();
    if order > MATERIALIZE_LIMIT {
        return Err(Error::AutTooLarge { order, limit: MATERIALIZE_LIMIT });
    }
    let mut all = Vec::with_capacity(order as usize);
    for_each_automorphism(group, |a| {
        all.push(a.clone());
        true
    });
    Ok(all)
}

/// `Some((λ, μ))` if `set` is an identity-free partial difference set.
pub fn pds_parameters(group: &GroupTable, set: &[usize]) -> Option<(i64, i64)> {
    let n = group.order();
    let members = ElementSet::from_elements(n, set);
    if members.contains(0) || members.len() != set.len() {
        return None;
    }
    let mut counts = vec![0i64; n];
    for &a in set {
        for &b in set {
            counts[group.div(a, b)] += 1;
        }
    }
    let mut lambda = None;
    let mut mu = None;
    for (g, &c) in counts.iter().enumerate().skip(1) {
        let slot = if members.contains(g) { &mut lambda } else { &mut mu };
        match *slot {
            None => *slot = Some(c),
            Some(x) if x != c => return None,
            _ => {}
        }
    }
    Some((lambda.unwrap_or(0), mu.unwrap_or(0)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub class_id: usize,
    /// Indices into the input list, increasing.
    pub members: Vec<usize>,
    /// Index of the lexicographically least member set.
    pub representative: usize,
}

/// Partitions `pds_list` into orbits under `Aut(G)`. Each unclassified set
/// starts a new class and every automorphic image found in the list joins
/// it. Orbits are walked with the generators of `Aut(G)`.
pub fn equivalence_classes(group: &GroupTable, pds_list: &[Vec<usize>]) -> Result<Vec<EquivalenceClass>> {
    let aut = automorphism_generators(group);
    equivalence_classes_with(group, &aut, pds_list)
}

pub fn equivalence_classes_with(
    group: &GroupTable,
    aut: &AutomorphismGroup,
    pds_list: &[Vec<usize>],
) -> Result<Vec<EquivalenceClass>> {
    let n = group.order();
    for (i, d) in pds_list.iter().enumerate() {
        if pds_parameters(group, d).is_none() {
            return Err(Error::PdsNotVerified(i));
        }
    }
    let sets: Vec<ElementSet> = pds_list.iter().map(|d| ElementSet::from_elements(n, d)).collect();
    let mut index: HashMap<&ElementSet, Vec<usize>> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        index.entry(s).or_default().push(i);
    }
    let mut class_of = vec![usize::MAX; sets.len()];
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for start in 0..sets.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::from([sets[start].clone()]);
        seen.insert(sets[start].clone());
        while let Some(s) = queue.pop_front() {
            if let Some(idx) = index.get(&s) {
                for &i in idx {
                    class_of[i] = id;
                    members.push(i);
                }
            }
            for sigma in &aut.generators {
                let t = s.map(&sigma.perm);
                if !seen.contains(&t) {
                    seen.insert(t.clone());
                    queue.push_back(t);
                }
            }
        }
        members.sort_unstable();
        let representative = *members
            .iter()
            .min_by(|&&a, &&b| pds_list[a].cmp(&pds_list[b]))
            .expect("class has a member");
        classes.push(EquivalenceClass { class_id: id, members, representative });
    }
    Ok(classes)
}

/// Unordered pairs `(i, j)`, `i < j`, of disjoint sets. With `first_only`,
/// stops at the first pair found.
pub fn disjoint_pairs(order: usize, pds_list: &[Vec<usize>], first_only: bool) -> Vec<(usize, usize)> {
    let w = order.div_ceil(64).max(1);
    let mut words = vec![0u64; w * pds_list.len()];
    for (i, d) in pds_list.iter().enumerate() {
        for &g in d {
            words[i * w + g / 64] |= 1 << (g % 64);
        }
    }
    let mut out = Vec::new();
    for i in 0..pds_list.len() {
        let a = &words[i * w..(i + 1) * w];
        for j in i + 1..pds_list.len() {
            let b = &words[j * w..(j + 1) * w];
            if a.iter().zip(b).all(|(x, y)| x & y == 0) {
                out.push((i, j));
                if first_only {
                    return out;
                }
            }
        }
    }
    out
}

/// `D = A₁ ⊎ A₂ ⊎ A₃` over the nonidentity cosets `z, w, zw` of a normal
/// subgroup `R` with `G/R ≅ C₂²`, each part a difference set relative to `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakdown {
    pub r: SubgroupHandle,
    /// Smallest element of the cosets labelled `z`, `w`, `zw`.
    pub coset_labels: [usize; 3],
    pub parts: [Vec<usize>; 3],
}

/// Whether the differences `a·b⁻¹` (`a ≠ b` in `part`) cover every
/// nonidentity element of `r` exactly `lambda` times.
pub fn covers_subgroup(group: &GroupTable, r: &SubgroupHandle, part: &[usize], lambda: usize) -> bool {
    let mut counts = vec![0usize; group.order()];
    for &a in part {
        for &b in part {
            if a != b {
                counts[group.div(a, b)] += 1;
            }
        }
    }
    group.elements().skip(1).all(|g| counts[g] == if r.contains(g) { lambda } else { 0 })
}

/// Tries every `R` with `G/R ≅ C₂²` in deterministic order and returns the
/// first splitting of `D` into three relative difference sets, if any.
pub fn hadamard_breakdown(group: &GroupTable, d: &[usize]) -> Option<Breakdown> {
    if d.is_empty() || d.len() % 3 != 0 {
        return None;
    }
    let part_size = d.len() / 3;
    for r in elementary_abelian_quotients(group, 2) {
        let sub = r.order();
        let numerator = part_size * (part_size.max(1) - 1);
        if sub < 2 || numerator % (sub - 1) != 0 {
            continue;
        }
        let lambda = numerator / (sub - 1);
        let q = quotient_map(group, &r).expect("C2^2 quotient");
        let counts = q.counts(d);
        if counts != [0, part_size, part_size, part_size] {
            continue;
        }
        let mut parts: [Vec<usize>; 3] = Default::default();
        for &g in d {
            parts[q.coset_of[g] - 1].push(g);
        }
        for p in &mut parts {
            p.sort_unstable();
        }
        if parts.iter().all(|p| covers_subgroup(group, &r, p, lambda)) {
            let coset_labels = [q.cosets[1][0], q.cosets[2][0], q.cosets[3][0]];
            return Some(Breakdown { r, coset_labels, parts });
        }
    }
    None
}
