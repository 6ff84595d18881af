//! Exhaustive backtracking search for NLST partial difference sets.
//!
//! For each admissible coset distribution `v`, one inverse-closed subset of
//! size `v_j` is drawn from every coset `j` in turn. The difference counts
//! `D·D^(−1)` of the partial set are maintained incrementally together with
//! a running count of entries above their bound, so a prune test is O(1).
//! Complete candidates go through the count-profile filter and then the
//! group-ring identity.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{
    character_matrix, enumerate_distributions, filter_distributions, involution_profile,
    Distribution, FilterMode,
};
use crate::coset_db::{build_choices, CosetChoiceDB};
use crate::error::{Error, Result};
use crate::group::{elementary_abelian_quotients, quotient_map, GroupTable, QuotientMap, SubgroupHandle};
use crate::record::PdsRecord;
use crate::ring::{count_profile_matches, pds_identity_check, PdsParams, RingVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// 1-based coset depths after which the partial set is tested.
    pub prune_checkpoints: BTreeSet<usize>,
    /// Also prune when a chosen element already has more than `λ`
    /// representations as a difference.
    pub strong_prune: bool,
    /// Worker threads; 0 uses the rayon default.
    pub parallelism: usize,
    /// Record every PDS rather than stopping at the first.
    pub emit_all: bool,
    pub filter_mode: FilterMode,
    /// `m` in `G/N ≅ C₂^m`.
    pub quotient_rank: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            prune_checkpoints: (1..=8).collect(),
            strong_prune: true,
            parallelism: 1,
            emit_all: true,
            filter_mode: FilterMode::Exact,
            quotient_rank: 3,
        }
    }
}

impl SearchConfig {
    /// Checkpoints after the 5th, 6th and 7th cosets only, `μ` threshold
    /// only, and the coarse parity filter on distributions.
    pub fn paper_faithful() -> Self {
        Self {
            prune_checkpoints: [5, 6, 7].into_iter().collect(),
            strong_prune: false,
            filter_mode: FilterMode::PaperFaithful,
            ..Self::default()
        }
    }

    /// Default configuration with checkpoints at every depth for `rank`.
    pub fn for_rank(rank: u32) -> Self {
        Self {
            prune_checkpoints: (1..=1usize << rank).collect(),
            quotient_rank: rank,
            ..Self::default()
        }
    }
}

/// Division table `div[a·n + b] = a·b⁻¹`.
#[derive(Debug, Clone)]
pub struct DivTable {
    n: usize,
    table: Vec<u16>,
}

impl DivTable {
    pub fn new(group: &GroupTable) -> Self {
        let n = group.order();
        assert!(n <= u16::MAX as usize + 1, "group too large for the search engine");
        let mut table = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = group.div(a, b) as u16;
            }
        }
        Self { n, table }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }
}

/// A partially built candidate with incrementally maintained difference
/// counts.
#[derive(Debug, Clone)]
pub struct PartialState<'a> {
    div: &'a DivTable,
    chosen: Vec<usize>,
    member: Vec<bool>,
    diff_counts: Vec<i32>,
    /// Number of cosets consumed.
    pub depth: usize,
    /// Per-push element counts, so whole sets can be popped.
    pushes: Vec<usize>,
    lambda: i32,
    cap: i32,
    strong: bool,
    violations: usize,
}

impl<'a> PartialState<'a> {
    pub fn new(div: &'a DivTable, p: &PdsParams, strong_prune: bool) -> Self {
        let n = div.n;
        Self {
            div,
            chosen: Vec::new(),
            member: vec![false; n],
            diff_counts: vec![0; n],
            depth: 0,
            pushes: Vec::new(),
            lambda: p.lambda as i32,
            cap: p.lambda.max(p.mu) as i32,
            strong: strong_prune,
            violations: 0,
        }
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn diff_counts(&self) -> &[i32] {
        &self.diff_counts
    }

    pub fn contains(&self, g: usize) -> bool {
        self.member[g]
    }

    /// Entries currently above their bound (O(1) prune test).
    pub fn violations(&self) -> usize {
        self.violations
    }

    #[inline]
    fn bound(&self, e: usize) -> i32 {
        if self.strong && self.member[e] {
            self.lambda
        } else {
            self.cap
        }
    }

    #[inline]
    fn inc(&mut self, e: usize) {
        self.diff_counts[e] += 1;
        if self.diff_counts[e] == self.bound(e) + 1 {
            self.violations += 1;
        }
    }

    #[inline]
    fn dec(&mut self, e: usize) {
        if self.diff_counts[e] == self.bound(e) + 1 {
            self.violations -= 1;
        }
        self.diff_counts[e] -= 1;
    }

    fn push_element(&mut self, a: usize) {
        if self.strong {
            let before = self.diff_counts[a] > self.cap;
            self.member[a] = true;
            let after = self.diff_counts[a] > self.lambda;
            match (before, after) {
                (false, true) => self.violations += 1,
                (true, false) => self.violations -= 1,
                _ => {}
            }
        } else {
            self.member[a] = true;
        }
        for i in 0..self.chosen.len() {
            let c = self.chosen[i];
            self.inc(self.div.get(a, c));
            self.inc(self.div.get(c, a));
        }
        self.diff_counts[0] += 1;
        self.chosen.push(a);
    }

    fn pop_element(&mut self) {
        let a = self.chosen.pop().expect("pop from empty state");
        self.diff_counts[0] -= 1;
        for i in 0..self.chosen.len() {
            let c = self.chosen[i];
            self.dec(self.div.get(a, c));
            self.dec(self.div.get(c, a));
        }
        if self.strong {
            let before = self.diff_counts[a] > self.lambda;
            self.member[a] = false;
            let after = self.diff_counts[a] > self.cap;
            match (before, after) {
                (false, true) => self.violations += 1,
                (true, false) => self.violations -= 1,
                _ => {}
            }
        } else {
            self.member[a] = false;
        }
    }

    /// Adds the elements of one coset choice and advances the depth.
    pub fn push(&mut self, set: &[usize]) {
        for &a in set {
            self.push_element(a);
        }
        self.pushes.push(set.len());
        self.depth += 1;
    }

    /// Removes the most recently pushed coset choice.
    pub fn pop(&mut self) {
        let count = self.pushes.pop().expect("pop without push");
        for _ in 0..count {
            self.pop_element();
        }
        self.depth -= 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneDecision {
    Keep,
    Prune,
}

/// Full-scan prune test: prune if any nonidentity difference count exceeds
/// `max(λ, μ)`, or, with `strong_prune`, if a chosen element's count exceeds
/// `λ`. Coefficients only grow as elements are added, so this never rejects
/// a prefix of a PDS.
pub fn prune_check(state: &PartialState<'_>, p: &PdsParams, cfg: &SearchConfig) -> PruneDecision {
    let cap = p.lambda.max(p.mu) as i32;
    let bad = state.diff_counts.iter().enumerate().skip(1).any(|(e, &c)| {
        c > cap || (cfg.strong_prune && state.member[e] && c > p.lambda as i32)
    });
    if bad {
        PruneDecision::Prune
    } else {
        PruneDecision::Keep
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    CountProfile,
    GroupRingIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected(Stage),
}

/// Two-stage verification of a complete candidate.
pub fn verify_candidate(group: &GroupTable, set: &[usize], p: &PdsParams) -> Result<Verdict> {
    let d = RingVector::indicator(group.order(), set);
    if !crate::ring::square_counts_check(group, &d, p)? {
        return Ok(Verdict::Rejected(Stage::CountProfile));
    }
    if !crate::ring::inverse_closed(group, set) || !pds_identity_check(group, &d, p)? {
        return Ok(Verdict::Rejected(Stage::GroupRingIdentity));
    }
    Ok(Verdict::Accepted)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Complete candidates reaching verification.
    pub candidates_enumerated: u64,
    /// Prunes at each 1-based depth (index 0 unused).
    pub pruned_at_depth: Vec<u64>,
    pub stage1_rejects: u64,
    pub stage2_rejects: u64,
    pub wall_time: Duration,
}

impl SearchStats {
    fn merge(&mut self, other: &SearchStats) {
        self.candidates_enumerated += other.candidates_enumerated;
        self.stage1_rejects += other.stage1_rejects;
        self.stage2_rejects += other.stage2_rejects;
        if self.pruned_at_depth.len() < other.pruned_at_depth.len() {
            self.pruned_at_depth.resize(other.pruned_at_depth.len(), 0);
        }
        for (a, b) in self.pruned_at_depth.iter_mut().zip(&other.pruned_at_depth) {
            *a += b;
        }
    }

    pub fn total_prunes(&self) -> u64 {
        self.pruned_at_depth.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub group_id: String,
    pub pds_list: Vec<PdsRecord>,
    pub stats: SearchStats,
    /// The normal subgroup used for the coset decomposition.
    pub normal_subgroup: SubgroupHandle,
    /// Distributions surviving the feasibility filter.
    pub distribution_count: usize,
}

/// Machine-readable progress, one event per finished shard.
#[derive(Debug, Clone, Serialize)]
pub struct ProgressEvent {
    pub group_id: String,
    pub distribution_index: usize,
    pub shard: usize,
    pub shards: usize,
    pub candidates: u64,
    pub prunes: u64,
    pub found: usize,
}

/// Everything the search needs about one group, computed once.
#[derive(Debug, Clone)]
pub struct SearchSetup {
    pub quotient: QuotientMap,
    pub distributions: Vec<Distribution>,
    pub db: CosetChoiceDB,
}

/// Picks the first normal subgroup with `G/N ≅ C₂^m` and precomputes the
/// filtered distributions and coset choice tables.
pub fn prepare(group: &GroupTable, p: &PdsParams, cfg: &SearchConfig) -> Result<SearchSetup> {
    if p.v != group.order() as i64 {
        return Err(Error::InvalidParams(format!(
            "parameter v = {} does not match group order {}",
            p.v,
            group.order()
        )));
    }
    let rank = cfg.quotient_rank;
    let normal = elementary_abelian_quotients(group, rank)
        .into_iter()
        .next()
        .ok_or(Error::NoElementaryAbelianImage { rank })?;
    let quotient = quotient_map(group, &normal)?;
    let h = character_matrix(rank);
    let all = enumerate_distributions(&h, p)?;
    let profile = involution_profile(group, &quotient);
    let distributions = filter_distributions(&all, &profile, cfg.filter_mode);
    let db = build_choices(group, &quotient);
    Ok(SearchSetup { quotient, distributions, db })
}

pub fn search_group(group: &GroupTable, p: &PdsParams, cfg: &SearchConfig) -> Result<SearchResult> {
    search_group_with_progress(group, p, cfg, &|_| {})
}

pub fn search_group_with_progress(
    group: &GroupTable,
    p: &PdsParams,
    cfg: &SearchConfig,
    progress: &(dyn Fn(&ProgressEvent) + Sync),
) -> Result<SearchResult> {
    let start = Instant::now();
    let setup = prepare(group, p, cfg)?;
    let div = DivTable::new(group);
    let num_cosets = setup.quotient.num_cosets();
    if cfg.prune_checkpoints.iter().any(|&c| c == 0 || c > num_cosets) {
        return Err(Error::InvalidParams(format!(
            "prune checkpoints must lie in 1..={num_cosets}"
        )));
    }

    // Shards: (distribution, choice index in its first nonempty coset).
    let mut shards = Vec::new();
    for (di, dist) in setup.distributions.iter().enumerate() {
        match dist.counts.iter().position(|&c| c > 0) {
            Some(first) => {
                let n = setup.db.choices(first, dist.counts[first]).len();
                shards.extend((0..n).map(|i| (di, Some((first, i)))));
            }
            None => shards.push((di, None)),
        }
    }
    let total_shards = shards.len();
    let stop = AtomicBool::new(false);
    let run = |(shard_index, &(di, fixed)): (usize, &(usize, Option<(usize, usize)>))| {
        let dist = &setup.distributions[di];
        let mut worker = Worker::new(group, p, cfg, &setup, &div, dist, &stop);
        worker.run(fixed);
        progress(&ProgressEvent {
            group_id: group.id_label().to_string(),
            distribution_index: di,
            shard: shard_index,
            shards: total_shards,
            candidates: worker.stats.candidates_enumerated,
            prunes: worker.stats.total_prunes(),
            found: worker.found.len(),
        });
        (worker.found.into_iter().map(|s| (s, di)).collect::<Vec<_>>(), worker.stats)
    };
    let outputs: Vec<(Vec<(Vec<usize>, usize)>, SearchStats)> = if cfg.parallelism == 1 {
        shards.iter().enumerate().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        pool.install(|| shards.par_iter().enumerate().map(run).collect())
    };

    let mut stats = SearchStats { pruned_at_depth: vec![0; num_cosets + 1], ..Default::default() };
    let mut found = Vec::new();
    for (sets, s) in outputs {
        stats.merge(&s);
        found.extend(sets);
    }
    found.sort();
    let before = found.len();
    found.dedup_by(|a, b| a.0 == b.0);
    assert_eq!(before, found.len(), "a PDS was produced by two distributions");
    if !cfg.emit_all {
        found.truncate(1);
    }
    stats.wall_time = start.elapsed();
    let pds_list = found
        .into_iter()
        .map(|(elements, di)| PdsRecord::new(group.id_label(), elements, setup.distributions[di].clone()))
        .collect();
    Ok(SearchResult {
        group_id: group.id_label().to_string(),
        pds_list,
        stats,
        normal_subgroup: setup.quotient.subgroup.clone(),
        distribution_count: setup.distributions.len(),
    })
}

struct Worker<'a> {
    group: &'a GroupTable,
    p: &'a PdsParams,
    checkpoint: Vec<bool>,
    levels: Vec<&'a [Vec<usize>]>,
    state: PartialState<'a>,
    emit_all: bool,
    stop: &'a AtomicBool,
    found: Vec<Vec<usize>>,
    stats: SearchStats,
}

impl<'a> Worker<'a> {
    fn new(
        group: &'a GroupTable,
        p: &'a PdsParams,
        cfg: &SearchConfig,
        setup: &'a SearchSetup,
        div: &'a DivTable,
        dist: &Distribution,
        stop: &'a AtomicBool,
    ) -> Self {
        let levels: Vec<&[Vec<usize>]> =
            dist.counts.iter().enumerate().map(|(c, &size)| setup.db.choices(c, size)).collect();
        let mut checkpoint = vec![false; levels.len() + 1];
        for &c in &cfg.prune_checkpoints {
            checkpoint[c] = true;
        }
        Self {
            group,
            p,
            checkpoint,
            levels,
            state: PartialState::new(div, p, cfg.strong_prune),
            emit_all: cfg.emit_all,
            stop,
            found: Vec::new(),
            stats: SearchStats { pruned_at_depth: vec![0; dist.counts.len() + 1], ..Default::default() },
        }
    }

    /// Pushes the choice at `depth` (0-based); returns false if pruned.
    #[inline]
    fn descend(&mut self, depth: usize, choice: usize) -> bool {
        self.state.push(&self.levels[depth][choice]);
        if self.checkpoint[depth + 1] && self.state.violations > 0 {
            self.stats.pruned_at_depth[depth + 1] += 1;
            self.state.pop();
            return false;
        }
        true
    }

    fn run(&mut self, fixed: Option<(usize, usize)>) {
        let depth_count = self.levels.len();
        if self.levels.iter().any(|l| l.is_empty()) {
            return;
        }
        // Cursor per depth; depths before the fixed coset hold the empty set.
        let mut start_depth = 0;
        if let Some((coset, choice)) = fixed {
            for d in 0..coset {
                if !self.descend(d, 0) {
                    return;
                }
            }
            if !self.descend(coset, choice) {
                return;
            }
            start_depth = coset + 1;
        }
        if start_depth == depth_count {
            self.leaf();
            return;
        }
        let mut cursor = vec![0usize; depth_count];
        let mut depth = start_depth;
        loop {
            if self.stop.load(Ordering::Relaxed) {
                return;
            }
            if cursor[depth] < self.levels[depth].len() {
                let choice = cursor[depth];
                cursor[depth] += 1;
                if !self.descend(depth, choice) {
                    continue;
                }
                if depth + 1 == depth_count {
                    self.leaf();
                    self.state.pop();
                } else {
                    depth += 1;
                    cursor[depth] = 0;
                }
            } else {
                if depth == start_depth {
                    return;
                }
                depth -= 1;
                self.state.pop();
            }
        }
    }

    fn leaf(&mut self) {
        self.stats.candidates_enumerated += 1;
        let counts: Vec<i64> = self.state.diff_counts.iter().map(|&c| c as i64).collect();
        if !count_profile_matches(&counts, self.p) {
            self.stats.stage1_rejects += 1;
            return;
        }
        let mut set = self.state.chosen.clone();
        set.sort_unstable();
        let d = RingVector::indicator(self.group.order(), &set);
        if !pds_identity_check(self.group, &d, self.p).unwrap_or(false) {
            self.stats.stage2_rejects += 1;
            return;
        }
        self.found.push(set);
        if !self.emit_all {
            self.stop.store(true, Ordering::Relaxed);
        }
    }
}

/// Splits `elements` into the per-coset choices the search would push, in
/// coset order. Pushing them one by one replays the construction prefixes.
pub fn coset_parts(quotient: &QuotientMap, elements: &[usize]) -> Vec<Vec<usize>> {
    let mut by_coset = vec![Vec::new(); quotient.num_cosets()];
    for &g in elements {
        by_coset[quotient.coset_of[g]].push(g);
    }
    for part in &mut by_coset {
        part.sort_unstable();
    }
    by_coset
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{cyclic, direct_product, elementary_abelian};
    use crate::ring::convolve;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_state_is_kept() {
        let g = direct_product(&cyclic(8), &cyclic(8));
        let div = DivTable::new(&g);
        let p = PdsParams::order_64();
        let state = PartialState::new(&div, &p, true);
        assert_eq!(prune_check(&state, &p, &SearchConfig::default()), PruneDecision::Keep);
    }

    #[test]
    fn count_above_mu_prunes() {
        // In C2^6 every element is an involution; eight elements of a
        // subgroup of order 8 give difference counts of 8 > 6.
        let g = elementary_abelian(6);
        let div = DivTable::new(&g);
        let p = PdsParams::order_64();
        let mut state = PartialState::new(&div, &p, false);
        state.push(&[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(state.diff_counts()[1], 6);
        assert_eq!(prune_check(&state, &p, &SearchConfig::paper_faithful()), PruneDecision::Keep);
        state.push(&[8, 9]);
        // 8^9 = 1 adds two more representations of 1.
        assert!(state.diff_counts()[1] > 6);
        assert_eq!(prune_check(&state, &p, &SearchConfig::paper_faithful()), PruneDecision::Prune);
        assert!(state.violations() > 0);
    }

    #[test]
    fn incremental_counts_match_recomputation() {
        let groups = [
            direct_product(&cyclic(4), &direct_product(&cyclic(4), &elementary_abelian(2))),
            direct_product(&crate::construct::dihedral(8), &crate::construct::quaternion()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = PdsParams::order_64();
        for g in &groups {
            let div = DivTable::new(g);
            for strong in [false, true] {
                let cfg = SearchConfig { strong_prune: strong, ..SearchConfig::default() };
                let mut state = PartialState::new(&div, &p, strong);
                let mut pool: Vec<usize> = (1..64).collect();
                pool.shuffle(&mut rng);
                let mut next = 0;
                for _ in 0..2000 {
                    if next < pool.len() && (state.depth == 0 || rng.gen_bool(0.6)) {
                        let take = rng.gen_range(1..=3).min(pool.len() - next);
                        state.push(&pool[next..next + take]);
                        next += take;
                    } else if state.depth > 0 {
                        let last = state.pushes.last().copied().unwrap();
                        state.pop();
                        next -= last;
                    }
                    let ind = RingVector::indicator(64, state.chosen());
                    let full = convolve(g, &ind, &ind.reversed(g)).unwrap();
                    let inc: Vec<i64> = state.diff_counts().iter().map(|&c| c as i64).collect();
                    assert_eq!(inc, full.coeffs);
                    let scan = prune_check(&state, &p, &cfg) == PruneDecision::Prune;
                    assert_eq!(scan, state.violations() > 0);
                }
            }
        }
    }

    #[test]
    fn no_image_error() {
        let g = direct_product(&cyclic(8), &cyclic(8));
        let r = search_group(&g, &PdsParams::order_64(), &SearchConfig::default());
        assert!(matches!(r, Err(Error::NoElementaryAbelianImage { rank: 3 })));
    }

    #[test]
    fn mismatched_order_rejected() {
        let g = elementary_abelian(4);
        let r = search_group(&g, &PdsParams::order_64(), &SearchConfig::default());
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn bad_checkpoint_rejected() {
        let g = elementary_abelian(4);
        let p = PdsParams::new(16, 5, 0, 2).unwrap();
        let cfg = SearchConfig { prune_checkpoints: [9].into_iter().collect(), ..SearchConfig::default() };
        assert!(matches!(search_group(&g, &p, &cfg), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn stop_at_first() {
        let g = elementary_abelian(4);
        let p = PdsParams::new(16, 5, 0, 2).unwrap();
        let cfg = SearchConfig { emit_all: false, ..SearchConfig::default() };
        let r = search_group(&g, &p, &cfg).unwrap();
        assert_eq!(r.pds_list.len(), 1);
    }
}
