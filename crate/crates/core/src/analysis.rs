//! Per-group annotation passes over search results: equivalence classes,
//! disjoint partners, Hadamard breakdowns and Cayley-graph hashes.
//!
//! Breakdowns and graph isomorphism types are invariant under automorphisms,
//! so when class ids are present they are computed once per class and copied
//! to the other members.

use std::collections::HashMap;

use crate::aut::{disjoint_pairs, equivalence_classes, hadamard_breakdown};
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::record::PdsRecord;
use crate::ring::{complement_reversible_ds_check, PdsParams, RingVector};
use crate::srg::{canonical_hash, cayley_graph, srg_params, SrgParams};

/// Sets `class_id` on every record; returns the number of classes.
pub fn classify_records(group: &GroupTable, records: &mut [PdsRecord]) -> Result<usize> {
    let sets: Vec<Vec<usize>> = records.iter().map(|r| r.elements.clone()).collect();
    let classes = equivalence_classes(group, &sets)?;
    for c in &classes {
        for &m in &c.members {
            records[m].class_id = Some(c.class_id);
        }
    }
    Ok(classes.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointPair {
    pub first: usize,
    pub second: usize,
    /// The complement of the union is a reversible difference set.
    pub complement_ok: bool,
}

/// Fills `disjoint_with` and checks each pair's complement.
pub fn disjoint_records(group: &GroupTable, records: &mut [PdsRecord], first_only: bool) -> Result<Vec<DisjointPair>> {
    let sets: Vec<Vec<usize>> = records.iter().map(|r| r.elements.clone()).collect();
    for r in records.iter_mut() {
        r.disjoint_with.clear();
    }
    let n = group.order();
    let mut out = Vec::new();
    for (i, j) in disjoint_pairs(n, &sets, first_only) {
        records[i].disjoint_with.push(j);
        records[j].disjoint_with.push(i);
        let complement_ok = complement_reversible_ds_check(
            group,
            &RingVector::indicator(n, &sets[i]),
            &RingVector::indicator(n, &sets[j]),
        )
        .unwrap_or(false);
        out.push(DisjointPair { first: i, second: j, complement_ok });
    }
    for r in records.iter_mut() {
        r.disjoint_with.sort_unstable();
    }
    Ok(out)
}

/// Indices whose value must be computed: one per class when every record
/// has a class id, otherwise all of them.
fn representatives(records: &[PdsRecord]) -> Vec<usize> {
    if records.iter().all(|r| r.class_id.is_some()) {
        let mut seen = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            seen.entry(r.class_id).or_insert(i);
        }
        let mut reps: Vec<usize> = seen.into_values().collect();
        reps.sort_unstable();
        reps
    } else {
        (0..records.len()).collect()
    }
}

fn propagate<T: Clone>(records: &mut [PdsRecord], reps: &[usize], values: &[T], set: impl Fn(&mut PdsRecord, T)) {
    let by_class: HashMap<Option<usize>, T> =
        reps.iter().zip(values).map(|(&i, v)| (records[i].class_id, v.clone())).collect();
    if reps.len() == records.len() {
        for (&i, v) in reps.iter().zip(values) {
            set(&mut records[i], v.clone());
        }
    } else {
        for r in records.iter_mut() {
            let v = by_class[&r.class_id].clone();
            set(r, v);
        }
    }
}

/// Sets `breakdown`; returns the number of decomposable representatives.
pub fn breakdown_records(group: &GroupTable, records: &mut [PdsRecord]) -> usize {
    let reps = representatives(records);
    let found: Vec<bool> = reps.iter().map(|&i| hadamard_breakdown(group, &records[i].elements).is_some()).collect();
    propagate(records, &reps, &found, |r, v| r.breakdown = Some(v));
    found.iter().filter(|&&b| b).count()
}

/// Sets `srg_hash` after checking each Cayley graph is strongly regular
/// with the expected parameters.
pub fn graph_records(group: &GroupTable, records: &mut [PdsRecord], p: &PdsParams) -> Result<()> {
    let expected = SrgParams { v: p.v as usize, k: p.k as usize, lambda: p.lambda as usize, mu: p.mu as usize };
    let reps = representatives(records);
    let mut hashes = Vec::with_capacity(reps.len());
    for &i in &reps {
        let g = cayley_graph(group, &records[i].elements)?;
        if srg_params(&g) != Some(expected) {
            return Err(Error::PdsNotVerified(i));
        }
        hashes.push(canonical_hash(&g));
    }
    propagate(records, &reps, &hashes, |r, v| r.srg_hash = Some(v));
    Ok(())
}
