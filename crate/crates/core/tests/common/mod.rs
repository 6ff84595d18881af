#![allow(dead_code)]

use std::path::PathBuf;

use pds_core::group::GroupTable;
use pds_core::io::{load_catalog, GroupCatalog};

pub fn catalog_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/catalog")
}

pub fn catalog() -> GroupCatalog {
    load_catalog(&catalog_dir()).expect("shipped catalog loads")
}

pub fn catalog_group(id: &str) -> GroupTable {
    catalog().resolve(id).expect("catalog group")
}

/// One line of the external reference table in `tests/data/gap_oracle.txt`.
#[derive(Debug, Clone)]
pub struct OracleRow {
    pub id: String,
    pub frattini_order: usize,
    pub quotients: [usize; 3],
    pub involutions: usize,
    pub abelian: bool,
    pub aut_order: u128,
}

impl OracleRow {
    /// Number of normal subgroups with quotient `C₂^rank`, rank 2..=4.
    pub fn quotient_count(&self, rank: u32) -> usize {
        self.quotients[rank as usize - 2]
    }
}

pub fn oracle() -> Vec<OracleRow> {
    let text = include_str!("../data/gap_oracle.txt");
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            OracleRow {
                id: f[0].to_string(),
                frattini_order: f[1].parse().unwrap(),
                quotients: [f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap()],
                involutions: f[5].parse().unwrap(),
                abelian: f[6] == "true",
                aut_order: f[7].parse().unwrap(),
            }
        })
        .collect()
}

/// `x^i y^j` in `C₈ × C₈` built as `direct_product(cyclic(8), cyclic(8))`.
pub fn xy(i: usize, j: usize) -> usize {
    (i % 8) * 8 + (j % 8)
}

/// Convolution `a·b` straight from the multiplication table.
pub fn naive_product(g: &GroupTable, a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = g.order();
    let mut out = vec![0; n];
    for x in 0..n {
        for y in 0..n {
            out[g.mul(x, y)] += a[x] * b[y];
        }
    }
    out
}

pub fn indicator(n: usize, set: &[usize]) -> Vec<i64> {
    let mut v = vec![0; n];
    for &s in set {
        v[s] = 1;
    }
    v
}

/// `(D − θ₊)(D − θ₋) = μG` computed without the library's ring code.
pub fn naive_pds(g: &GroupTable, set: &[usize], theta_plus: i64, theta_minus: i64, mu: i64) -> bool {
    let n = g.order();
    let mut a = indicator(n, set);
    let mut b = a.clone();
    a[0] -= theta_plus;
    b[0] -= theta_minus;
    let inverse_closed = set.iter().all(|&s| set.contains(&g.inv(s)));
    inverse_closed && !set.contains(&0) && naive_product(g, &a, &b).iter().all(|&c| c == mu)
}

pub fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
}
