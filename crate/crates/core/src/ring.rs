//! Integer group-ring arithmetic and the partial difference set checks built
//! on it.
//!
//! Partial difference sets are stored identity-free. For NLST parameters a
//! set `D` is a PDS exactly when `(D − θ₊)(D − θ₋) = μG` in `ℤ[G]`, where
//! `θ₊, θ₋` are the two nonprincipal character values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupTable;

/// An element of `ℤ[G]`: one integer coefficient per group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingVector {
    pub coeffs: Vec<i64>,
}

impl RingVector {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0; order] }
    }

    /// `c · 1`
    pub fn scalar(order: usize, c: i64) -> Self {
        let mut v = Self::zero(order);
        v.coeffs[0] = c;
        v
    }

    /// The sum of all group elements, `G`.
    pub fn all_ones(order: usize) -> Self {
        Self { coeffs: vec![1; order] }
    }

    pub fn indicator(order: usize, set: &[usize]) -> Self {
        let mut v = Self::zero(order);
        for &g in set {
            v.coeffs[g] = 1;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Elements with coefficient 1, or `NotIndicator` if any coefficient is
    /// outside `{0, 1}`.
    pub fn support(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (g, &c) in self.coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => out.push(g),
                _ => return Err(Error::NotIndicator),
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: i64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// `X^(−1)`: coefficient of `g` moves to `g⁻¹`.
    pub fn reversed(&self, group: &GroupTable) -> Self {
        let mut out = Self::zero(self.len());
        for (g, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[group.inv(g)] = c;
        }
        out
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// Product in `ℤ[G]`. Iterates over the nonzero coefficients of `a`, so
/// sparse left factors are cheap.
pub fn convolve(group: &GroupTable, a: &RingVector, b: &RingVector) -> Result<RingVector> {
    let n = group.order();
    check_len(n, a.len())?;
    check_len(n, b.len())?;
    let mut out = RingVector::zero(n);
    let b_support: Vec<(usize, i64)> =
        b.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(h, &c)| (h, c)).collect();
    for (g, &ca) in a.coeffs.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for &(h, cb) in &b_support {
            out.coeffs[group.mul(g, h)] += ca * cb;
        }
    }
    Ok(out)
}

/// Parameters `(v, k, λ, μ)` of a negative Latin square type PDS, together
/// with `n`, `r` and the nonprincipal character values `θ₊ = r`, `θ₋ = r − n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdsParams {
    pub v: i64,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
    pub n: i64,
    pub r: i64,
    pub theta_plus: i64,
    pub theta_minus: i64,
}

impl PdsParams {
    /// Validates `(v, k, λ, μ)` as NLST parameters `(n², r(n+1), −n+r²+3r, r²+r)`
    /// with `n ≥ 2` and `r ≥ 1`.
    pub fn new(v: i64, k: i64, lambda: i64, mu: i64) -> Result<Self> {
        let (theta_plus, theta_minus) = pds_eigenvalues(v, k, lambda, mu)?;
        let r = theta_plus;
        let n = theta_plus - theta_minus;
        let expected = (n * n, r * (n + 1), -n + r * r + 3 * r, r * r + r);
        if r < 1 || n < 2 || expected != (v, k, lambda, mu) {
            return Err(Error::InvalidParams(format!(
                "({v},{k},{lambda},{mu}) is not of negative Latin square type"
            )));
        }
        Ok(Self { v, k, lambda, mu, n, r, theta_plus, theta_minus })
    }

    /// NLST parameters for given `n` and `r`.
    pub fn nlst(n: i64, r: i64) -> Result<Self> {
        Self::new(n * n, r * (n + 1), -n + r * r + 3 * r, r * r + r)
    }

    /// `(64, 18, 2, 6)`
    pub fn order_64() -> Self {
        Self::nlst(8, 2).expect("(64,18,2,6) is NLST")
    }

    pub fn as_tuple(&self) -> (i64, i64, i64, i64) {
        (self.v, self.k, self.lambda, self.mu)
    }
}

/// Roots of `x² − (λ−μ)x − (k−μ) = 0`, the possible nonprincipal character
/// values of a PDS, returned larger first.
pub fn pds_eigenvalues(v: i64, k: i64, lambda: i64, mu: i64) -> Result<(i64, i64)> {
    let fail = || Error::NonIntegerRoots { v, k, lambda, mu };
    let b = lambda - mu;
    let disc = b * b + 4 * (k - mu);
    if disc < 0 {
        return Err(fail());
    }
    let s = isqrt(disc);
    if s * s != disc || (b + s) % 2 != 0 {
        return Err(fail());
    }
    Ok(((b + s) / 2, (b - s) / 2))
}

fn isqrt(x: i64) -> i64 {
    let mut s = (x as f64).sqrt() as i64;
    while s * s > x {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= x {
        s += 1;
    }
    s
}

pub fn inverse_closed(group: &GroupTable, set: &[usize]) -> bool {
    let mut member = vec![false; group.order()];
    for &g in set {
        member[g] = true;
    }
    set.iter().all(|&g| member[group.inv(g)])
}

fn checked_support(group: &GroupTable, d: &RingVector, p: &PdsParams) -> Result<Vec<usize>> {
    check_len(group.order(), d.len())?;
    let support = d.support()?;
    if support.len() as i64 != p.k {
        return Err(Error::BadCardinality { expected: p.k as usize, found: support.len() });
    }
    Ok(support)
}

/// First-stage filter: `D·D^(−1)` has `k` at the identity, `λ` on exactly `k`
/// elements and `μ` on exactly `v − k − 1` elements. Necessary but not
/// sufficient: it does not check *which* elements carry `λ`.
pub fn square_counts_check(group: &GroupTable, d: &RingVector, p: &PdsParams) -> Result<bool> {
    checked_support(group, d, p)?;
    let square = convolve(group, d, &d.reversed(group))?;
    Ok(count_profile_matches(&square.coeffs, p))
}

pub(crate) fn count_profile_matches(square: &[i64], p: &PdsParams) -> bool {
    if square[0] != p.k {
        return false;
    }
    let lambdas = square[1..].iter().filter(|&&c| c == p.lambda).count() as i64;
    let mus = square[1..].iter().filter(|&&c| c == p.mu).count() as i64;
    lambdas == p.k && mus == p.v - p.k - 1
}

/// The definitive test: `(D − θ₊·1)(D − θ₋·1) = μ·G`.
pub fn pds_identity_check(group: &GroupTable, d: &RingVector, p: &PdsParams) -> Result<bool> {
    let support = checked_support(group, d, p)?;
    if !inverse_closed(group, &support) {
        return Err(Error::NotInverseClosed);
    }
    let n = group.order();
    let left = d.sub(&RingVector::scalar(n, p.theta_plus))?;
    let right = d.sub(&RingVector::scalar(n, p.theta_minus))?;
    let product = convolve(group, &left, &right)?;
    Ok(product.coeffs.iter().all(|&c| c == p.mu))
}

/// Convenience wrapper over [`pds_identity_check`] for an element list.
pub fn is_pds(group: &GroupTable, set: &[usize], p: &PdsParams) -> bool {
    let d = RingVector::indicator(group.order(), set);
    set.len() as i64 == p.k
        && inverse_closed(group, set)
        && pds_identity_check(group, &d, p).unwrap_or(false)
}

/// Tests whether `E` is a reversible `(v, |E|, λ_E)` difference set, i.e.
/// `E = E^(−1)` and `E·E = (|E| − λ_E)·1 + λ_E·G` with
/// `λ_E = |E|(|E|−1)/(v−1)`.
pub fn reversible_difference_set_check(group: &GroupTable, e: &[usize]) -> Result<bool> {
    let v = group.order() as i64;
    let size = e.len() as i64;
    let numerator = size * (size - 1);
    if v < 2 || numerator % (v - 1) != 0 {
        return Err(Error::NonIntegerLambda { numerator, denominator: v - 1 });
    }
    let lambda = numerator / (v - 1);
    if !inverse_closed(group, e) {
        return Ok(false);
    }
    let ind = RingVector::indicator(group.order(), e);
    let square = convolve(group, &ind, &ind)?;
    Ok(square.coeffs[0] == size && square.coeffs[1..].iter().all(|&c| c == lambda))
}

/// For disjoint identity-free PDSs `D₁`, `D₂`, checks that the remaining
/// elements (identity included) form a reversible difference set.
pub fn complement_reversible_ds_check(
    group: &GroupTable,
    d1: &RingVector,
    d2: &RingVector,
) -> Result<bool> {
    check_len(group.order(), d1.len())?;
    check_len(group.order(), d2.len())?;
    let a = d1.support()?;
    let b = d2.support()?;
    let mut used = vec![false; group.order()];
    for &g in &a {
        used[g] = true;
    }
    if b.iter().any(|&g| used[g]) {
        return Err(Error::NotDisjoint);
    }
    for &g in &b {
        used[g] = true;
    }
    let e: Vec<usize> = group.elements().filter(|&g| !used[g]).collect();
    reversible_difference_set_check(group, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{cyclic, direct_product, elementary_abelian};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> RingVector {
        RingVector { coeffs: (0..n).map(|_| rng.gen_range(-3..=3)).collect() }
    }

    #[test]
    fn identity_is_neutral() {
        let g = direct_product(&cyclic(4), &cyclic(2));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_vector(&mut rng, 8);
        let one = RingVector::scalar(8, 1);
        assert_eq!(convolve(&g, &one, &b).unwrap(), b);
    }

    #[test]
    fn all_ones_squared() {
        let g = elementary_abelian(2);
        let ones = RingVector::all_ones(4);
        assert_eq!(convolve(&g, &ones, &ones).unwrap().coeffs, vec![4; 4]);
    }

    #[test]
    fn length_mismatch() {
        let g = cyclic(4);
        let r = convolve(&g, &RingVector::zero(4), &RingVector::zero(3));
        assert!(matches!(r, Err(Error::LengthMismatch { expected: 4, found: 3 })));
    }

    #[test]
    fn convolution_is_associative_and_distributive() {
        let groups = [
            crate::construct::dihedral(16),
            direct_product(&crate::construct::quaternion(), &cyclic(8)),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in &groups {
            let n = g.order();
            for _ in 0..20 {
                let (a, b, c) = (random_vector(&mut rng, n), random_vector(&mut rng, n), random_vector(&mut rng, n));
                let ab_c = convolve(g, &convolve(g, &a, &b).unwrap(), &c).unwrap();
                let a_bc = convolve(g, &a, &convolve(g, &b, &c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc);
                let lhs = convolve(g, &a, &b.add(&c).unwrap()).unwrap();
                let rhs = convolve(g, &a, &b).unwrap().add(&convolve(g, &a, &c).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn identity_coefficient_of_closed_square() {
        let g = crate::construct::dihedral(16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut set: Vec<usize> = (1..16).filter(|_| rng.gen_bool(0.4)).collect();
            let closure: Vec<usize> = set.iter().map(|&x| g.inv(x)).collect();
            set.extend(closure);
            set.sort_unstable();
            set.dedup();
            assert!(inverse_closed(&g, &set));
            let ind = RingVector::indicator(16, &set);
            assert_eq!(convolve(&g, &ind, &ind).unwrap().coeffs[0], set.len() as i64);
        }
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(pds_eigenvalues(64, 18, 2, 6).unwrap(), (2, -6));
        assert_eq!(pds_eigenvalues(16, 5, 0, 2).unwrap(), (1, -3));
        let p = PdsParams::new(16, 5, 0, 2).unwrap();
        assert_eq!((p.n, p.r), (4, 1));
        assert!(PdsParams::new(4, 3, 2, 3).is_err());
        assert!(matches!(pds_eigenvalues(5, 2, 0, 1), Err(Error::NonIntegerRoots { .. })));
    }

    #[test]
    fn eigenvalue_relations() {
        for (n, r) in [(8, 2), (4, 1), (6, 2), (10, 3), (8, 1)] {
            let p = PdsParams::nlst(n, r).unwrap();
            assert_eq!(p.theta_plus * p.theta_minus, -(p.k - p.mu));
            assert_eq!(p.theta_plus + p.theta_minus, p.lambda - p.mu);
        }
    }

    #[test]
    fn inverse_closed_examples() {
        let c4 = cyclic(4);
        assert!(inverse_closed(&c4, &[]));
        assert!(inverse_closed(&c4, &[2]));
        assert!(!inverse_closed(&c4, &[1]));
    }

    #[test]
    fn cardinality_and_closure_errors() {
        let g = elementary_abelian(4);
        let p = PdsParams::new(16, 5, 0, 2).unwrap();
        let d = RingVector::indicator(16, &[1, 2, 3]);
        assert!(matches!(pds_identity_check(&g, &d, &p), Err(Error::BadCardinality { .. })));
        assert!(matches!(square_counts_check(&g, &d, &p), Err(Error::BadCardinality { .. })));
        let c16 = cyclic(16);
        let d = RingVector::indicator(16, &[1, 2, 14, 15, 3]);
        assert!(matches!(pds_identity_check(&c16, &d, &p), Err(Error::NotInverseClosed)));
        let mut bad = RingVector::zero(16);
        bad.coeffs[3] = 2;
        assert!(matches!(pds_identity_check(&g, &bad, &p), Err(Error::NotIndicator)));
    }

    #[test]
    fn complement_errors() {
        let g = direct_product(&cyclic(8), &cyclic(8));
        let d = RingVector::indicator(64, &[1, 7]);
        assert!(matches!(complement_reversible_ds_check(&g, &d, &d), Err(Error::NotDisjoint)));
        let e: Vec<usize> = (1..28).collect();
        assert!(matches!(
            reversible_difference_set_check(&g, &e),
            Err(Error::NonIntegerLambda { numerator: 702, denominator: 63 })
        ));
    }
}
