//! Group constructors: cyclic groups, direct and semidirect products, and a
//! few named small groups. Every constructor output goes through full table
//! validation.

use crate::error::{Error, Result};
use crate::group::GroupTable;

pub fn cyclic(n: usize) -> GroupTable {
    assert!(n > 0, "cyclic group of order 0");
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    GroupTable::from_table(&table, format!("c{n}")).expect("cyclic table is a group")
}

/// `A × B` with element `(a, b)` at index `a·|B| + b`.
pub fn direct_product(a: &GroupTable, b: &GroupTable) -> GroupTable {
    let trivial: Vec<Vec<usize>> = vec![(0..a.order()).collect(); b.order()];
    let mut g = semidirect_product(a, b, &trivial).expect("trivial action is valid");
    g.set_id_label(format!("{}x{}", a.id_label(), b.id_label()));
    g
}

/// `N ⋊ H` where `action[h]` is the automorphism of `N` by which `h` acts,
/// given as an image table. Element `(n, h)` sits at index `n·|H| + h` and
/// `(n₁,h₁)(n₂,h₂) = (n₁·φ_{h₁}(n₂), h₁h₂)`.
pub fn semidirect_product(
    normal: &GroupTable,
    acting: &GroupTable,
    action: &[Vec<usize>],
) -> Result<GroupTable> {
    let nn = normal.order();
    let nh = acting.order();
    if action.len() != nh {
        return Err(Error::InvalidAction(format!(
            "expected {nh} automorphisms, got {}",
            action.len()
        )));
    }
    for (h, phi) in action.iter().enumerate() {
        if phi.len() != nn {
            return Err(Error::InvalidAction(format!("image table for {h} has wrong length")));
        }
        let mut hit = vec![false; nn];
        for &x in phi {
            if x >= nn || std::mem::replace(&mut hit[x], true) {
                return Err(Error::InvalidAction(format!("action of {h} is not a bijection")));
            }
        }
        for a in 0..nn {
            for b in 0..nn {
                if phi[normal.mul(a, b)] != normal.mul(phi[a], phi[b]) {
                    return Err(Error::InvalidAction(format!(
                        "action of {h} is not a homomorphism"
                    )));
                }
            }
        }
    }
    if action[0].iter().enumerate().any(|(i, &x)| i != x) {
        return Err(Error::InvalidAction("identity does not act trivially".into()));
    }
    for h1 in 0..nh {
        for h2 in 0..nh {
            let composed = &action[acting.mul(h1, h2)];
            if (0..nn).any(|x| composed[x] != action[h1][action[h2][x]]) {
                return Err(Error::InvalidAction(format!(
                    "action is not a homomorphism at ({h1},{h2})"
                )));
            }
        }
    }
    let n = nn * nh;
    let mut table = vec![vec![0usize; n]; n];
    for n1 in 0..nn {
        for h1 in 0..nh {
            let row = &mut table[n1 * nh + h1];
            for n2 in 0..nn {
                let twisted = normal.mul(n1, action[h1][n2]);
                for h2 in 0..nh {
                    row[n2 * nh + h2] = twisted * nh + acting.mul(h1, h2);
                }
            }
        }
    }
    GroupTable::from_table(&table, format!("{}:{}", normal.id_label(), acting.id_label()))
}

/// `C₂^rank`
pub fn elementary_abelian(rank: u32) -> GroupTable {
    let n = 1usize << rank;
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| a ^ b).collect()).collect();
    GroupTable::from_table(&table, format!("c2^{rank}")).expect("xor table is a group")
}

/// Dihedral group of the given (even) order, as `C_{n/2} ⋊ C₂` by inversion.
pub fn dihedral(order: usize) -> GroupTable {
    assert!(order >= 2 && order % 2 == 0, "dihedral order must be even");
    let m = order / 2;
    let rot = cyclic(m);
    let inversion: Vec<usize> = (0..m).map(|x| (m - x) % m).collect();
    let mut g = semidirect_product(&rot, &cyclic(2), &[(0..m).collect(), inversion])
        .expect("inversion is an automorphism");
    g.set_id_label(format!("d{order}"));
    g
}

/// The quaternion group of order 8.
pub fn quaternion() -> GroupTable {
    // Elements ±1, ±i, ±j, ±k encoded as (sign, unit) with unit 0..4 = 1,i,j,k.
    let unit_mul = |a: usize, b: usize| -> (bool, usize) {
        match (a, b) {
            (0, x) | (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let encode = |neg: bool, u: usize| u * 2 + neg as usize;
    let table: Vec<Vec<usize>> = (0..8)
        .map(|a| {
            (0..8)
                .map(|b| {
                    let (neg, u) = unit_mul(a / 2, b / 2);
                    encode(neg ^ (a % 2 == 1) ^ (b % 2 == 1), u)
                })
                .collect()
        })
        .collect();
    GroupTable::from_table(&table, "q8").expect("quaternion table is a group")
}

/// Builds a group from a short description: factors joined by `x`, each
/// `c<n>` (cyclic), `c2^<r>` (elementary abelian), `d<n>` (dihedral of order
/// n) or `q8`. The result carries `spec` as its label.
pub fn builtin(spec: &str) -> Result<GroupTable> {
    let unknown = || Error::UnknownGroup(spec.to_string());
    let mut result: Option<GroupTable> = None;
    for factor in spec.to_ascii_lowercase().split('x') {
        let g = if factor == "q8" {
            quaternion()
        } else if let Some(rest) = factor.strip_prefix("c2^") {
            let r: u32 = rest.parse().map_err(|_| unknown())?;
            if r > 12 {
                return Err(unknown());
            }
            elementary_abelian(r)
        } else if let Some(rest) = factor.strip_prefix('c') {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n == 0 || n > 4096 {
                return Err(unknown());
            }
            cyclic(n)
        } else if let Some(rest) = factor.strip_prefix('d') {
            let n: usize = rest.parse().map_err(|_| unknown())?;
            if n < 2 || n % 2 == 1 || n > 4096 {
                return Err(unknown());
            }
            dihedral(n)
        } else {
            return Err(unknown());
        };
        result = Some(match result {
            None => g,
            Some(acc) => direct_product(&acc, &g),
        });
        if result.as_ref().map_or(0, |g| g.order()) > 4096 {
            return Err(unknown());
        }
    }
    let mut g = result.ok_or_else(unknown)?;
    g.set_id_label(spec);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c8_times_c8() {
        let g = direct_product(&cyclic(8), &cyclic(8));
        assert_eq!(g.order(), 64);
        assert!(g.is_abelian());
        assert_eq!(g.id_label(), "c8xc8");
    }

    #[test]
    fn dihedral_eight() {
        let d = dihedral(8);
        assert_eq!(d.order(), 8);
        assert!(!d.is_abelian());
        assert_eq!(d.involutions().count(), 5);
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = quaternion();
        assert_eq!(q.involutions().count(), 1);
        assert!(!q.is_abelian());
    }

    #[test]
    fn invalid_action_rejected() {
        // x -> 2x is not a bijection of C4.
        let bad = vec![(0..4).collect(), vec![0, 2, 0, 2]];
        assert!(matches!(
            semidirect_product(&cyclic(4), &cyclic(2), &bad),
            Err(Error::InvalidAction(_))
        ));
        // Both nonidentity elements of C3 inverting C4 breaks composition.
        let not_hom = vec![(0..4).collect(), vec![0, 3, 2, 1], vec![0, 3, 2, 1]];
        assert!(matches!(
            semidirect_product(&cyclic(4), &cyclic(3), &not_hom),
            Err(Error::InvalidAction(_))
        ));
    }

    #[test]
    fn trivial_semidirect_is_direct() {
        let a = cyclic(4);
        let b = elementary_abelian(2);
        let trivial = vec![(0..4).collect::<Vec<_>>(); 4];
        let s = semidirect_product(&a, &b, &trivial).unwrap();
        assert_eq!(s.to_table(), direct_product(&a, &b).to_table());
    }

    #[test]
    fn builtin_specs() {
        let g = builtin("c4xc4xc2xc2").unwrap();
        assert_eq!(g.order(), 64);
        assert_eq!(g.id_label(), "c4xc4xc2xc2");
        assert_eq!(builtin("c2^4").unwrap().order(), 16);
        assert_eq!(builtin("d8xc2").unwrap().order(), 16);
        assert!(builtin("z9").is_err());
        assert!(builtin("").is_err());
    }
}
