use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group::FiniteGroup;
use crate::error::{Error, Result};

/// A root-of-unity valued 2-cochain `alpha(h,k) = exp(2 pi i a(h,k) / n)`,
/// stored as its exponent table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cocycle2 {
    pub n: u32,
    #[serde(rename = "exp")]
    pub table: Vec<Vec<u32>>,
}

impl Cocycle2 {
    pub fn new(n: u32, table: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structural("cocycle root order must be positive".into()));
        }
        let m = table.len();
        if table.iter().any(|row| row.len() != m) {
            return Err(Error::Structural("cocycle table is not square".into()));
        }
        let table = table
            .into_iter()
            .map(|row| row.into_iter().map(|a| a % n).collect())
            .collect();
        Ok(Cocycle2 { n, table })
    }

    pub fn trivial(m: usize) -> Self {
        Cocycle2 {
            n: 1,
            table: vec![vec![0; m]; m],
        }
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn exp(&self, h: usize, k: usize) -> u32 {
        self.table[h][k]
    }

    pub fn value(&self, h: usize, k: usize) -> Complex64 {
        root_of_unity(self.exp(h, k) as i64, self.n as i64)
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().flatten().all(|&a| a == 0)
    }

    /// `alpha(1, h) = alpha(h, 1) = 1`.
    pub fn is_normalized(&self) -> bool {
        (0..self.size()).all(|h| self.table[0][h] == 0 && self.table[h][0] == 0)
    }

    /// First triple violating `a(h,k) + a(hk,l) = a(h,kl) + a(k,l) mod n`.
    pub fn identity_failure(&self, group: &FiniteGroup) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for h in group.elements() {
            for k in group.elements() {
                let hk = group.mul(h, k);
                for l in group.elements() {
                    let lhs = (self.exp(h, k) + self.exp(hk, l)) % n;
                    let rhs = (self.exp(h, group.mul(k, l)) + self.exp(k, l)) % n;
                    if lhs != rhs {
                        return Some((h, k, l));
                    }
                }
            }
        }
        None
    }

    pub fn check(&self, group: &FiniteGroup) -> Result<()> {
        if self.size() != group.order() {
            return Err(Error::Structural(format!(
                "cocycle table has size {} for a group of order {}",
                self.size(),
                group.order()
            )));
        }
        match self.identity_failure(group) {
            Some((h, k, l)) => Err(Error::NotACocycle(h, k, l)),
            None => Ok(()),
        }
    }
}

pub fn root_of_unity(a: i64, n: i64) -> Complex64 {
    let a = a.rem_euclid(n);
    match (4 * a).checked_rem(n) {
        // exact values at quarter turns
        Some(0) => [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(4 * a / n) as usize],
        _ => Complex64::from_polar(1.0, 2.0 * PI * a as f64 / n as f64),
    }
}

/// `K^ = K x <kappa>` with `(a, s)(b, t) = (ab, alpha(a,b) kappa^{s+t})`.
/// Element `(a, s)` has index `a * n + s`.
///
/// Associativity of the result is equivalent to the cocycle identity, and
/// a failure is reported with the offending triple.
pub fn central_extension(group: &FiniteGroup, alpha: &Cocycle2) -> Result<FiniteGroup> {
    if alpha.size() != group.order() {
        return Err(Error::Structural("cocycle does not match group".into()));
    }
    if !alpha.is_normalized() {
        return Err(Error::Domain("cocycle is not normalized".into()));
    }
    let n = alpha.n as usize;
    let m = group.order() * n;
    let mul = (0..m)
        .map(|x| {
            let (a, s) = (x / n, x % n);
            (0..m)
                .map(|y| {
                    let (b, t) = (y / n, y % n);
                    group.mul(a, b) * n + (alpha.exp(a, b) as usize + s + t) % n
                })
                .collect()
        })
        .collect();
    match FiniteGroup::from_table(mul) {
        Ok(g) => Ok(g),
        Err(_) => {
            let (h, k, l) = alpha
                .identity_failure(group)
                .expect("a non-associative extension comes from a non-cocycle");
            Err(Error::NotACocycle(h, k, l))
        }
    }
}

/// The commutation cocycle on `Z_2 x Z_2`: `a((x1,z1),(x2,z2)) = z1 x2 mod 2`
/// where element `(x, z)` has index `2x + z`.
pub fn pauli_cocycle() -> Cocycle2 {
    let table = (0..4)
        .map(|a: usize| (0..4).map(|b: usize| ((a % 2) * (b / 2)) as u32 % 2).collect())
        .collect();
    Cocycle2::new(2, table).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_extension_of_z2() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = central_extension(&g, &Cocycle2::trivial(2)).unwrap();
        assert_eq!(e.order(), 2);
        assert!(e.is_cyclic());
    }

    #[test]
    fn pauli_extension_is_order_eight_nonabelian() {
        let k = FiniteGroup::parse("Z2xZ2").unwrap();
        let alpha = pauli_cocycle();
        alpha.check(&k).unwrap();
        let e = central_extension(&k, &alpha).unwrap();
        assert_eq!(e.order(), 8);
        assert!(!e.is_abelian());
        assert_eq!(e.derived_subgroup().len(), 2);
        assert_eq!(e.center().len(), 2);
    }

    #[test]
    fn perturbed_cocycle_reports_witness() {
        let k = FiniteGroup::parse("Z2xZ2").unwrap();
        let mut alpha = pauli_cocycle();
        alpha.table[1][2] ^= 1;
        let err = central_extension(&k, &alpha).unwrap_err();
        let Error::NotACocycle(h, kk, l) = err else {
            panic!("{err:?}")
        };
        // The witness must violate the identity.
        let n = alpha.n;
        let lhs = (alpha.exp(h, kk) + alpha.exp(k.mul(h, kk), l)) % n;
        let rhs = (alpha.exp(h, k.mul(kk, l)) + alpha.exp(kk, l)) % n;
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn roots_of_unity_exact_at_quarters() {
        assert_eq!(root_of_unity(1, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(3, 4), Complex64::new(0.0, -1.0));
        assert_eq!(root_of_unity(-1, 4), Complex64::new(0.0, -1.0));
        assert!((root_of_unity(1, 3) - Complex64::from_polar(1.0, 2.0 * PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn cocycle_json() {
        let c: Cocycle2 = serde_json::from_str(r#"{"n":2,"exp":[[0,0],[0,1]]}"#).unwrap();
        assert_eq!(c.exp(1, 1), 1);
        let g = FiniteGroup::cyclic(2).unwrap();
        c.check(&g).unwrap();
    }
}
