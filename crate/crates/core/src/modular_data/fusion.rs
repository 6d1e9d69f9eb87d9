use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::ModularData;
use crate::error::{Error, Result};

/// Nonnegative integer structure constants `N[a][b][c]` of the fusion ring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionTable {
    n: Vec<Vec<Vec<u32>>>,
    vacuum: usize,
    #[serde(skip)]
    residual: f64,
}

impl FusionTable {
    /// Builds a table from explicit coefficients, checking the ring axioms.
    pub fn from_coefficients(n: Vec<Vec<Vec<u32>>>, vacuum: usize) -> Result<Self> {
        let table = FusionTable {
            n,
            vacuum,
            residual: 0.0,
        };
        let r = table.rank();
        if vacuum >= r || table.n.iter().any(|a| a.len() != r || a.iter().any(|b| b.len() != r)) {
            return Err(Error::Structural("fusion table is not rank x rank x rank".into()));
        }
        table.check_axioms()?;
        Ok(table)
    }

    pub fn rank(&self) -> usize {
        self.n.len()
    }

    pub fn vacuum(&self) -> usize {
        self.vacuum
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> u32 {
        self.n[a][b][c]
    }

    pub fn coefficients(&self) -> &[Vec<Vec<u32>>] {
        &self.n
    }

    /// Largest distance of a Verlinde sum from its rounded value.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The fusion matrix `F(m)` with entries `F(m)[b][c] = N[m][b][c]`.
    pub fn fusion_matrix(&self, m: usize) -> Vec<Vec<u64>> {
        self.n[m]
            .iter()
            .map(|row| row.iter().map(|&x| x as u64).collect())
            .collect()
    }

    /// Commutativity, unit, and associativity, checked exactly.
    pub fn check_axioms(&self) -> Result<()> {
        let r = self.rank();
        let n = &self.n;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if n[a][b][c] != n[b][a][c] {
                        return Err(Error::NotModularData(format!(
                            "fusion not commutative at ({a},{b},{c})"
                        )));
                    }
                }
                let unit = u32::from(a == b);
                if n[self.vacuum][a][b] != unit {
                    return Err(Error::NotModularData(format!("vacuum is not a unit at ({a},{b})")));
                }
            }
        }
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        let lhs: u64 = (0..r).map(|e| n[a][b][e] as u64 * n[e][c][d] as u64).sum();
                        let rhs: u64 = (0..r).map(|f| n[b][c][f] as u64 * n[a][f][d] as u64).sum();
                        if lhs != rhs {
                            return Err(Error::NotModularData(format!(
                                "fusion not associative at ({a},{b},{c},{d})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// If `m ⊠ b` is irreducible, its single summand.
    fn unique_product(&self, m: usize, b: usize) -> Option<usize> {
        let row = &self.n[m][b];
        let total: u64 = row.iter().map(|&x| x as u64).sum();
        if total == 1 {
            row.iter().position(|&x| x == 1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimpleCurrent {
    pub label: usize,
    pub order: usize,
}

/// Result of conjugating a fusion matrix by S.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalizationReport {
    pub off_diagonal: f64,
    pub diagonal_deviation: f64,
    /// The diagonal of `S^{-1} F(m) S`.
    pub eigenvalues: Vec<Complex64>,
    pub pass: bool,
}

impl ModularData {
    /// Fusion coefficients from the Verlinde formula, rounded to integers.
    pub fn verlinde_fusion(&self) -> Result<FusionTable> {
        let r = self.rank();
        let v = self.vacuum();
        let s = self.s_matrix();
        let s_inv = self.s_inverse();
        let tol = self.tolerances().integrality;

        let mut weight = Vec::with_capacity(r);
        for u in 0..r {
            let d = s[(v, u)];
            if d.norm() <= tol {
                return Err(Error::NotModularData(format!("S_(V,{u}) vanishes")));
            }
            weight.push(d);
        }

        let mut n = vec![vec![vec![0u32; r]; r]; r];
        let mut residual: f64 = 0.0;
        for a in 0..r {
            for b in a..r {
                // z[u] = S_{a,u} S_{b,u} / S_{V,u}
                let z: Vec<Complex64> = (0..r).map(|u| s[(a, u)] * s[(b, u)] / weight[u]).collect();
                for c in 0..r {
                    let sum: Complex64 = (0..r).map(|u| z[u] * s_inv[(u, c)]).sum();
                    let rounded = sum.re.round();
                    let res = (sum - Complex64::new(rounded, 0.0)).norm();
                    residual = residual.max(res);
                    if res > tol {
                        return Err(Error::NotModularData(format!(
                            "Verlinde sum N({a},{b},{c}) = {sum} is not within {tol:e} of an integer"
                        )));
                    }
                    if rounded < 0.0 {
                        return Err(Error::NotModularData(format!(
                            "Verlinde sum N({a},{b},{c}) rounds to {rounded}"
                        )));
                    }
                    n[a][b][c] = rounded as u32;
                    n[b][a][c] = rounded as u32;
                }
            }
        }
        let table = FusionTable { n, vacuum: v, residual };
        table.check_axioms()?;
        Ok(table)
    }

    /// Simple currents and their orders, with the root-of-unity and
    /// matrix-power consistency checks.
    pub fn simple_currents(&self, ft: &FusionTable) -> Result<Vec<SimpleCurrent>> {
        let r = self.rank();
        let v = self.vacuum();
        let tol = self.tolerances().axiom;
        if ft.rank() != r || ft.vacuum() != v {
            return Err(Error::Structural("fusion table does not match modular data".into()));
        }
        let mut out = Vec::new();
        for m in 0..r {
            if (0..r).any(|b| ft.unique_product(m, b).is_none()) {
                continue;
            }
            // Powers m^{⊠j} for j = 0, 1, ..., until we return to the vacuum.
            let mut powers = vec![v];
            let mut cur = ft.unique_product(m, v).unwrap();
            while cur != v {
                powers.push(cur);
                if powers.len() > r {
                    return Err(Error::SimpleCurrent {
                        label: self.label(m).to_string(),
                        detail: "fusion powers never return to the vacuum".into(),
                    });
                }
                cur = ft.unique_product(m, cur).ok_or_else(|| Error::SimpleCurrent {
                    label: self.label(m).to_string(),
                    detail: "power of a simple current is not simple".into(),
                })?;
            }
            let order = powers.len();

            for nn in 0..r {
                let ratio = self.s(m, nn) / self.s(v, nn);
                let dev = (ratio.powu(order as u32) - Complex64::new(1.0, 0.0)).norm();
                if dev > tol * order as f64 {
                    return Err(Error::SimpleCurrent {
                        label: self.label(m).to_string(),
                        detail: format!(
                            "S ratio {ratio} at {:?} is not an order-{order} root of unity",
                            self.label(nn)
                        ),
                    });
                }
            }

            let f = ft.fusion_matrix(m);
            let mut acc = identity(r);
            for (j, &p) in powers.iter().enumerate() {
                if acc != ft.fusion_matrix(p) {
                    return Err(Error::SimpleCurrent {
                        label: self.label(m).to_string(),
                        detail: format!("F(m^{j}) differs from F(m)^{j}"),
                    });
                }
                acc = mat_mul(&acc, &f);
            }

            out.push(SimpleCurrent { label: m, order });
        }
        Ok(out)
    }

    /// Conjugates `F(m)` by S and measures how far it is from
    /// `diag(S_{m,N}/S_{V,N})`.
    pub fn fusion_diagonalization_check(&self, ft: &FusionTable, m: usize) -> Result<DiagonalizationReport> {
        let r = self.rank();
        if m >= r || ft.rank() != r {
            return Err(Error::Structural("label or table out of range".into()));
        }
        let f = DMatrix::from_fn(r, r, |b, c| Complex64::new(ft.get(m, b, c) as f64, 0.0));
        let d = self.s_inverse() * f * self.s_matrix();
        let v = self.vacuum();
        let mut off: f64 = 0.0;
        let mut diag: f64 = 0.0;
        let mut eigenvalues = Vec::with_capacity(r);
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    let expect = self.s(m, i) / self.s(v, i);
                    diag = diag.max((d[(i, i)] - expect).norm());
                    eigenvalues.push(d[(i, i)]);
                } else {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        let tol = self.tolerances().axiom;
        Ok(DiagonalizationReport {
            off_diagonal: off,
            diagonal_deviation: diag,
            eigenvalues,
            pass: off <= tol && diag <= tol,
        })
    }
}

fn identity(r: usize) -> Vec<Vec<u64>> {
    (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect()
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let r = a.len();
    (0..r)
        .map(|i| (0..r).map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lattice(k: usize) -> ModularData {
        let n = 2 * k;
        let norm = 1.0 / ((2 * k) as f64).sqrt();
        let s = DMatrix::from_fn(n, n, |r, t| {
            Complex64::from_polar(norm, -PI * (r * t) as f64 / k as f64)
        });
        ModularData::new((0..n).map(|i| format!("r{i}")).collect(), 0, s).unwrap()
    }

    fn fibonacci() -> ModularData {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let norm = 1.0 / (2.0 + phi).sqrt();
        let rows = vec![
            vec![Complex64::new(norm, 0.0), Complex64::new(norm * phi, 0.0)],
            vec![Complex64::new(norm * phi, 0.0), Complex64::new(-norm, 0.0)],
        ];
        ModularData::from_rows(vec!["1".into(), "tau".into()], 0, &rows).unwrap()
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn trivial_fusion() {
        let md = ModularData::from_rows(vec!["V".into()], 0, &[vec![Complex64::new(1.0, 0.0)]]).unwrap();
        let ft = md.verlinde_fusion().unwrap();
        assert_eq!(ft.get(0, 0, 0), 1);
        assert_eq!(
            md.simple_currents(&ft).unwrap(),
            vec![SimpleCurrent { label: 0, order: 1 }]
        );
    }

    #[test]
    fn lattice_fusion_is_cyclic_group_ring() {
        // Oracle: the group ring of Z_{2k}.
        for k in 1..=6 {
            let ft = lattice(k).verlinde_fusion().unwrap();
            let n = 2 * k;
            for r in 0..n {
                for s in 0..n {
                    for t in 0..n {
                        assert_eq!(ft.get(r, s, t), u32::from(t == (r + s) % n), "k={k}");
                    }
                }
            }
            assert!(ft.residual() < 1e-9);
        }
    }

    #[test]
    fn lattice_simple_current_orders() {
        for k in 1..=4 {
            let md = lattice(k);
            let ft = md.verlinde_fusion().unwrap();
            let sc = md.simple_currents(&ft).unwrap();
            assert_eq!(sc.len(), 2 * k);
            for c in sc {
                assert_eq!(c.order, 2 * k / gcd(c.label, 2 * k));
            }
        }
    }

    #[test]
    fn fibonacci_fusion_and_currents() {
        let md = fibonacci();
        assert!(md.validate().pass);
        let ft = md.verlinde_fusion().unwrap();
        assert_eq!(ft.coefficients()[1][1], vec![1, 1]);
        let sc = md.simple_currents(&ft).unwrap();
        assert_eq!(sc, vec![SimpleCurrent { label: 0, order: 1 }]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((md.quantum_dimension(1).unwrap() - phi).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_diagonalization() {
        let md = fibonacci();
        let ft = md.verlinde_fusion().unwrap();
        let rep = md.fusion_diagonalization_check(&ft, 1).unwrap();
        assert!(rep.pass);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((rep.eigenvalues[0].re - phi).abs() < 1e-9);
        assert!((rep.eigenvalues[1].re - (1.0 - phi)).abs() < 1e-9);
    }

    #[test]
    fn vacuum_fusion_matrix_is_identity() {
        let md = lattice(2);
        let ft = md.verlinde_fusion().unwrap();
        let rep = md.fusion_diagonalization_check(&ft, 0).unwrap();
        assert!(rep.off_diagonal < 1e-12 && rep.diagonal_deviation < 1e-12);
        let rep = md.fusion_diagonalization_check(&ft, 1).unwrap();
        assert!(rep.off_diagonal < 1e-9 && rep.diagonal_deviation < 1e-9);
    }

    #[test]
    fn non_integral_data_is_rejected() {
        // A unitary symmetric matrix with positive vacuum row whose Verlinde
        // sums are not integers.
        let (a, b) = (0.8f64, 0.6f64);
        let rows = vec![
            vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            vec![Complex64::new(b, 0.0), Complex64::new(-a, 0.0)],
        ];
        let md = ModularData::from_rows(vec!["0".into(), "1".into()], 0, &rows).unwrap();
        assert!(md.validate().pass);
        assert!(matches!(md.verlinde_fusion(), Err(Error::NotModularData(_))));
    }

    #[test]
    fn explicit_table_axioms() {
        // 1 x 1 = 0 is a commutative, associative, unital ring but 1 has no dual;
        // only the unit and ring laws are checked here.
        let nilpotent = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]];
        assert!(FusionTable::from_coefficients(nilpotent, 0).is_ok());
        let no_unit = vec![vec![vec![1, 0], vec![1, 0]], vec![vec![0, 1], vec![1, 0]]];
        assert!(FusionTable::from_coefficients(no_unit, 0).is_err());
        let z2 = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]];
        assert!(FusionTable::from_coefficients(z2, 0).is_ok());
    }
}
