//! Modular data of a rational theory and everything that can be read off the
//! S-matrix: axioms, Verlinde fusion, quantum and global dimensions, simple
//! currents.

mod fusion;
mod json;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Check;

pub use fusion::{DiagonalizationReport, FusionTable, SimpleCurrent};
pub use json::ModularDataFile;

/// Tolerance used when rounding integer-valued sums (fusion coefficients).
pub const DEFAULT_INTEGRALITY_TOLERANCE: f64 = 1e-9;
/// Tolerance used for the S-matrix axioms.
pub const DEFAULT_AXIOM_TOLERANCE: f64 = 1e-7;
/// Largest `n` tried by [`qdim_classify`].
pub const DEFAULT_CLASSIFY_N_MAX: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub axiom: f64,
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            axiom: DEFAULT_AXIOM_TOLERANCE,
            integrality: DEFAULT_INTEGRALITY_TOLERANCE,
        }
    }
}

/// Labels, vacuum, S-matrix and optional conformal weights of a rational
/// theory.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularData {
    labels: Vec<String>,
    vacuum: usize,
    s: DMatrix<Complex64>,
    weights: Option<Vec<Rational64>>,
    central_charge: Option<Rational64>,
    tolerances: Tolerances,
}

/// Involutive permutation `M -> M'` read off from `S^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeConjugation {
    pub perm: Vec<usize>,
    #[serde(skip)]
    pub residual: f64,
}

impl ChargeConjugation {
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalDimension {
    /// `1 / S_{V,V}^2`.
    pub value: f64,
    /// Sum of squared quantum dimensions.
    pub qdim_square_sum: f64,
    pub deviation: f64,
}

/// Classification of a positive real against the allowed quantum-dimension
/// values `{2cos(pi/n) | n >= 3} ∪ [2, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QdimClass {
    TwoCosPiOverN(u32),
    AtLeastTwo,
    Invalid,
}

impl ModularData {
    pub fn new(labels: Vec<String>, vacuum: usize, s: DMatrix<Complex64>) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::Structural(format!(
                "S-matrix is {}x{}, not square",
                s.nrows(),
                s.ncols()
            )));
        }
        if s.nrows() != labels.len() {
            return Err(Error::Structural(format!(
                "S-matrix has dimension {} but there are {} labels",
                s.nrows(),
                labels.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::Structural("no labels".into()));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Structural(format!("duplicate label {l:?}")));
            }
        }
        if vacuum >= labels.len() {
            return Err(Error::Structural(format!(
                "vacuum index {vacuum} out of range for {} labels",
                labels.len()
            )));
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structural("S-matrix has non-finite entries".into()));
        }
        Ok(ModularData {
            labels,
            vacuum,
            s,
            weights: None,
            central_charge: None,
            tolerances: Tolerances::default(),
        })
    }

    /// Builds modular data from a row-major list of rows.
    pub fn from_rows(labels: Vec<String>, vacuum: usize, rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structural(
                "S-matrix rows have unequal or non-square length".into(),
            ));
        }
        let s = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(labels, vacuum, s)
    }

    /// Conformal weights; the vacuum must have weight 0 and every other
    /// module a positive weight.
    pub fn with_weights(mut self, weights: Vec<Rational64>) -> Result<Self> {
        if weights.len() != self.labels.len() {
            return Err(Error::Structural(format!(
                "{} weights for {} labels",
                weights.len(),
                self.labels.len()
            )));
        }
        for (i, w) in weights.iter().enumerate() {
            if i == self.vacuum && !w.is_zero() {
                return Err(Error::Structural(format!("vacuum weight is {w}, expected 0")));
            }
            if i != self.vacuum && !w.is_positive() {
                return Err(Error::Structural(format!(
                    "weight of {:?} is {w}, expected positive",
                    self.labels[i]
                )));
            }
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn with_central_charge(mut self, c: Rational64) -> Self {
        self.central_charge = Some(c);
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Result<Self> {
        if !(tolerances.axiom > 0.0 && tolerances.integrality > 0.0) {
            return Err(Error::Structural("tolerances must be positive".into()));
        }
        self.tolerances = tolerances;
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn vacuum(&self) -> usize {
        self.vacuum
    }

    pub fn s_matrix(&self) -> &DMatrix<Complex64> {
        &self.s
    }

    pub fn s(&self, i: usize, j: usize) -> Complex64 {
        self.s[(i, j)]
    }

    pub fn weights(&self) -> Option<&[Rational64]> {
        self.weights.as_deref()
    }

    pub fn central_charge(&self) -> Option<Rational64> {
        self.central_charge
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    /// `S^{-1}`, taken as the conjugate transpose since S is unitary.
    pub fn s_inverse(&self) -> DMatrix<Complex64> {
        self.s.adjoint()
    }

    /// Relabels by `perm`: new label `i` is old label `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.rank();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Structural("relabeling is not a permutation".into()));
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let vacuum = perm.iter().position(|&p| p == self.vacuum).unwrap();
        let s = DMatrix::from_fn(n, n, |i, j| self.s[(perm[i], perm[j])]);
        let mut out = ModularData::new(labels, vacuum, s)?;
        if let Some(w) = &self.weights {
            out = out.with_weights(perm.iter().map(|&p| w[p]).collect())?;
        }
        out.central_charge = self.central_charge;
        out.tolerances = self.tolerances;
        Ok(out)
    }

    /// Checks the S-matrix axioms: symmetry, unitarity, a real positive
    /// vacuum row, and `S^2` being a permutation matrix.
    pub fn validate(&self) -> ValidationReport {
        let tol = self.tolerances.axiom;
        let n = self.rank();
        let s = &self.s;

        let symmetry = max_abs(&(s - s.transpose()));
        let unitarity = max_abs(&(s * s.adjoint() - DMatrix::<Complex64>::identity(n, n)));

        let v = self.vacuum;
        let mut vac_imag: f64 = 0.0;
        let mut vac_min_re = f64::INFINITY;
        for j in 0..n {
            vac_imag = vac_imag.max(s[(v, j)].im.abs());
            vac_min_re = vac_min_re.min(s[(v, j)].re);
        }
        let positive = vac_min_re > tol && vac_imag <= tol;
        let positivity_dev = vac_imag.max((tol - vac_min_re).max(0.0));

        let (perm_dev, perm_ok) = match round_to_permutation(&(s * s)) {
            Some((_, dev)) => (dev, true),
            None => (f64::INFINITY, false),
        };

        let checks = vec![
            Check::new("symmetry", symmetry, tol),
            Check::new("unitarity", unitarity, tol),
            Check::with_outcome("vacuum_row_positive", positivity_dev, tol, positive),
            Check::with_outcome("s_squared_permutation", perm_dev, tol, perm_ok && perm_dev <= tol),
        ];
        let pass = checks.iter().all(|c| c.pass);
        ValidationReport { checks, pass }
    }

    /// The permutation `M -> M'` from `S^2 = (delta_{M,N'})`.
    pub fn charge_conjugation(&self) -> Result<ChargeConjugation> {
        let tol = self.tolerances.axiom;
        let (perm, residual) = round_to_permutation(&(&self.s * &self.s))
            .ok_or_else(|| Error::NotModularData("S^2 does not round to a permutation matrix".into()))?;
        if residual > tol {
            return Err(Error::NotModularData(format!(
                "S^2 is {residual:.3e} away from a permutation matrix"
            )));
        }
        if perm.iter().enumerate().any(|(i, &p)| perm[p] != i) {
            return Err(Error::NotModularData("charge conjugation is not an involution".into()));
        }
        if perm[self.vacuum] != self.vacuum {
            return Err(Error::NotModularData("charge conjugation moves the vacuum".into()));
        }
        Ok(ChargeConjugation { perm, residual })
    }

    /// `qdim M = S_{M,V} / S_{V,V}`.
    pub fn quantum_dimension(&self, m: usize) -> Result<f64> {
        if m >= self.rank() {
            return Err(Error::Structural(format!("label index {m} out of range")));
        }
        let q = self.s[(m, self.vacuum)] / self.s[(self.vacuum, self.vacuum)];
        if !q.re.is_finite() || q.im.abs() > self.tolerances.axiom {
            return Err(Error::NotModularData(format!(
                "quantum dimension of {:?} is {q}, not real",
                self.labels[m]
            )));
        }
        if q.re <= 0.0 {
            return Err(Error::NotModularData(format!(
                "quantum dimension of {:?} is {}, not positive",
                self.labels[m], q.re
            )));
        }
        Ok(q.re)
    }

    pub fn quantum_dimensions(&self) -> Result<Vec<f64>> {
        (0..self.rank()).map(|m| self.quantum_dimension(m)).collect()
    }

    /// `glob = 1/S_{V,V}^2`, cross-checked against the sum of squared
    /// quantum dimensions.
    pub fn global_dimension(&self) -> Result<GlobalDimension> {
        let svv = self.s[(self.vacuum, self.vacuum)];
        if svv.norm() == 0.0 {
            return Err(Error::NotModularData("S_{V,V} vanishes".into()));
        }
        let value = 1.0 / (svv * svv).re;
        let qdim_square_sum: f64 = self.quantum_dimensions()?.iter().map(|q| q * q).sum();
        let deviation = (value - qdim_square_sum).abs();
        if deviation > self.tolerances.axiom * value.max(1.0) {
            return Err(Error::NotModularData(format!(
                "1/S_VV^2 = {value} but sum of qdim^2 = {qdim_square_sum}"
            )));
        }
        Ok(GlobalDimension {
            value,
            qdim_square_sum,
            deviation,
        })
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Rounds every entry to 0 or 1; succeeds only if the result has exactly one
/// 1 in every row and column. Returns the permutation and the largest rounding
/// residue.
fn round_to_permutation(m: &DMatrix<Complex64>) -> Option<(Vec<usize>, f64)> {
    let n = m.nrows();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            let one = (z - Complex64::new(1.0, 0.0)).norm();
            let zero = z.norm();
            if one < zero {
                if perm[i] != usize::MAX || used[j] {
                    return None;
                }
                perm[i] = j;
                used[j] = true;
                residual = residual.max(one);
            } else {
                residual = residual.max(zero);
            }
        }
        if perm[i] == usize::MAX {
            return None;
        }
    }
    Some((perm, residual))
}

/// Matches `x` against `2cos(pi/n)` for `n = 3..=n_max`, smallest `n` first.
pub fn qdim_classify(x: f64, tol: f64, n_max: u32) -> QdimClass {
    if !(x > 0.0) {
        return QdimClass::Invalid;
    }
    for n in 3..=n_max.max(3) {
        if (x - 2.0 * (std::f64::consts::PI / n as f64).cos()).abs() <= tol {
            return QdimClass::TwoCosPiOverN(n);
        }
    }
    if x >= 2.0 - tol {
        QdimClass::AtLeastTwo
    } else {
        QdimClass::Invalid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    fn lattice(k: usize) -> ModularData {
        let n = 2 * k;
        let norm = 1.0 / ((2 * k) as f64).sqrt();
        let s = DMatrix::from_fn(n, n, |r, t| {
            Complex64::from_polar(norm, -PI * (r * t) as f64 / k as f64)
        });
        ModularData::new(labels(n), 0, s).unwrap()
    }

    #[test]
    fn trivial_data_passes() {
        let md = ModularData::from_rows(labels(1), 0, &[vec![c(1.0)]]).unwrap();
        assert!(md.validate().pass);
        assert!(md.charge_conjugation().unwrap().is_identity());
        assert_eq!(md.quantum_dimension(0).unwrap(), 1.0);
        assert_eq!(md.global_dimension().unwrap().value, 1.0);
    }

    #[test]
    fn swap_matrix_fails_vacuum_positivity() {
        let md = ModularData::from_rows(labels(2), 0, &[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let report = md.validate();
        assert!(!report.pass);
        assert!(!report.check("vacuum_row_positive").unwrap().pass);
        assert!(report.check("symmetry").unwrap().pass);
        assert!(report.check("unitarity").unwrap().pass);
    }

    #[test]
    fn structural_errors_are_distinct() {
        let s = DMatrix::from_element(2, 3, c(1.0));
        assert!(matches!(ModularData::new(labels(2), 0, s), Err(Error::Structural(_))));
        let s = DMatrix::from_element(2, 2, c(1.0));
        assert!(matches!(
            ModularData::new(vec!["a".into(), "a".into()], 0, s.clone()),
            Err(Error::Structural(_))
        ));
        assert!(matches!(ModularData::new(labels(2), 2, s), Err(Error::Structural(_))));
    }

    #[test]
    fn weights_must_vanish_only_on_vacuum() {
        let md = lattice(1);
        assert!(md
            .clone()
            .with_weights(vec![Rational64::new(0, 1), Rational64::new(1, 4)])
            .is_ok());
        assert!(md
            .clone()
            .with_weights(vec![Rational64::new(1, 4), Rational64::new(1, 4)])
            .is_err());
        assert!(md
            .with_weights(vec![Rational64::new(0, 1), Rational64::new(0, 1)])
            .is_err());
    }

    #[test]
    fn lattice_k1_is_valid_and_self_dual() {
        let md = lattice(1);
        assert!((md.s(1, 1).re + 1.0 / SQRT_2).abs() < 1e-15);
        assert!(md.validate().pass);
        assert!(md.charge_conjugation().unwrap().is_identity());
    }

    #[test]
    fn lattice_k2_conjugation_swaps_1_and_3() {
        // Oracle: square S_{rs} = e^{-pi i rs/k}/sqrt(2k) numerically.
        let md = lattice(2);
        let s2 = md.s_matrix() * md.s_matrix();
        let mut expect = vec![0; 4];
        for r in 0..4 {
            for t in 0..4 {
                if (s2[(r, t)].re - 1.0).abs() < 1e-12 {
                    expect[r] = t;
                }
            }
        }
        assert_eq!(expect, vec![0, 3, 2, 1]);
        assert_eq!(md.charge_conjugation().unwrap().perm, expect);
    }

    #[test]
    fn non_permutation_square_is_rejected() {
        let h = 0.6;
        let md = ModularData::from_rows(labels(2), 0, &[vec![c(h), c(h)], vec![c(h), c(-h)]]).unwrap();
        assert!(!md.validate().pass);
        assert!(matches!(md.charge_conjugation(), Err(Error::NotModularData(_))));
    }

    #[test]
    fn lattice_global_dimension() {
        for k in 1..=4 {
            let g = lattice(k).global_dimension().unwrap();
            assert!((g.value - 2.0 * k as f64).abs() < 1e-9);
        }
        assert!((lattice(3).global_dimension().unwrap().value - 6.0).abs() < 1e-9);
    }

    #[test]
    fn complex_quantum_dimension_is_rejected() {
        let z = Complex64::from_polar(1.0 / SQRT_2, PI / 3.0);
        let md = ModularData::from_rows(labels(2), 0, &[vec![c(1.0 / SQRT_2), z], vec![z, c(-1.0 / SQRT_2)]]).unwrap();
        assert!(matches!(md.quantum_dimension(1), Err(Error::NotModularData(_))));
    }

    #[test]
    fn classify_known_values() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(qdim_classify(1.0, 1e-9, 1000), QdimClass::TwoCosPiOverN(3));
        assert_eq!(qdim_classify(phi, 1e-9, 1000), QdimClass::TwoCosPiOverN(5));
        assert_eq!(qdim_classify(1.41421356, 1e-7, 1000), QdimClass::TwoCosPiOverN(4));
        assert_eq!(qdim_classify(3.0f64.sqrt(), 1e-9, 1000), QdimClass::TwoCosPiOverN(6));
        assert_eq!(qdim_classify(2.5, 1e-9, 1000), QdimClass::AtLeastTwo);
        assert_eq!(qdim_classify(1.2, 1e-9, 1000), QdimClass::Invalid);
        assert_eq!(qdim_classify(0.5, 1e-9, 1000), QdimClass::Invalid);
        assert_eq!(qdim_classify(-1.0, 1e-9, 1000), QdimClass::Invalid);
    }

    #[test]
    fn relabel_moves_vacuum() {
        let md = lattice(2);
        let r = md.relabel(&[2, 0, 3, 1]).unwrap();
        assert_eq!(r.vacuum(), 1);
        assert_eq!(r.label(0), "m2");
        assert!(r.validate().pass);
        assert!(md.relabel(&[0, 0, 1, 2]).is_err());
    }
}
