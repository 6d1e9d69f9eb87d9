//! The quantum double `D(G)` on the basis `x (x) e(g)`, with product
//! `(x (x) e(g))(y (x) e(h)) = delta_{g,h} xy (x) e(g)` and coproduct
//! `Delta(x (x) e(g)) = sum_{hk=g} (x (x) e(h)) (x) (x (x) e(k))`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_alg::{root_of_unity, CharacterTable, FiniteGroup};
use crate::modular_data::FusionTable;

const COEFF_TOL: f64 = 1e-12;

type Basis = (usize, usize);

/// A linear combination of basis elements `x (x) e(g)`, keyed by `(x, g)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DGElement {
    pub coeffs: BTreeMap<Basis, Complex64>,
}

/// An element of `D(G) (x) D(G)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DGTensor {
    pub coeffs: BTreeMap<(Basis, Basis), Complex64>,
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, Complex64>, key: K, c: Complex64) {
    let slot = map.entry(key).or_insert(Complex64::new(0.0, 0.0));
    *slot += c;
}

fn prune<K: Ord + Clone>(map: BTreeMap<K, Complex64>) -> BTreeMap<K, Complex64> {
    map.into_iter().filter(|(_, c)| c.norm() > COEFF_TOL).collect()
}

fn max_diff<K: Ord>(a: &BTreeMap<K, Complex64>, b: &BTreeMap<K, Complex64>) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let left = a.iter().map(|(k, x)| (x - b.get(k).unwrap_or(&zero)).norm());
    let right = b.iter().filter(|(k, _)| !a.contains_key(k)).map(|(_, y)| y.norm());
    left.chain(right).fold(0.0, f64::max)
}

impl DGElement {
    pub fn basis(x: usize, g: usize) -> Self {
        DGElement {
            coeffs: BTreeMap::from([((x, g), Complex64::new(1.0, 0.0))]),
        }
    }

    /// `sum_g 1 (x) e(g)`.
    pub fn unit(group: &FiniteGroup) -> Self {
        DGElement {
            coeffs: group.elements().map(|g| ((0, g), Complex64::new(1.0, 0.0))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        max_diff(&self.coeffs, &other.coeffs)
    }
}

impl DGTensor {
    pub fn distance(&self, other: &Self) -> f64 {
        max_diff(&self.coeffs, &other.coeffs)
    }
}

pub fn dg_multiply(a: &DGElement, b: &DGElement, group: &FiniteGroup) -> DGElement {
    let mut out = BTreeMap::new();
    for (&(x, g), &c) in &a.coeffs {
        for (&(y, h), &d) in &b.coeffs {
            if g == h {
                accumulate(&mut out, (group.mul(x, y), g), c * d);
            }
        }
    }
    DGElement { coeffs: prune(out) }
}

pub fn dg_comultiply(a: &DGElement, group: &FiniteGroup) -> DGTensor {
    let mut out = BTreeMap::new();
    for (&(x, g), &c) in &a.coeffs {
        for h in group.elements() {
            let k = group.mul(group.inv(h), g);
            accumulate(&mut out, ((x, h), (x, k)), c);
        }
    }
    DGTensor { coeffs: prune(out) }
}

/// `epsilon(x (x) e(g)) = delta_{g,1}`.
pub fn dg_counit(a: &DGElement) -> Complex64 {
    a.coeffs.iter().filter(|((_, g), _)| *g == 0).map(|(_, c)| c).sum()
}

/// Componentwise product in `D(G) (x) D(G)`.
pub fn dg_tensor_multiply(a: &DGTensor, b: &DGTensor, group: &FiniteGroup) -> DGTensor {
    let mut out = BTreeMap::new();
    for (&((x1, g1), (x2, g2)), &c) in &a.coeffs {
        for (&((y1, h1), (y2, h2)), &d) in &b.coeffs {
            if g1 == h1 && g2 == h2 {
                accumulate(&mut out, ((group.mul(x1, y1), g1), (group.mul(x2, y2), g2)), c * d);
            }
        }
    }
    DGTensor { coeffs: prune(out) }
}

/// Exhaustive bialgebra checks on basis elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BialgebraReport {
    pub group_order: usize,
    pub associative: bool,
    pub unital: bool,
    pub coassociative: bool,
    pub counital: bool,
    pub multiplicative: bool,
    pub counit_multiplicative: bool,
}

impl BialgebraReport {
    pub fn pass(&self) -> bool {
        self.associative
            && self.unital
            && self.coassociative
            && self.counital
            && self.multiplicative
            && self.counit_multiplicative
    }
}

pub fn bialgebra_checks(group: &FiniteGroup) -> BialgebraReport {
    let m = group.order();
    let basis: Vec<DGElement> = (0..m)
        .flat_map(|x| (0..m).map(move |g| DGElement::basis(x, g)))
        .collect();
    let unit = DGElement::unit(group);
    let tol = 1e-12;

    let mut associative = true;
    let mut multiplicative = true;
    let mut counit_multiplicative = true;
    for a in &basis {
        for b in &basis {
            let ab = dg_multiply(a, b, group);
            let lhs = dg_comultiply(&ab, group);
            let rhs = dg_tensor_multiply(&dg_comultiply(a, group), &dg_comultiply(b, group), group);
            multiplicative &= lhs.distance(&rhs) <= tol;
            counit_multiplicative &= (dg_counit(&ab) - dg_counit(a) * dg_counit(b)).norm() <= tol;
            if associative {
                for c in &basis {
                    let l = dg_multiply(&ab, c, group);
                    let r = dg_multiply(a, &dg_multiply(b, c, group), group);
                    if l.distance(&r) > tol {
                        associative = false;
                        break;
                    }
                }
            }
        }
    }

    let unital = basis
        .iter()
        .all(|a| dg_multiply(&unit, a, group).distance(a) <= tol && dg_multiply(a, &unit, group).distance(a) <= tol);

    let mut coassociative = true;
    let mut counital = true;
    for a in &basis {
        let delta = dg_comultiply(a, group);
        // (Delta (x) id) Delta and (id (x) Delta) Delta as maps on triples.
        let mut left: BTreeMap<(Basis, Basis, Basis), Complex64> = BTreeMap::new();
        let mut right: BTreeMap<(Basis, Basis, Basis), Complex64> = BTreeMap::new();
        let mut via_left = DGElement::default();
        let mut via_right = DGElement::default();
        for (&(p, q), &c) in &delta.coeffs {
            for (&(p1, p2), &d) in &dg_comultiply(&DGElement::basis(p.0, p.1), group).coeffs {
                accumulate(&mut left, (p1, p2, q), c * d);
            }
            for (&(q1, q2), &d) in &dg_comultiply(&DGElement::basis(q.0, q.1), group).coeffs {
                accumulate(&mut right, (p, q1, q2), c * d);
            }
            let eps_p = dg_counit(&DGElement::basis(p.0, p.1));
            let eps_q = dg_counit(&DGElement::basis(q.0, q.1));
            accumulate(&mut via_left.coeffs, q, c * eps_p);
            accumulate(&mut via_right.coeffs, p, c * eps_q);
        }
        coassociative &= max_diff(&prune(left), &prune(right)) <= tol;
        let via_left = DGElement {
            coeffs: prune(via_left.coeffs),
        };
        let via_right = DGElement {
            coeffs: prune(via_right.coeffs),
        };
        counital &= via_left.distance(a) <= tol && via_right.distance(a) <= tol;
    }

    BialgebraReport {
        group_order: m,
        associative,
        unital,
        coassociative,
        counital,
        multiplicative,
        counit_multiplicative,
    }
}

/// Irreducible `(lambda, e(g))`: `x (x) e(h)` acts by `delta_{g,h} lambda(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DGIrrep {
    /// Index into the dual group.
    pub lambda: usize,
    pub sector: usize,
}

/// `D(G)` for abelian `G` together with its `|G|^2` one-dimensional
/// irreducibles.
#[derive(Debug, Clone)]
pub struct DrinfeldDouble {
    group: FiniteGroup,
    exponent: usize,
    /// `chars[l][x]`: `lambda_l(x) = exp(2 pi i chars[l][x] / exponent)`.
    chars: Vec<Vec<usize>>,
    char_index: HashMap<Vec<usize>, usize>,
}

impl DrinfeldDouble {
    pub fn new(group: FiniteGroup) -> Result<Self> {
        if !group.is_abelian() {
            return Err(Error::Unsupported("irreducibles of D(G) for nonabelian G".into()));
        }
        let (exponent, chars) = crate::group_alg::dual_group_exponents(&group)?;
        let char_index = chars.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(DrinfeldDouble {
            group,
            exponent,
            chars,
            char_index,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> Vec<DGIrrep> {
        (0..self.chars.len())
            .flat_map(|lambda| self.group.elements().map(move |sector| DGIrrep { lambda, sector }))
            .collect()
    }

    pub fn index(&self, i: DGIrrep) -> usize {
        i.lambda * self.group.order() + i.sector
    }

    pub fn label(&self, i: DGIrrep) -> String {
        format!("(chi{},{})", i.lambda, self.group.element_name(i.sector))
    }

    pub fn character_value(&self, lambda: usize, x: usize) -> Complex64 {
        root_of_unity(self.chars[lambda][x] as i64, self.exponent as i64)
    }

    fn lambda_order(&self, lambda: usize) -> usize {
        let g = self.chars[lambda]
            .iter()
            .fold(self.exponent, |acc, &v| num_integer::gcd(acc, v));
        self.exponent / g
    }

    /// The scalar by which an element acts on a one-dimensional irreducible.
    pub fn act(&self, i: DGIrrep, a: &DGElement) -> Complex64 {
        a.coeffs
            .iter()
            .filter(|((_, g), _)| *g == i.sector)
            .map(|(&(x, _), &c)| c * self.character_value(i.lambda, x))
            .sum()
    }

    /// Action on `V_i (x) V_j` through the coproduct.
    pub fn act_on_tensor(&self, i: DGIrrep, j: DGIrrep, a: &DGElement) -> Complex64 {
        dg_comultiply(a, &self.group)
            .coeffs
            .iter()
            .map(|(&(p, q), &c)| {
                c * self.act(i, &DGElement::basis(p.0, p.1)) * self.act(j, &DGElement::basis(q.0, q.1))
            })
            .sum()
    }

    /// `(lambda, g) (x) (mu, h) = (lambda mu, gh)`.
    pub fn tensor(&self, i: DGIrrep, j: DGIrrep) -> DGIrrep {
        let prod: Vec<usize> = self.chars[i.lambda]
            .iter()
            .zip(&self.chars[j.lambda])
            .map(|(a, b)| (a + b) % self.exponent)
            .collect();
        DGIrrep {
            lambda: self.char_index[&prod],
            sector: self.group.mul(i.sector, j.sector),
        }
    }

    pub fn irrep_order(&self, i: DGIrrep) -> usize {
        num_integer::lcm(self.lambda_order(i.lambda), self.group.element_order(i.sector))
    }

    /// Largest deviation between the coproduct action on `V_i (x) V_j` and
    /// the action on `V_{i (x) j}`, over all pairs and basis elements.
    pub fn tensor_rule_deviation(&self) -> f64 {
        let irreps = self.irreps();
        let m = self.group.order();
        let mut worst: f64 = 0.0;
        for &i in &irreps {
            for &j in &irreps {
                let k = self.tensor(i, j);
                for x in 0..m {
                    for g in 0..m {
                        let b = DGElement::basis(x, g);
                        worst = worst.max((self.act_on_tensor(i, j, &b) - self.act(k, &b)).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn fusion_table(&self) -> Result<FusionTable> {
        let irreps = self.irreps();
        let r = irreps.len();
        let mut n = vec![vec![vec![0u32; r]; r]; r];
        for &i in &irreps {
            for &j in &irreps {
                n[self.index(i)][self.index(j)][self.index(self.tensor(i, j))] = 1;
            }
        }
        FusionTable::from_coefficients(n, 0)
    }

    pub fn fusion_group(&self) -> Result<FiniteGroup> {
        let irreps = self.irreps();
        let mul = irreps
            .iter()
            .map(|&i| irreps.iter().map(|&j| self.index(self.tensor(i, j))).collect())
            .collect();
        FiniteGroup::from_table(mul)
    }

    /// Compares the irreducibles under tensor product with `G^ x G`, which
    /// for abelian `G` is isomorphic to `G x G`: both are abelian with the
    /// same multiset of element orders.
    pub fn isomorphism_check(&self) -> Result<IsomorphismReport> {
        let fusion = self.fusion_group()?;
        let mut expected: Vec<usize> = self
            .group
            .elements()
            .flat_map(|a| self.group.elements().map(move |b| (a, b)))
            .map(|(a, b)| num_integer::lcm(self.group.element_order(a), self.group.element_order(b)))
            .collect();
        expected.sort_unstable();
        let orders_match_rule = self
            .irreps()
            .into_iter()
            .all(|i| fusion.element_order(self.index(i)) == self.irrep_order(i));
        let all_invertible = self
            .irreps()
            .iter()
            .all(|&i| self.irreps().iter().any(|&j| self.index(self.tensor(i, j)) == 0));
        let abelian = fusion.is_abelian();
        let order_profile = fusion.order_profile();
        Ok(IsomorphismReport {
            pass: abelian && all_invertible && orders_match_rule && order_profile == expected,
            abelian,
            all_invertible,
            orders_match_rule,
            order_profile,
            expected_profile: expected,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismReport {
    pub pass: bool,
    pub abelian: bool,
    pub all_invertible: bool,
    pub orders_match_rule: bool,
    pub order_profile: Vec<usize>,
    pub expected_profile: Vec<usize>,
}

pub fn dg_irreps(group: &FiniteGroup) -> Result<Vec<DGIrrep>> {
    Ok(DrinfeldDouble::new(group.clone())?.irreps())
}

/// `dim Hom_G(W_lambda (x) W_mu, W_gamma)` for every row `gamma` of an
/// ordinary character table.
pub fn untwisted_fusion(table: &CharacterTable, lambda: usize, mu: usize) -> Result<Vec<u32>> {
    table.validate_shape()?;
    let rows = table.rows.len();
    if lambda >= rows || mu >= rows {
        return Err(Error::Structural(format!(
            "character index out of range (table has {rows} rows)"
        )));
    }
    let defect = table.orthonormality_defect();
    if defect > 1e-9 {
        return Err(Error::BadCharacterTable(format!(
            "rows not orthonormal (defect {defect:e})"
        )));
    }
    let chi_l = table.row(lambda);
    let chi_m = table.row(mu);
    let product: Vec<Complex64> = chi_l.iter().zip(&chi_m).map(|(a, b)| a * b).collect();
    let mut out = Vec::with_capacity(rows);
    for gamma in 0..rows {
        let m = table.inner(&product, &table.row(gamma));
        let rounded = m.re.round();
        let residual = (m - Complex64::new(rounded, 0.0)).norm();
        if residual > 1e-9 || rounded < 0.0 {
            return Err(Error::BadCharacterTable(format!(
                "multiplicity of row {gamma} is {m}, not a nonnegative integer"
            )));
        }
        out.push(rounded as u32);
    }
    let dims = table.dims();
    let lhs = dims[lambda] * dims[mu];
    let rhs: usize = out.iter().zip(&dims).map(|(&c, &d)| c as usize * d).sum();
    if lhs != rhs {
        return Err(Error::BadCharacterTable(format!("dimension count {lhs} != {rhs}")));
    }
    Ok(out)
}

/// Character table of `S_3` on the classes `(1, (12), (123))`, rows
/// `triv, sign, std`.
pub fn s3_character_table() -> CharacterTable {
    let c = |x: f64| Complex64::new(x, 0.0);
    CharacterTable::with_classes(
        vec![1, 3, 2],
        &[
            vec![c(1.0), c(1.0), c(1.0)],
            vec![c(1.0), c(-1.0), c(1.0)],
            vec![c(2.0), c(0.0), c(-1.0)],
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic(n).unwrap()
    }

    #[test]
    fn unit_and_delta() {
        let g = z(2);
        let a = DGElement::basis(1, 1);
        assert_eq!(dg_multiply(&DGElement::unit(&g), &a, &g), a);
        assert_eq!(dg_multiply(&a, &a, &g), DGElement::basis(0, 1));
        assert!(dg_multiply(&DGElement::basis(1, 0), &DGElement::basis(1, 1), &g).is_zero());
    }

    #[test]
    fn coproduct_on_z2() {
        let g = z(2);
        let d = dg_comultiply(&DGElement::basis(1, 0), &g);
        let one = Complex64::new(1.0, 0.0);
        let expect = BTreeMap::from([(((1, 0), (1, 0)), one), (((1, 1), (1, 1)), one)]);
        assert_eq!(d.coeffs, expect);
        // Delta(unit) = unit (x) unit
        let du = dg_comultiply(&DGElement::unit(&g), &g);
        let mut uu = BTreeMap::new();
        for a in 0..2 {
            for b in 0..2 {
                uu.insert(((0, a), (0, b)), one);
            }
        }
        assert_eq!(du.coeffs, uu);
    }

    #[test]
    fn bialgebra_axioms_small_groups() {
        for name in ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z6"] {
            let g = FiniteGroup::parse(name).unwrap();
            assert!(bialgebra_checks(&g).pass(), "{name}");
        }
        assert!(bialgebra_checks(&crate::group_alg::symmetric_group_s3()).pass());
    }

    #[test]
    fn irrep_counts() {
        assert_eq!(dg_irreps(&z(1)).unwrap().len(), 1);
        assert_eq!(dg_irreps(&z(2)).unwrap().len(), 4);
        assert_eq!(dg_irreps(&z(6)).unwrap().len(), 36);
        assert!(matches!(
            dg_irreps(&crate::group_alg::symmetric_group_s3()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn z2_fusion_is_klein_four() {
        let d = DrinfeldDouble::new(z(2)).unwrap();
        let f = d.fusion_group().unwrap();
        assert_eq!(f.order_profile(), vec![1, 2, 2, 2]);
        let iso = d.isomorphism_check().unwrap();
        assert!(iso.pass, "{iso:?}");
        assert!(d.tensor_rule_deviation() < 1e-12);
    }

    #[test]
    fn z3_inverses() {
        let d = DrinfeldDouble::new(z(3)).unwrap();
        // lambda_1 has exponent vector (0, 1, 2) over 3; its square is lambda_2
        let i = DGIrrep { lambda: 1, sector: 1 };
        let j = DGIrrep { lambda: 2, sector: 2 };
        assert_eq!(d.tensor(i, j), DGIrrep { lambda: 0, sector: 0 });
        let unit = DGIrrep { lambda: 0, sector: 0 };
        for k in d.irreps() {
            assert_eq!(d.tensor(unit, k), k);
        }
    }

    #[test]
    fn s3_untwisted_fusion() {
        let t = s3_character_table();
        assert_eq!(untwisted_fusion(&t, 2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(untwisted_fusion(&t, 2, 1).unwrap(), vec![0, 0, 1]);
        assert_eq!(untwisted_fusion(&t, 1, 1).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn abelian_untwisted_fusion_is_single() {
        let g = z(4);
        let chars = crate::group_alg::dual_group(&g).unwrap();
        let rows: Vec<Vec<Complex64>> = chars.iter().map(|c| c.values.clone()).collect();
        let t = CharacterTable::elementwise(&rows);
        for l in 0..4 {
            for m in 0..4 {
                let v = untwisted_fusion(&t, l, m).unwrap();
                assert_eq!(v.iter().sum::<u32>(), 1);
                assert_eq!(v[(l + m) % 4], 1);
            }
        }
    }

    #[test]
    fn bad_table_rejected() {
        let mut t = s3_character_table();
        t.rows[2][2] = [-0.9, 0.0];
        assert!(matches!(untwisted_fusion(&t, 2, 2), Err(Error::BadCharacterTable(_))));
    }
}
