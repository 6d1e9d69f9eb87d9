use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cocycle::{root_of_unity, Cocycle2};
use super::group::{FiniteGroup, Presentation};
use crate::error::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Character of a (projective) representation, one value per group element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveCharacter {
    pub values: Vec<Complex64>,
}

impl ProjectiveCharacter {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let d = values
            .first()
            .ok_or_else(|| Error::Structural("empty character".into()))?;
        if d.im.abs() > 1e-9 || (d.re - d.re.round()).abs() > 1e-9 || d.re.round() < 1.0 {
            return Err(Error::Structural(format!("character value at identity is {d}")));
        }
        Ok(ProjectiveCharacter { values })
    }

    pub fn dim(&self) -> usize {
        self.values[0].re.round() as usize
    }
}

/// A character table. Rows are characters; columns are either single
/// elements (all class sizes 1) or conjugacy classes with their sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_sizes: Option<Vec<usize>>,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl CharacterTable {
    pub fn elementwise(rows: &[Vec<Complex64>]) -> Self {
        CharacterTable {
            class_sizes: None,
            rows: rows.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }

    pub fn with_classes(class_sizes: Vec<usize>, rows: &[Vec<Complex64>]) -> Self {
        CharacterTable {
            class_sizes: Some(class_sizes),
            ..Self::elementwise(rows)
        }
    }

    pub fn num_columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.class_sizes.clone().unwrap_or_else(|| vec![1; self.num_columns()])
    }

    pub fn group_order(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        self.rows[i].iter().map(|&[re, im]| Complex64::new(re, im)).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..self.rows.len())
            .map(|i| self.rows[i][0][0].round() as usize)
            .collect()
    }

    /// `(1/|G|) sum_classes size * chi1 * conj(chi2)`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let sizes = self.sizes();
        let total: Complex64 = sizes
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&s, (x, y))| x * y.conj() * s as f64)
            .sum();
        total / self.group_order() as f64
    }

    /// Largest deviation of the row Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.rows.len();
        let rows: Vec<Vec<Complex64>> = (0..n).map(|i| self.row(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(&rows[i], &rows[j]) - expect).norm());
            }
        }
        worst
    }

    pub fn validate_shape(&self) -> Result<()> {
        let c = self.num_columns();
        if c == 0 || self.rows.iter().any(|r| r.len() != c) {
            return Err(Error::BadCharacterTable("rows have unequal length".into()));
        }
        if let Some(s) = &self.class_sizes {
            if s.len() != c || s.contains(&0) {
                return Err(Error::BadCharacterTable("class sizes do not match columns".into()));
            }
        }
        Ok(())
    }
}

/// `(1/|K|) sum_a chi1(a) conj(chi2(a))`.
pub fn character_orthogonality(
    chi1: &ProjectiveCharacter,
    chi2: &ProjectiveCharacter,
    group: &FiniteGroup,
) -> Complex64 {
    let sum: Complex64 = group.elements().map(|a| chi1.values[a] * chi2.values[a].conj()).sum();
    sum / group.order() as f64
}

/// Gram matrix of [`character_orthogonality`] over a list of characters.
pub fn gram_matrix(chars: &[ProjectiveCharacter], group: &FiniteGroup) -> Vec<Vec<Complex64>> {
    chars
        .iter()
        .map(|a| chars.iter().map(|b| character_orthogonality(a, b, group)).collect())
        .collect()
}

/// Linear characters of an abelian group, as exponents over the group
/// exponent `e`: `chi(a) = exp(2 pi i x[a] / e)`.
pub(crate) fn dual_group_exponents(group: &FiniteGroup) -> Result<(usize, Vec<Vec<usize>>)> {
    if !group.is_abelian() {
        return Err(Error::Unsupported("dual group of a nonabelian group".into()));
    }
    let e = group
        .elements()
        .map(|a| group.element_order(a))
        .fold(1, num_integer::lcm);
    let m = group.order();
    match group.presentation() {
        Presentation::Cyclic(t) => {
            let t = *t;
            Ok((
                e,
                (0..t)
                    .map(|j| (0..t).map(|a| (j * a % t) * (e / t)).collect())
                    .collect(),
            ))
        }
        Presentation::Product(orders) => {
            let digits = |mut x: usize| {
                let mut d = vec![0; orders.len()];
                for (i, &n) in orders.iter().enumerate().rev() {
                    d[i] = x % n;
                    x /= n;
                }
                d
            };
            Ok((
                e,
                (0..m)
                    .map(|j| {
                        let dj = digits(j);
                        (0..m)
                            .map(|a| {
                                let da = digits(a);
                                dj.iter()
                                    .zip(&da)
                                    .zip(orders)
                                    .map(|((x, y), &n)| (x * y % n) * (e / n))
                                    .sum::<usize>()
                                    % e
                            })
                            .collect()
                    })
                    .collect(),
            ))
        }
        Presentation::Table => {
            // Enumerate generator images and keep the consistent homomorphisms.
            let gens = group.generators();
            let orders: Vec<usize> = gens.iter().map(|&g| group.element_order(g)).collect();
            let total: usize = orders.iter().product();
            let mut out = Vec::new();
            for code in 0..total {
                let mut c = code;
                let mut img = vec![0usize; gens.len()];
                for i in (0..gens.len()).rev() {
                    img[i] = (c % orders[i]) * (e / orders[i]);
                    c /= orders[i];
                }
                if let Some(chi) = extend_homomorphism(group, &gens, &img, e) {
                    out.push(chi);
                }
            }
            Ok((e, out))
        }
    }
}

fn extend_homomorphism(group: &FiniteGroup, gens: &[usize], img: &[usize], e: usize) -> Option<Vec<usize>> {
    let m = group.order();
    let mut chi = vec![usize::MAX; m];
    chi[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (&g, &v) in gens.iter().zip(img) {
            let y = group.mul(x, g);
            let val = (chi[x] + v) % e;
            if chi[y] == usize::MAX {
                chi[y] = val;
                queue.push_back(y);
            } else if chi[y] != val {
                return None;
            }
        }
    }
    Some(chi)
}

/// Linear characters of an abelian group.
pub fn dual_group(group: &FiniteGroup) -> Result<Vec<ProjectiveCharacter>> {
    let (e, exps) = dual_group_exponents(group)?;
    Ok(exps
        .into_iter()
        .map(|x| ProjectiveCharacter {
            values: x.into_iter().map(|a| root_of_unity(a as i64, e as i64)).collect(),
        })
        .collect())
}

/// Irreducible `alpha`-projective characters of `K`.
///
/// Supported: trivial `alpha` on abelian `K` (the dual group); cyclic `K`
/// with any cocycle (one-dimensional, via an explicit trivializing
/// coboundary); anything else when the character table of the central
/// extension is supplied, in which case the rows with `kappa -> e^{2 pi i/n}`
/// are kept.
pub fn projective_irreducibles(
    group: &FiniteGroup,
    alpha: &Cocycle2,
    extension_table: Option<&CharacterTable>,
) -> Result<Vec<ProjectiveCharacter>> {
    alpha.check(group)?;
    if !alpha.is_normalized() {
        return Err(Error::Domain("cocycle is not normalized".into()));
    }
    let chars = if alpha.is_trivial() && group.is_abelian() {
        dual_group(group)?
    } else if let Some(g) = group.cyclic_generator() {
        cyclic_projective(group, g, alpha)?
    } else if let Some(table) = extension_table {
        from_extension_table(group, alpha, table)?
    } else {
        return Err(Error::NeedsCharacterTable(format!(
            "group of order {} with a nontrivial cocycle",
            group.order()
        )));
    };

    let dim_sq: usize = chars.iter().map(|c| c.dim() * c.dim()).sum();
    if dim_sq != group.order() {
        return Err(Error::BadCharacterTable(format!(
            "sum of squared dimensions is {dim_sq}, group order {}",
            group.order()
        )));
    }
    let gram = gram_matrix(&chars, group);
    for (i, row) in gram.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (z - expect).norm() > ORTHOGONALITY_TOL {
                return Err(Error::BadCharacterTable(format!(
                    "characters {i},{j} have inner product {z}"
                )));
            }
        }
    }
    Ok(chars)
}

/// For `K = <g>` of order `T`, `beta(g^j) = prod_{i<j} alpha(g, g^i)` and
/// `rho(g^j) = w^j / beta(g^j)` with `w^T = beta(g^T)`.
fn cyclic_projective(group: &FiniteGroup, g: usize, alpha: &Cocycle2) -> Result<Vec<ProjectiveCharacter>> {
    let t = group.order();
    let n = alpha.n as i64;
    // beta exponents over n, indexed by j = 0..=T
    let mut beta = vec![0i64; t + 1];
    let mut power = 0usize; // g^j
    for j in 0..t {
        beta[j + 1] = (beta[j] + alpha.exp(g, power) as i64) % n;
        power = group.mul(g, power);
    }
    let mut index_of_power = vec![0usize; t];
    let mut x = 0;
    for slot in index_of_power.iter_mut() {
        *slot = x;
        x = group.mul(x, g);
    }
    let mut chars = Vec::with_capacity(t);
    for m in 0..t {
        // w = exp(2 pi i (beta_T / n + m) / T)
        let mut values = vec![Complex64::new(0.0, 0.0); t];
        for j in 0..t {
            let num = (beta[t] + m as i64 * n) * j as i64 - beta[j] * (t as i64);
            values[index_of_power[j]] = root_of_unity(num, n * t as i64);
        }
        chars.push(ProjectiveCharacter { values });
    }
    // One-dimensional, so characters are the representations themselves.
    for a in group.elements() {
        for b in group.elements() {
            let lhs = chars[0].values[a] * chars[0].values[b];
            let rhs = alpha.value(a, b) * chars[0].values[group.mul(a, b)];
            if (lhs - rhs).norm() > ORTHOGONALITY_TOL {
                return Err(Error::Domain(format!("trivialization fails at ({a},{b})")));
            }
        }
    }
    Ok(chars)
}

fn from_extension_table(
    group: &FiniteGroup,
    alpha: &Cocycle2,
    table: &CharacterTable,
) -> Result<Vec<ProjectiveCharacter>> {
    table.validate_shape()?;
    let n = alpha.n as usize;
    let ext_order = group.order() * n;
    if table.class_sizes.is_some() || table.num_columns() != ext_order {
        return Err(Error::BadCharacterTable(format!(
            "extension table needs one column per element of the extension ({ext_order})"
        )));
    }
    let defect = table.orthonormality_defect();
    if defect > ORTHOGONALITY_TOL {
        return Err(Error::BadCharacterTable(format!(
            "rows not orthonormal (defect {defect:e})"
        )));
    }
    let kappa = root_of_unity(1, n as i64);
    let mut out = Vec::new();
    for i in 0..table.rows.len() {
        let row = table.row(i);
        // kappa = (1, 1) has index 1 when n > 1.
        let at_kappa = if n > 1 { row[1] } else { row[0] };
        if (at_kappa - row[0] * kappa).norm() <= 1e-9 {
            let values = group.elements().map(|a| row[a * n]).collect();
            out.push(ProjectiveCharacter::new(values)?);
        }
    }
    Ok(out)
}
