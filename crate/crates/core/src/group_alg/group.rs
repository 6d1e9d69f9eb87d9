use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Presentation {
    /// `Z_T`, element `j` is `g^j`.
    Cyclic(usize),
    /// `Z_{n_1} x ... x Z_{n_r}`, mixed radix with the first factor most
    /// significant.
    Product(Vec<usize>),
    Table,
}

/// A finite group given by its multiplication table; element 0 is the
/// identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    presentation: Presentation,
}

/// On-disk group description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupFile {
    Cyclic { order: usize },
    Product { orders: Vec<usize> },
    Table { mul: Vec<Vec<usize>> },
}

impl FiniteGroup {
    pub fn cyclic(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGroup("cyclic group of order 0".into()));
        }
        let mul = (0..order)
            .map(|a| (0..order).map(|b| (a + b) % order).collect())
            .collect();
        Ok(Self::from_valid_table(mul, Presentation::Cyclic(order)))
    }

    pub fn product(orders: &[usize]) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidGroup(format!("bad factor orders {orders:?}")));
        }
        if orders.len() == 1 {
            return Self::cyclic(orders[0]);
        }
        let m: usize = orders.iter().product();
        let digits = |mut x: usize| {
            let mut d = vec![0; orders.len()];
            for (i, &n) in orders.iter().enumerate().rev() {
                d[i] = x % n;
                x /= n;
            }
            d
        };
        let pack = |d: &[usize]| d.iter().zip(orders).fold(0, |acc, (&x, &n)| acc * n + x);
        let mul = (0..m)
            .map(|a| {
                let da = digits(a);
                (0..m)
                    .map(|b| {
                        let db = digits(b);
                        let s: Vec<usize> = da.iter().zip(&db).zip(orders).map(|((x, y), n)| (x + y) % n).collect();
                        pack(&s)
                    })
                    .collect()
            })
            .collect();
        Ok(Self::from_valid_table(mul, Presentation::Product(orders.to_vec())))
    }

    /// Validates identity, closure, inverses and associativity.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self> {
        let m = mul.len();
        if m == 0 || mul.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidGroup("multiplication table is not square".into()));
        }
        if mul.iter().flatten().any(|&x| x >= m) {
            return Err(Error::InvalidGroup("table entry out of range".into()));
        }
        for a in 0..m {
            if mul[0][a] != a || mul[a][0] != a {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
            if !mul[a].contains(&0) {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }
        if let Some((a, b, c)) = associativity_failure(&mul) {
            return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
        }
        Ok(Self::from_valid_table(mul, Presentation::Table))
    }

    fn from_valid_table(mul: Vec<Vec<usize>>, presentation: Presentation) -> Self {
        let inv = (0..mul.len())
            .map(|a| mul[a].iter().position(|&x| x == 0).expect("inverse"))
            .collect();
        FiniteGroup { mul, inv, presentation }
    }

    /// Parses `Z6`, `Z2xZ3`, `Z2xZ2xZ2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let orders = spec
            .split(['x', 'X', '*'])
            .map(|part| {
                part.trim()
                    .strip_prefix('Z')
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| Error::InvalidGroup(format!("cannot parse group {spec:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::product(&orders)
    }

    pub fn from_file(f: &GroupFile) -> Result<Self> {
        match f {
            GroupFile::Cyclic { order } => Self::cyclic(*order),
            GroupFile::Product { orders } => Self::product(orders),
            GroupFile::Table { mul } => Self::from_table(mul.clone()),
        }
    }

    pub fn to_file(&self) -> GroupFile {
        match &self.presentation {
            Presentation::Cyclic(t) => GroupFile::Cyclic { order: *t },
            Presentation::Product(o) => GroupFile::Product { orders: o.clone() },
            Presentation::Table => GroupFile::Table { mul: self.mul.clone() },
        }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// `a^n` for `n >= 0`.
    pub fn pow(&self, a: usize, n: usize) -> usize {
        (0..n).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        let m = self.order();
        (0..m).all(|a| (0..m).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// A generator if the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        match self.presentation {
            Presentation::Cyclic(t) if t > 1 => Some(1),
            Presentation::Cyclic(_) => Some(0),
            _ => self.elements().find(|&a| self.element_order(a) == self.order()),
        }
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|a| self.mul(z, a) == self.mul(a, z)))
            .collect()
    }

    pub fn derived_subgroup(&self) -> Vec<usize> {
        let comms: BTreeSet<usize> = self
            .elements()
            .flat_map(|a| self.elements().map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))))
            .collect();
        self.subgroup_generated(&comms.into_iter().collect::<Vec<_>>())
    }

    /// A generating set chosen greedily by decreasing element order.
    pub fn generators(&self) -> Vec<usize> {
        match &self.presentation {
            Presentation::Cyclic(t) => return if *t > 1 { vec![1] } else { vec![] },
            Presentation::Product(orders) => {
                let m = self.order();
                let mut stride = m;
                return orders
                    .iter()
                    .filter_map(|&n| {
                        stride /= n;
                        (n > 1).then_some(stride)
                    })
                    .collect();
            }
            Presentation::Table => {}
        }
        let mut by_order: Vec<usize> = self.elements().skip(1).collect();
        by_order.sort_by_key(|&a| std::cmp::Reverse(self.element_order(a)));
        let mut gens = Vec::new();
        let mut span = vec![0];
        for a in by_order {
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    /// Human-readable element name.
    pub fn element_name(&self, a: usize) -> String {
        match &self.presentation {
            Presentation::Cyclic(_) => match a {
                0 => "1".into(),
                1 => "g".into(),
                _ => format!("g^{a}"),
            },
            Presentation::Product(orders) => {
                let mut d = vec![0; orders.len()];
                let mut x = a;
                for (i, &n) in orders.iter().enumerate().rev() {
                    d[i] = x % n;
                    x /= n;
                }
                format!("({})", d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            }
            Presentation::Table => format!("e{a}"),
        }
    }

    /// Multiset of element orders, sorted; determines an abelian group up to
    /// isomorphism.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements().map(|a| self.element_order(a)).collect();
        v.sort_unstable();
        v
    }
}

fn associativity_failure(mul: &[Vec<usize>]) -> Option<(usize, usize, usize)> {
    let m = mul.len();
    for a in 0..m {
        for b in 0..m {
            let ab = mul[a][b];
            for c in 0..m {
                if mul[ab][c] != mul[a][mul[b][c]] {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// The symmetric group `S_3` as permutations of `{0,1,2}`; used in tests
/// and examples. Element order: id, (01), (02), (12), (012), (021).
pub fn symmetric_group_s3() -> FiniteGroup {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let mul = (0..6)
        .map(|a| {
            (0..6)
                .map(|b| {
                    // (a*b)(x) = a(b(x))
                    let p = [perms[a][perms[b][0]], perms[a][perms[b][1]], perms[a][perms[b][2]]];
                    index(p)
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(mul).expect("S3 table is a group")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.element_order(2), 3);
        assert_eq!(g.inv(5), 1);
        assert!(g.is_abelian() && g.is_cyclic());
        assert_eq!(g.generators(), vec![1]);
    }

    #[test]
    fn product_and_parse() {
        let g = FiniteGroup::parse("Z2xZ3").unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_cyclic());
        let k = FiniteGroup::parse("Z2xZ2").unwrap();
        assert!(!k.is_cyclic());
        assert_eq!(k.order_profile(), vec![1, 2, 2, 2]);
        assert_eq!(k.generators(), vec![2, 1]);
        assert_eq!(k.element_name(3), "(1,1)");
        assert!(FiniteGroup::parse("Y3").is_err());
        assert!(FiniteGroup::parse("Z0").is_err());
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).is_err());
        let s3 = symmetric_group_s3();
        assert!(!s3.is_abelian());
        assert_eq!(s3.center(), vec![0]);
        assert_eq!(s3.derived_subgroup().len(), 3);
    }

    #[test]
    fn table_generators_span() {
        let s3 = symmetric_group_s3();
        let gens = s3.generators();
        assert_eq!(s3.subgroup_generated(&gens).len(), 6);
    }

    #[test]
    fn group_file_round_trip() {
        let f: GroupFile = serde_json::from_str(r#"{"type":"cyclic","order":4}"#).unwrap();
        let g = FiniteGroup::from_file(&f).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.to_file(), f);
        let f: GroupFile = serde_json::from_str(r#"{"type":"table","mul":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(FiniteGroup::from_file(&f).unwrap().order(), 2);
    }
}
