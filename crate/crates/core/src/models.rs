//! Bundled fixtures: rank-one lattice theories, Heisenberg, holomorphic
//! theories with a cyclic symmetry, and tensor powers.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_alg::{FiniteGroup, TwistedModuleAlgebraSpec};
use crate::modular_data::ModularData;
use crate::orbifold::{OrbifoldDescriptor, OrbitRecord, TwistedModuleRecord};
use crate::qseries::{char_heisenberg, char_heisenberg_twisted, char_lattice, char_lattice_twisted, CharacterExpr};

/// Largest label count [`tensor_power`] will build.
pub const MAX_TENSOR_LABELS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub name: String,
    pub rational: bool,
    pub modular_data: Option<ModularData>,
    /// Character of each module, by label; twisted modules included.
    pub characters: Vec<(String, CharacterExpr)>,
    pub descriptor: Option<OrbifoldDescriptor>,
    /// Label of the module whose character ratio against the vacuum is the
    /// model's headline quantum dimension.
    pub twisted_label: Option<String>,
    pub vacuum_label: String,
    pub notes: String,
}

/// Files written by [`ModelBundle::export`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedFile {
    pub name: String,
    pub contents: String,
}

#[derive(Serialize)]
struct CharacterListing<'a> {
    model: &'a str,
    characters: BTreeMap<&'a str, String>,
}

impl ModelBundle {
    pub fn modular_data(&self) -> Result<&ModularData> {
        match (&self.modular_data, self.rational) {
            (Some(md), _) => Ok(md),
            (None, false) => Err(Error::NotRational(format!("{} has no modular data", self.name))),
            (None, true) => Err(Error::Unsupported(format!("{} carries no modular data", self.name))),
        }
    }

    pub fn character(&self, label: &str) -> Option<&CharacterExpr> {
        self.characters.iter().find(|(l, _)| l == label).map(|(_, c)| c)
    }

    pub fn export(&self) -> Vec<ExportedFile> {
        let mut out = Vec::new();
        if let Some(md) = &self.modular_data {
            out.push(ExportedFile {
                name: format!("{}.md.json", self.name),
                contents: md.to_json(),
            });
        }
        if let Some(d) = &self.descriptor {
            out.push(ExportedFile {
                name: format!("{}.orbifold.json", self.name),
                contents: d.to_json(),
            });
        }
        if !self.characters.is_empty() {
            let listing = CharacterListing {
                model: &self.name,
                characters: self
                    .characters
                    .iter()
                    .map(|(l, c)| (l.as_str(), c.to_string()))
                    .collect(),
            };
            out.push(ExportedFile {
                name: format!("{}.characters.json", self.name),
                contents: serde_json::to_string_pretty(&listing).expect("listing serializes"),
            });
        }
        out
    }
}

/// `S_{rs} = exp(-pi i rs/k) / sqrt(2k)` on labels `r0 .. r{2k-1}`.
pub fn lattice_modular_data(k: u32) -> Result<ModularData> {
    if k == 0 {
        return Err(Error::Domain("lattice level must be at least 1".into()));
    }
    let n = 2 * k as usize;
    let norm = 1.0 / (n as f64).sqrt();
    let s = DMatrix::from_fn(n, n, |r, s| {
        let rs = (r * s) % n;
        Complex64::from_polar(norm, -PI * rs as f64 / k as f64)
    });
    let labels = (0..n).map(|r| format!("r{r}")).collect();
    let weights = (0..n as i64)
        .map(|r| {
            let m = r.min(n as i64 - r);
            Rational64::new(m * m, 4 * k as i64)
        })
        .collect();
    Ok(ModularData::new(labels, 0, s)?
        .with_weights(weights)?
        .with_central_charge(Rational64::from_integer(1)))
}

/// The `Z_2` orbifold descriptor of the rank-one lattice theory, with
/// `theta: r -> -r mod 2k` and twisted modules `T0`, `T1` of quantum
/// dimension `sqrt(k)`.
pub fn lattice_descriptor(k: u32) -> Result<OrbifoldDescriptor> {
    if k == 0 {
        return Err(Error::Domain("lattice level must be at least 1".into()));
    }
    let k = k as usize;
    let n = 2 * k;
    let group = FiniteGroup::cyclic(2)?;
    let mut orbits = Vec::new();
    let mut untwisted = Vec::new();
    let orbit_of = |r: usize| r.min(n - r);
    for r in 0..n {
        untwisted.push(TwistedModuleRecord {
            label: format!("r{r}"),
            qdim: None,
            s_entry_with_vacuum: None,
            orbit: orbit_of(r),
        });
    }
    for id in 0..=k {
        let fixed = id == 0 || id == k;
        orbits.push(OrbitRecord {
            id,
            stabilizer_order: if fixed { 2 } else { 1 },
            irrep_dims: if fixed { vec![1, 1] } else { vec![1] },
            stabilizer: None,
        });
    }
    let sqrt_k = (k as f64).sqrt();
    let twisted = (0..2)
        .map(|i| {
            orbits.push(OrbitRecord {
                id: k + 1 + i,
                stabilizer_order: 2,
                irrep_dims: vec![1, 1],
                stabilizer: None,
            });
            TwistedModuleRecord {
                label: format!("T{i}"),
                qdim: Some(sqrt_k),
                s_entry_with_vacuum: None,
                orbit: k + 1 + i,
            }
        })
        .collect();
    let theta = (0..n).map(|r| (n - r) % n).collect();
    Ok(OrbifoldDescriptor {
        group,
        sectors: vec![untwisted, twisted],
        orbits,
        action_on_untwisted: BTreeMap::from([(1, theta)]),
    })
}

pub fn lattice_rank1(k: u32) -> Result<ModelBundle> {
    let md = lattice_modular_data(k)?;
    let mut characters = (0..2 * k)
        .map(|r| Ok((format!("r{r}"), char_lattice(k, r)?)))
        .collect::<Result<Vec<_>>>()?;
    let twisted = char_lattice_twisted(k)?;
    characters.push(("T0".into(), twisted.clone()));
    characters.push(("T1".into(), twisted));
    Ok(ModelBundle {
        name: format!("lattice_k{k}"),
        rational: true,
        modular_data: Some(md),
        characters,
        descriptor: Some(lattice_descriptor(k)?),
        twisted_label: Some("T0".into()),
        vacuum_label: "r0".into(),
        notes: format!(
            "rank-one lattice L = Z a, (a,a) = 2k with k = {k}; S_rs = exp(-pi i rs/k)/sqrt(2k); \
             theta acts by r -> -r; T0 and T1 share one character"
        ),
    })
}

pub fn heisenberg(d: u32) -> Result<ModelBundle> {
    if d == 0 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    Ok(ModelBundle {
        name: format!("heisenberg_d{d}"),
        rational: false,
        modular_data: None,
        characters: vec![
            ("M(1)".into(), char_heisenberg(d)),
            ("M(1)(theta)".into(), char_heisenberg_twisted(d)),
        ],
        descriptor: None,
        twisted_label: Some("M(1)(theta)".into()),
        vacuum_label: "M(1)".into(),
        notes: format!("rank-{d} Heisenberg algebra and its theta-twisted module; not rational"),
    })
}

/// Descriptor of a holomorphic `V` with `G = Z_T`: one twisted module per
/// sector, all fixed by `G`, with `T` linear characters each.
pub fn holomorphic_descriptor(t: usize) -> Result<OrbifoldDescriptor> {
    let group = FiniteGroup::cyclic(t)?;
    let sectors = (0..t)
        .map(|r| {
            vec![TwistedModuleRecord {
                label: if r == 0 { "V".into() } else { format!("T{r}") },
                qdim: Some(1.0),
                s_entry_with_vacuum: None,
                orbit: r,
            }]
        })
        .collect();
    let orbits = (0..t)
        .map(|r| OrbitRecord {
            id: r,
            stabilizer_order: t,
            irrep_dims: vec![1; t],
            stabilizer: None,
        })
        .collect();
    let action_on_untwisted = if t > 1 {
        BTreeMap::from([(1, vec![0])])
    } else {
        BTreeMap::new()
    };
    Ok(OrbifoldDescriptor {
        group,
        sectors,
        orbits,
        action_on_untwisted,
    })
}

pub fn holomorphic_cyclic(t: usize) -> Result<ModelBundle> {
    let md = ModularData::from_rows(vec!["V".into()], 0, &[vec![Complex64::new(1.0, 0.0)]])?;
    Ok(ModelBundle {
        name: format!("holomorphic_T{t}"),
        rational: true,
        modular_data: Some(md),
        characters: Vec::new(),
        descriptor: Some(holomorphic_descriptor(t)?),
        twisted_label: None,
        vacuum_label: "V".into(),
        notes: format!("holomorphic V with a Z_{t} symmetry; one twisted module per sector"),
    })
}

/// `V^{(x) k}`: labels are `k`-tuples, `S` is the Kronecker power.
pub fn tensor_power(md: &ModularData, k: u32) -> Result<ModelBundle> {
    if k == 0 {
        return Err(Error::Domain("tensor power must be at least 1".into()));
    }
    let r = md.rank();
    let size = r
        .checked_pow(k)
        .filter(|&s| s <= MAX_TENSOR_LABELS)
        .ok_or_else(|| Error::TooLarge(format!("{r}^{k} labels exceeds {MAX_TENSOR_LABELS}")))?;
    let digits = |mut x: usize| {
        let mut d = vec![0; k as usize];
        for slot in d.iter_mut().rev() {
            *slot = x % r;
            x /= r;
        }
        d
    };
    let tuples: Vec<Vec<usize>> = (0..size).map(digits).collect();
    let labels = tuples
        .iter()
        .map(|t| {
            if k == 1 {
                md.label(t[0]).to_string()
            } else {
                format!("({})", t.iter().map(|&i| md.label(i)).collect::<Vec<_>>().join(","))
            }
        })
        .collect();
    let s = DMatrix::from_fn(size, size, |a, b| {
        tuples[a].iter().zip(&tuples[b]).map(|(&x, &y)| md.s(x, y)).product()
    });
    let vacuum = (0..k).fold(0, |acc, _| acc * r + md.vacuum());
    let mut out = ModularData::new(labels, vacuum, s)?.with_tolerances(md.tolerances())?;
    if let Some(w) = md.weights() {
        out = out.with_weights(tuples.iter().map(|t| t.iter().map(|&i| w[i]).sum()).collect())?;
    }
    if let Some(c) = md.central_charge() {
        out = out.with_central_charge(c * Rational64::from_integer(k as i64));
    }
    let glob = md.global_dimension()?.value;
    let glob_k = out.global_dimension()?.value;
    let expect = glob.powi(k as i32);
    if (glob_k - expect).abs() > md.tolerances().axiom * expect.max(1.0) {
        return Err(Error::NotModularData(format!(
            "glob of the tensor power is {glob_k}, expected {expect}"
        )));
    }
    Ok(ModelBundle {
        name: format!("tensor_power_{k}"),
        rational: true,
        modular_data: Some(out),
        characters: Vec::new(),
        descriptor: None,
        twisted_label: None,
        vacuum_label: md.label(md.vacuum()).to_string(),
        notes: format!("{k}-fold tensor power"),
    })
}

/// `A_alpha(Z_2, S)` for the lattice orbifold: `S` is every untwisted and
/// twisted label, `theta` acts by `r -> -r` and fixes `T0`, `T1`, and all
/// cocycles are trivial.
pub fn lattice_a_alpha_spec(k: u32) -> Result<TwistedModuleAlgebraSpec> {
    let d = lattice_descriptor(k)?;
    let labels: Vec<String> = d.sectors.iter().flatten().map(|r| r.label.clone()).collect();
    let n = 2 * k as usize;
    let identity: Vec<usize> = (0..labels.len()).collect();
    let theta: Vec<usize> = (0..labels.len()).map(|i| if i < n { (n - i) % n } else { i }).collect();
    TwistedModuleAlgebraSpec::untwisted(d.group, labels, vec![identity, theta])
}

/// Bundle by name: `lattice_k<k>`, `heisenberg_d<d>`, `holomorphic_T<T>`.
pub fn by_name(name: &str) -> Result<ModelBundle> {
    let bad = || {
        Error::Domain(format!(
            "unknown model {name:?} (expected lattice_k<k>, heisenberg_d<d> or holomorphic_T<T>)"
        ))
    };
    let num = |prefix: &str| -> Option<u32> { name.strip_prefix(prefix)?.parse().ok().filter(|&x| x >= 1) };
    if let Some(k) = num("lattice_k") {
        lattice_rank1(k)
    } else if let Some(d) = num("heisenberg_d") {
        heisenberg(d)
    } else if let Some(t) = num("holomorphic_T") {
        holomorphic_cyclic(t as usize)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{qdim_limit, LimitOptions, QdimLimit};

    #[test]
    fn lattice_k1_matrix() {
        let md = lattice_modular_data(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[h, h], [h, -h]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((md.s(i, j) - Complex64::new(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn lattice_bundles_validate() {
        for k in 1..=6 {
            let b = lattice_rank1(k).unwrap();
            let md = b.modular_data().unwrap();
            assert!(md.validate().pass, "k={k}");
            assert!((md.global_dimension().unwrap().value - 2.0 * k as f64).abs() < 1e-9);
            b.descriptor.as_ref().unwrap().validate(md).unwrap();
        }
    }

    #[test]
    fn bundle_qdims_agree_with_character_limits() {
        for k in 1..=3 {
            let b = lattice_rank1(k).unwrap();
            let md = b.modular_data().unwrap();
            let v = b.character(&b.vacuum_label).unwrap();
            for (i, q) in md.quantum_dimensions().unwrap().into_iter().enumerate() {
                let chi = b.character(md.label(i)).unwrap();
                let lim = qdim_limit(chi, v, &LimitOptions::raw()).unwrap().value().unwrap();
                assert!((lim - q).abs() < 1e-4, "k={k} {}: {lim} vs {q}", md.label(i));
            }
            let t = b.character("T0").unwrap();
            let lim = qdim_limit(t, v, &LimitOptions::default()).unwrap().value().unwrap();
            assert!((lim - (k as f64).sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn heisenberg_has_no_modular_data() {
        let b = heisenberg(1).unwrap();
        assert!(matches!(b.modular_data(), Err(Error::NotRational(_))));
        let v = b.character("M(1)").unwrap();
        let t = b.character("M(1)(theta)").unwrap();
        assert_eq!(
            qdim_limit(t, v, &LimitOptions::default()).unwrap(),
            QdimLimit::Divergent
        );
        assert_eq!(qdim_limit(v, v, &LimitOptions::default()).unwrap().value(), Some(1.0));
    }

    #[test]
    fn tensor_powers() {
        let md = lattice_modular_data(1).unwrap();
        let b = tensor_power(&md, 1).unwrap();
        assert_eq!(b.modular_data().unwrap().s_matrix(), md.s_matrix());
        let sq = tensor_power(&md, 2).unwrap();
        let sq = sq.modular_data().unwrap();
        assert_eq!(sq.rank(), 4);
        assert!(sq.validate().pass);
        assert!((sq.global_dimension().unwrap().value - 4.0).abs() < 1e-12);
        assert_eq!(sq.label(3), "(r1,r1)");
        assert!(matches!(tensor_power(&md, 13), Err(Error::TooLarge(_))));
    }

    #[test]
    fn a_alpha_lattice_is_associative() {
        for k in 1..=3 {
            let spec = lattice_a_alpha_spec(k).unwrap();
            assert!(spec.associativity_failure().is_none());
            assert_eq!(spec.induced_dimension(0, 1), 1);
            // r1 is fixed only for k = 1
            assert_eq!(spec.induced_dimension(1, 1), if k == 1 { 1 } else { 2 });
        }
    }

    #[test]
    fn names() {
        assert_eq!(by_name("lattice_k2").unwrap().name, "lattice_k2");
        assert_eq!(by_name("holomorphic_T3").unwrap().name, "holomorphic_T3");
        assert!(by_name("lattice_k0").is_err());
        assert!(by_name("ising").is_err());
    }

    #[test]
    fn export_round_trips() {
        let b = lattice_rank1(2).unwrap();
        let files = b.export();
        assert_eq!(files.len(), 3);
        let md = ModularData::from_json(&files[0].contents).unwrap();
        assert_eq!(md.labels(), b.modular_data().unwrap().labels());
        let d = OrbifoldDescriptor::from_json(&files[1].contents).unwrap();
        assert_eq!(&d, b.descriptor.as_ref().unwrap());
    }
}
