//! Orbifold bookkeeping: from `V`'s modular data and a twisted-sector
//! descriptor to the irreducible `V^G`-modules, their quantum dimensions and
//! vacuum S-entries, plus the counting and global-dimension identities.

mod checks;
mod json;

use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_alg::FiniteGroup;
use crate::modular_data::ModularData;

pub use checks::{
    counting_check, glob_identities, permutation_orbifold_qdims, sector_identity, sector_mass_solve,
    sector_ratio_check, sector_sum_check, whole_module_qdim, CountingCheck, PermutationOrbifold, SectorIdentity,
    SectorMass, SectorRatio, SectorRatioReport, SectorSum, WholeModuleQdim, ID_GLOB_VG_EQUALS_G_SQUARED_GLOB_V,
    ID_GLOB_VG_IRREDUCIBLE_SUM, ID_GLOB_V_ORBIT_SUM, ID_G_GLOB_V_UNION_SUM,
};
pub use json::{OrbifoldDescriptorFile, OrbitFile, TwistedModuleFile};

/// One irreducible `g`-twisted `V`-module.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistedModuleRecord {
    pub label: String,
    /// `qdim_V M`; for untwisted modules it may be left to the modular data.
    pub qdim: Option<f64>,
    /// `S_{M,V}`.
    pub s_entry_with_vacuum: Option<Complex64>,
    pub orbit: usize,
}

/// A `G`-orbit of twisted modules and the projective irreducibles of its
/// stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub id: usize,
    pub stabilizer_order: usize,
    /// `dim W_lambda` for each irreducible `alpha_M`-projective character.
    pub irrep_dims: Vec<usize>,
    /// Elements of `G_M`, when needed to place sectors inside stabilizers.
    pub stabilizer: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbifoldDescriptor {
    pub group: FiniteGroup,
    /// `sectors[g]` lists the irreducible `g`-twisted modules.
    pub sectors: Vec<Vec<TwistedModuleRecord>>,
    pub orbits: Vec<OrbitRecord>,
    /// Permutation of `V`'s labels for each listed generator, `M -> M . h`.
    pub action_on_untwisted: BTreeMap<usize, Vec<usize>>,
}

/// One irreducible `V^G`-module `M_lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedIrreducible {
    pub label: String,
    pub parent_orbit: usize,
    /// Label of the orbit representative `M^j`.
    pub parent_label: String,
    pub lambda: usize,
    pub dim_w: usize,
    pub qdim_vg: f64,
    /// `S_{M_lambda, V^G}`.
    pub s_with_vg_vacuum: f64,
    /// Group element whose sector contains the representative.
    pub sector: usize,
    /// `r` with `sector = g^r` for a fixed generator, when `G` is cyclic.
    pub sector_power: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedOrbifoldData {
    pub group_order: usize,
    pub cyclic_order: Option<usize>,
    pub irreducibles: Vec<DerivedIrreducible>,
    pub s_vg_vacuum: f64,
    pub glob_vg: f64,
}

/// Resolved per-module data used by every identity.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ResolvedModule {
    pub label: String,
    pub sector: usize,
    pub orbit: usize,
    pub qdim: f64,
    pub s_mv: f64,
}

impl OrbifoldDescriptor {
    pub fn tolerance(md: &ModularData) -> f64 {
        md.tolerances().axiom
    }

    fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidDescriptor(msg.into())
    }

    pub fn orbit(&self, id: usize) -> Option<&OrbitRecord> {
        self.orbits.iter().find(|o| o.id == id)
    }

    /// Permutation of `V`'s labels for every group element, generated from
    /// the listed generators. `None` where the listed generators do not
    /// reach an element.
    pub fn untwisted_permutations(&self, rank: usize) -> Result<Vec<Option<Vec<usize>>>> {
        let m = self.group.order();
        let mut perms: Vec<Option<Vec<usize>>> = vec![None; m];
        perms[0] = Some((0..rank).collect());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let px = perms[x].clone().expect("visited");
            for (&h, ph) in &self.action_on_untwisted {
                let y = self.group.mul(x, h);
                // right action: M . (xh) = (M . x) . h
                let py: Vec<usize> = px.iter().map(|&i| ph[i]).collect();
                match &perms[y] {
                    None => {
                        perms[y] = Some(py);
                        queue.push_back(y);
                    }
                    Some(existing) if *existing != py => {
                        return Err(Self::invalid(format!(
                            "generator permutations do not define an action: two words for element {y} disagree"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(perms)
    }

    /// Checks every internal law of the descriptor against `V`'s modular
    /// data and returns the resolved modules.
    pub(crate) fn resolve(&self, md: &ModularData) -> Result<Vec<ResolvedModule>> {
        let g_order = self.group.order();
        let tol = Self::tolerance(md);
        if self.sectors.len() != g_order {
            return Err(Self::invalid(format!(
                "{} sectors for a group of order {g_order}",
                self.sectors.len()
            )));
        }

        // Untwisted sector is V's label set.
        let mut untwisted: Vec<&str> = self.sectors[0].iter().map(|r| r.label.as_str()).collect();
        let mut v_labels: Vec<&str> = md.labels().iter().map(String::as_str).collect();
        untwisted.sort_unstable();
        v_labels.sort_unstable();
        if untwisted != v_labels {
            return Err(Self::invalid("untwisted sector does not match the labels of V"));
        }
        let mut all_labels: Vec<&str> = self.sectors.iter().flatten().map(|r| r.label.as_str()).collect();
        all_labels.sort_unstable();
        if all_labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Self::invalid("duplicate module label"));
        }

        // Action on untwisted labels.
        let rank = md.rank();
        for (&h, p) in &self.action_on_untwisted {
            if h >= g_order {
                return Err(Self::invalid(format!("action given for unknown element {h}")));
            }
            let mut seen = vec![false; rank];
            if p.len() != rank || p.iter().any(|&i| i >= rank || std::mem::replace(&mut seen[i], true)) {
                return Err(Self::invalid(format!(
                    "action of element {h} is not a permutation of V's labels"
                )));
            }
            if p[md.vacuum()] != md.vacuum() {
                return Err(Self::invalid(format!("action of element {h} moves the vacuum")));
            }
        }
        let perms = self.untwisted_permutations(rank)?;

        // Orbits.
        let mut ids: Vec<usize> = self.orbits.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Self::invalid("duplicate orbit id"));
        }
        for o in &self.orbits {
            if o.stabilizer_order == 0 || g_order % o.stabilizer_order != 0 {
                return Err(Self::invalid(format!(
                    "orbit {}: stabilizer order {} does not divide |G| = {g_order}",
                    o.id, o.stabilizer_order
                )));
            }
            if o.irrep_dims.is_empty() || o.irrep_dims.contains(&0) {
                return Err(Self::invalid(format!(
                    "orbit {}: irrep dimensions must be positive",
                    o.id
                )));
            }
            let sq: usize = o.irrep_dims.iter().map(|d| d * d).sum();
            if sq != o.stabilizer_order {
                return Err(Self::invalid(format!(
                    "orbit {}: sum of squared irrep dimensions is {sq}, stabilizer order {}",
                    o.id, o.stabilizer_order
                )));
            }
            if let Some(stab) = &o.stabilizer {
                let mut s = stab.clone();
                s.sort_unstable();
                s.dedup();
                if s.len() != o.stabilizer_order || s.iter().any(|&x| x >= g_order) {
                    return Err(Self::invalid(format!("orbit {}: stabilizer list has wrong size", o.id)));
                }
                if self.group.subgroup_generated(&s) != s {
                    return Err(Self::invalid(format!("orbit {}: stabilizer is not a subgroup", o.id)));
                }
            }
        }

        // Modules.
        let svv = md.s(md.vacuum(), md.vacuum()).re;
        let mut resolved = Vec::new();
        let mut orbit_members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (g, sector) in self.sectors.iter().enumerate() {
            for rec in sector {
                let orbit = self.orbit(rec.orbit).ok_or_else(|| {
                    Self::invalid(format!("module {:?} refers to unknown orbit {}", rec.label, rec.orbit))
                })?;
                let from_md = if g == 0 {
                    let i = md.label_index(&rec.label).expect("checked above");
                    Some(md.quantum_dimension(i)?)
                } else {
                    None
                };
                let from_s = rec.s_entry_with_vacuum.map(|s| {
                    if s.im.abs() > tol {
                        Err(Self::invalid(format!("S entry of {:?} is not real", rec.label)))
                    } else {
                        Ok(s.re / svv)
                    }
                });
                let from_s = from_s.transpose()?;
                let candidates: Vec<f64> = [rec.qdim, from_s, from_md].into_iter().flatten().collect();
                let qdim = *candidates
                    .first()
                    .ok_or_else(|| Self::invalid(format!("module {:?} has neither qdim nor S entry", rec.label)))?;
                if candidates.iter().any(|q| (q - qdim).abs() > tol * qdim.abs().max(1.0)) {
                    return Err(Self::invalid(format!(
                        "module {:?}: inconsistent quantum dimensions {candidates:?}",
                        rec.label
                    )));
                }
                if !(qdim > 0.0) || !qdim.is_finite() {
                    return Err(Self::invalid(format!(
                        "module {:?}: quantum dimension {qdim} not positive",
                        rec.label
                    )));
                }
                // g lies in G_M.
                let in_stabilizer = match &orbit.stabilizer {
                    Some(stab) => Some(stab.contains(&g)),
                    None if self.group.is_cyclic() => Some(orbit.stabilizer_order % self.group.element_order(g) == 0),
                    None => None,
                };
                if in_stabilizer == Some(false) {
                    return Err(Self::invalid(format!(
                        "module {:?} is {g}-twisted but {g} is not in its stabilizer",
                        rec.label
                    )));
                }
                orbit_members.entry(rec.orbit).or_default().push(resolved.len());
                resolved.push(ResolvedModule {
                    label: rec.label.clone(),
                    sector: g,
                    orbit: rec.orbit,
                    qdim,
                    s_mv: qdim * svv,
                });
            }
        }

        for o in &self.orbits {
            let members = orbit_members.get(&o.id).map(Vec::as_slice).unwrap_or(&[]);
            let expect = g_order / o.stabilizer_order;
            if members.len() != expect {
                return Err(Self::invalid(format!(
                    "orbit {} has {} members, expected [G:G_M] = {expect}",
                    o.id,
                    members.len()
                )));
            }
            let q0 = resolved[members[0]].qdim;
            if members
                .iter()
                .any(|&i| (resolved[i].qdim - q0).abs() > tol * q0.max(1.0))
            {
                return Err(Self::invalid(format!("orbit {} mixes quantum dimensions", o.id)));
            }
            // Untwisted orbits must be orbits of the label permutations.
            if members.iter().any(|&i| resolved[i].sector == 0) {
                if members.iter().any(|&i| resolved[i].sector != 0) {
                    return Err(Self::invalid(format!(
                        "orbit {} mixes untwisted and twisted modules",
                        o.id
                    )));
                }
                if perms.iter().all(Option::is_some) {
                    let rep = md.label_index(&resolved[members[0]].label).unwrap();
                    let mut actual: Vec<usize> = perms.iter().flatten().map(|p| p[rep]).collect();
                    actual.sort_unstable();
                    actual.dedup();
                    let mut listed: Vec<usize> = members
                        .iter()
                        .map(|&i| md.label_index(&resolved[i].label).unwrap())
                        .collect();
                    listed.sort_unstable();
                    if actual != listed {
                        return Err(Self::invalid(format!(
                            "orbit {} does not match the action on untwisted labels",
                            o.id
                        )));
                    }
                }
            }
        }
        Ok(resolved)
    }

    pub fn validate(&self, md: &ModularData) -> Result<()> {
        self.resolve(md).map(|_| ())
    }
}

/// `M_lambda` for every orbit representative and every projective
/// irreducible of its stabilizer.
pub fn derive(md: &ModularData, d: &OrbifoldDescriptor) -> Result<DerivedOrbifoldData> {
    let modules = d.resolve(md)?;
    let g_order = d.group.order();
    let power_of = sector_powers(&d.group);
    let mut irreducibles = Vec::new();
    let mut done = vec![false; d.orbits.len()];
    for m in &modules {
        let (oi, orbit) = d
            .orbits
            .iter()
            .enumerate()
            .find(|(_, o)| o.id == m.orbit)
            .expect("resolved");
        if std::mem::replace(&mut done[oi], true) {
            continue;
        }
        let index = (g_order / orbit.stabilizer_order) as f64;
        for (lambda, &dim) in orbit.irrep_dims.iter().enumerate() {
            irreducibles.push(DerivedIrreducible {
                label: format!("{}[{lambda}]", m.label),
                parent_orbit: orbit.id,
                parent_label: m.label.clone(),
                lambda,
                dim_w: dim,
                qdim_vg: index * dim as f64 * m.qdim,
                s_with_vg_vacuum: dim as f64 / orbit.stabilizer_order as f64 * m.s_mv,
                sector: m.sector,
                sector_power: power_of.as_ref().map(|p| p[m.sector]),
            });
        }
    }
    let s_vg_vacuum = md.s(md.vacuum(), md.vacuum()).re / g_order as f64;
    Ok(DerivedOrbifoldData {
        group_order: g_order,
        cyclic_order: power_of.is_some().then_some(g_order),
        irreducibles,
        s_vg_vacuum,
        glob_vg: 1.0 / (s_vg_vacuum * s_vg_vacuum),
    })
}

/// `r` with `a = g^r` for a fixed generator `g` of a cyclic group.
fn sector_powers(group: &FiniteGroup) -> Option<Vec<usize>> {
    let g = group.cyclic_generator()?;
    let mut out = vec![0; group.order()];
    let mut x = 0;
    for r in 0..group.order() {
        out[x] = r;
        x = group.mul(x, g);
    }
    Some(out)
}

impl DerivedOrbifoldData {
    pub fn count(&self) -> usize {
        self.irreducibles.len()
    }

    pub fn qdims(&self) -> Vec<f64> {
        self.irreducibles.iter().map(|i| i.qdim_vg).collect()
    }
}
