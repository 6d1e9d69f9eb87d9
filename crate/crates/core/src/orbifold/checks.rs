use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{DerivedOrbifoldData, OrbifoldDescriptor};
use crate::error::{Error, Result};
use crate::modular_data::ModularData;
use crate::report::{IdentityCheck, IdentityReport};

pub const ID_GLOB_VG_EQUALS_G_SQUARED_GLOB_V: &str = "glob_vg_equals_g_squared_glob_v";
pub const ID_GLOB_V_ORBIT_SUM: &str = "glob_v_orbit_sum";
pub const ID_G_GLOB_V_UNION_SUM: &str = "g_glob_v_union_sum";
pub const ID_GLOB_VG_IRREDUCIBLE_SUM: &str = "glob_vg_irreducible_sum";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WholeModuleQdim {
    pub orbit: usize,
    /// `|G| qdim_V M`.
    pub value: f64,
    /// `sum_lambda dim W_lambda * qdim_{V^G} M_lambda`.
    pub from_parts: f64,
    /// `sum_lambda dim W_lambda * [G:G_M] dim W_lambda`, must equal `|G|`.
    pub integer_count: usize,
    pub deviation: f64,
    pub pass: bool,
}

/// `qdim_{V^G} M = |G| qdim_V M` for the representative of orbit `orbit`.
pub fn whole_module_qdim(md: &ModularData, d: &OrbifoldDescriptor, orbit: usize) -> Result<WholeModuleQdim> {
    let derived = super::derive(md, d)?;
    let rec = d
        .orbit(orbit)
        .ok_or_else(|| Error::Domain(format!("no orbit with id {orbit}")))?;
    let parts: Vec<_> = derived
        .irreducibles
        .iter()
        .filter(|i| i.parent_orbit == orbit)
        .collect();
    let modules = d.resolve(md)?;
    let qdim = modules
        .iter()
        .find(|m| m.orbit == orbit)
        .expect("orbit has members")
        .qdim;
    let g = d.group.order();
    let value = g as f64 * qdim;
    let from_parts: f64 = parts.iter().map(|i| i.dim_w as f64 * i.qdim_vg).sum();
    let index = g / rec.stabilizer_order;
    let integer_count: usize = rec.irrep_dims.iter().map(|&dl| dl * index * dl).sum();
    let deviation = (value - from_parts).abs();
    Ok(WholeModuleQdim {
        orbit,
        value,
        from_parts,
        integer_count,
        deviation,
        pass: integer_count == g && deviation <= OrbifoldDescriptor::tolerance(md),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingCheck {
    pub element: usize,
    pub twisted_count: usize,
    pub stable_count: usize,
    pub pass: bool,
}

/// Number of `g`-twisted modules against the number of `g`-stable labels.
pub fn counting_check(md: &ModularData, d: &OrbifoldDescriptor, g: usize) -> Result<CountingCheck> {
    if g >= d.group.order() {
        return Err(Error::Domain(format!("element {g} out of range")));
    }
    d.validate(md)?;
    let perms = d.untwisted_permutations(md.rank())?;
    let perm = perms[g]
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("no action on untwisted labels determines element {g}")))?;
    let stable_count = perm.iter().enumerate().filter(|(i, &p)| *i == p).count();
    let twisted_count = d.sectors[g].len();
    Ok(CountingCheck {
        element: g,
        twisted_count,
        stable_count,
        pass: twisted_count == stable_count,
    })
}

/// The four global-dimension identities.
pub fn glob_identities(md: &ModularData, d: &OrbifoldDescriptor) -> Result<IdentityReport> {
    let modules = d.resolve(md)?;
    let derived = super::derive(md, d)?;
    let tol = OrbifoldDescriptor::tolerance(md);
    let g = d.group.order() as f64;
    let glob_v = md.global_dimension()?.value;

    let mut orbit_sum = 0.0;
    for o in &d.orbits {
        let q = modules
            .iter()
            .find(|m| m.orbit == o.id)
            .expect("orbit has members")
            .qdim;
        orbit_sum += q * q / o.stabilizer_order as f64;
    }
    let union_sum: f64 = modules.iter().map(|m| m.qdim * m.qdim).sum();
    let irreducible_sum: f64 = derived.irreducibles.iter().map(|i| i.qdim_vg * i.qdim_vg).sum();

    Ok(IdentityReport {
        identities: vec![
            IdentityCheck::compare(ID_GLOB_VG_EQUALS_G_SQUARED_GLOB_V, derived.glob_vg, g * g * glob_v, tol),
            IdentityCheck::compare(ID_GLOB_V_ORBIT_SUM, glob_v, orbit_sum, tol),
            IdentityCheck::compare(ID_G_GLOB_V_UNION_SUM, g * glob_v, union_sum, tol),
            IdentityCheck::compare(ID_GLOB_VG_IRREDUCIBLE_SUM, derived.glob_vg, irreducible_sum, tol),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorIdentity {
    pub element: usize,
    pub sum: f64,
    pub glob: f64,
    pub deviation: f64,
    pub pass: bool,
}

/// `sum_{M in sector g} qdim_V(M)^2 = glob(V)` for cyclic `G`.
pub fn sector_identity(md: &ModularData, d: &OrbifoldDescriptor, g: usize) -> Result<SectorIdentity> {
    if !d.group.is_cyclic() {
        return Err(Error::Unsupported("sector identity for a non-cyclic group".into()));
    }
    if g >= d.group.order() {
        return Err(Error::Domain(format!("element {g} out of range")));
    }
    let modules = d.resolve(md)?;
    let sum: f64 = modules.iter().filter(|m| m.sector == g).map(|m| m.qdim * m.qdim).sum();
    let glob = md.global_dimension()?.value;
    let deviation = (sum - glob).abs();
    Ok(SectorIdentity {
        element: g,
        sum,
        glob,
        deviation,
        pass: deviation <= OrbifoldDescriptor::tolerance(md),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorMass {
    pub x: Vec<f64>,
    /// `max_r |x_r - 1/T|`.
    pub max_deviation: f64,
    /// `max_s |sum_r x_r e^{2 pi i r s/T} - delta_{s,0}|`.
    pub residual: f64,
}

/// Solves `sum_r x_r e^{2 pi i r s / T} = delta_{s,0}` by the inverse
/// discrete Fourier transform.
pub fn sector_mass_solve(t: usize) -> Result<SectorMass> {
    if t == 0 {
        return Err(Error::Domain("T must be at least 1".into()));
    }
    let w = |k: usize| Complex64::from_polar(1.0, 2.0 * PI * (k % t) as f64 / t as f64);
    let b: Vec<f64> = (0..t).map(|s| if s == 0 { 1.0 } else { 0.0 }).collect();
    let x: Vec<Complex64> = (0..t)
        .map(|r| (0..t).map(|s| w(r * s).conj() * b[s]).sum::<Complex64>() / t as f64)
        .collect();
    let residual = (0..t)
        .map(|s| ((0..t).map(|r| x[r] * w(r * s)).sum::<Complex64>() - b[s]).norm())
        .fold(0.0, f64::max);
    let target = 1.0 / t as f64;
    let max_deviation = x.iter().map(|z| (z - target).norm()).fold(0.0, f64::max);
    Ok(SectorMass {
        x: x.iter().map(|z| z.re).collect(),
        max_deviation,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSum {
    pub r: usize,
    pub sum: f64,
    pub expected: f64,
    pub deviation: f64,
    pub pass: bool,
}

/// Per sector `g^r`: `sum qdim_{V^G}^2 = glob(V^G) / T`.
pub fn sector_sum_check(derived: &DerivedOrbifoldData, t: usize, tol: f64) -> Result<Vec<SectorSum>> {
    if derived.cyclic_order != Some(t) {
        return Err(Error::Unsupported(format!(
            "sector sums need data derived from a cyclic group of order {t}"
        )));
    }
    let expected = derived.glob_vg / t as f64;
    Ok((0..t)
        .map(|r| {
            let sum: f64 = derived
                .irreducibles
                .iter()
                .filter(|i| i.sector_power == Some(r))
                .map(|i| i.qdim_vg * i.qdim_vg)
                .sum();
            let deviation = (sum - expected).abs();
            SectorSum {
                r,
                sum,
                expected,
                deviation,
                pass: deviation <= tol,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorRatio {
    pub label: String,
    pub r: usize,
    pub ratio: [f64; 2],
    pub expected: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorRatioReport {
    pub v1_label: String,
    pub checks: Vec<SectorRatio>,
    pub pass: bool,
}

/// `S_{V^1,X} / S_{V^G,X} = e^{2 pi i r/T}` for every `X` in sector `r`,
/// on externally supplied `V^G` modular data.
pub fn sector_ratio_check(
    md_vg: &ModularData,
    sector_of: &BTreeMap<String, usize>,
    v1_label: Option<&str>,
    t: usize,
) -> Result<SectorRatioReport> {
    let v1_label = v1_label.ok_or_else(|| Error::Unsupported("no label designated as V^1".into()))?;
    if t == 0 {
        return Err(Error::Domain("T must be at least 1".into()));
    }
    let v1 = md_vg
        .label_index(v1_label)
        .ok_or_else(|| Error::Structural(format!("unknown label {v1_label:?}")))?;
    let vac = md_vg.vacuum();
    let tol = md_vg.tolerances().axiom;
    let mut checks = Vec::new();
    for (x_label, &r) in sector_of {
        let x = md_vg
            .label_index(x_label)
            .ok_or_else(|| Error::Structural(format!("unknown label {x_label:?}")))?;
        let ratio = md_vg.s(v1, x) / md_vg.s(vac, x);
        let expected = Complex64::from_polar(1.0, 2.0 * PI * (r % t) as f64 / t as f64);
        let deviation = (ratio - expected).norm();
        checks.push(SectorRatio {
            label: x_label.clone(),
            r,
            ratio: [ratio.re, ratio.im],
            expected: [expected.re, expected.im],
            deviation,
            pass: deviation <= tol,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SectorRatioReport {
        v1_label: v1_label.to_string(),
        checks,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationOrbifold {
    pub k: u32,
    pub qdims: Vec<f64>,
    pub square_sum: f64,
    pub glob_power: f64,
    pub deviation: f64,
    pub pass: bool,
}

/// `qdim T_g^k(M^s) = S_{M^s,V} / S_{V,V}^k` for a `k`-cycle permutation
/// orbifold of `V^{(x) k}`.
pub fn permutation_orbifold_qdims(md: &ModularData, k: u32) -> Result<PermutationOrbifold> {
    if k == 0 {
        return Err(Error::Domain("cycle length must be at least 1".into()));
    }
    let v = md.vacuum();
    let svv = md.s(v, v).re;
    let denom = svv.powi(k as i32);
    let qdims: Vec<f64> = (0..md.rank()).map(|s| md.s(s, v).re / denom).collect();
    let square_sum: f64 = qdims.iter().map(|q| q * q).sum();
    let glob_power = md.global_dimension()?.value.powi(k as i32);
    let deviation = (square_sum - glob_power).abs();
    Ok(PermutationOrbifold {
        k,
        qdims,
        square_sum,
        glob_power,
        deviation,
        pass: deviation <= md.tolerances().integrality,
    })
}
