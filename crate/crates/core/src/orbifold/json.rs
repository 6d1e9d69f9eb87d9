use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{OrbifoldDescriptor, OrbitRecord, TwistedModuleRecord};
use crate::error::{Error, Result};
use crate::group_alg::{FiniteGroup, GroupFile};

/// On-disk orbifold descriptor. Sector and generator keys are element
/// indices written as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbifoldDescriptorFile {
    pub group: GroupFile,
    pub sectors: BTreeMap<String, Vec<TwistedModuleFile>>,
    pub orbits: Vec<OrbitFile>,
    #[serde(default)]
    pub action_on_untwisted: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedModuleFile {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdim: Option<f64>,
    #[serde(rename = "S_MV", default, skip_serializing_if = "Option::is_none")]
    pub s_mv: Option<[f64; 2]>,
    pub orbit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitFile {
    pub id: usize,
    pub stabilizer_order: usize,
    pub irrep_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<Vec<usize>>,
}

fn element_key(key: &str, order: usize) -> Result<usize> {
    key.trim()
        .parse::<usize>()
        .ok()
        .filter(|&g| g < order)
        .ok_or_else(|| Error::InvalidDescriptor(format!("{key:?} is not an element index below {order}")))
}

impl TryFrom<OrbifoldDescriptorFile> for OrbifoldDescriptor {
    type Error = Error;

    fn try_from(f: OrbifoldDescriptorFile) -> Result<Self> {
        let group = FiniteGroup::from_file(&f.group)?;
        let m = group.order();
        let mut sectors = vec![Vec::new(); m];
        for (key, records) in f.sectors {
            let g = element_key(&key, m)?;
            sectors[g] = records
                .into_iter()
                .map(|r| TwistedModuleRecord {
                    label: r.label,
                    qdim: r.qdim,
                    s_entry_with_vacuum: r.s_mv.map(|[re, im]| Complex64::new(re, im)),
                    orbit: r.orbit,
                })
                .collect();
        }
        let action_on_untwisted = f
            .action_on_untwisted
            .into_iter()
            .map(|(k, p)| Ok((element_key(&k, m)?, p)))
            .collect::<Result<_>>()?;
        Ok(OrbifoldDescriptor {
            group,
            sectors,
            orbits: f
                .orbits
                .into_iter()
                .map(|o| OrbitRecord {
                    id: o.id,
                    stabilizer_order: o.stabilizer_order,
                    irrep_dims: o.irrep_dims,
                    stabilizer: o.stabilizer,
                })
                .collect(),
            action_on_untwisted,
        })
    }
}

impl From<&OrbifoldDescriptor> for OrbifoldDescriptorFile {
    fn from(d: &OrbifoldDescriptor) -> Self {
        OrbifoldDescriptorFile {
            group: d.group.to_file(),
            sectors: d
                .sectors
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(|(g, s)| {
                    (
                        g.to_string(),
                        s.iter()
                            .map(|r| TwistedModuleFile {
                                label: r.label.clone(),
                                qdim: r.qdim,
                                s_mv: r.s_entry_with_vacuum.map(|z| [z.re, z.im]),
                                orbit: r.orbit,
                            })
                            .collect(),
                    )
                })
                .collect(),
            orbits: d
                .orbits
                .iter()
                .map(|o| OrbitFile {
                    id: o.id,
                    stabilizer_order: o.stabilizer_order,
                    irrep_dims: o.irrep_dims.clone(),
                    stabilizer: o.stabilizer.clone(),
                })
                .collect(),
            action_on_untwisted: d
                .action_on_untwisted
                .iter()
                .map(|(g, p)| (g.to_string(), p.clone()))
                .collect(),
        }
    }
}

impl OrbifoldDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: OrbifoldDescriptorFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidDescriptor(format!("descriptor JSON: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&OrbifoldDescriptorFile::from(self)).expect("descriptor serializes")
    }
}
