use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModularData, Tolerances};
use crate::error::{Error, Result};
use crate::rational::{format_rational64, parse_rational64};

/// On-disk form of [`ModularData`].
///
/// ```json
/// {"labels": ["0", "1"], "vacuum": 0,
///  "S": [[[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
///        [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]]],
///  "weights": ["0", "1/4"], "central_charge": "1", "tolerance": 1e-7}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularDataFile {
    pub labels: Vec<String>,
    pub vacuum: usize,
    #[serde(rename = "S")]
    pub s: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_charge: Option<String>,
    /// Axiom-check tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrality_tolerance: Option<f64>,
}

impl TryFrom<ModularDataFile> for ModularData {
    type Error = Error;

    fn try_from(f: ModularDataFile) -> Result<Self> {
        let n = f.s.len();
        if f.s.iter().any(|row| row.len() != n) {
            return Err(Error::Structural(format!(
                "S has {n} rows but row lengths {:?}",
                f.s.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let s = DMatrix::from_fn(n, n, |i, j| Complex64::new(f.s[i][j][0], f.s[i][j][1]));
        let mut md = ModularData::new(f.labels, f.vacuum, s)?;
        if let Some(w) = f.weights {
            let w = w.iter().map(|x| parse_rational64(x)).collect::<Result<Vec<_>>>()?;
            md = md.with_weights(w)?;
        }
        if let Some(c) = f.central_charge {
            md = md.with_central_charge(parse_rational64(&c)?);
        }
        let defaults = Tolerances::default();
        md = md.with_tolerances(Tolerances {
            axiom: f.tolerance.unwrap_or(defaults.axiom),
            integrality: f.integrality_tolerance.unwrap_or(defaults.integrality),
        })?;
        Ok(md)
    }
}

impl From<&ModularData> for ModularDataFile {
    fn from(md: &ModularData) -> Self {
        let n = md.rank();
        let defaults = Tolerances::default();
        let t = md.tolerances();
        ModularDataFile {
            labels: md.labels().to_vec(),
            vacuum: md.vacuum(),
            s: (0..n)
                .map(|i| (0..n).map(|j| [md.s(i, j).re, md.s(i, j).im]).collect())
                .collect(),
            weights: md.weights().map(|w| w.iter().map(format_rational64).collect()),
            central_charge: md.central_charge().as_ref().map(format_rational64),
            tolerance: (t.axiom != defaults.axiom).then_some(t.axiom),
            integrality_tolerance: (t.integrality != defaults.integrality).then_some(t.integrality),
        }
    }
}

impl ModularData {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModularDataFile =
            serde_json::from_str(text).map_err(|e| Error::Structural(format!("modular data JSON: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModularDataFile::from(self)).expect("modular data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    const LATTICE_K1: &str = r#"{
        "labels": ["r0", "r1"], "vacuum": 0,
        "S": [[[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
              [[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]]],
        "weights": ["0", "1/4"], "central_charge": "1"
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let md = ModularData::from_json(LATTICE_K1).unwrap();
        assert_eq!(md.rank(), 2);
        assert_eq!(md.weights().unwrap()[1], Rational64::new(1, 4));
        assert!(md.validate().pass);
        let back = ModularData::from_json(&md.to_json()).unwrap();
        assert_eq!(back, md);
    }

    #[test]
    fn tolerance_override() {
        let text = LATTICE_K1.replace("\"central_charge\": \"1\"", "\"tolerance\": 1e-3");
        let md = ModularData::from_json(&text).unwrap();
        assert_eq!(md.tolerances().axiom, 1e-3);
        assert_eq!(md.tolerances().integrality, 1e-9);
    }

    #[test]
    fn ragged_matrix_is_structural() {
        let text = r#"{"labels":["a","b"],"vacuum":0,"S":[[[1,0],[0,0]],[[0,0]]]}"#;
        assert!(matches!(ModularData::from_json(text), Err(Error::Structural(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"labels":["a"],"vacuum":0,"S":[[[1,0]]],"T":[]}"#;
        assert!(ModularData::from_json(text).is_err());
    }
}
