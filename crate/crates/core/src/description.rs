//! JSON file format for stratified spaces and optional generic coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeffsys::CoefficientSystem;
use crate::ratlin::format_rational;
use crate::stratposet::StratSpace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescription {
    pub torus_dim: usize,
    pub strata: Vec<StratumDescription>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientDescription>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDescription {
    pub id: String,
    /// Integer generators of the infinitesimal stabilizer; empty for a free stratum.
    pub stabilizer_basis: Vec<Vec<i64>>,
}

/// Generic coefficient system: dimension per stratum and projection
/// matrices (rows of `"p/q"` strings, shape `dims[to] × dims[from]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDescription {
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub projections: Vec<ProjectionDescription>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionDescription {
    pub from: String,
    pub to: String,
    pub matrix: Vec<Vec<String>>,
}

impl SpaceDescription {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Describes a space by its canonical stabilizer bases and Hasse covers.
/// With `generic`, the system's dims and cover projections are included.
pub fn describe(space: &StratSpace, generic: Option<&CoefficientSystem>) -> SpaceDescription {
    let strata = space
        .strata()
        .iter()
        .map(|s| StratumDescription {
            id: s.id.clone(),
            stabilizer_basis: s
                .stab
                .basis()
                .iter()
                .map(|v| v.iter().map(|x| i64::try_from(x).expect("stabilizer entries fit in i64")).collect())
                .collect(),
        })
        .collect();
    let coefficients = generic.map(|v| CoefficientDescription {
        dims: (0..space.len()).map(|i| (space.id(i).to_string(), v.dim(i))).collect(),
        projections: space
            .covers()
            .iter()
            .map(|&(x, y)| ProjectionDescription {
                from: space.id(x).to_string(),
                to: space.id(y).to_string(),
                matrix: v.proj(x, y).to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            })
            .collect(),
    });
    SpaceDescription { torus_dim: space.torus_dim(), strata, covers: space.cover_ids(), coefficients }
}
