//! Assignments: compatible choices `A(X) ∈ V(X)` with
//! `proj(X,Y)·A(X) = A(Y)` whenever `X ⪯ Y`. An assignment is determined by
//! its values on the minimal strata.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cochain::cohomology;
use crate::coeffsys::CoefficientSystem;
use crate::ratlin::{is_zero_vec, RatVec};

/// Values per stratum id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentVector {
    pub values: BTreeMap<String, RatVec>,
}

/// Values on the minimal strata only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalAssignment {
    pub values: BTreeMap<String, RatVec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignError {
    #[error("no value given for minimal stratum {0:?}")]
    MissingMinimalValue(String),
    #[error("{0:?} is not a minimal stratum")]
    NotMinimal(String),
    #[error("{0:?} is not a stratum")]
    UnknownId(String),
    #[error("value for {id:?} has length {found}, expected {expected}")]
    Length { id: String, expected: usize, found: usize },
    #[error("minimal strata {x1:?} and {x2:?} project to different values on {y:?}")]
    IncompatibleMinimalValues { x1: String, x2: String, y: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub x: String,
    pub y: String,
    /// `proj(X,Y)·A(X) − A(Y)`.
    pub residual: RatVec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentReport {
    pub violations: Vec<Violation>,
}

impl AssignmentReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

fn decode(v: &CoefficientSystem, coords: &[crate::ratlin::Rational]) -> AssignmentVector {
    let sp = v.space();
    let mut values = BTreeMap::new();
    let mut at = 0;
    for x in 0..sp.len() {
        values.insert(sp.id(x).to_string(), coords[at..at + v.dim(x)].to_vec());
        at += v.dim(x);
    }
    AssignmentVector { values }
}

/// Basis of `ker d_0`, one assignment per cohomology representative.
pub fn assignment_basis(v: &CoefficientSystem) -> Vec<AssignmentVector> {
    cohomology(v, 0, true).cocycle_representatives.iter().map(|c| decode(v, &c.coords)).collect()
}

fn checked_values<'a>(
    v: &CoefficientSystem,
    values: &'a BTreeMap<String, RatVec>,
) -> Result<Vec<Option<&'a RatVec>>, AssignError> {
    let sp = v.space();
    let mut out = vec![None; sp.len()];
    for (id, val) in values {
        let x = sp.index_of(id).ok_or_else(|| AssignError::UnknownId(id.clone()))?;
        if val.len() != v.dim(x) {
            return Err(AssignError::Length { id: id.clone(), expected: v.dim(x), found: val.len() });
        }
        out[x] = Some(val);
    }
    Ok(out)
}

/// Lists every comparable pair `X ≺ Y` whose compatibility fails. Strata
/// without a value are treated as zero.
pub fn is_assignment(v: &CoefficientSystem, a: &AssignmentVector) -> Result<AssignmentReport, AssignError> {
    let sp = v.space();
    let vals = checked_values(v, &a.values)?;
    let zero = |x: usize| vec![Default::default(); v.dim(x)];
    let get = |x: usize| vals[x].cloned().unwrap_or_else(|| zero(x));
    let mut violations = Vec::new();
    for x in 0..sp.len() {
        for y in 0..sp.len() {
            if !sp.lt(x, y) {
                continue;
            }
            let img = v.proj(x, y).mul_vec(&get(x)).expect("shapes chain");
            let residual: RatVec = img.iter().zip(get(y)).map(|(p, q)| p - q).collect();
            if !is_zero_vec(&residual) {
                violations.push(Violation { x: sp.id(x).into(), y: sp.id(y).into(), residual });
            }
        }
    }
    Ok(AssignmentReport { violations })
}

/// The unique assignment with the given minimal values. Every minimal `X`
/// below each `Y` is checked, so an incompatibility names a concrete witness.
pub fn extend_minimal(v: &CoefficientSystem, m: &MinimalAssignment) -> Result<AssignmentVector, AssignError> {
    let sp = v.space();
    let vals = checked_values(v, &m.values)?;
    let minimal = sp.minimal_strata();
    for (x, val) in vals.iter().enumerate() {
        if val.is_some() && !minimal.contains(&x) {
            return Err(AssignError::NotMinimal(sp.id(x).into()));
        }
    }
    if let Some(&x) = minimal.iter().find(|&&x| vals[x].is_none()) {
        return Err(AssignError::MissingMinimalValue(sp.id(x).into()));
    }
    let mut values = BTreeMap::new();
    for y in 0..sp.len() {
        let mut found: Option<(usize, RatVec)> = None;
        for &x in minimal.iter().filter(|&&x| sp.leq(x, y)) {
            let img = v.proj(x, y).mul_vec(vals[x].expect("checked")).expect("shapes chain");
            match &found {
                None => found = Some((x, img)),
                Some((x1, prev)) if *prev != img => {
                    return Err(AssignError::IncompatibleMinimalValues {
                        x1: sp.id(*x1).into(),
                        x2: sp.id(x).into(),
                        y: sp.id(y).into(),
                    })
                }
                _ => {}
            }
        }
        let (_, val) = found.expect("every stratum lies above a minimal one");
        values.insert(sp.id(y).to_string(), val);
    }
    Ok(AssignmentVector { values })
}

/// Values of `a` on the minimal strata of `v`'s space.
pub fn restrict_to_minimal(v: &CoefficientSystem, a: &AssignmentVector) -> MinimalAssignment {
    let values = v
        .space()
        .minimal_ids()
        .into_iter()
        .map(|id| {
            let val = a.values.get(&id).cloned().unwrap_or_else(|| vec![Default::default(); v.dim(v.space().index_of(&id).expect("own id"))]);
            (id, val)
        })
        .collect();
    MinimalAssignment { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::presets::{cp2, s2_cube, s4};
    use crate::ratlin::rat;
    use std::sync::Arc;

    fn mins(pairs: &[(&str, [i64; 2])]) -> MinimalAssignment {
        MinimalAssignment { values: pairs.iter().map(|(id, v)| (id.to_string(), vec![rat(v[0]), rat(v[1])])).collect() }
    }

    #[test]
    fn cp2_extension_and_failure() {
        let (_, v) = cp2();
        let a = extend_minimal(&v, &mins(&[("p0", [0, 0]), ("p1", [1, 0]), ("p2", [0, 1])])).unwrap();
        assert_eq!(a.values["e01"], vec![rat(0)]);
        assert_eq!(a.values["e02"], vec![rat(0)]);
        assert_eq!(a.values["e12"], vec![rat(1)]);
        assert!(a.values["open"].is_empty());
        assert!(is_assignment(&v, &a).unwrap().passes());

        let bad = mins(&[("p0", [0, 0]), ("p1", [1, 0]), ("p2", [0, 2])]);
        assert_eq!(
            extend_minimal(&v, &bad).unwrap_err(),
            AssignError::IncompatibleMinimalValues { x1: "p1".into(), x2: "p2".into(), y: "e12".into() }
        );
    }

    #[test]
    fn cp2_candidate_violates_at_edge_p1_p2() {
        let (_, v) = cp2();
        let mut values: BTreeMap<String, RatVec> = mins(&[("p0", [0, 0]), ("p1", [1, 0]), ("p2", [0, 2])]).values;
        values.insert("e12".into(), vec![rat(1)]);
        let r = is_assignment(&v, &AssignmentVector { values }).unwrap();
        let pairs: Vec<(&str, &str)> = r.violations.iter().map(|w| (w.x.as_str(), w.y.as_str())).collect();
        assert_eq!(pairs, vec![("p2", "e12")]);
        assert_eq!(r.violations[0].residual, vec![rat(1)]);
    }

    #[test]
    fn zero_candidate_and_zero_extension() {
        let (_, v) = cp2();
        assert!(is_assignment(&v, &AssignmentVector { values: BTreeMap::new() }).unwrap().passes());
        let z = extend_minimal(&v, &mins(&[("p0", [0, 0]), ("p1", [0, 0]), ("p2", [0, 0])])).unwrap();
        assert!(z.values.values().all(|x| is_zero_vec(x)));
        assert!(restrict_to_minimal(&v, &z).values.values().all(|x| is_zero_vec(x)));
    }

    #[test]
    fn missing_minimal_value() {
        let (_, v) = cp2();
        let m = mins(&[("p0", [0, 0]), ("p1", [0, 0])]);
        assert_eq!(extend_minimal(&v, &m).unwrap_err(), AssignError::MissingMinimalValue("p2".into()));
    }

    #[test]
    fn bases_round_trip() {
        for (_, v) in [cp2(), s2_cube()] {
            for a in assignment_basis(&v) {
                assert!(is_assignment(&v, &a).unwrap().passes());
                assert_eq!(extend_minimal(&v, &restrict_to_minimal(&v, &a)).unwrap(), a);
            }
        }
    }

    #[test]
    fn s4_basis_has_equal_poles() {
        let (_, v) = s4();
        let basis = assignment_basis(&v);
        assert_eq!(basis.len(), 2);
        for a in basis {
            assert_eq!(a.values["north"], a.values["south"]);
        }
    }

    #[test]
    fn zero_system_has_empty_basis() {
        let (sp, _) = cp2();
        assert!(assignment_basis(&CoefficientSystem::zero(Arc::clone(&sp))).is_empty());
    }
}
