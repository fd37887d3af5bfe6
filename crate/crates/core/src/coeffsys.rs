//! Coefficient systems on a stratification poset.
//!
//! A system assigns a finite-dimensional rational vector space `V(X)` to
//! every stratum and a projection `π^X_Y : V(X) → V(Y)` to every pair
//! `X ⪯ Y`. Elements of `V(X)` are column vectors of length `dims[X]`, and
//! `π^X_Y` is a `dims[Y] × dims[X]` matrix.
//!
//! The moment system has `V(X) = g_X^*`. A functional on `g_X` is
//! coordinatized by its values on the canonical basis of the stabilizer, so
//! restriction to `g_Y ⊆ g_X` is the transpose of the matrix expressing the
//! basis of `g_Y` in the basis of `g_X`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::ratlin::{rank, RatMatrix};
use crate::stratposet::StratSpace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("expected {expected} dimensions, one per stratum, found {found}")]
    DimsLength { expected: usize, found: usize },
    #[error("projection {x:?} -> {y:?} has shape {found:?}, expected {expected:?}")]
    Shape { x: String, y: String, expected: (usize, usize), found: (usize, usize) },
    #[error("strata {x:?} and {y:?} are not related by {x:?} ⪯ {y:?}")]
    NotComparable { x: String, y: String },
    #[error("no projection given for the cover {x:?} ≺ {y:?}")]
    MissingProjection { x: String, y: String },
    #[error("set is not open: {x:?} is in it, {y:?} is not, and {x:?} ⪯ {y:?}")]
    NotOpen { x: String, y: String },
    #[error("unknown stratum id {0:?}")]
    UnknownId(String),
    #[error("systems live over different spaces or do not match")]
    Mismatch,
    #[error("morphism square at {x:?} ⪯ {y:?} does not commute")]
    NotNatural { x: String, y: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSystem {
    space: Arc<StratSpace>,
    dims: Vec<usize>,
    /// `proj[&(x, y)]` for every `x ⪯ y`, including `x == y`.
    proj: BTreeMap<(usize, usize), RatMatrix>,
}

impl CoefficientSystem {
    /// Moment system `V(X) = g_X^*` with restriction maps.
    pub fn moment_system(space: Arc<StratSpace>) -> Self {
        let n = space.len();
        let dims: Vec<usize> = (0..n).map(|i| space.stab(i).dim()).collect();
        let mut proj = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                if !space.leq(x, y) {
                    continue;
                }
                let c = space
                    .stab(x)
                    .coordinates_of(space.stab(y))
                    .expect("stabilizers shrink along the order");
                proj.insert((x, y), c.transpose());
            }
        }
        CoefficientSystem { space, dims, proj }
    }

    pub fn zero(space: Arc<StratSpace>) -> Self {
        let n = space.len();
        let mut proj = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                if space.leq(x, y) {
                    proj.insert((x, y), RatMatrix::zeros(0, 0));
                }
            }
        }
        CoefficientSystem { space, dims: vec![0; n], proj }
    }

    /// Generic system from dimensions and projections for some comparable
    /// pairs. Every cover between nonzero spaces needs a projection; other
    /// missing pairs are filled with identities (diagonal) or by composing
    /// along the first cover out of `x` that stays below `y`.
    ///
    /// The result is not checked against the functor laws; see [`check_functor`].
    pub fn from_maps(
        space: Arc<StratSpace>,
        dims: Vec<usize>,
        given: BTreeMap<(usize, usize), RatMatrix>,
    ) -> Result<Self, CoeffError> {
        let n = space.len();
        if dims.len() != n {
            return Err(CoeffError::DimsLength { expected: n, found: dims.len() });
        }
        for (&(x, y), m) in &given {
            if !space.leq(x, y) {
                return Err(CoeffError::NotComparable { x: space.id(x).into(), y: space.id(y).into() });
            }
            if m.shape() != (dims[y], dims[x]) {
                return Err(CoeffError::Shape {
                    x: space.id(x).into(),
                    y: space.id(y).into(),
                    expected: (dims[y], dims[x]),
                    found: m.shape(),
                });
            }
        }
        let mut proj = given;
        for (x, &d) in dims.iter().enumerate() {
            proj.entry((x, x)).or_insert_with(|| RatMatrix::identity(d));
        }
        for &(x, y) in space.covers() {
            if let std::collections::btree_map::Entry::Vacant(e) = proj.entry((x, y)) {
                if dims[x] == 0 || dims[y] == 0 {
                    e.insert(RatMatrix::zeros(dims[y], dims[x]));
                } else {
                    return Err(CoeffError::MissingProjection { x: space.id(x).into(), y: space.id(y).into() });
                }
            }
        }
        // Fill remaining pairs by increasing length of the interval.
        let mut pending: Vec<(usize, usize, usize)> = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if space.lt(x, y) && !proj.contains_key(&(x, y)) {
                    let width = (0..n).filter(|&z| space.leq(x, z) && space.leq(z, y)).count();
                    pending.push((width, x, y));
                }
            }
        }
        pending.sort();
        for (_, x, y) in pending {
            let z = space
                .covers()
                .iter()
                .find(|&&(a, b)| a == x && space.leq(b, y))
                .map(|&(_, b)| b)
                .expect("a cover out of x lies below y");
            let m = proj[&(z, y)].mul(&proj[&(x, z)]).expect("shapes chain");
            proj.insert((x, y), m);
        }
        Ok(CoefficientSystem { space, dims, proj })
    }

    pub fn space(&self) -> &StratSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<StratSpace> {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    /// `π^x_y`; panics unless `x ⪯ y`.
    pub fn proj(&self, x: usize, y: usize) -> &RatMatrix {
        self.proj.get(&(x, y)).unwrap_or_else(|| panic!("no projection for non-comparable pair ({x}, {y})"))
    }

    pub fn projections(&self) -> &BTreeMap<(usize, usize), RatMatrix> {
        &self.proj
    }

    /// Replaces one stored projection without recomputing anything else.
    pub fn with_projection(mut self, x: usize, y: usize, m: RatMatrix) -> Result<Self, CoeffError> {
        if !self.space.leq(x, y) {
            return Err(CoeffError::NotComparable { x: self.space.id(x).into(), y: self.space.id(y).into() });
        }
        if m.shape() != (self.dims[y], self.dims[x]) {
            return Err(CoeffError::Shape {
                x: self.space.id(x).into(),
                y: self.space.id(y).into(),
                expected: (self.dims[y], self.dims[x]),
                found: m.shape(),
            });
        }
        self.proj.insert((x, y), m);
        Ok(self)
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    fn same_space(&self, other: &CoefficientSystem) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    fn open_set(&self, n: &BTreeSet<usize>) -> Result<(), CoeffError> {
        if let Some(&bad) = n.iter().find(|&&i| i >= self.space.len()) {
            return Err(CoeffError::UnknownId(format!("#{bad}")));
        }
        match self.space.openness_witness(n) {
            Some((x, y)) => Err(CoeffError::NotOpen { x: self.space.id(x).into(), y: self.space.id(y).into() }),
            None => Ok(()),
        }
    }
}

/// `V_{M/N}`: zero on `n`, projections zeroed whenever an endpoint is in `n`.
pub fn quotient_system(v: &CoefficientSystem, n: &BTreeSet<usize>) -> Result<CoefficientSystem, CoeffError> {
    v.open_set(n)?;
    Ok(quotient_system_unchecked(v, n))
}

/// The `V_{M/N}` formula without the openness check. For a non-open `n` the
/// result can violate the composition law.
pub fn quotient_system_unchecked(v: &CoefficientSystem, n: &BTreeSet<usize>) -> CoefficientSystem {
    masked(v, |x| !n.contains(&x))
}

/// `V_N = V / V_{M/N}`: unchanged on `n`, zero outside.
pub fn restriction_system(v: &CoefficientSystem, n: &BTreeSet<usize>) -> Result<CoefficientSystem, CoeffError> {
    v.open_set(n)?;
    Ok(masked(v, |x| n.contains(&x)))
}

fn masked(v: &CoefficientSystem, keep: impl Fn(usize) -> bool) -> CoefficientSystem {
    let dims: Vec<usize> = (0..v.dims.len()).map(|x| if keep(x) { v.dims[x] } else { 0 }).collect();
    let proj = v
        .proj
        .iter()
        .map(|(&(x, y), m)| {
            let m = if keep(x) && keep(y) { m.clone() } else { RatMatrix::zeros(dims[y], dims[x]) };
            ((x, y), m)
        })
        .collect();
    CoefficientSystem { space: v.space.clone(), dims, proj }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctorViolation {
    NotIdentity { x: String },
    NotComposable { x: String, y: String, z: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorReport {
    pub violations: Vec<FunctorViolation>,
}

impl FunctorReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of `π^X_X = id` and `π^Y_Z π^X_Y = π^X_Z`.
pub fn check_functor(v: &CoefficientSystem) -> FunctorReport {
    let sp = v.space();
    let n = sp.len();
    let mut violations = Vec::new();
    for x in 0..n {
        if *v.proj(x, x) != RatMatrix::identity(v.dim(x)) {
            violations.push(FunctorViolation::NotIdentity { x: sp.id(x).into() });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if !sp.leq(x, y) {
                continue;
            }
            for z in 0..n {
                if !sp.leq(y, z) || x == y || y == z {
                    continue;
                }
                let composed = v.proj(y, z).mul(v.proj(x, y)).expect("shapes chain");
                if composed != *v.proj(x, z) {
                    violations.push(FunctorViolation::NotComposable {
                        x: sp.id(x).into(),
                        y: sp.id(y).into(),
                        z: sp.id(z).into(),
                    });
                }
            }
        }
    }
    FunctorReport { violations }
}

/// Natural transformation between two systems over the same space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemMorphism {
    source: CoefficientSystem,
    target: CoefficientSystem,
    maps: Vec<RatMatrix>,
}

impl SystemMorphism {
    /// Validates shapes and commutativity of every square.
    pub fn new(
        source: CoefficientSystem,
        target: CoefficientSystem,
        maps: Vec<RatMatrix>,
    ) -> Result<Self, CoeffError> {
        if !source.same_space(&target) || maps.len() != source.space().len() {
            return Err(CoeffError::Mismatch);
        }
        let sp = source.space();
        for (x, m) in maps.iter().enumerate() {
            if m.shape() != (target.dim(x), source.dim(x)) {
                return Err(CoeffError::Shape {
                    x: sp.id(x).into(),
                    y: sp.id(x).into(),
                    expected: (target.dim(x), source.dim(x)),
                    found: m.shape(),
                });
            }
        }
        for &(x, y) in source.proj.keys() {
            let lhs = target.proj(x, y).mul(&maps[x]).expect("shapes chain");
            let rhs = maps[y].mul(source.proj(x, y)).expect("shapes chain");
            if lhs != rhs {
                return Err(CoeffError::NotNatural { x: sp.id(x).into(), y: sp.id(y).into() });
            }
        }
        Ok(SystemMorphism { source, target, maps })
    }

    pub fn identity(v: &CoefficientSystem) -> Self {
        let maps = v.dims.iter().map(|&d| RatMatrix::identity(d)).collect();
        SystemMorphism { source: v.clone(), target: v.clone(), maps }
    }

    pub fn zero(source: &CoefficientSystem, target: &CoefficientSystem) -> Result<Self, CoeffError> {
        let maps = (0..source.dims.len()).map(|x| RatMatrix::zeros(target.dim(x), source.dim(x))).collect();
        Self::new(source.clone(), target.clone(), maps)
    }

    /// `V_N → V` for open `n`: identity on `n`. The subsystem supported on
    /// an upward closed set.
    pub fn restriction_inclusion(v: &CoefficientSystem, n: &BTreeSet<usize>) -> Result<Self, CoeffError> {
        let r = restriction_system(v, n)?;
        let maps = (0..v.dims.len())
            .map(|x| if n.contains(&x) { RatMatrix::identity(v.dim(x)) } else { RatMatrix::zeros(v.dim(x), 0) })
            .collect();
        Self::new(r, v.clone(), maps)
    }

    /// `V → V_{M/N}` for open `n`: identity off `n`.
    pub fn quotient_projection(v: &CoefficientSystem, n: &BTreeSet<usize>) -> Result<Self, CoeffError> {
        let q = quotient_system(v, n)?;
        let maps = (0..v.dims.len())
            .map(|x| if n.contains(&x) { RatMatrix::zeros(0, v.dim(x)) } else { RatMatrix::identity(v.dim(x)) })
            .collect();
        Self::new(v.clone(), q, maps)
    }

    pub fn source(&self) -> &CoefficientSystem {
        &self.source
    }

    pub fn target(&self) -> &CoefficientSystem {
        &self.target
    }

    pub fn map(&self, x: usize) -> &RatMatrix {
        &self.maps[x]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesStratum {
    pub id: String,
    pub f_injective: bool,
    pub g_surjective: bool,
    pub middle_exact: bool,
}

impl SesStratum {
    pub fn exact(&self) -> bool {
        self.f_injective && self.g_surjective && self.middle_exact
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesReport {
    pub strata: Vec<SesStratum>,
}

impl SesReport {
    pub fn exact(&self) -> bool {
        self.strata.iter().all(SesStratum::exact)
    }
}

/// Pointwise exactness of `0 → V1 --f--> V2 --g--> V3 → 0`.
pub fn ses_check(f: &SystemMorphism, g: &SystemMorphism) -> Result<SesReport, CoeffError> {
    if f.target != g.source {
        return Err(CoeffError::Mismatch);
    }
    let sp = f.source.space();
    let strata = (0..sp.len())
        .map(|x| {
            let (fx, gx) = (&f.maps[x], &g.maps[x]);
            let rf = rank(fx);
            let rg = rank(gx);
            let gf_zero = gx.mul(fx).expect("shapes chain").is_zero();
            SesStratum {
                id: sp.id(x).into(),
                f_injective: rf == fx.cols(),
                g_surjective: rg == gx.rows(),
                middle_exact: gf_zero && rf == gx.cols() - rg,
            }
        })
        .collect();
    Ok(SesReport { strata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stratposet::Subalgebra;

    fn chain3() -> Arc<StratSpace> {
        let strata = vec![
            ("a".to_string(), Subalgebra::full(2)),
            ("b".to_string(), Subalgebra::from_i64(2, &[&[1, 0]]).unwrap()),
            ("c".to_string(), Subalgebra::zero(2)),
        ];
        let rel = vec![("a".to_string(), "b".to_string()), ("b".to_string(), "c".to_string())];
        Arc::new(StratSpace::from_covers(2, strata, &rel).unwrap())
    }

    #[test]
    fn moment_system_dims_and_projection() {
        let v = CoefficientSystem::moment_system(chain3());
        assert_eq!(v.dims(), &[2, 1, 0]);
        // restriction of (x, y) in g^* to span(e1) is x
        assert_eq!(*v.proj(0, 1), RatMatrix::from_i64(&[&[1, 0]]));
        assert!(check_functor(&v).passes());
    }

    #[test]
    fn perturbed_projection_names_the_triple() {
        let sp = chain3();
        let one = || RatMatrix::identity(1);
        let given: BTreeMap<_, _> = [((0, 1), one()), ((1, 2), one())].into();
        let v = CoefficientSystem::from_maps(sp, vec![1, 1, 1], given).unwrap();
        assert!(check_functor(&v).passes());
        assert_eq!(*v.proj(0, 2), one());
        let bad = v.with_projection(0, 2, RatMatrix::from_i64(&[&[2]])).unwrap();
        assert_eq!(
            check_functor(&bad).violations,
            vec![FunctorViolation::NotComposable { x: "a".into(), y: "b".into(), z: "c".into() }]
        );
    }

    #[test]
    fn missing_cover_projection_is_an_error() {
        let given: BTreeMap<_, _> = [((0, 1), RatMatrix::identity(1))].into();
        let err = CoefficientSystem::from_maps(chain3(), vec![1, 1, 1], given).unwrap_err();
        assert_eq!(err, CoeffError::MissingProjection { x: "b".into(), y: "c".into() });
    }

    #[test]
    fn zero_system_passes() {
        assert!(check_functor(&CoefficientSystem::zero(chain3())).passes());
    }

    #[test]
    fn quotient_and_restriction_edge_cases() {
        let v = CoefficientSystem::moment_system(chain3());
        let empty = BTreeSet::new();
        assert_eq!(quotient_system(&v, &empty).unwrap(), v);
        assert!(restriction_system(&v, &empty).unwrap().is_zero());
        let all: BTreeSet<usize> = (0..3).collect();
        assert!(quotient_system(&v, &all).unwrap().is_zero());
        assert_eq!(restriction_system(&v, &all).unwrap(), v);
        let not_open: BTreeSet<usize> = [0].into();
        assert_eq!(
            quotient_system(&v, &not_open).unwrap_err(),
            CoeffError::NotOpen { x: "a".into(), y: "b".into() }
        );
    }

    #[test]
    fn non_open_quotient_breaks_composition() {
        // identity system on a ≺ b ≺ c; removing only the middle stratum
        let one = || RatMatrix::identity(1);
        let given: BTreeMap<_, _> = [((0, 1), one()), ((1, 2), one())].into();
        let v = CoefficientSystem::from_maps(chain3(), vec![1, 1, 1], given).unwrap();
        let n: BTreeSet<usize> = [1].into();
        let q = quotient_system_unchecked(&v, &n);
        assert_eq!(
            check_functor(&q).violations,
            vec![FunctorViolation::NotComposable { x: "a".into(), y: "b".into(), z: "c".into() }]
        );
    }

    #[test]
    fn restriction_then_quotient_is_exact() {
        let v = CoefficientSystem::moment_system(chain3());
        let n: BTreeSet<usize> = [1, 2].into();
        let f = SystemMorphism::restriction_inclusion(&v, &n).unwrap();
        let g = SystemMorphism::quotient_projection(&v, &n).unwrap();
        assert!(ses_check(&f, &g).unwrap().exact());
        // the reverse arrows are not natural across the boundary of n
        let back = (0..3)
            .map(|x| if n.contains(&x) { RatMatrix::zeros(v.dim(x), 0) } else { RatMatrix::identity(v.dim(x)) })
            .collect();
        let q = quotient_system(&v, &n).unwrap();
        assert_eq!(
            SystemMorphism::new(q, v.clone(), back).unwrap_err(),
            CoeffError::NotNatural { x: "a".into(), y: "b".into() }
        );
    }

    #[test]
    fn identity_then_zero_is_not_surjective() {
        let v = CoefficientSystem::moment_system(chain3());
        let f = SystemMorphism::identity(&v);
        let g = SystemMorphism::zero(&v, &v).unwrap();
        let r = ses_check(&f, &g).unwrap();
        assert!(!r.exact());
        let failing: Vec<&str> = r.strata.iter().filter(|s| !s.g_surjective).map(|s| s.id.as_str()).collect();
        assert_eq!(failing, vec!["a", "b"]);
    }

    #[test]
    fn unnatural_morphism_rejected() {
        let v = CoefficientSystem::moment_system(chain3());
        let maps = vec![RatMatrix::identity(2), RatMatrix::from_i64(&[&[2]]), RatMatrix::identity(0)];
        let err = SystemMorphism::new(v.clone(), v, maps).unwrap_err();
        assert_eq!(err, CoeffError::NotNatural { x: "a".into(), y: "b".into() });
    }
}
