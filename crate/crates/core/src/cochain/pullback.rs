//! Pullback of cochains along a morphism of stratification posets.
//!
//! `(f^*φ)(X_0..X_k) = π^{f(X_k)}_{X_k} φ(f(X_0)..f(X_k))` on the full
//! complex, for moment systems on both sides.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{ChainBasis, Cochain, CochainError};
use crate::coeffsys::CoefficientSystem;
use crate::ratlin::RatMatrix;
use crate::stratposet::{poset_morphism_check, StratSpace};

fn resolve_map(
    f: &BTreeMap<String, String>,
    source: &StratSpace,
    target: &StratSpace,
) -> Result<Vec<usize>, CochainError> {
    let report = poset_morphism_check(f, source, target);
    if !report.is_valid() {
        return Err(CochainError::InvalidMorphism(report.violations));
    }
    Ok(source.strata().iter().map(|s| target.index_of(&f[&s.id]).expect("checked")).collect())
}

/// Matrix of `f^* : C^k(target) → C^k(source)` on full complexes. Both
/// systems must be moment systems and `f` a valid poset morphism.
pub fn pullback_matrix(
    f: &BTreeMap<String, String>,
    source: &CoefficientSystem,
    target: &CoefficientSystem,
    k: usize,
) -> Result<RatMatrix, CochainError> {
    for v in [source, target] {
        if *v != CoefficientSystem::moment_system(Arc::clone(v.space_arc())) {
            return Err(CochainError::NotMomentSystem);
        }
    }
    let (ss, ts) = (source.space(), target.space());
    let image = resolve_map(f, ss, ts)?;
    let src = ChainBasis::new(source, k, false);
    let dst = ChainBasis::new(target, k, false);
    let mut m = RatMatrix::zeros(src.total_dim(), dst.total_dim());
    for (si, s) in src.tuples().iter().enumerate() {
        let fs: Vec<usize> = s.iter().map(|&x| image[x]).collect();
        let ti = dst.position(&fs).expect("monotone maps send weak chains to weak chains");
        let top = s[k];
        let restrict = ts
            .stab(image[top])
            .coordinates_of(ss.stab(top))
            .expect("stabilizer containment was checked")
            .transpose();
        for (a, r) in src.range(si).enumerate() {
            for (b, c) in dst.range(ti).enumerate() {
                m[(r, c)] = restrict[(a, b)].clone();
            }
        }
    }
    Ok(m)
}

/// Pulls a full-complex cochain on the target back to `source_space`.
pub fn pullback(
    f: &BTreeMap<String, String>,
    source_space: Arc<StratSpace>,
    target: &CoefficientSystem,
    phi: &Cochain,
) -> Result<Cochain, CochainError> {
    let source = CoefficientSystem::moment_system(source_space);
    let k = phi.basis.degree();
    if phi.basis.strict() || phi.basis != ChainBasis::new(target, k, false) {
        return Err(CochainError::BasisMismatch);
    }
    let m = pullback_matrix(f, &source, target, k)?;
    let coords = m.mul_vec(&phi.coords).expect("shapes chain");
    Cochain::new(ChainBasis::new(&source, k, false), coords)
}
