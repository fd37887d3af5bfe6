//! Assignment cochain complexes and their cohomology.
//!
//! A `k`-cochain assigns to every `(k+1)`-tuple `X_0 ⪯ … ⪯ X_k` of strata an
//! element of `V(X_k)`. The full complex uses weakly increasing tuples; the
//! reduced complex only strictly increasing ones. The differential is
//!
//! ```text
//! dφ(X_0..X_{k+1}) = Σ_{l=0}^{k} (-1)^l φ(X_0..^X_l..X_{k+1})
//!                  + (-1)^{k+1} π^{X_k}_{X_{k+1}} φ(X_0..X_k)
//! ```
//!
//! Coordinates of a cochain are laid out tuple by tuple in the canonical
//! chain order of [`StratSpace::chains`], each tuple owning a block of
//! length `dims(X_k)`.

mod homotopy;
mod les;
mod pullback;

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeffsys::{restriction_system, CoeffError, CoefficientSystem};
use crate::ratlin::{extend_independent, kernel_basis, rref, RatMatrix, RatVec, Rational};
use crate::stratposet::{Chain, MorphismViolation, StratSpace};

pub use homotopy::{fatness, fatness_operator, homotopy_l, homotopy_q};
pub use les::{les_coefficients_check, les_pair_check, LesNode, LesReport};
pub use pullback::{pullback, pullback_matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochainError {
    #[error("{0:?} is not a stratum, so the set is not a union of strata")]
    NotUnionOfStrata(String),
    #[error("space has no unique minimal stratum")]
    NoUniqueMinimum,
    #[error("homotopy operator needs degree at least 1")]
    DegreeZero,
    #[error("invalid poset morphism: {0:?}")]
    InvalidMorphism(Vec<MorphismViolation>),
    #[error("coefficient sequence is not short exact")]
    NotExact,
    #[error("system is not the moment system of its space")]
    NotMomentSystem,
    #[error("cochain does not belong to the expected basis")]
    BasisMismatch,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Indexing of the cochain space `C^k` (or `C^k_0` when `strict`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainBasis {
    degree: usize,
    strict: bool,
    tuples: Vec<Chain>,
    offsets: Vec<usize>,
    block: Vec<usize>,
    total: usize,
    lookup: HashMap<Chain, usize>,
}

impl ChainBasis {
    pub fn new(v: &CoefficientSystem, degree: usize, strict: bool) -> Self {
        let tuples = v.space().chains(degree, strict);
        let mut offsets = Vec::with_capacity(tuples.len());
        let mut block = Vec::with_capacity(tuples.len());
        let mut total = 0;
        for t in &tuples {
            offsets.push(total);
            let b = v.dim(*t.last().expect("tuples are nonempty"));
            block.push(b);
            total += b;
        }
        let lookup = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        ChainBasis { degree, strict, tuples, offsets, block, total, lookup }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn tuples(&self) -> &[Chain] {
        &self.tuples
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn position(&self, t: &[usize]) -> Option<usize> {
        self.lookup.get(t).copied()
    }

    /// Coordinate range of tuple number `i`.
    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.block[i]
    }

    /// Coordinates belonging to tuples that satisfy `pred`, ascending.
    pub fn coords_where(&self, pred: impl Fn(&Chain) -> bool) -> Vec<usize> {
        self.tuples
            .iter()
            .enumerate()
            .filter(|(_, t)| pred(t))
            .flat_map(|(i, _)| self.range(i))
            .collect()
    }
}

/// Element of a cochain space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub basis: ChainBasis,
    pub coords: RatVec,
}

impl Cochain {
    pub fn zero(basis: ChainBasis) -> Self {
        let coords = vec![Rational::default(); basis.total_dim()];
        Cochain { basis, coords }
    }

    pub fn new(basis: ChainBasis, coords: RatVec) -> Result<Self, CochainError> {
        if coords.len() != basis.total_dim() {
            return Err(CochainError::BasisMismatch);
        }
        Ok(Cochain { basis, coords })
    }

    /// Value on a tuple, `None` if the tuple is not in the basis.
    pub fn value(&self, t: &[usize]) -> Option<&[Rational]> {
        self.basis.position(t).map(|i| &self.coords[self.basis.range(i)])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    /// Rank of `d_{k-1}`.
    pub rank_in: usize,
    /// Rank of `d_k`.
    pub rank_out: usize,
    pub cochain_dim: usize,
    /// For a relative set `n` with open complement `U`, `dim HA^k(M; V_U)`,
    /// which must equal the relative dimension.
    pub coefficient_system_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyResult {
    pub degree: usize,
    pub strict: bool,
    pub dim: usize,
    pub cocycle_representatives: Vec<Cochain>,
    pub diagnostics: Diagnostics,
}

/// Matrix of `d : C^k → C^{k+1}` in the canonical bases.
pub fn differential_matrix(v: &CoefficientSystem, k: usize, strict: bool) -> RatMatrix {
    let src = ChainBasis::new(v, k, strict);
    let dst = ChainBasis::new(v, k + 1, strict);
    differential_between(v, &src, &dst)
}

pub(crate) fn differential_between(v: &CoefficientSystem, src: &ChainBasis, dst: &ChainBasis) -> RatMatrix {
    let k = src.degree;
    let mut d = RatMatrix::zeros(dst.total_dim(), src.total_dim());
    let mut face = Vec::with_capacity(k + 1);
    for (ti, t) in dst.tuples.iter().enumerate() {
        let rows = dst.range(ti);
        for l in 0..=k + 1 {
            face.clear();
            face.extend(t.iter().enumerate().filter(|&(i, _)| i != l).map(|(_, &x)| x));
            let Some(fi) = src.position(&face) else { continue };
            let cols = src.range(fi);
            let sign = if l % 2 == 0 { Rational::one() } else { -Rational::one() };
            if l <= k {
                for (r, c) in rows.clone().zip(cols) {
                    d[(r, c)] += &sign;
                }
            } else {
                let p = v.proj(t[k], t[k + 1]);
                for (a, r) in rows.clone().enumerate() {
                    for (b, c) in cols.clone().enumerate() {
                        let x = &p[(a, b)];
                        if !x.is_zero() {
                            d[(r, c)] += &sign * x;
                        }
                    }
                }
            }
        }
    }
    d
}

/// Cohomology of `C^{k-1} → C^k → C^{k+1}` given as matrices.
#[derive(Debug, Clone)]
pub(crate) struct LinearCohomology {
    pub dim: usize,
    pub reps: Vec<RatVec>,
    pub rank_in: usize,
    pub rank_out: usize,
    /// Basis of the image of the incoming map.
    pub boundaries: Vec<RatVec>,
}

pub(crate) fn linear_cohomology(d_in: &RatMatrix, d_out: &RatMatrix) -> LinearCohomology {
    let n = d_out.cols();
    debug_assert_eq!(d_in.rows(), n);
    let r_in = rref(d_in);
    let boundaries: Vec<RatVec> = r_in.pivot_cols.iter().map(|&c| d_in.col(c)).collect();
    let cocycles = kernel_basis(d_out);
    let rank_out = n - cocycles.len();
    let picked = extend_independent(n, &boundaries, &cocycles);
    let reps: Vec<RatVec> = picked.into_iter().map(|i| cocycles[i].clone()).collect();
    LinearCohomology { dim: reps.len(), reps, rank_in: r_in.rank, rank_out, boundaries }
}

/// Rank of the map induced in cohomology, given images of representatives
/// and a basis of the target's boundaries.
pub(crate) fn induced_rank(len: usize, images: &[RatVec], boundaries: &[RatVec]) -> usize {
    extend_independent(len, boundaries, images).len()
}

pub fn cohomology(v: &CoefficientSystem, k: usize, strict: bool) -> CohomologyResult {
    let keep = |_: &Chain| true;
    restricted_cohomology(v, k, strict, &keep)
}

fn restricted_cohomology(
    v: &CoefficientSystem,
    k: usize,
    strict: bool,
    keep: &dyn Fn(&Chain) -> bool,
) -> CohomologyResult {
    let here = ChainBasis::new(v, k, strict);
    let next = ChainBasis::new(v, k + 1, strict);
    let c_here = here.coords_where(keep);
    let c_next = next.coords_where(keep);
    let d_out = differential_between(v, &here, &next).select(&c_next, &c_here);
    let d_in = if k == 0 {
        RatMatrix::zeros(c_here.len(), 0)
    } else {
        let prev = ChainBasis::new(v, k - 1, strict);
        let c_prev = prev.coords_where(keep);
        differential_between(v, &prev, &here).select(&c_here, &c_prev)
    };
    let lc = linear_cohomology(&d_in, &d_out);
    let cocycle_representatives = lc
        .reps
        .iter()
        .map(|r| {
            let mut full = vec![Rational::default(); here.total_dim()];
            for (&c, x) in c_here.iter().zip(r) {
                full[c] = x.clone();
            }
            Cochain { basis: here.clone(), coords: full }
        })
        .collect();
    CohomologyResult {
        degree: k,
        strict,
        dim: lc.dim,
        cocycle_representatives,
        diagnostics: Diagnostics {
            rank_in: lc.rank_in,
            rank_out: lc.rank_out,
            cochain_dim: c_here.len(),
            coefficient_system_dim: None,
        },
    }
}

/// `Σ_{tuples of degree k} dims(top)`.
pub fn chain_space_dim(v: &CoefficientSystem, k: usize, strict: bool) -> usize {
    ChainBasis::new(v, k, strict).total_dim()
}

/// Alternating sum of the reduced cochain dimensions.
pub fn euler_characteristic(v: &CoefficientSystem) -> i64 {
    (0..v.space().height())
        .map(|k| {
            let d = chain_space_dim(v, k, true) as i64;
            if k % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .sum()
}

/// Degree bound beyond which cohomology vanishes: the number of strata in
/// the longest strict chain.
pub fn degree_bound(space: &StratSpace) -> usize {
    space.height()
}

/// Resolves stratum ids to indices; unknown ids mean the set is not a union of strata.
pub fn resolve_strata<S: AsRef<str>>(space: &StratSpace, ids: &[S]) -> Result<BTreeSet<usize>, CochainError> {
    ids.iter()
        .map(|id| space.index_of(id.as_ref()).ok_or_else(|| CochainError::NotUnionOfStrata(id.as_ref().to_string())))
        .collect()
}

/// Cohomology of the subcomplex of cochains vanishing on tuples lying
/// entirely in `n`. When `n` is closed (its complement `U` is open) this
/// subcomplex is exactly `C^*(M; V_U)`, and that dimension is recorded in the
/// diagnostics as a cross-check.
pub fn relative_cohomology(
    v: &CoefficientSystem,
    n: &BTreeSet<usize>,
    k: usize,
    strict: bool,
) -> Result<CohomologyResult, CochainError> {
    if let Some(&bad) = n.iter().find(|&&i| i >= v.space().len()) {
        return Err(CochainError::NotUnionOfStrata(format!("#{bad}")));
    }
    let keep = |t: &Chain| !t.iter().all(|x| n.contains(x));
    let mut res = restricted_cohomology(v, k, strict, &keep);
    let complement: BTreeSet<usize> = (0..v.space().len()).filter(|x| !n.contains(x)).collect();
    if v.space().openness_witness(&complement).is_none() {
        let w = restriction_system(v, &complement)?;
        res.diagnostics.coefficient_system_dim = Some(cohomology(&w, k, strict).dim);
    }
    Ok(res)
}
