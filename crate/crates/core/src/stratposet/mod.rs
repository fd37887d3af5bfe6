//! Finite posets of infinitesimal orbit-type strata.
//!
//! A [`StratSpace`] records, for each stratum, its infinitesimal stabilizer
//! and the closure order `X ⪯ Y` ("`X` lies in the closure of `Y`"). Strata
//! are stored sorted by id, so stratum indices, chain enumeration and every
//! report derived from them are deterministic.

mod subalgebra;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

pub use subalgebra::Subalgebra;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StratError {
    #[error("space has no strata")]
    Empty,
    #[error("duplicate stratum id {0:?}")]
    DuplicateId(String),
    #[error("unknown stratum id {0:?}")]
    UnknownId(String),
    #[error("vector of length {found} in a torus of dimension {expected}")]
    AmbientDim { expected: usize, found: usize },
    #[error("cover relation contains a cycle through {0:?}")]
    Cycle(String),
    #[error("stabilizer of {upper:?} is not a proper subalgebra of the stabilizer of {lower:?} although {lower:?} ≺ {upper:?}")]
    StabilizerMonotonicity { lower: String, upper: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub id: String,
    pub stab: Subalgebra,
}

/// Validated stratification poset with stabilizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratSpace {
    torus_dim: usize,
    strata: Vec<Stratum>,
    index: HashMap<String, usize>,
    /// Hasse diagram, sorted.
    covers: Vec<(usize, usize)>,
    /// `leq[i][j]` iff stratum `i ⪯ j`.
    leq: Vec<Vec<bool>>,
}

/// Index tuple of strata, weakly or strictly increasing.
pub type Chain = Vec<usize>;

impl StratSpace {
    /// Validates the strata and relations and precomputes the order.
    ///
    /// `covers` may contain any generating set of relations `X ≺ Y`; the
    /// stored covers are the transitive reduction.
    pub fn from_covers(
        torus_dim: usize,
        strata: Vec<(String, Subalgebra)>,
        covers: &[(String, String)],
    ) -> Result<Self, StratError> {
        if strata.is_empty() {
            return Err(StratError::Empty);
        }
        let mut strata: Vec<Stratum> = strata.into_iter().map(|(id, stab)| Stratum { id, stab }).collect();
        strata.sort_by(|a, b| a.id.cmp(&b.id));
        for w in strata.windows(2) {
            if w[0].id == w[1].id {
                return Err(StratError::DuplicateId(w[0].id.clone()));
            }
        }
        for s in &strata {
            if s.stab.ambient_dim() != torus_dim {
                return Err(StratError::AmbientDim { expected: torus_dim, found: s.stab.ambient_dim() });
            }
        }
        let index: HashMap<String, usize> = strata.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let lookup = |id: &String| index.get(id).copied().ok_or_else(|| StratError::UnknownId(id.clone()));
        let n = strata.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (a, b) in covers {
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(StratError::Cycle(a.clone()));
            }
            succ[i].insert(j);
        }

        // Kahn's algorithm: any leftover vertex sits on a cycle.
        let mut indeg = vec![0usize; n];
        for s in &succ {
            for &j in s {
                indeg[j] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(i) = queue.pop() {
            topo.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).expect("some vertex remains");
            return Err(StratError::Cycle(strata[stuck].id.clone()));
        }

        let mut leq = vec![vec![false; n]; n];
        for &i in topo.iter().rev() {
            leq[i][i] = true;
            for &j in &succ[i] {
                for k in 0..n {
                    if leq[j][k] {
                        leq[i][k] = true;
                    }
                }
            }
        }

        for (i, s) in succ.iter().enumerate() {
            for &j in s {
                let (lo, up) = (&strata[i].stab, &strata[j].stab);
                if !lo.contains(up) || lo.dim() <= up.dim() {
                    return Err(StratError::StabilizerMonotonicity {
                        lower: strata[i].id.clone(),
                        upper: strata[j].id.clone(),
                    });
                }
            }
        }

        let mut hasse = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && !(0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j]) {
                    hasse.push((i, j));
                }
            }
        }

        Ok(StratSpace { torus_dim, strata, index, covers: hasse, leq })
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn id(&self, i: usize) -> &str {
        &self.strata[i].id
    }

    pub fn stab(&self, i: usize) -> &Subalgebra {
        &self.strata[i].stab
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<BTreeSet<usize>, StratError> {
        ids.iter()
            .map(|id| self.index_of(id.as_ref()).ok_or_else(|| StratError::UnknownId(id.as_ref().to_string())))
            .collect()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// Covering relations `(X, Y)`, sorted by index.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_ids(&self) -> Vec<(String, String)> {
        self.covers.iter().map(|&(a, b)| (self.id(a).to_string(), self.id(b).to_string())).collect()
    }

    /// `(k+1)`-tuples `X_0 ⪯ … ⪯ X_k` (or `≺` when `strict`), in lexicographic order.
    pub fn chains(&self, k: usize, strict: bool) -> Vec<Chain> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k + 1);
        for i in 0..self.len() {
            cur.push(i);
            self.extend_chains(k, strict, &mut cur, &mut out);
            cur.pop();
        }
        out
    }

    fn extend_chains(&self, k: usize, strict: bool, cur: &mut Chain, out: &mut Vec<Chain>) {
        if cur.len() == k + 1 {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().expect("chain is nonempty");
        for j in 0..self.len() {
            let ok = if strict { self.lt(last, j) } else { self.leq(last, j) };
            if ok {
                cur.push(j);
                self.extend_chains(k, strict, cur, out);
                cur.pop();
            }
        }
    }

    pub fn chain_ids(&self, k: usize, strict: bool) -> Vec<Vec<String>> {
        self.chains(k, strict).iter().map(|c| self.ids_of(c)).collect()
    }

    pub fn ids_of(&self, chain: &[usize]) -> Vec<String> {
        chain.iter().map(|&i| self.id(i).to_string()).collect()
    }

    /// Strata with nothing strictly below them, in id order.
    pub fn minimal_strata(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| !(0..self.len()).any(|i| self.lt(i, j))).collect()
    }

    pub fn minimal_ids(&self) -> Vec<String> {
        self.minimal_strata().into_iter().map(|i| self.id(i).to_string()).collect()
    }

    /// The stratum below every other stratum, if there is one.
    pub fn unique_minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(i, j)))
    }

    /// Strata whose stabilizer is the whole Lie algebra.
    pub fn fixed_strata(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.stab(i).dim() == self.torus_dim).collect()
    }

    /// Number of elements in the longest strict chain.
    pub fn height(&self) -> usize {
        let n = self.len();
        let mut longest = vec![1usize; n];
        // Larger stabilizers come first along every chain.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.stab(i).dim()));
        for &j in &order {
            for i in 0..n {
                if self.lt(i, j) {
                    longest[j] = longest[j].max(longest[i] + 1);
                }
            }
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// Upward closed: `X ∈ set` and `X ⪯ Y` imply `Y ∈ set`. On failure
    /// returns a witness `(X, Y)`.
    pub fn openness_witness(&self, set: &BTreeSet<usize>) -> Option<(usize, usize)> {
        for &x in set {
            for y in 0..self.len() {
                if self.leq(x, y) && !set.contains(&y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Induced sub-poset on the given strata, same stabilizers.
    pub fn subspace(&self, set: &BTreeSet<usize>) -> Result<StratSpace, StratError> {
        let strata = set.iter().map(|&i| (self.id(i).to_string(), self.stab(i).clone())).collect();
        let mut rel = Vec::new();
        for &i in set {
            for &j in set {
                if self.lt(i, j) {
                    rel.push((self.id(i).to_string(), self.id(j).to_string()));
                }
            }
        }
        StratSpace::from_covers(self.torus_dim, strata, &rel)
    }

    /// Stratum count per stabilizer dimension and cover count per pair of
    /// stabilizer dimensions; equal for isomorphic spaces.
    pub fn invariants(&self) -> SpaceInvariants {
        let mut strata_by_dim = BTreeMap::new();
        for s in &self.strata {
            *strata_by_dim.entry(s.stab.dim()).or_insert(0) += 1;
        }
        let mut covers_by_dims = BTreeMap::new();
        for &(a, b) in &self.covers {
            *covers_by_dims.entry((self.stab(a).dim(), self.stab(b).dim())).or_insert(0) += 1;
        }
        SpaceInvariants { strata_by_dim, covers_by_dims }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceInvariants {
    pub strata_by_dim: BTreeMap<usize, usize>,
    pub covers_by_dims: BTreeMap<(usize, usize), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    Unmapped { source: String },
    UnknownTarget { source: String, target: String },
    AmbientMismatch { source_dim: usize, target_dim: usize },
    NotMonotone { x: String, y: String, fx: String, fy: String },
    StabilizerNotContained { x: String, fx: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismReport {
    pub violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `f` is monotone and that `stab(X) ⊆ stab(f(X))` for every source stratum.
pub fn poset_morphism_check(
    f: &BTreeMap<String, String>,
    source: &StratSpace,
    target: &StratSpace,
) -> MorphismReport {
    let mut violations = Vec::new();
    if source.torus_dim() != target.torus_dim() {
        violations.push(MorphismViolation::AmbientMismatch {
            source_dim: source.torus_dim(),
            target_dim: target.torus_dim(),
        });
        return MorphismReport { violations };
    }
    let mut image = vec![None; source.len()];
    for (i, s) in source.strata().iter().enumerate() {
        match f.get(&s.id) {
            None => violations.push(MorphismViolation::Unmapped { source: s.id.clone() }),
            Some(t) => match target.index_of(t) {
                None => violations.push(MorphismViolation::UnknownTarget { source: s.id.clone(), target: t.clone() }),
                Some(j) => image[i] = Some(j),
            },
        }
    }
    for x in 0..source.len() {
        let Some(fx) = image[x] else { continue };
        if !target.stab(fx).contains(source.stab(x)) {
            violations.push(MorphismViolation::StabilizerNotContained {
                x: source.id(x).to_string(),
                fx: target.id(fx).to_string(),
            });
        }
        for y in 0..source.len() {
            let Some(fy) = image[y] else { continue };
            if source.lt(x, y) && !target.leq(fx, fy) {
                violations.push(MorphismViolation::NotMonotone {
                    x: source.id(x).to_string(),
                    y: source.id(y).to_string(),
                    fx: target.id(fx).to_string(),
                    fy: target.id(fy).to_string(),
                });
            }
        }
    }
    MorphismReport { violations }
}
