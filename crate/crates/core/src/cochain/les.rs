//! Long exact sequences, checked by rank counting at every node.

use std::collections::BTreeSet;

use super::{differential_between, induced_rank, linear_cohomology, ChainBasis, CochainError, LinearCohomology};
use crate::coeffsys::{ses_check, CoefficientSystem, SystemMorphism};
use crate::ratlin::{solve, RatMatrix, RatVec, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LesNode {
    pub label: String,
    pub degree: usize,
    pub dim: usize,
    /// Rank of the map into this node.
    pub rank_in: usize,
    /// Rank of the map out of this node.
    pub rank_out: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LesReport {
    pub strict: bool,
    pub max_degree: usize,
    pub nodes: Vec<LesNode>,
}

impl LesReport {
    pub fn exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.dim).collect()
    }
}

/// Cohomology of one of the three complexes at one degree.
struct Slot {
    len: usize,
    h: LinearCohomology,
}

fn slot(d_in: RatMatrix, d_out: RatMatrix) -> Slot {
    Slot { len: d_out.cols(), h: linear_cohomology(&d_in, &d_out) }
}

type ChainFn<'a> = Box<dyn Fn(usize, &RatVec) -> RatVec + 'a>;

/// Builds the report for `… → A^k → B^k → C^k → A^{k+1} → …` from
/// per-degree slots for degrees `0..=max+1`.
fn assemble(labels: [&str; 3], levels: &[[Slot; 3]], maps: [ChainFn<'_>; 3], strict: bool) -> LesReport {
    let max = levels.len() - 2;
    let rank_of = |k: usize, from: usize, to_level: usize, to: usize| -> usize {
        let images: Vec<RatVec> = levels[k][from].h.reps.iter().map(|r| maps[from](k, r)).collect();
        let tgt = &levels[to_level][to];
        induced_rank(tgt.len, &images, &tgt.h.boundaries)
    };
    let mut ranks = Vec::new();
    for k in 0..=max {
        ranks.push([rank_of(k, 0, k, 1), rank_of(k, 1, k, 2), rank_of(k, 2, k + 1, 0)]);
    }
    let mut nodes = Vec::new();
    for k in 0..=max {
        for (i, label) in labels.iter().enumerate() {
            let rank_in = match i {
                0 if k == 0 => 0,
                0 => ranks[k - 1][2],
                _ => ranks[k][i - 1],
            };
            let rank_out = ranks[k][i];
            let dim = levels[k][i].h.dim;
            nodes.push(LesNode {
                label: format!("{label}^{k}"),
                degree: k,
                dim,
                rank_in,
                rank_out,
                exact: dim == rank_in + rank_out,
            });
        }
    }
    LesReport { strict, max_degree: max, nodes }
}

fn embed(len: usize, coords: &[usize], x: &[Rational]) -> RatVec {
    let mut out = vec![Rational::default(); len];
    for (&c, v) in coords.iter().zip(x) {
        out[c] = v.clone();
    }
    out
}

fn pick(coords: &[usize], x: &[Rational]) -> RatVec {
    coords.iter().map(|&c| x[c].clone()).collect()
}

/// Checks `… → HA^k(M,N) → HA^k(M) → HA^k(N) → HA^{k+1}(M,N) → …` for
/// degrees `0..=max_degree` (default: one past the longest strict chain).
pub fn les_pair_check(
    v: &CoefficientSystem,
    n: &BTreeSet<usize>,
    strict: bool,
    max_degree: Option<usize>,
) -> Result<LesReport, CochainError> {
    if let Some(&bad) = n.iter().find(|&&i| i >= v.space().len()) {
        return Err(CochainError::NotUnionOfStrata(format!("#{bad}")));
    }
    let max = max_degree.unwrap_or_else(|| v.space().height());
    let bases: Vec<ChainBasis> = (0..=max + 2).map(|k| ChainBasis::new(v, k, strict)).collect();
    let ds: Vec<RatMatrix> = (0..=max + 1).map(|k| differential_between(v, &bases[k], &bases[k + 1])).collect();
    let in_n = |t: &Vec<usize>| t.iter().all(|x| n.contains(x));
    let rel: Vec<Vec<usize>> = bases.iter().map(|b| b.coords_where(|t| !in_n(t))).collect();
    let sub: Vec<Vec<usize>> = bases.iter().map(|b| b.coords_where(in_n)).collect();
    let all: Vec<Vec<usize>> = bases.iter().map(|b| (0..b.total_dim()).collect()).collect();

    let make = |sel: &Vec<Vec<usize>>, k: usize| {
        let d_in = if k == 0 {
            RatMatrix::zeros(sel[0].len(), 0)
        } else {
            ds[k - 1].select(&sel[k], &sel[k - 1])
        };
        slot(d_in, ds[k].select(&sel[k + 1], &sel[k]))
    };
    let levels: Vec<[Slot; 3]> = (0..=max + 1).map(|k| [make(&rel, k), make(&all, k), make(&sub, k)]).collect();

    let maps: [ChainFn<'_>; 3] = [
        Box::new(|k, x| embed(bases[k].total_dim(), &rel[k], x)),
        Box::new(|k, x| pick(&sub[k], x)),
        Box::new(|k, x| {
            let ext = embed(bases[k].total_dim(), &sub[k], x);
            let dz = ds[k].mul_vec(&ext).expect("shapes chain");
            pick(&rel[k + 1], &dz)
        }),
    ];
    Ok(assemble(["HA(M,N)", "HA(M)", "HA(N)"], &levels, maps, strict))
}

fn apply_blockwise(
    src: &ChainBasis,
    dst: &ChainBasis,
    x: &[Rational],
    mut f: impl FnMut(usize, &[Rational]) -> RatVec,
) -> RatVec {
    let mut out = vec![Rational::default(); dst.total_dim()];
    for (i, t) in src.tuples().iter().enumerate() {
        let y = f(*t.last().expect("tuples are nonempty"), &x[src.range(i)]);
        for (c, val) in dst.range(i).zip(y) {
            out[c] = val;
        }
    }
    out
}

/// Checks the long exact sequence induced by a short exact sequence of
/// coefficient systems `0 → V1 → V2 → V3 → 0`.
pub fn les_coefficients_check(
    f: &SystemMorphism,
    g: &SystemMorphism,
    strict: bool,
    max_degree: Option<usize>,
) -> Result<LesReport, CochainError> {
    if !ses_check(f, g)?.exact() {
        return Err(CochainError::NotExact);
    }
    let systems = [f.source(), f.target(), g.target()];
    let max = max_degree.unwrap_or_else(|| systems[0].space().height());
    let bases: Vec<Vec<ChainBasis>> =
        systems.iter().map(|v| (0..=max + 2).map(|k| ChainBasis::new(v, k, strict)).collect()).collect();
    let ds: Vec<Vec<RatMatrix>> = systems
        .iter()
        .zip(&bases)
        .map(|(v, b)| (0..=max + 1).map(|k| differential_between(v, &b[k], &b[k + 1])).collect())
        .collect();
    let levels: Vec<[Slot; 3]> = (0..=max + 1)
        .map(|k| {
            let mk = |i: usize| {
                let d_in = if k == 0 { RatMatrix::zeros(bases[i][0].total_dim(), 0) } else { ds[i][k - 1].clone() };
                slot(d_in, ds[i][k].clone())
            };
            [mk(0), mk(1), mk(2)]
        })
        .collect();

    let maps: [ChainFn<'_>; 3] = [
        Box::new(|k, x| apply_blockwise(&bases[0][k], &bases[1][k], x, |t, b| f.map(t).mul_vec(b).expect("shape"))),
        Box::new(|k, x| apply_blockwise(&bases[1][k], &bases[2][k], x, |t, b| g.map(t).mul_vec(b).expect("shape"))),
        Box::new(|k, x| {
            let lift = apply_blockwise(&bases[2][k], &bases[1][k], x, |t, b| {
                solve(g.map(t), b).expect("shape").expect("g is surjective")
            });
            let y = ds[1][k].mul_vec(&lift).expect("shapes chain");
            apply_blockwise(&bases[1][k + 1], &bases[0][k + 1], &y, |t, b| {
                solve(f.map(t), b).expect("shape").expect("boundary of a lift lies in the image of f")
            })
        }),
    ];
    Ok(assemble(["HA(V1)", "HA(V2)", "HA(V3)"], &levels, maps, strict))
}
