//! Chain homotopies on the full complex.
//!
//! Write a weak tuple as runs `X_0^{k_0} … X_l^{k_l}` of repeated strata.
//! `L` duplicates one entry of each run in turn,
//! `(Lφ)(X_0^{k_0},…) = Σ_j (-1)^{k_0+…+k_{j-1}} φ(…, X_j^{k_j+1}, …)`,
//! and satisfies `dL + Ld = Π`, where `Π` scales each tuple by its fatness
//! (the number of runs of length > 1). `Q` prepends the minimum stratum and
//! satisfies `dQ + Qd = id` in positive degrees.

use num_traits::One;

use super::{ChainBasis, CochainError};
use crate::coeffsys::CoefficientSystem;
use crate::ratlin::{RatMatrix, Rational};

/// Number of runs of length at least two.
pub fn fatness(t: &[usize]) -> usize {
    runs(t).iter().filter(|&&(_, len)| len > 1).count()
}

fn runs(t: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, &x) in t.iter().enumerate() {
        match out.last_mut() {
            Some((start, len)) if t[*start] == x => *len += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

fn copy_block(m: &mut RatMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>, s: &Rational) {
    for (r, c) in rows.zip(cols) {
        m[(r, c)] += s;
    }
}

/// `L : C^k → C^{k-1}` on the full complex.
pub fn homotopy_l(v: &CoefficientSystem, k: usize) -> Result<RatMatrix, CochainError> {
    if k == 0 {
        return Err(CochainError::DegreeZero);
    }
    let src = ChainBasis::new(v, k, false);
    let dst = ChainBasis::new(v, k - 1, false);
    let mut m = RatMatrix::zeros(dst.total_dim(), src.total_dim());
    for (si, s) in dst.tuples().iter().enumerate() {
        for (start, _) in runs(s) {
            let mut t = s.clone();
            t.insert(start, s[start]);
            let ti = src.position(&t).expect("weak tuples are closed under repetition");
            let sign = if start % 2 == 0 { Rational::one() } else { -Rational::one() };
            copy_block(&mut m, dst.range(si), src.range(ti), &sign);
        }
    }
    Ok(m)
}

/// Diagonal operator `Π` on the full `C^k`.
pub fn fatness_operator(v: &CoefficientSystem, k: usize) -> RatMatrix {
    let b = ChainBasis::new(v, k, false);
    let mut m = RatMatrix::zeros(b.total_dim(), b.total_dim());
    for (i, t) in b.tuples().iter().enumerate() {
        let f = Rational::from_integer(fatness(t).into());
        copy_block(&mut m, b.range(i), b.range(i), &f);
    }
    m
}

/// `Q : C^k → C^{k-1}`, `(Qφ)(Y_1..Y_k) = φ(X_0, Y_1..Y_k)` for the unique
/// minimal stratum `X_0`.
pub fn homotopy_q(v: &CoefficientSystem, k: usize) -> Result<RatMatrix, CochainError> {
    if k == 0 {
        return Err(CochainError::DegreeZero);
    }
    let x0 = v.space().unique_minimum().ok_or(CochainError::NoUniqueMinimum)?;
    let src = ChainBasis::new(v, k, false);
    let dst = ChainBasis::new(v, k - 1, false);
    let mut m = RatMatrix::zeros(dst.total_dim(), src.total_dim());
    let one = Rational::one();
    for (si, s) in dst.tuples().iter().enumerate() {
        let mut t = Vec::with_capacity(k + 1);
        t.push(x0);
        t.extend_from_slice(s);
        let ti = src.position(&t).expect("minimum lies below every stratum");
        copy_block(&mut m, dst.range(si), src.range(ti), &one);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fatness_counts_repeated_runs() {
        assert_eq!(fatness(&[0, 1, 2]), 0);
        assert_eq!(fatness(&[0, 0, 1, 2, 2, 2]), 2);
        assert_eq!(fatness(&[3, 3]), 1);
        assert_eq!(runs(&[0, 0, 1, 2, 2]), vec![(0, 2), (2, 1), (3, 2)]);
    }
}
