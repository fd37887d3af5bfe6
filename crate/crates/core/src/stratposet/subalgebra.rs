//! Rational subalgebras of the Lie algebra of a torus, kept in a canonical
//! integer form so that equality of subalgebras is structural equality.
//!
//! The canonical basis of a subspace `V` of `Q^n` is the row Hermite normal
//! form of the saturated lattice `V ∩ Z^n`: pivots positive, entries above
//! each pivot reduced into `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ratlin::{kernel_basis, primitive_integer, rank, solve, RatMatrix, RatVec, Rational};

use super::StratError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subalgebra {
    ambient_dim: usize,
    basis: Vec<Vec<BigInt>>,
}

impl Subalgebra {
    /// Subalgebra spanned by arbitrary integer generators (dependent generators are fine).
    pub fn from_generators(ambient_dim: usize, gens: &[Vec<BigInt>]) -> Result<Self, StratError> {
        for g in gens {
            if g.len() != ambient_dim {
                return Err(StratError::AmbientDim { expected: ambient_dim, found: g.len() });
            }
        }
        Ok(Subalgebra { ambient_dim, basis: saturate(ambient_dim, gens) })
    }

    pub fn from_i64(ambient_dim: usize, gens: &[&[i64]]) -> Result<Self, StratError> {
        let gens: Vec<Vec<BigInt>> =
            gens.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_generators(ambient_dim, &gens)
    }

    pub fn from_rational(ambient_dim: usize, gens: &[RatVec]) -> Result<Self, StratError> {
        let ints: Vec<Vec<BigInt>> = gens.iter().map(|g| primitive_integer(g)).collect();
        Self::from_generators(ambient_dim, &ints)
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        Subalgebra { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subalgebra { ambient_dim, basis: Vec::new() }
    }

    /// `∩ ker α` over the given integer covectors; the full algebra for an empty list.
    pub fn annihilator_of(ambient_dim: usize, covectors: &[Vec<BigInt>]) -> Result<Self, StratError> {
        for c in covectors {
            if c.len() != ambient_dim {
                return Err(StratError::AmbientDim { expected: ambient_dim, found: c.len() });
            }
        }
        if covectors.is_empty() {
            return Ok(Self::full(ambient_dim));
        }
        let m = int_rows_to_matrix(ambient_dim, covectors);
        let ker = kernel_basis(&m);
        Self::from_rational(ambient_dim, &ker)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical integer basis vectors (the columns of the basis matrix).
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_rational(&self) -> Vec<RatVec> {
        self.basis
            .iter()
            .map(|b| b.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }

    /// Basis as an `ambient_dim × dim` rational matrix.
    pub fn basis_matrix(&self) -> RatMatrix {
        RatMatrix::from_cols(self.ambient_dim, &self.basis_rational()).expect("basis vectors have ambient length")
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subalgebra) -> bool {
        if self.ambient_dim != other.ambient_dim {
            return false;
        }
        if other.dim() == 0 {
            return true;
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        rank(&int_rows_to_matrix(self.ambient_dim, &all)) == self.dim()
    }

    pub fn intersect(&self, other: &Subalgebra) -> Subalgebra {
        debug_assert_eq!(self.ambient_dim, other.ambient_dim);
        let a = self.annihilator_covectors();
        let mut all = a;
        all.extend(other.annihilator_covectors());
        Self::annihilator_of(self.ambient_dim, &all).expect("covectors have ambient length")
    }

    /// `self ⊕ other` inside the product torus of dimension `n1 + n2`.
    pub fn direct_sum(&self, other: &Subalgebra) -> Subalgebra {
        let n = self.ambient_dim + other.ambient_dim;
        let mut gens = Vec::new();
        for b in &self.basis {
            let mut v = b.clone();
            v.extend(std::iter::repeat_n(BigInt::zero(), other.ambient_dim));
            gens.push(v);
        }
        for b in &other.basis {
            let mut v = vec![BigInt::zero(); self.ambient_dim];
            v.extend(b.iter().cloned());
            gens.push(v);
        }
        Self::from_generators(n, &gens).expect("direct sum generators have ambient length")
    }

    /// Integer covectors whose common kernel is `self`.
    pub fn annihilator_covectors(&self) -> Vec<Vec<BigInt>> {
        if self.basis.is_empty() {
            return Subalgebra::full(self.ambient_dim).basis;
        }
        let m = int_rows_to_matrix(self.ambient_dim, &self.basis);
        kernel_basis(&m).iter().map(|v| primitive_integer(v)).collect()
    }

    /// For `sub ⊆ self`, the matrix `C` (dim(self) × dim(sub)) with
    /// `basis(sub) = basis(self) · C`. `None` when `sub` is not contained.
    pub fn coordinates_of(&self, sub: &Subalgebra) -> Option<RatMatrix> {
        if self.ambient_dim != sub.ambient_dim {
            return None;
        }
        let b = self.basis_matrix();
        let mut cols = Vec::with_capacity(sub.dim());
        for v in sub.basis_rational() {
            cols.push(solve(&b, &v).expect("ambient lengths agree")?);
        }
        Some(RatMatrix::from_cols(self.dim(), &cols).expect("coordinate vectors have length dim"))
    }
}

fn int_rows_to_matrix(cols: usize, rows: &[Vec<BigInt>]) -> RatMatrix {
    let rows = rows.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
    RatMatrix::from_rows(cols, rows).expect("rows have ambient length")
}

/// Row-reduces the first `ncols` columns of `m` with unimodular integer row
/// operations. Returns the number of nonzero rows in that block; the
/// remaining rows are zero there.
fn integer_echelon(m: &mut [Vec<BigInt>], ncols: usize) -> usize {
    let nrows = m.len();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        while let Some(p) = (r..nrows).filter(|&i| !m[i][c].is_zero()).min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs())) {
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..nrows {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let (head, tail) = m.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = m.split_at_mut(r);
            for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    r
}

/// Hermite normal form (nonzero rows only) of the lattice spanned by `rows`.
fn hnf(ncols: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m = rows.to_vec();
    let r = integer_echelon(&mut m, ncols);
    m.truncate(r);
    m
}

/// Integer basis of `{x ∈ Z^n : A x = 0}` for integer `A` with rows of length `n`.
fn integer_kernel(n: usize, a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let p = a.len();
    let mut aug: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = a.iter().map(|ai| ai[j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let r = integer_echelon(&mut aug, p);
    aug[r..].iter().map(|row| row[p..].to_vec()).collect()
}

/// Canonical basis of the saturation of the span of `gens`.
fn saturate(n: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let nonzero: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let perp: Vec<Vec<BigInt>> = kernel_basis(&int_rows_to_matrix(n, &nonzero))
        .iter()
        .map(|v| primitive_integer(v))
        .collect();
    let lattice = if perp.is_empty() {
        Subalgebra::full(n).basis
    } else {
        integer_kernel(n, &perp)
    };
    hnf(n, &lattice)
}
