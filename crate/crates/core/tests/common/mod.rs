//! Seeded generators of small spaces and coefficient systems.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use assigncoh::builders::presets;
use assigncoh::builders::{build_linear_rep, build_product, build_sphere_product, Built, WeightMatrix};
use assigncoh::coeffsys::CoefficientSystem;
use assigncoh::ratlin::{rat, solve, RatMatrix, RatVec};
use assigncoh::stratposet::{StratSpace, Subalgebra};
use proptest::test_runner::{Config, RngSeed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn rng(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn proptest_config(cases: u32, seed: u64) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

pub fn int_vec(g: &mut Gen, n: usize, r: i64) -> Vec<i64> {
    (0..n).map(|_| g.gen_range(-r..=r)).collect()
}

pub fn rat_matrix(g: &mut Gen, rows: usize, cols: usize, r: i64) -> RatMatrix {
    let data: Vec<RatVec> = (0..rows).map(|_| int_vec(g, cols, r).into_iter().map(rat).collect()).collect();
    RatMatrix::from_rows(cols, data).unwrap()
}

pub fn random_subalgebra(g: &mut Gen, n: usize) -> Subalgebra {
    let k = g.gen_range(0..=n);
    let gens: Vec<Vec<i64>> = (0..k).map(|_| int_vec(g, n, 2)).collect();
    let refs: Vec<&[i64]> = gens.iter().map(|v| v.as_slice()).collect();
    Subalgebra::from_i64(n, &refs).unwrap()
}

/// Random strata with random stabilizers; each strictly decreasing pair is
/// related with probability 0.6.
pub fn random_space(g: &mut Gen) -> Arc<StratSpace> {
    let n = g.gen_range(1..=3);
    let count = g.gen_range(1..=6);
    let strata: Vec<(String, Subalgebra)> = (0..count).map(|i| (format!("s{i}"), random_subalgebra(g, n))).collect();
    let mut rel = Vec::new();
    for (a, ha) in &strata {
        for (b, hb) in &strata {
            if ha.dim() > hb.dim() && ha.contains(hb) && g.gen_bool(0.6) {
                rel.push((a.clone(), b.clone()));
            }
        }
    }
    Arc::new(StratSpace::from_covers(n, strata, &rel).unwrap())
}

pub fn random_weights(g: &mut Gen) -> WeightMatrix {
    let n = g.gen_range(1..=3);
    let d = g.gen_range(1..=4);
    WeightMatrix::new(n, (0..d).map(|_| int_vec(g, n, 2)).collect()).unwrap()
}

pub fn random_linear_rep(g: &mut Gen) -> Built {
    build_linear_rep(&random_weights(g)).unwrap()
}

pub fn random_sphere_product(g: &mut Gen) -> Built {
    let n = g.gen_range(1..=2);
    let m = g.gen_range(1..=3);
    let lambdas: Vec<Vec<i64>> = (0..m).map(|_| int_vec(g, n, 2)).collect();
    build_sphere_product(n, &lambdas).unwrap()
}

/// A small space from one of the builders, chosen at random.
pub fn random_small_built(g: &mut Gen) -> Built {
    match g.gen_range(0..5) {
        0 => random_linear_rep(g),
        1 => random_sphere_product(g),
        2 => presets::polygon([presets::TRIANGLE, presets::SQUARE, presets::PENTAGON][g.gen_range(0..3)]),
        3 => presets::s4_chain(g.gen_range(1..=3)),
        _ => {
            let v = random_space(g);
            let s = Arc::clone(&v);
            (v, CoefficientSystem::moment_system(s))
        }
    }
}

/// Any builder output, including products of two small ones.
pub fn random_built(g: &mut Gen) -> Built {
    if g.gen_bool(0.25) {
        let (a, _) = small_factor(g);
        let (b, _) = small_factor(g);
        build_product(&a, &b).unwrap()
    } else {
        random_small_built(g)
    }
}

/// Factors kept small enough that their products stay cheap.
pub fn small_factor(g: &mut Gen) -> Built {
    match g.gen_range(0..3) {
        0 => {
            let n = g.gen_range(1..=2);
            let d = g.gen_range(1..=2);
            build_linear_rep(&WeightMatrix::new(n, (0..d).map(|_| int_vec(g, n, 2)).collect()).unwrap()).unwrap()
        }
        1 => {
            let n = g.gen_range(1..=2);
            build_sphere_product(n, &[int_vec(g, n, 2)]).unwrap()
        }
        _ => presets::polygon(presets::TRIANGLE),
    }
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.rows();
    let mut cols = Vec::new();
    for j in 0..n {
        let mut e = vec![rat(0); n];
        e[j] = rat(1);
        cols.push(solve(m, &e).unwrap()?);
    }
    let inv = RatMatrix::from_cols(n, &cols).unwrap();
    (inv.mul(m).unwrap() == RatMatrix::identity(n)).then_some(inv)
}

pub fn random_invertible(g: &mut Gen, n: usize) -> (RatMatrix, RatMatrix) {
    loop {
        let m = rat_matrix(g, n, n, 2);
        if let Some(inv) = inverse(&m) {
            return (m, inv);
        }
    }
}

/// `π'(X,Y) = B_Y π(X,Y) B_X^{-1}` for random invertible `B_X`: a generic
/// system isomorphic to `v`.
pub fn gauge_twist(g: &mut Gen, v: &CoefficientSystem) -> CoefficientSystem {
    let sp = v.space();
    let b: Vec<(RatMatrix, RatMatrix)> = (0..sp.len()).map(|x| random_invertible(g, v.dim(x))).collect();
    let given: BTreeMap<(usize, usize), RatMatrix> = sp
        .covers()
        .iter()
        .map(|&(x, y)| ((x, y), b[y].0.mul(v.proj(x, y)).unwrap().mul(&b[x].1).unwrap()))
        .collect();
    CoefficientSystem::from_maps(Arc::clone(v.space_arc()), v.dims().to_vec(), given).unwrap()
}

pub fn random_subset(g: &mut Gen, len: usize) -> BTreeSet<usize> {
    (0..len).filter(|_| g.gen_bool(0.4)).collect()
}

/// Upward closure of a random subset.
pub fn random_open(g: &mut Gen, sp: &StratSpace) -> BTreeSet<usize> {
    let seed = random_subset(g, sp.len());
    (0..sp.len()).filter(|&y| seed.iter().any(|&x| sp.leq(x, y))).collect()
}

pub fn shuffle<T>(g: &mut Gen, v: &mut [T]) {
    v.shuffle(g);
}

pub mod poly {
    use super::*;
    use assigncoh::momentpoly::{recombine, FormCoefficients, MomentPolynomial, Monomial, ScalarPoly};
    use assigncoh::ratlin::Rational;
    use num_bigint::BigInt;
    use num_complex::Complex;
    use num_traits::{One, Zero};

    pub type Cq = Complex<Rational>;

    pub fn random_monomial(g: &mut Gen, d: usize, max_exp: u32) -> Monomial {
        ((0..d).map(|_| g.gen_range(0..=max_exp)).collect(), (0..d).map(|_| g.gen_range(0..=max_exp)).collect())
    }

    pub fn random_scalar_poly(g: &mut Gen, d: usize) -> ScalarPoly {
        let mut p = ScalarPoly::default();
        for _ in 0..g.gen_range(0..=3) {
            p.add_term(random_monomial(g, d, 2), rat(g.gen_range(-4..=4)));
        }
        p
    }

    pub fn random_weights_small(g: &mut Gen) -> WeightMatrix {
        let n = g.gen_range(1..=3);
        let d = g.gen_range(1..=3);
        WeightMatrix::new(n, (0..d).map(|_| int_vec(g, n, 2)).collect()).unwrap()
    }

    /// `Σ_j (z_j f_j + z̄_j g_j) α_j` for random `f_j, g_j`.
    pub fn random_recombined(g: &mut Gen) -> MomentPolynomial {
        let w = random_weights_small(g);
        let fc = random_form_coefficients(g, w.d());
        recombine(&w, &fc)
    }

    pub fn random_form_coefficients(g: &mut Gen, d: usize) -> FormCoefficients {
        FormCoefficients {
            f: (0..d).map(|_| random_scalar_poly(g, d)).collect(),
            g: (0..d).map(|_| random_scalar_poly(g, d)).collect(),
        }
    }

    /// Random `β` per random monomial without a constant term.
    pub fn random_raw(g: &mut Gen) -> MomentPolynomial {
        let w = random_weights_small(g);
        let mut p = MomentPolynomial::zero(w.clone());
        for _ in 0..g.gen_range(1..=3) {
            let m = random_monomial(g, w.d(), 1);
            if m.0.iter().chain(&m.1).all(|&e| e == 0) {
                continue;
            }
            p.add_term(m, int_vec(g, w.n, 2).into_iter().map(rat).collect());
        }
        p
    }

    fn pow(z: &Cq, e: u32) -> Cq {
        (0..e).fold(Cq::one(), |acc, _| acc * z.clone())
    }

    /// `Ψ(z) ∈ ℂ^n`, with `z̄` the complex conjugate.
    pub fn evaluate(p: &MomentPolynomial, z: &[Cq]) -> Vec<Cq> {
        let mut out = vec![Cq::zero(); p.weights.n];
        for ((k, l), beta) in &p.terms {
            let mut m = Cq::one();
            for i in 0..z.len() {
                m = m * pow(&z[i], k[i]) * pow(&z[i].conj(), l[i]);
            }
            for (o, b) in out.iter_mut().zip(beta) {
                *o = o.clone() + m.clone() * Cq::new(b.clone(), Rational::zero());
            }
        }
        out
    }

    fn random_nonzero_rational(g: &mut Gen) -> Rational {
        loop {
            let num = g.gen_range(-9i64..=9);
            if num != 0 {
                return Rational::new(BigInt::from(num), BigInt::from(g.gen_range(1i64..=5)));
            }
        }
    }

    /// Samples `points` rational points of every cell `(ℂ^×)^I` and returns
    /// the first cell `I` (as a bitmask) where some `ξ ∈ ∩_{i∈I} ker α_i`
    /// pairs nontrivially with `Ψ(z)`.
    pub fn first_nonvanishing_cell(g: &mut Gen, p: &MomentPolynomial, points: usize) -> Option<u32> {
        let w = &p.weights;
        let d = w.d();
        for mask in 0u32..(1 << d) {
            let cov: Vec<Vec<BigInt>> = (0..d)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| w.weights[i].iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let h = Subalgebra::annihilator_of(w.n, &cov).unwrap();
            for _ in 0..points {
                let z: Vec<Cq> = (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            Cq::new(random_nonzero_rational(g), random_nonzero_rational(g))
                        } else {
                            Cq::zero()
                        }
                    })
                    .collect();
                let val = evaluate(p, &z);
                for xi in h.basis_rational() {
                    let pairing = val.iter().zip(&xi).fold(Cq::zero(), |acc, (a, b)| acc + a.clone() * Cq::new(b.clone(), Rational::zero()));
                    if !pairing.is_zero() {
                        return Some(mask);
                    }
                }
            }
        }
        None
    }
}
