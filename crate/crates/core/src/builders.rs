//! Constructors of stratification posets and moment systems from geometric
//! data: linear representations, products of spheres, Delzant polytopes,
//! products, and hand-written descriptions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::coeffsys::{CoeffError, CoefficientSystem};
use crate::description::SpaceDescription;
use crate::ratlin::{parse_rational, rank, LinAlgError, RatMatrix, RatVec};
use crate::stratposet::{StratError, StratSpace, Subalgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Strat(#[from] StratError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Rational(#[from] LinAlgError),
    #[error("malformed polytope: {0}")]
    MalformedPolytope(String),
    #[error("{0}")]
    Shape(String),
    #[error("input too large: {0}")]
    TooLarge(String),
}

pub type Built = (Arc<StratSpace>, CoefficientSystem);

/// Weights `α_1..α_d ∈ ℤ^n` of a linear torus action on `ℂ^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    pub n: usize,
    pub weights: Vec<Vec<i64>>,
}

impl WeightMatrix {
    pub fn new(n: usize, weights: Vec<Vec<i64>>) -> Result<Self, BuildError> {
        if let Some(w) = weights.iter().find(|w| w.len() != n) {
            return Err(BuildError::Shape(format!("weight {w:?} does not have length {n}")));
        }
        Ok(WeightMatrix { n, weights })
    }

    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn weight_rational(&self, i: usize) -> RatVec {
        self.weights[i].iter().map(|&x| crate::ratlin::rat(x)).collect()
    }
}

/// Facets with inward normals and vertices with their incident facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeData {
    pub n: usize,
    pub facets: Vec<(String, Vec<i64>)>,
    pub vertices: Vec<(String, Vec<String>)>,
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn moment(space: StratSpace) -> Built {
    let space = Arc::new(space);
    let v = CoefficientSystem::moment_system(Arc::clone(&space));
    (space, v)
}

const MAX_COORDINATES: usize = 16;

/// Strata of `ℂ^d`: one per distinct `𝔤_I = ∩_{i∈I} ker α_i`, ordered by
/// reverse inclusion. A stratum is named `I{…}` after the largest index set
/// (1-based) with that stabilizer.
pub fn build_linear_rep(w: &WeightMatrix) -> Result<Built, BuildError> {
    let d = w.d();
    if d > MAX_COORDINATES {
        return Err(BuildError::TooLarge(format!("{d} coordinates")));
    }
    let mut largest: BTreeMap<Subalgebra, u32> = BTreeMap::new();
    for mask in 0u32..(1 << d) {
        let covectors: Vec<Vec<BigInt>> =
            (0..d).filter(|i| mask >> i & 1 == 1).map(|i| big(&w.weights[i])).collect();
        let h = Subalgebra::annihilator_of(w.n, &covectors)?;
        *largest.entry(h).or_insert(0) |= mask;
    }
    let name = |mask: u32| {
        let idx: Vec<String> = (0..d).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
        format!("I{{{}}}", idx.join(","))
    };
    let strata: Vec<(String, Subalgebra)> = largest.iter().map(|(h, &m)| (name(m), h.clone())).collect();
    let mut rel = Vec::new();
    for (a, ha) in &strata {
        for (b, hb) in &strata {
            if a != b && ha.contains(hb) {
                rel.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(moment(StratSpace::from_covers(w.n, strata, &rel)?))
}

const MAX_SPHERES: usize = 10;

/// `(S^2)^m` with `T^n` acting on the `j`-th sphere through `λ_j`. Cells are
/// labelled by `N`, `S` (the poles) or `O` (the rest) per factor; cells with
/// equal stabilizers that meet in closure merge into one stratum, named after
/// its cell with fewest `O`s (then lexicographically least).
pub fn build_sphere_product(n: usize, lambdas: &[Vec<i64>]) -> Result<Built, BuildError> {
    let m = lambdas.len();
    if m > MAX_SPHERES {
        return Err(BuildError::TooLarge(format!("{m} sphere factors")));
    }
    if let Some(l) = lambdas.iter().find(|l| l.len() != n) {
        return Err(BuildError::Shape(format!("covector {l:?} does not have length {n}")));
    }
    let count = 3usize.pow(m as u32);
    let label = |c: usize| -> Vec<u8> {
        let mut c = c;
        (0..m)
            .map(|_| {
                let x = c % 3;
                c /= 3;
                x as u8
            })
            .collect()
    };
    let cells: Vec<Vec<u8>> = (0..count).map(label).collect();
    let encode = |l: &[u8]| l.iter().rev().fold(0usize, |acc, &x| acc * 3 + x as usize);
    let stabs: Vec<Subalgebra> = cells
        .iter()
        .map(|c| {
            let covs: Vec<Vec<BigInt>> = (0..m).filter(|&j| c[j] == 2).map(|j| big(&lambdas[j])).collect();
            Subalgebra::annihilator_of(n, &covs)
        })
        .collect::<Result<_, _>>()?;
    let upper_covers = |i: usize| -> Vec<usize> {
        (0..m)
            .filter(|&j| cells[i][j] != 2)
            .map(|j| {
                let mut c = cells[i].clone();
                c[j] = 2;
                encode(&c)
            })
            .collect()
    };
    let mut uf = UnionFind::<usize>::new(count);
    for i in 0..count {
        for j in upper_covers(i) {
            if stabs[i] == stabs[j] {
                uf.union(i, j);
            }
        }
    }
    let text = |c: &[u8]| -> String { c.iter().map(|&x| ['N', 'S', 'O'][x as usize]).collect() };
    let mut name_of: HashMap<usize, (usize, String)> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let key = (c.iter().filter(|&&x| x == 2).count(), text(c));
        let e = name_of.entry(uf.find(i)).or_insert_with(|| key.clone());
        if key < *e {
            *e = key;
        }
    }
    let comp_name = |i: usize| name_of[&uf.find(i)].1.clone();
    let mut strata: BTreeMap<String, Subalgebra> = BTreeMap::new();
    let mut rel: BTreeSet<(String, String)> = BTreeSet::new();
    for i in 0..count {
        strata.entry(comp_name(i)).or_insert_with(|| stabs[i].clone());
        for j in upper_covers(i) {
            let (a, b) = (comp_name(i), comp_name(j));
            if a != b {
                rel.insert((a, b));
            }
        }
    }
    let rel: Vec<(String, String)> = rel.into_iter().collect();
    Ok(moment(StratSpace::from_covers(n, strata.into_iter().collect(), &rel)?))
}

/// Face poset of a simple polytope from vertex–facet incidences. Each face
/// is the set of vertices sharing a set of facets; its stabilizer is the
/// span of the normals of the facets containing it. A face with a single
/// vertex takes the vertex id, the whole polytope is `interior`, and other
/// faces are named by their facet ids joined with `&`.
pub fn build_polytope(p: &PolytopeData) -> Result<Built, BuildError> {
    let bad = |m: String| BuildError::MalformedPolytope(m);
    let mut facet_index = HashMap::new();
    for (i, (id, normal)) in p.facets.iter().enumerate() {
        if normal.len() != p.n {
            return Err(bad(format!("normal of facet {id:?} does not have length {}", p.n)));
        }
        if facet_index.insert(id.clone(), i).is_some() {
            return Err(bad(format!("duplicate facet id {id:?}")));
        }
    }
    let mut incidence: Vec<BTreeSet<usize>> = Vec::new();
    for (vid, fs) in &p.vertices {
        let set: BTreeSet<usize> = fs
            .iter()
            .map(|f| facet_index.get(f).copied().ok_or_else(|| bad(format!("vertex {vid:?}: unknown facet {f:?}"))))
            .collect::<Result<_, _>>()?;
        if set.len() != p.n || fs.len() != p.n {
            return Err(bad(format!("vertex {vid:?} must lie on exactly {} distinct facets", p.n)));
        }
        let normals: Vec<RatVec> = set.iter().map(|&f| p.facets[f].1.iter().map(|&x| crate::ratlin::rat(x)).collect()).collect();
        if rank(&RatMatrix::from_rows(p.n, normals).expect("normal lengths checked")) != p.n {
            return Err(bad(format!("facet normals at vertex {vid:?} are linearly dependent")));
        }
        if incidence.contains(&set) {
            return Err(bad(format!("vertex {vid:?} repeats the facets of another vertex")));
        }
        incidence.push(set);
    }
    if incidence.is_empty() {
        return Err(bad("no vertices".into()));
    }
    let closure = |s: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut out: Option<BTreeSet<usize>> = None;
        for inc in incidence.iter().filter(|inc| s.is_subset(inc)) {
            out = Some(match out {
                None => inc.clone(),
                Some(o) => o.intersection(inc).copied().collect(),
            });
        }
        out.expect("s lies inside some vertex incidence")
    };
    let mut faces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for inc in &incidence {
        let list: Vec<usize> = inc.iter().copied().collect();
        for mask in 0u32..(1 << list.len()) {
            let s: BTreeSet<usize> = (0..list.len()).filter(|i| mask >> i & 1 == 1).map(|i| list[i]).collect();
            faces.insert(closure(&s));
        }
    }
    let name = |f: &BTreeSet<usize>| -> String {
        if let Some(v) = incidence.iter().position(|inc| inc == f) {
            p.vertices[v].0.clone()
        } else if f.is_empty() {
            "interior".into()
        } else {
            f.iter().map(|&i| p.facets[i].0.as_str()).collect::<Vec<_>>().join("&")
        }
    };
    let mut strata = Vec::new();
    for f in &faces {
        let gens: Vec<Vec<BigInt>> = f.iter().map(|&i| big(&p.facets[i].1)).collect();
        strata.push((name(f), Subalgebra::from_generators(p.n, &gens)?));
    }
    let mut rel = Vec::new();
    for a in &faces {
        for b in &faces {
            if a != b && b.is_subset(a) {
                rel.push((name(a), name(b)));
            }
        }
    }
    Ok(moment(StratSpace::from_covers(p.n, strata, &rel)?))
}

/// `M_1 × M_2` with the product torus; strata `a*b` with stabilizer
/// `stab(a) ⊕ stab(b)`, ordered componentwise.
pub fn build_product(s1: &StratSpace, s2: &StratSpace) -> Result<Built, BuildError> {
    let name = |a: usize, b: usize| format!("{}*{}", s1.id(a), s2.id(b));
    let mut strata = Vec::new();
    let mut rel = Vec::new();
    for a in 0..s1.len() {
        for b in 0..s2.len() {
            strata.push((name(a, b), s1.stab(a).direct_sum(s2.stab(b))));
            for &(x, y) in s1.covers().iter().filter(|c| c.0 == a) {
                rel.push((name(x, b), name(y, b)));
            }
            for &(x, y) in s2.covers().iter().filter(|c| c.0 == b) {
                rel.push((name(a, x), name(a, y)));
            }
        }
    }
    Ok(moment(StratSpace::from_covers(s1.torus_dim() + s2.torus_dim(), strata, &rel)?))
}

/// Validated space from a description. Without a `coefficients` block the
/// moment system is attached; otherwise the generic system it describes.
pub fn build_from_description(doc: &SpaceDescription) -> Result<Built, BuildError> {
    let mut strata = Vec::new();
    for s in &doc.strata {
        let gens: Vec<Vec<BigInt>> = s.stabilizer_basis.iter().map(|g| big(g)).collect();
        strata.push((s.id.clone(), Subalgebra::from_generators(doc.torus_dim, &gens)?));
    }
    let space = Arc::new(StratSpace::from_covers(doc.torus_dim, strata, &doc.covers)?);
    let Some(c) = &doc.coefficients else {
        let v = CoefficientSystem::moment_system(Arc::clone(&space));
        return Ok((space, v));
    };
    let index = |id: &str| space.index_of(id).ok_or_else(|| StratError::UnknownId(id.to_string()));
    let mut dims = vec![None; space.len()];
    for (id, &d) in &c.dims {
        dims[index(id)?] = Some(d);
    }
    let dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| BuildError::Shape(format!("no dimension given for stratum {:?}", space.id(i)))))
        .collect::<Result<_, _>>()?;
    let mut given = BTreeMap::new();
    for p in &c.projections {
        let (x, y) = (index(&p.from)?, index(&p.to)?);
        let rows: Vec<RatVec> = p
            .matrix
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let m = RatMatrix::from_rows(dims[x], rows)
            .map_err(|_| BuildError::Shape(format!("projection {:?} -> {:?} has ragged rows", p.from, p.to)))?;
        given.insert((x, y), m);
    }
    let v = CoefficientSystem::from_maps(Arc::clone(&space), dims, given)?;
    Ok((space, v))
}

/// Spaces from the worked examples, plus standard Delzant polytopes.
pub mod presets {
    use super::*;
    use crate::description::StratumDescription;

    fn desc(torus_dim: usize, strata: &[(&str, &[&[i64]])], covers: &[(&str, &str)]) -> SpaceDescription {
        SpaceDescription {
            torus_dim,
            strata: strata
                .iter()
                .map(|(id, gens)| StratumDescription {
                    id: id.to_string(),
                    stabilizer_basis: gens.iter().map(|g| g.to_vec()).collect(),
                })
                .collect(),
            covers: covers.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            coefficients: None,
        }
    }

    /// `T^2` acting on `CP^2` by `[z0 : t1 z1 : t2 z2]`: fixed points `p0, p1, p2`,
    /// edge spheres `e01, e02, e12`, and the open stratum.
    pub fn cp2_description() -> SpaceDescription {
        const FULL: &[&[i64]] = &[&[1, 0], &[0, 1]];
        desc(
            2,
            &[
                ("p0", FULL),
                ("p1", FULL),
                ("p2", FULL),
                ("e01", &[&[0, 1]]),
                ("e02", &[&[1, 0]]),
                ("e12", &[&[1, 1]]),
                ("open", &[]),
            ],
            &[
                ("p0", "e01"),
                ("p1", "e01"),
                ("p0", "e02"),
                ("p2", "e02"),
                ("p1", "e12"),
                ("p2", "e12"),
                ("e01", "open"),
                ("e02", "open"),
                ("e12", "open"),
            ],
        )
    }

    pub fn cp2() -> Built {
        build_from_description(&cp2_description()).expect("valid preset")
    }

    /// `T^2` rotating the two complex factors of `S^4 ⊂ ℂ × ℂ × ℝ`. `x1` is
    /// the punctured sphere fixed by the first circle (stabilizer `span e1`),
    /// `x2` the one fixed by the second; both contain both poles in their closure.
    pub fn s4_description() -> SpaceDescription {
        s4_chain_description(1)
    }

    pub fn s4() -> Built {
        build_from_description(&s4_description()).expect("valid preset")
    }

    /// `k` plumbed copies of `S^4 × D^4`, with fixed points `f0..fk`. The
    /// sets fixed by one circle glue across the plumbing, so there is still
    /// one stratum per circle. For `k = 1` the fixed points are named
    /// `north` and `south`.
    pub fn s4_chain_description(k: usize) -> SpaceDescription {
        let fixed: Vec<String> =
            if k == 1 { vec!["north".into(), "south".into()] } else { (0..=k).map(|i| format!("f{i}")).collect() };
        let mut strata: Vec<StratumDescription> = fixed
            .iter()
            .map(|id| StratumDescription { id: id.clone(), stabilizer_basis: vec![vec![1, 0], vec![0, 1]] })
            .collect();
        strata.push(StratumDescription { id: "x1".into(), stabilizer_basis: vec![vec![1, 0]] });
        strata.push(StratumDescription { id: "x2".into(), stabilizer_basis: vec![vec![0, 1]] });
        strata.push(StratumDescription { id: "open".into(), stabilizer_basis: vec![] });
        let mut covers = Vec::new();
        for f in &fixed {
            covers.push((f.clone(), "x1".to_string()));
            covers.push((f.clone(), "x2".to_string()));
        }
        covers.push(("x1".into(), "open".into()));
        covers.push(("x2".into(), "open".into()));
        SpaceDescription { torus_dim: 2, strata, covers, coefficients: None }
    }

    pub fn s4_chain(k: usize) -> Built {
        build_from_description(&s4_chain_description(k)).expect("valid preset")
    }

    /// `(S^2)^3` with `(a, b)` acting by `(a·u, b·v, ab^{-1}·w)`.
    pub fn s2_cube() -> Built {
        build_sphere_product(2, &[vec![1, 0], vec![0, 1], vec![1, -1]]).expect("valid preset")
    }

    /// Polygon with facets `f1..fm` in cyclic order and vertices `v1..vm`,
    /// `vi` joining `fi` and the next facet.
    pub fn polygon_data(normals: &[[i64; 2]]) -> PolytopeData {
        let m = normals.len();
        PolytopeData {
            n: 2,
            facets: normals.iter().enumerate().map(|(i, v)| (format!("f{}", i + 1), v.to_vec())).collect(),
            vertices: (0..m)
                .map(|i| (format!("v{}", i + 1), vec![format!("f{}", i + 1), format!("f{}", (i + 1) % m + 1)]))
                .collect(),
        }
    }

    pub const TRIANGLE: &[[i64; 2]] = &[[1, 0], [0, 1], [-1, -1]];
    pub const SQUARE: &[[i64; 2]] = &[[1, 0], [0, 1], [-1, 0], [0, -1]];
    /// `{x ≥ 0, y ≥ 0, x ≤ 2, x + y ≤ 3, y ≤ 2}`.
    pub const PENTAGON: &[[i64; 2]] = &[[1, 0], [0, 1], [-1, 0], [-1, -1], [0, -1]];
    pub const HEXAGON: &[[i64; 2]] = &[[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]];

    pub fn polygon(normals: &[[i64; 2]]) -> Built {
        build_polytope(&polygon_data(normals)).expect("valid preset")
    }

    /// Unit interval: two fixed points of a circle action on `S^2`.
    pub fn segment_data() -> PolytopeData {
        PolytopeData {
            n: 1,
            facets: vec![("lo".into(), vec![1]), ("hi".into(), vec![-1])],
            vertices: vec![("a".into(), vec!["lo".into()]), ("b".into(), vec!["hi".into()])],
        }
    }

    /// `[0,1]^3` with facets `x+` (inward normal `e1`, at `x = 0`), `x-`, and so on.
    pub fn cube_data() -> PolytopeData {
        let axes = ['x', 'y', 'z'];
        let mut facets = Vec::new();
        for (i, a) in axes.iter().enumerate() {
            let mut e = vec![0; 3];
            e[i] = 1;
            facets.push((format!("{a}+"), e.clone()));
            facets.push((format!("{a}-"), e.iter().map(|x| -x).collect()));
        }
        let mut vertices = Vec::new();
        for mask in 0..8u32 {
            let signs: Vec<char> = (0..3).map(|i| if mask >> i & 1 == 0 { '+' } else { '-' }).collect();
            let id: String = std::iter::once('v').chain(signs.iter().copied()).collect();
            vertices.push((id, (0..3).map(|i| format!("{}{}", axes[i], signs[i])).collect()));
        }
        PolytopeData { n: 3, facets, vertices }
    }

    pub fn cube() -> Built {
        build_polytope(&cube_data()).expect("valid preset")
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;
    use crate::coeffsys::check_functor;

    fn ids(sp: &StratSpace) -> Vec<&str> {
        sp.strata().iter().map(|s| s.id.as_str()).collect()
    }

    #[test]
    fn circle_on_c2_with_opposite_weights() {
        let (sp, v) = build_linear_rep(&WeightMatrix::new(1, vec![vec![1], vec![-1]]).unwrap()).unwrap();
        assert_eq!(ids(&sp), vec!["I{1,2}", "I{}"]);
        assert_eq!(v.dims(), &[0, 1]);
        assert_eq!(sp.unique_minimum(), sp.index_of("I{}"));
    }

    #[test]
    fn coordinate_t2_action_is_a_diamond() {
        let (sp, _) = build_linear_rep(&WeightMatrix::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap()).unwrap();
        assert_eq!(sp.len(), 4);
        assert_eq!(sp.covers().len(), 4);
        assert_eq!(sp.height(), 3);
    }

    #[test]
    fn trivial_weight_gives_one_stratum() {
        let (sp, v) = build_linear_rep(&WeightMatrix::new(3, vec![vec![0, 0, 0]]).unwrap()).unwrap();
        assert_eq!(sp.len(), 1);
        assert_eq!(v.dims(), &[3]);
    }

    #[test]
    fn twisted_sphere_cube_counts() {
        let (sp, v) = s2_cube();
        let inv = sp.invariants();
        assert_eq!(inv.strata_by_dim.get(&2), Some(&8));
        assert_eq!(inv.strata_by_dim.get(&1), Some(&12));
        assert_eq!(inv.strata_by_dim.get(&0), Some(&1));
        assert!(check_functor(&v).passes());
    }

    #[test]
    fn single_sphere_has_poles_and_open_cell() {
        let (sp, _) = build_sphere_product(1, &[vec![1]]).unwrap();
        assert_eq!(ids(&sp), vec!["N", "O", "S"]);
    }

    #[test]
    fn triangle_matches_cp2_invariants() {
        let (tri, _) = polygon(TRIANGLE);
        let (cp2, _) = cp2();
        assert_eq!(tri.invariants(), cp2.invariants());
    }

    #[test]
    fn square_matches_sphere_square() {
        let (sq, _) = polygon(SQUARE);
        let (s2s2, _) = build_sphere_product(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(sq.invariants(), s2s2.invariants());
    }

    #[test]
    fn cube_faces() {
        let (sp, _) = cube();
        assert_eq!(sp.len(), 8 + 12 + 6 + 1);
        assert_eq!(sp.height(), 4);
    }

    #[test]
    fn malformed_polytopes_are_rejected() {
        let mut p = polygon_data(SQUARE);
        p.vertices[0].1.pop();
        assert!(matches!(build_polytope(&p), Err(BuildError::MalformedPolytope(_))));
        let mut p = polygon_data(SQUARE);
        p.facets[1].1 = vec![2, 0];
        assert!(matches!(build_polytope(&p), Err(BuildError::MalformedPolytope(_))));
    }

    #[test]
    fn product_of_circles() {
        let (a, _) = build_polytope(&segment_data()).unwrap();
        let (sp, v) = build_product(&a, &a).unwrap();
        assert_eq!(sp.len(), 9);
        assert_eq!(sp.torus_dim(), 2);
        assert!(check_functor(&v).passes());
    }

    #[test]
    fn empty_description_is_rejected() {
        let mut d = cp2_description();
        d.strata.clear();
        d.covers.clear();
        assert_eq!(build_from_description(&d).unwrap_err(), BuildError::Strat(StratError::Empty));
    }

    #[test]
    fn description_round_trip() {
        let (sp, _) = cp2();
        let d = crate::description::describe(&sp, None);
        let (back, _) = build_from_description(&SpaceDescription::from_json(&d.to_json()).unwrap()).unwrap();
        assert_eq!(*back, *sp);
    }
}
