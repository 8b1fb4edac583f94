//! Exact rational polytopes: convex hulls, face lattices, slices by level
//! sets of a covector, truncations, Minkowski sums and normal fans.
//!
//! A polytope is stored by its extreme points (lexicographically sorted) and
//! a cached facet description `normal·x >= -offset`. Lower-dimensional
//! polytopes keep their intrinsic dimension; their facets are computed inside
//! the affine hull and extended by zero to the ambient space.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::dd::{self, DdError};
use crate::exactnum::{
    dot_int, dot_int_rat, gcd_all, kernel_completion, rank_int, rat_from_int, rational_gcd, scale_to_integers,
    IntMatrix, Integer, NumError, Rational,
};
use crate::fan::{Fan, FanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("a polytope needs at least one point")]
    Empty,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, found: usize, expected: usize },
    #[error("LevelOutOfRange: level {level} is outside [{min}, {max}]")]
    LevelOutOfRange { level: String, min: String, max: String },
    #[error("the band [{0}, {1}] does not meet the polytope")]
    EmptyIntersection(String, String),
    #[error("invalid interval [{0}, {1}]: lower end must be smaller")]
    InvalidInterval(String, String),
    #[error("polytopes live in different charts or dimensions")]
    ChartMismatch,
    #[error("NotFullDimensional: intrinsic dimension {intrinsic} < ambient dimension {ambient}")]
    NotFullDimensional { intrinsic: usize, ambient: usize },
    #[error("covector must be primitive and nonzero")]
    NotPrimitive,
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// Which lattice the coordinates refer to: the ambient character lattice, or
/// the quotient chart of a covector's kernel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticeTag {
    Ambient,
    Quotient,
}

impl fmt::Display for LatticeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeTag::Ambient => write!(f, "M"),
            LatticeTag::Quotient => write!(f, "M'"),
        }
    }
}

/// `normal·x >= -offset`, with `normal` primitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<Integer>,
    pub offset: Rational,
}

impl Facet {
    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot_int_rat(&self.normal, x) + &self.offset
    }
}

/// Faces as sorted vertex-index sets, graded by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    by_dim: Vec<Vec<Vec<usize>>>,
}

impl FaceLattice {
    /// Dimension of the top face.
    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// Faces of dimension `d`, in lexicographic order.
    pub fn faces(&self, d: usize) -> &[Vec<usize>] {
        self.by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    /// Nonempty faces of every dimension, low dimensions first.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.by_dim
            .iter()
            .enumerate()
            .flat_map(|(d, fs)| fs.iter().map(move |f| (d, f)))
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        self.faces(1)
    }

    /// `(f_0, …, f_{d-1})`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim[..self.dim()].iter().map(Vec::len).collect()
    }

    /// Indices (in `faces(d - 1)`) of the facets of the `idx`-th face of
    /// dimension `d`.
    pub fn covers(&self, d: usize, idx: usize) -> Vec<usize> {
        if d == 0 {
            return Vec::new();
        }
        let face = &self.by_dim[d][idx];
        self.by_dim[d - 1]
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().all(|v| face.binary_search(v).is_ok()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Dimension of a face given as a sorted vertex set, if it is a face.
    pub fn dim_of(&self, face: &[usize]) -> Option<usize> {
        self.by_dim
            .iter()
            .position(|fs| fs.binary_search_by(|f| f.as_slice().cmp(face)).is_ok())
    }
}

#[derive(Debug, Clone)]
pub struct LatticePolytope {
    ambient_dim: usize,
    lattice: LatticeTag,
    vertices: Vec<Vec<Rational>>,
    intrinsic_dim: usize,
    facets: Vec<Facet>,
    incidence: Vec<Vec<usize>>,
    face_lattice: OnceLock<FaceLattice>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.lattice == other.lattice && self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

/// Translation and scaling applied by [`canonicalize`]: the canonical
/// polytope is `scale * (P + translation)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonicalization {
    pub polytope: LatticePolytope,
    pub translation: Vec<Rational>,
    pub scale: Rational,
}

/// Coordinates on the level sets of a primitive covector `nu`: a point `x`
/// is `level * basepoint + Σ c_k kernel_basis[k]`, with `nu·basepoint = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineChart {
    nu: Vec<Integer>,
    basepoint: Vec<Integer>,
    kernel_basis: Vec<Vec<Integer>>,
    inverse: IntMatrix,
}

impl AffineChart {
    pub fn new(nu: &[Integer]) -> Result<AffineChart, PolytopeError> {
        if !gcd_all(nu).is_one() {
            return Err(PolytopeError::NotPrimitive);
        }
        let u = kernel_completion(nu)?;
        let inverse = u.unimodular_inverse()?;
        Ok(AffineChart {
            nu: nu.to_vec(),
            basepoint: u.row(0).to_vec(),
            kernel_basis: (1..u.rows()).map(|r| u.row(r).to_vec()).collect(),
            inverse,
        })
    }

    pub fn nu(&self) -> &[Integer] {
        &self.nu
    }

    pub fn basepoint(&self) -> &[Integer] {
        &self.basepoint
    }

    pub fn kernel_basis(&self) -> &[Vec<Integer>] {
        &self.kernel_basis
    }

    /// Dimension of the quotient chart.
    pub fn dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// `(level, chart coordinates)` of an ambient point.
    pub fn forward(&self, x: &[Rational]) -> (Rational, Vec<Rational>) {
        let n = self.nu.len();
        let coords: Vec<Rational> = (0..n)
            .map(|c| (0..n).fold(Rational::zero(), |acc, k| acc + &x[k] * self.inverse.get(k, c)))
            .collect();
        (coords[0].clone(), coords[1..].to_vec())
    }

    pub fn backward(&self, coords: &[Rational], level: &Rational) -> Vec<Rational> {
        (0..self.nu.len())
            .map(|c| {
                self.kernel_basis
                    .iter()
                    .zip(coords)
                    .fold(level * rat_from_int(&self.basepoint[c]), |acc, (b, q)| acc + q * &b[c])
            })
            .collect()
    }

    /// Expresses a covector on the ambient lattice as a covector on the chart.
    pub fn restrict_covector(&self, u: &[Integer]) -> Vec<Integer> {
        self.kernel_basis.iter().map(|b| dot_int(u, b)).collect()
    }
}

fn check_dims(points: &[Vec<Rational>]) -> Result<usize, PolytopeError> {
    let n = points.first().ok_or(PolytopeError::Empty)?.len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != n {
            return Err(PolytopeError::DimensionMismatch {
                index: i,
                found: p.len(),
                expected: n,
            });
        }
    }
    Ok(n)
}

/// Pivot columns of the difference vectors: coordinates that parametrize the
/// affine hull.
fn affine_pivots(points: &[Vec<Rational>]) -> Vec<usize> {
    let base = &points[0];
    let mut rows: Vec<Vec<Integer>> = points[1..]
        .iter()
        .map(|p| {
            let d: Vec<Rational> = p.iter().zip(base).map(|(a, b)| a - b).collect();
            scale_to_integers(&d)
        })
        .collect();
    let n = base.len();
    let mut pivots = Vec::new();
    let mut r0 = 0;
    for col in 0..n {
        let Some(p) = (r0..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(r0, p);
        for r in r0 + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            let piv = rows[r0][col].clone();
            let (head, tail) = rows.split_at_mut(r);
            for (x, p) in tail[0][col..n].iter_mut().zip(&head[r0][col..n]) {
                *x = &*x * &piv - p * &f;
            }
            let g = gcd_all(&rows[r]);
            if g > Integer::one() {
                rows[r].iter_mut().for_each(|x| *x /= &g);
            }
        }
        pivots.push(col);
        r0 += 1;
        if r0 == rows.len() {
            break;
        }
    }
    pivots
}

impl LatticePolytope {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn lattice(&self) -> &LatticeTag {
        &self.lattice
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.intrinsic_dim == self.ambient_dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Vertex indices on each facet.
    pub fn facet_incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    pub fn is_lattice_polytope(&self) -> bool {
        self.vertices.iter().flatten().all(|q| q.is_integer())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        // lower-dimensional polytopes also need the affine hull; test by
        // re-hulling only when cheap checks pass
        if !self.facets.iter().all(|f| !f.slack(x).is_negative()) {
            return false;
        }
        if self.is_full_dimensional() {
            return true;
        }
        let mut pts = self.vertices.clone();
        pts.push(x.to_vec());
        affine_pivots(&pts).len() == self.intrinsic_dim
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.face_lattice.get_or_init(|| self.compute_face_lattice())
    }

    fn compute_face_lattice(&self) -> FaceLattice {
        let d = self.intrinsic_dim;
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); d + 1];
        by_dim[d] = vec![(0..self.vertices.len()).collect()];
        if d >= 1 {
            let facets: BTreeSet<Vec<usize>> = self.incidence.iter().cloned().collect();
            by_dim[d - 1] = facets.into_iter().collect();
        }
        for k in (1..d).rev() {
            let next: BTreeSet<Vec<usize>> = by_dim[k]
                .par_iter()
                .flat_map_iter(|face| {
                    let cands: BTreeSet<Vec<usize>> = self
                        .incidence
                        .iter()
                        .map(|g| face.iter().copied().filter(|v| g.binary_search(v).is_ok()).collect::<Vec<_>>())
                        .filter(|s| !s.is_empty() && s.len() < face.len())
                        .collect();
                    let cands: Vec<Vec<usize>> = cands.into_iter().collect();
                    let maximal: Vec<Vec<usize>> = cands
                        .iter()
                        .filter(|s| {
                            !cands
                                .iter()
                                .any(|t| t.len() > s.len() && s.iter().all(|v| t.binary_search(v).is_ok()))
                        })
                        .cloned()
                        .collect();
                    maximal
                })
                .collect();
            by_dim[k - 1] = next.into_iter().collect();
        }
        FaceLattice { by_dim }
    }

    /// Image under `x ↦ scale * (x + translation)` with `scale > 0`.
    fn affine_image(&self, translation: &[Rational], scale: &Rational) -> LatticePolytope {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(translation).map(|(a, t)| (a + t) * scale).collect())
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: (&f.offset - dot_int_rat(&f.normal, translation)) * scale,
            })
            .collect();
        LatticePolytope {
            ambient_dim: self.ambient_dim,
            lattice: self.lattice.clone(),
            vertices,
            intrinsic_dim: self.intrinsic_dim,
            facets,
            incidence: self.incidence.clone(),
            face_lattice: self.face_lattice.clone(),
        }
    }

    pub fn with_lattice(mut self, tag: LatticeTag) -> LatticePolytope {
        self.lattice = tag;
        self
    }

    /// Values of `nu` on the vertices.
    pub fn vertex_levels(&self, nu: &[Integer]) -> Vec<Rational> {
        self.vertices.iter().map(|v| dot_int_rat(nu, v)).collect()
    }
}

/// Convex hull of a finite point set, in the ambient lattice.
pub fn hull(points: &[Vec<Rational>]) -> Result<LatticePolytope, PolytopeError> {
    hull_tagged(points, LatticeTag::Ambient)
}

pub fn hull_tagged(points: &[Vec<Rational>], lattice: LatticeTag) -> Result<LatticePolytope, PolytopeError> {
    let n = check_dims(points)?;
    let uniq: BTreeSet<Vec<Rational>> = points.iter().cloned().collect();
    let pts: Vec<Vec<Rational>> = uniq.into_iter().collect();
    let point_polytope = |v: Vec<Rational>| LatticePolytope {
        ambient_dim: n,
        lattice: lattice.clone(),
        vertices: vec![v],
        intrinsic_dim: 0,
        facets: Vec::new(),
        incidence: Vec::new(),
        face_lattice: OnceLock::new(),
    };
    if pts.len() == 1 {
        return Ok(point_polytope(pts[0].clone()));
    }
    let pivots = affine_pivots(&pts);
    let k = pivots.len();
    let projected: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| pivots.iter().map(|&c| p[c].clone()).collect())
        .collect();

    // Far-from-centroid points first: they are most likely extreme, which
    // keeps the intermediate cones small.
    let m = Rational::from_integer(Integer::from(pts.len()));
    let centroid: Vec<Rational> = (0..k)
        .map(|c| projected.iter().fold(Rational::zero(), |acc, p| acc + &p[c]) / &m)
        .collect();
    let dist: Vec<Rational> = projected
        .iter()
        .map(|p| p.iter().zip(&centroid).fold(Rational::zero(), |acc, (a, b)| acc + (a - b) * (a - b)))
        .collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| dist[b].cmp(&dist[a]).then(a.cmp(&b)));

    let rows: Vec<Vec<Integer>> = order
        .iter()
        .map(|&i| {
            let mut h = vec![Rational::one()];
            h.extend(projected[i].iter().cloned());
            scale_to_integers(&h)
        })
        .collect();
    let cone = dd::extreme_rays(&rows, k + 1)?;

    // tight[i] = facet indices tight at original point i
    let mut tight: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for (f, inc) in cone.incidence.iter().enumerate() {
        for &r in inc {
            tight[order[r]].push(f);
        }
    }
    let normals: Vec<&[Integer]> = cone.rays.iter().map(|y| &y[1..]).collect();
    let is_vertex: Vec<bool> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let rows: Vec<Vec<Integer>> = tight[i].iter().map(|&f| normals[f].to_vec()).collect();
            rank_int(&rows) == k
        })
        .collect();
    let mut new_index = vec![usize::MAX; pts.len()];
    let mut vertices = Vec::new();
    for i in 0..pts.len() {
        if is_vertex[i] {
            new_index[i] = vertices.len();
            vertices.push(pts[i].clone());
        }
    }
    let mut facets: Vec<(Facet, Vec<usize>)> = Vec::with_capacity(cone.rays.len());
    for (f, y) in cone.rays.iter().enumerate() {
        let mut normal = vec![Integer::zero(); n];
        for (j, &c) in pivots.iter().enumerate() {
            normal[c] = y[j + 1].clone();
        }
        let g = gcd_all(&normal);
        let normal: Vec<Integer> = normal.iter().map(|x| x / &g).collect();
        let offset = Rational::new(y[0].clone(), g);
        let mut inc: Vec<usize> = cone.incidence[f]
            .iter()
            .map(|&r| new_index[order[r]])
            .filter(|&v| v != usize::MAX)
            .collect();
        inc.sort_unstable();
        facets.push((Facet { normal, offset }, inc));
    }
    facets.sort();
    let (facets, incidence) = facets.into_iter().unzip();
    Ok(LatticePolytope {
        ambient_dim: n,
        lattice,
        vertices,
        intrinsic_dim: k,
        facets,
        incidence,
        face_lattice: OnceLock::new(),
    })
}

fn level_range(p: &LatticePolytope, nu: &[Integer]) -> Result<(Vec<Rational>, Rational, Rational), PolytopeError> {
    if nu.len() != p.ambient_dim {
        return Err(PolytopeError::DimensionMismatch {
            index: 0,
            found: nu.len(),
            expected: p.ambient_dim,
        });
    }
    let levels = p.vertex_levels(nu);
    let min = levels.iter().min().cloned().expect("nonempty");
    let max = levels.iter().max().cloned().expect("nonempty");
    Ok((levels, min, max))
}

/// Points of `P ∩ {nu = a}` that span it: vertices at level `a` and the
/// crossings of edges through the level.
fn level_points(p: &LatticePolytope, levels: &[Rational], a: &Rational) -> Vec<Vec<Rational>> {
    let mut pts: Vec<Vec<Rational>> = p
        .vertices
        .iter()
        .zip(levels)
        .filter(|(_, l)| *l == a)
        .map(|(v, _)| v.clone())
        .collect();
    for e in p.face_lattice().edges() {
        let (i, j) = (e[0], e[1]);
        let (lo, hi) = if levels[i] < levels[j] { (i, j) } else { (j, i) };
        if &levels[lo] < a && a < &levels[hi] {
            let t = (a - &levels[lo]) / (&levels[hi] - &levels[lo]);
            pts.push(
                p.vertices[lo]
                    .iter()
                    .zip(&p.vertices[hi])
                    .map(|(x, y)| x + (y - x) * &t)
                    .collect(),
            );
        }
    }
    pts
}

/// `P ∩ {nu = a}` in ambient coordinates.
pub fn level_set(p: &LatticePolytope, nu: &[Integer], a: &Rational) -> Result<LatticePolytope, PolytopeError> {
    let (levels, min, max) = level_range(p, nu)?;
    if a < &min || a > &max {
        return Err(PolytopeError::LevelOutOfRange {
            level: a.to_string(),
            min: min.to_string(),
            max: max.to_string(),
        });
    }
    hull(&level_points(p, &levels, a))
}

/// `P ∩ {nu = a}`, expressed in the quotient chart of `nu`.
pub fn slice_at(p: &LatticePolytope, nu: &[Integer], a: &Rational) -> Result<LatticePolytope, PolytopeError> {
    let chart = AffineChart::new(nu)?;
    slice_in_chart(p, &chart, a)
}

pub fn slice_in_chart(p: &LatticePolytope, chart: &AffineChart, a: &Rational) -> Result<LatticePolytope, PolytopeError> {
    let level = level_set(p, chart.nu(), a)?;
    let coords: Vec<Vec<Rational>> = level.vertices.iter().map(|v| chart.forward(v).1).collect();
    hull_tagged(&coords, LatticeTag::Quotient)
}

/// `P ∩ {a <= nu <= b}` in ambient coordinates.
pub fn truncate_between(
    p: &LatticePolytope,
    nu: &[Integer],
    a: &Rational,
    b: &Rational,
) -> Result<LatticePolytope, PolytopeError> {
    if a >= b {
        return Err(PolytopeError::InvalidInterval(a.to_string(), b.to_string()));
    }
    let (levels, min, max) = level_range(p, nu)?;
    if b < &min || a > &max {
        return Err(PolytopeError::EmptyIntersection(a.to_string(), b.to_string()));
    }
    let mut pts: Vec<Vec<Rational>> = p
        .vertices
        .iter()
        .zip(&levels)
        .filter(|(_, l)| a <= *l && *l <= b)
        .map(|(v, _)| v.clone())
        .collect();
    for cut in [a, b] {
        if &min < cut && cut < &max {
            pts.extend(level_points(p, &levels, cut));
        }
    }
    hull(&pts)
}

/// `conv{p + q}` over vertex pairs.
pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope, PolytopeError> {
    if p.ambient_dim != q.ambient_dim || p.lattice != q.lattice {
        return Err(PolytopeError::ChartMismatch);
    }
    let sums: Vec<Vec<Rational>> = p
        .vertices
        .iter()
        .flat_map(|a| q.vertices.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
        .collect();
    hull_tagged(&sums, p.lattice.clone())
}

/// Positive rational multiple of a polytope.
pub fn dilate(p: &LatticePolytope, factor: &Rational) -> LatticePolytope {
    assert!(factor.is_positive(), "dilation factor must be positive");
    p.affine_image(&vec![Rational::zero(); p.ambient_dim], factor)
}

/// Translates the lexicographically smallest vertex to the origin, then
/// scales by the smallest positive rational making every vertex a lattice
/// point.
pub fn canonicalize(p: &LatticePolytope) -> Canonicalization {
    let translation: Vec<Rational> = p.vertices[0].iter().map(|x| -x).collect();
    let shifted: Vec<Rational> = p
        .vertices
        .iter()
        .flat_map(|v| v.iter().zip(&translation).map(|(a, t)| a + t))
        .collect();
    let g = rational_gcd(&shifted);
    let scale = if g.is_zero() { Rational::one() } else { g.recip() };
    Canonicalization {
        polytope: p.affine_image(&translation, &scale),
        translation,
        scale,
    }
}

/// Inner normal fan: rays are the facet normals, one maximal cone per vertex.
pub fn normal_fan(p: &LatticePolytope) -> Result<Fan, PolytopeError> {
    if !p.is_full_dimensional() {
        return Err(PolytopeError::NotFullDimensional {
            intrinsic: p.intrinsic_dim,
            ambient: p.ambient_dim,
        });
    }
    if p.ambient_dim == 0 {
        return Ok(Fan::trivial());
    }
    let rays: Vec<Vec<Integer>> = p.facets.iter().map(|f| f.normal.clone()).collect();
    let mut cones = vec![Vec::new(); p.vertices.len()];
    for (f, inc) in p.incidence.iter().enumerate() {
        for &v in inc {
            cones[v].push(f);
        }
    }
    Ok(Fan::new(p.ambient_dim, rays, cones)?)
}
