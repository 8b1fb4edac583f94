//! Complete rational polyhedral fans: smoothness, refinement, common
//! refinement, star subdivision and the classification of toric morphisms
//! (identity on the lattice) into isomorphisms, smooth-center blowups and
//! general refinements.
//!
//! Fans are stored canonically: rays primitive, distinct and sorted
//! lexicographically; each maximal cone a sorted list of ray indices; the cone
//! list sorted. Equality of two `Fan` values is therefore equality of fans.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dd::{self, DdError};
use crate::exactnum::{dot_int, extends_to_lattice_basis, primitive_vector, rank_int, Integer, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fans live in lattices of different rank ({0} vs {1})")]
    LatticeMismatch(usize, usize),
    #[error("NotARefinement: the source fan does not refine the target fan")]
    NotARefinement,
    #[error("ray {0} has the wrong length or is zero")]
    BadRay(usize),
    #[error("cone {0} is invalid: {1}")]
    BadCone(usize, String),
    #[error("vector is not in the support of the fan")]
    NotInSupport,
    #[error(transparent)]
    Dd(#[from] DdError),
}

#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<Integer>>,
    cones: Vec<Vec<usize>>,
    complete: bool,
    facets: OnceLock<Vec<Vec<Vec<Integer>>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    /// Indices of maximal cones that are not unimodular simplicial cones.
    pub offending: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MorphismKind {
    Isomorphism,
    SmoothBlowup,
    Refinement,
}

/// One component of a blowup center: the target cone whose orbit closure is
/// blown up, and the ray inserted by the star subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupCenter {
    pub cone: Vec<Vec<Integer>>,
    pub new_ray: Vec<Integer>,
}

impl BlowupCenter {
    /// Dimension of the cone, i.e. the codimension of the blown-up stratum.
    pub fn codim(&self) -> usize {
        self.cone.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismClassification {
    pub kind: MorphismKind,
    pub centers: Vec<BlowupCenter>,
    /// Why a refinement is not a smooth blowup; empty otherwise.
    pub reason: Option<String>,
}

impl Fan {
    /// Builds a fan from ray generators (made primitive and deduplicated) and
    /// maximal cones given as ray-index sets. Every maximal cone must be
    /// full-dimensional.
    pub fn new(dim: usize, rays: Vec<Vec<Integer>>, cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let mut prim = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::BadRay(i));
            }
            prim.push(primitive_vector(r).map_err(|_| FanError::BadRay(i))?);
        }
        let sorted: BTreeSet<Vec<Integer>> = prim.iter().cloned().collect();
        let sorted: Vec<Vec<Integer>> = sorted.into_iter().collect();
        let index: BTreeMap<&Vec<Integer>, usize> = sorted.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let mut canon = BTreeSet::new();
        for (k, c) in cones.iter().enumerate() {
            let mut idx = BTreeSet::new();
            for &i in c {
                let r = prim.get(i).ok_or_else(|| FanError::BadCone(k, format!("ray index {i} out of range")))?;
                idx.insert(index[r]);
            }
            let gens: Vec<Vec<Integer>> = idx.iter().map(|&i| sorted[i].clone()).collect();
            if dim > 0 && rank_int(&gens) < dim {
                return Err(FanError::BadCone(k, "maximal cone is not full-dimensional".into()));
            }
            canon.insert(idx.into_iter().collect::<Vec<_>>());
        }
        let mut fan = Fan {
            dim,
            rays: sorted,
            cones: canon.into_iter().collect(),
            complete: false,
            facets: OnceLock::new(),
        };
        fan.complete = fan.check_complete()?;
        Ok(fan)
    }

    pub fn from_i64(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Fan, FanError> {
        Fan::new(
            dim,
            rays.iter().map(|r| crate::exactnum::int_vec(r)).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    /// The fan of a point: the origin in the zero lattice.
    pub fn trivial() -> Fan {
        Fan {
            dim: 0,
            rays: Vec::new(),
            cones: vec![Vec::new()],
            complete: true,
            facets: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<Integer>] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn cone_generators(&self, k: usize) -> Vec<Vec<Integer>> {
        self.cones[k].iter().map(|&i| self.rays[i].clone()).collect()
    }

    fn ray_index(&self, v: &[Integer]) -> Option<usize> {
        self.rays.binary_search_by(|r| r.as_slice().cmp(v)).ok()
    }

    /// Inner facet normals of every maximal cone.
    fn all_facets(&self) -> Result<&Vec<Vec<Vec<Integer>>>, FanError> {
        if let Some(f) = self.facets.get() {
            return Ok(f);
        }
        let computed = (0..self.cones.len())
            .into_par_iter()
            .map(|k| cone_facets(&self.cone_generators(k), self.dim))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.facets.get_or_init(|| computed))
    }

    pub fn cone_facets(&self, k: usize) -> Result<&[Vec<Integer>], FanError> {
        Ok(&self.all_facets()?[k])
    }

    /// Every codimension-one face of a maximal cone lies in exactly two
    /// maximal cones.
    fn check_complete(&self) -> Result<bool, FanError> {
        if self.dim == 0 {
            return Ok(self.cones.len() == 1);
        }
        if self.cones.is_empty() {
            return Ok(false);
        }
        let mut walls: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for k in 0..self.cones.len() {
            for h in self.cone_facets(k)? {
                let on: Vec<usize> = self.cones[k]
                    .iter()
                    .copied()
                    .filter(|&i| dot_int(h, &self.rays[i]).is_zero())
                    .collect();
                *walls.entry(on).or_default() += 1;
            }
        }
        Ok(walls.values().all(|&c| c == 2))
    }

    pub fn cone_contains(&self, k: usize, v: &[Integer]) -> Result<bool, FanError> {
        Ok(self.cone_facets(k)?.iter().all(|h| !dot_int(h, v).is_negative()))
    }

    /// Maximal cones that are not generated by part of a lattice basis of
    /// full rank.
    pub fn is_smooth(&self) -> SmoothnessReport {
        let offending: Vec<usize> = (0..self.cones.len())
            .filter(|&k| {
                self.cones[k].len() != self.dim
                    || (self.dim > 0
                        && !IntMatrix::from_rows(&self.cone_generators(k))
                            .and_then(|m| m.determinant())
                            .map(|d| d.abs() == Integer::from(1))
                            .unwrap_or(false))
            })
            .collect();
        SmoothnessReport {
            smooth: offending.is_empty(),
            offending,
        }
    }

    /// `true` iff every maximal cone of `self` lies in some maximal cone of
    /// `coarse`.
    pub fn refines(&self, coarse: &Fan) -> Result<bool, FanError> {
        if self.dim != coarse.dim {
            return Err(FanError::LatticeMismatch(self.dim, coarse.dim));
        }
        coarse.all_facets()?;
        let ok = (0..self.cones.len()).into_par_iter().all(|k| {
            let gens = self.cone_generators(k);
            (0..coarse.cones.len()).any(|c| {
                coarse.facets.get().expect("computed")[c]
                    .iter()
                    .all(|h| gens.iter().all(|g| !dot_int(h, g).is_negative()))
            })
        });
        Ok(ok)
    }

    /// Smallest cone (as sorted ray indices) whose relative interior holds
    /// `v`. The zero vector yields the empty cone.
    pub fn minimal_cone(&self, v: &[Integer]) -> Result<Vec<usize>, FanError> {
        if v.len() != self.dim {
            return Err(FanError::LatticeMismatch(v.len(), self.dim));
        }
        for k in 0..self.cones.len() {
            let facets = self.cone_facets(k)?;
            if facets.iter().any(|h| dot_int(h, v).is_negative()) {
                continue;
            }
            let tight: Vec<&Vec<Integer>> = facets.iter().filter(|h| dot_int(h, v).is_zero()).collect();
            return Ok(self.cones[k]
                .iter()
                .copied()
                .filter(|&i| tight.iter().all(|h| dot_int(h, &self.rays[i]).is_zero()))
                .collect());
        }
        Err(FanError::NotInSupport)
    }

    /// Star subdivision at the primitive vector `v`: every maximal cone
    /// containing the minimal cone of `v` is replaced by the cones over its
    /// facets not containing `v`.
    pub fn star_subdivide(&self, v: &[Integer]) -> Result<Fan, FanError> {
        let v = primitive_vector(v).map_err(|_| FanError::BadRay(0))?;
        if self.ray_index(&v).is_some() {
            return Ok(self.clone());
        }
        let sigma = self.minimal_cone(&v)?;
        let mut rays = self.rays.clone();
        let new_idx = rays.len();
        rays.push(v.clone());
        let mut cones = Vec::new();
        for k in 0..self.cones.len() {
            let cone = &self.cones[k];
            if !sigma.iter().all(|i| cone.contains(i)) {
                cones.push(cone.clone());
                continue;
            }
            for h in self.cone_facets(k)? {
                if dot_int(h, &v).is_positive() {
                    let mut c: Vec<usize> = cone
                        .iter()
                        .copied()
                        .filter(|&i| dot_int(h, &self.rays[i]).is_zero())
                        .collect();
                    c.push(new_idx);
                    cones.push(c);
                }
            }
        }
        Fan::new(self.dim, rays, cones)
    }
}

/// Inner facet normals of a full-dimensional pointed cone.
fn cone_facets(gens: &[Vec<Integer>], dim: usize) -> Result<Vec<Vec<Integer>>, FanError> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    Ok(dd::extreme_rays(gens, dim)?.rays)
}

/// Equality of ray sets and maximal-cone sets after canonical sorting.
pub fn fans_equal(a: &Fan, b: &Fan) -> bool {
    a == b
}

/// Fan whose maximal cones are the full-dimensional intersections of a cone of
/// `a` with a cone of `b`.
pub fn common_refinement(a: &Fan, b: &Fan) -> Result<Fan, FanError> {
    if a.dim != b.dim {
        return Err(FanError::LatticeMismatch(a.dim, b.dim));
    }
    if a.dim == 0 {
        return Ok(Fan::trivial());
    }
    let dim = a.dim;
    let fa = a.all_facets()?;
    let fb = b.all_facets()?;
    let pairs: Vec<(usize, usize)> = (0..a.cones.len())
        .flat_map(|i| (0..b.cones.len()).map(move |j| (i, j)))
        .collect();
    let pieces = pairs
        .into_par_iter()
        .map(|(i, j)| -> Result<Option<Vec<Vec<Integer>>>, FanError> {
            let ga = a.cone_generators(i);
            let gb = b.cone_generators(j);
            let separated = |facets: &[Vec<Integer>], gens: &[Vec<Integer>]| {
                facets.iter().any(|h| gens.iter().all(|g| !dot_int(h, g).is_positive()))
            };
            if separated(&fa[i], &gb) || separated(&fb[j], &ga) {
                return Ok(None);
            }
            let rows: Vec<Vec<Integer>> = fa[i].iter().chain(fb[j].iter()).cloned().collect();
            let rays = dd::extreme_rays(&rows, dim)?.rays;
            Ok((rank_int(&rays) == dim).then_some(rays))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rays: Vec<Vec<Integer>> = Vec::new();
    let mut index: BTreeMap<Vec<Integer>, usize> = BTreeMap::new();
    let mut cones = Vec::new();
    for piece in pieces.into_iter().flatten() {
        let mut c = Vec::with_capacity(piece.len());
        for r in piece {
            let next = rays.len();
            let i = *index.entry(r.clone()).or_insert(next);
            if i == next {
                rays.push(r);
            }
            c.push(i);
        }
        cones.push(c);
    }
    Fan::new(dim, rays, cones)
}

/// Classifies the toric morphism induced by the identity of the lattice,
/// from the fan `source` to the coarser fan `target`.
pub fn classify_morphism(source: &Fan, target: &Fan) -> Result<MorphismClassification, FanError> {
    if source.dim != target.dim {
        return Err(FanError::LatticeMismatch(source.dim, target.dim));
    }
    if !source.refines(target)? {
        return Err(FanError::NotARefinement);
    }
    let refinement = |reason: String| MorphismClassification {
        kind: MorphismKind::Refinement,
        centers: Vec::new(),
        reason: Some(reason),
    };
    if fans_equal(source, target) {
        return Ok(MorphismClassification {
            kind: MorphismKind::Isomorphism,
            centers: Vec::new(),
            reason: None,
        });
    }
    if target.rays.iter().any(|r| source.ray_index(r).is_none()) {
        return Ok(refinement("a ray of the target is not a ray of the source".into()));
    }
    let new_rays: Vec<Vec<Integer>> = source
        .rays
        .iter()
        .filter(|r| target.ray_index(r).is_none())
        .cloned()
        .collect();
    let mut centers = Vec::new();
    let mut sigmas = Vec::new();
    for r in &new_rays {
        let sigma = target.minimal_cone(r)?;
        let gens: Vec<Vec<Integer>> = sigma.iter().map(|&i| target.rays[i].clone()).collect();
        if !extends_to_lattice_basis(&gens) {
            return Ok(refinement(format!("center cone of new ray {} is not smooth", fmt_vec(r))));
        }
        let sum: Vec<Integer> = (0..target.dim)
            .map(|c| gens.iter().map(|g| g[c].clone()).sum())
            .collect();
        if &sum != r {
            return Ok(refinement(format!(
                "new ray {} is not the sum of the generators of its center cone",
                fmt_vec(r)
            )));
        }
        sigmas.push(sigma);
        centers.push(BlowupCenter {
            cone: gens,
            new_ray: r.clone(),
        });
    }
    for a in 0..sigmas.len() {
        for b in a + 1..sigmas.len() {
            let joint: BTreeSet<usize> = sigmas[a].iter().chain(&sigmas[b]).copied().collect();
            if target.cones.iter().any(|c| joint.iter().all(|i| c.contains(i))) {
                return Ok(refinement(format!(
                    "center strata of new rays {} and {} intersect",
                    fmt_vec(&new_rays[a]),
                    fmt_vec(&new_rays[b])
                )));
            }
        }
    }
    let forward = new_rays
        .iter()
        .try_fold(target.clone(), |f, r| f.star_subdivide(r))?;
    let backward = new_rays
        .iter()
        .rev()
        .try_fold(target.clone(), |f, r| f.star_subdivide(r))?;
    if forward != backward {
        return Ok(refinement("star subdivisions at the new rays do not commute".into()));
    }
    if &forward != source {
        return Ok(refinement(
            "source is not the star subdivision of the target at its new rays".into(),
        ));
    }
    Ok(MorphismClassification {
        kind: MorphismKind::SmoothBlowup,
        centers,
        reason: None,
    })
}

fn fmt_vec(v: &[Integer]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}
