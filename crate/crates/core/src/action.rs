//! The C*-action on a polarized toric variety given by a lattice polytope
//! and a one-parameter subgroup `nu`: weights, critical values, fixed faces,
//! Białynicki-Birula cell closures, equalization and the codimension
//! conditions on inner fixed components.
//!
//! Fixed components are modelled as the maximal faces on which `nu` is
//! constant. `B+(F)` is the union of faces whose `nu`-maximizing face lies in
//! `F` (orbits flowing up into `F`), `B-(F)` the union of faces whose
//! `nu`-minimizing face lies in `F`. This is a combinatorial model, checked
//! against the cube and the 26-vertex example rather than derived in general.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{dot_int, gcd_all, Integer, Rational};
use crate::fan::SmoothnessReport;
use crate::polytope::{normal_fan, LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("TrivialAction: nu is constant on the polytope")]
    TrivialAction,
    #[error("nu must be a covector of length {0}")]
    BadCovector(usize),
    #[error("the polytope must be full-dimensional (intrinsic {intrinsic}, ambient {ambient})")]
    NotFullDimensional { intrinsic: usize, ambient: usize },
    #[error("the polytope must have integer vertices")]
    NotLatticePolytope,
    #[error("NotEqualized: {0} edge(s) have isotropy of order > 1")]
    NotEqualized(usize),
    #[error("face {0:?} is not a fixed face")]
    NotFixedFace(Vec<usize>),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone)]
pub struct ActionInput {
    polytope: LatticePolytope,
    nu: Vec<Integer>,
    /// `<v, nu>` for each vertex, before normalization.
    raw_weights: Vec<Integer>,
    shift: Integer,
    warnings: Vec<String>,
}

impl ActionInput {
    /// Validates the pair. A non-primitive `nu` is divided by its gcd and a
    /// warning is recorded.
    pub fn new(polytope: LatticePolytope, nu: Vec<Integer>) -> Result<ActionInput, ActionError> {
        let n = polytope.ambient_dim();
        if nu.len() != n {
            return Err(ActionError::BadCovector(n));
        }
        if nu.iter().all(Zero::is_zero) {
            return Err(ActionError::TrivialAction);
        }
        if !polytope.is_full_dimensional() {
            return Err(ActionError::NotFullDimensional {
                intrinsic: polytope.intrinsic_dim(),
                ambient: n,
            });
        }
        if !polytope.is_lattice_polytope() {
            return Err(ActionError::NotLatticePolytope);
        }
        let mut warnings = Vec::new();
        let g = gcd_all(&nu);
        let nu = if g.is_one() {
            nu
        } else {
            let reduced: Vec<Integer> = nu.iter().map(|x| x / &g).collect();
            warnings.push(format!(
                "nu = ({}) is not primitive; re-parametrized to ({})",
                join(&nu),
                join(&reduced)
            ));
            reduced
        };
        let raw_weights: Vec<Integer> = polytope
            .vertices()
            .iter()
            .map(|v| dot_int(&nu, &v.iter().map(|q| q.to_integer()).collect::<Vec<_>>()))
            .collect();
        let shift = raw_weights.iter().min().cloned().expect("nonempty");
        if raw_weights.iter().all(|w| *w == shift) {
            return Err(ActionError::TrivialAction);
        }
        Ok(ActionInput {
            polytope,
            nu,
            raw_weights,
            shift,
            warnings,
        })
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    /// The primitive covector actually used.
    pub fn nu(&self) -> &[Integer] {
        &self.nu
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `min <v, nu>`; normalized weights are raw weights minus this.
    pub fn shift(&self) -> &Integer {
        &self.shift
    }

    pub fn vertex_weights(&self) -> Vec<Integer> {
        self.raw_weights.iter().map(|w| w - &self.shift).collect()
    }

    /// The ambient `nu`-level of a normalized weight.
    pub fn level(&self, normalized: &Rational) -> Rational {
        normalized + Rational::from_integer(self.shift.clone())
    }
}

fn join(v: &[Integer]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Sorted distinct normalized vertex weights `0 = a_0 < … < a_r`.
pub fn critical_values(input: &ActionInput) -> Vec<Integer> {
    let set: BTreeSet<Integer> = input.vertex_weights().into_iter().collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoint vertex indices, lower weight first (index order on ties).
    pub sink: usize,
    pub source: usize,
    /// Primitive direction from `sink` to `source`.
    pub direction: Vec<Integer>,
    pub lattice_length: Integer,
    /// `<direction, nu>`, nonnegative by orientation.
    pub pairing: Integer,
}

pub fn edges(input: &ActionInput) -> Vec<Edge> {
    let p = input.polytope();
    let w = input.vertex_weights();
    p.face_lattice()
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = if w[e[1]] < w[e[0]] { (e[1], e[0]) } else { (e[0], e[1]) };
            let diff: Vec<Integer> = p.vertices()[b]
                .iter()
                .zip(&p.vertices()[a])
                .map(|(x, y)| (x - y).to_integer())
                .collect();
            let len = gcd_all(&diff);
            let direction: Vec<Integer> = diff.iter().map(|x| x / &len).collect();
            let pairing = dot_int(&direction, input.nu());
            Edge {
                sink: a,
                source: b,
                direction,
                lattice_length: len,
                pairing,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BbClosure {
    /// Inclusion-maximal faces (vertex-index sets) making up the closure.
    pub faces: Vec<Vec<usize>>,
    pub dim: usize,
    pub codim: usize,
    /// Edges at a vertex of the fixed face, not contained in it, leaving
    /// downwards (for `+`) or upwards (for `-`).
    pub transverse_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedFace {
    pub vertices: Vec<usize>,
    pub dim: usize,
    pub weight: Integer,
    /// Position of `weight` among the critical values.
    pub index: usize,
}

/// The maximal faces on which `nu` is constant, ordered by weight then
/// vertex set.
pub fn fixed_faces(input: &ActionInput) -> Vec<FixedFace> {
    let w = input.vertex_weights();
    let crit = critical_values(input);
    let fl = input.polytope().face_lattice();
    let constant: Vec<(usize, &Vec<usize>)> = fl
        .iter()
        .filter(|(_, f)| f.iter().all(|&v| w[v] == w[f[0]]))
        .collect();
    let mut out: Vec<FixedFace> = constant
        .iter()
        .filter(|(d, f)| {
            !constant
                .iter()
                .any(|(e, g)| e > d && f.iter().all(|v| g.binary_search(v).is_ok()))
        })
        .map(|(d, f)| {
            let weight = w[f[0]].clone();
            FixedFace {
                vertices: (*f).clone(),
                dim: *d,
                index: crit.binary_search(&weight).expect("vertex weight is critical"),
                weight,
            }
        })
        .collect();
    out.sort_by(|a, b| a.weight.cmp(&b.weight).then_with(|| a.vertices.cmp(&b.vertices)));
    out
}

fn extreme_face(face: &[usize], w: &[Integer], sign: Sign) -> Vec<usize> {
    let target = match sign {
        Sign::Plus => face.iter().map(|&v| &w[v]).max(),
        Sign::Minus => face.iter().map(|&v| &w[v]).min(),
    }
    .expect("nonempty face");
    face.iter().copied().filter(|&v| &w[v] == target).collect()
}

pub fn bb_closure(input: &ActionInput, fixed: &[usize], sign: Sign) -> Result<BbClosure, ActionError> {
    let w = input.vertex_weights();
    let fl = input.polytope().face_lattice();
    let is_fixed = fixed_faces(input).iter().any(|f| f.vertices == fixed);
    if !is_fixed {
        return Err(ActionError::NotFixedFace(fixed.to_vec()));
    }
    let members: Vec<(usize, &Vec<usize>)> = fl
        .iter()
        .filter(|(_, g)| {
            extreme_face(g, &w, sign)
                .iter()
                .all(|v| fixed.binary_search(v).is_ok())
        })
        .collect();
    let faces: Vec<Vec<usize>> = members
        .iter()
        .filter(|(d, g)| {
            !members
                .iter()
                .any(|(e, h)| e > d && g.iter().all(|v| h.binary_search(v).is_ok()))
        })
        .map(|(_, g)| (*g).clone())
        .collect();
    let dim = members.iter().map(|(d, _)| *d).max().expect("the fixed face itself");
    let v0 = fixed[0];
    let transverse_edges = edges(input)
        .iter()
        .filter(|e| !e.pairing.is_zero())
        .filter(|e| match sign {
            Sign::Plus => e.source == v0,
            Sign::Minus => e.sink == v0,
        })
        .count();
    Ok(BbClosure {
        faces,
        dim,
        codim: fl.dim() - dim,
        transverse_edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualizationReport {
    pub equalized: bool,
    /// `(edge index, isotropy order)` for edges pairing outside {-1, 0, 1}.
    pub offending: Vec<(usize, Integer)>,
}

pub fn equalization_check(input: &ActionInput) -> EqualizationReport {
    let offending: Vec<(usize, Integer)> = edges(input)
        .into_iter()
        .enumerate()
        .filter(|(_, e)| e.pairing > Integer::one())
        .map(|(k, e)| (k, e.pairing))
        .collect();
    EqualizationReport {
        equalized: offending.is_empty(),
        offending,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmfmEdge {
    pub edge: usize,
    pub sink: usize,
    pub source: usize,
    /// Weight difference between source and sink.
    pub degree: Integer,
    pub lattice_length: Integer,
    pub ok: bool,
}

/// On an equalized action, each non-fixed edge is an orbit closure whose
/// lattice length must equal its weight difference.
pub fn amfm_check(input: &ActionInput) -> Result<Vec<AmfmEdge>, ActionError> {
    let eq = equalization_check(input);
    if !eq.equalized {
        return Err(ActionError::NotEqualized(eq.offending.len()));
    }
    let w = input.vertex_weights();
    Ok(edges(input)
        .into_iter()
        .enumerate()
        .filter(|(_, e)| !e.pairing.is_zero())
        .map(|(k, e)| {
            let degree = &w[e.source] - &w[e.sink];
            AmfmEdge {
                edge: k,
                sink: e.sink,
                source: e.source,
                ok: degree == e.lattice_length,
                degree,
                lattice_length: e.lattice_length,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedFaceReport {
    pub face: FixedFace,
    pub bb_plus: BbClosure,
    pub bb_minus: BbClosure,
}

impl FixedFaceReport {
    /// `nu+ = codim B-` and `nu- = codim B+`, with `nu±` counted as
    /// transverse edges.
    pub fn nu_matches_codim(&self) -> bool {
        self.bb_plus.transverse_edges == self.bb_minus.codim && self.bb_minus.transverse_edges == self.bb_plus.codim
    }

    pub fn codims_at_least_two(&self) -> bool {
        self.bb_plus.codim > 1 && self.bb_minus.codim > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionStar {
    /// Codims > 1 at every fixed face of weight `a_i`, `2 <= i <= r - 2`.
    pub holds: bool,
    /// The same for every inner weight, `1 <= i <= r - 1`.
    pub all_inner: bool,
    /// Critical-value indices where some fixed face has a BB closure of
    /// codimension 1.
    pub failing_indices: Vec<usize>,
}

pub fn condition_star(input: &ActionInput) -> ConditionStar {
    let reports = fixed_face_reports(input);
    condition_star_from(&reports, critical_values(input).len() - 1)
}

fn condition_star_from(reports: &[FixedFaceReport], r: usize) -> ConditionStar {
    let failing: BTreeSet<usize> = reports
        .iter()
        .filter(|f| f.face.index > 0 && f.face.index < r && !f.codims_at_least_two())
        .map(|f| f.face.index)
        .collect();
    ConditionStar {
        holds: failing.iter().all(|&i| i < 2 || i + 2 > r),
        all_inner: failing.is_empty(),
        failing_indices: failing.into_iter().collect(),
    }
}

pub fn fixed_face_reports(input: &ActionInput) -> Vec<FixedFaceReport> {
    fixed_faces(input)
        .into_par_iter()
        .map(|face| FixedFaceReport {
            bb_plus: bb_closure(input, &face.vertices, Sign::Plus).expect("fixed face"),
            bb_minus: bb_closure(input, &face.vertices, Sign::Minus).expect("fixed face"),
            face,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionAnalysis {
    pub nu: Vec<Integer>,
    pub vertex_weights: Vec<Integer>,
    pub critical_values: Vec<Integer>,
    pub criticality: usize,
    pub bandwidth: Integer,
    pub fixed_faces: Vec<FixedFaceReport>,
    pub edges: Vec<Edge>,
    pub equalization: EqualizationReport,
    /// Present only for equalized actions.
    pub amfm: Option<Vec<AmfmEdge>>,
    pub smoothness: SmoothnessReport,
    /// Sink and source are facets.
    pub b_type: bool,
    /// B-type with every inner BB closure of codimension at least 2.
    pub bordism: bool,
    pub condition_star: ConditionStar,
    /// `nu±` agrees with the complementary BB codimension at every fixed face.
    pub nu_codim_consistent: bool,
    /// Fixed faces partition the vertex set.
    pub fixed_faces_partition: bool,
    pub warnings: Vec<String>,
}

pub fn analyze(input: &ActionInput) -> Result<ActionAnalysis, ActionError> {
    let crit = critical_values(input);
    let r = crit.len() - 1;
    let reports = fixed_face_reports(input);
    let p = input.polytope();
    let d = p.intrinsic_dim();
    let sink_source_facets = [0, r].iter().all(|&i| {
        let at: Vec<&FixedFaceReport> = reports.iter().filter(|f| f.face.index == i).collect();
        at.len() == 1 && at[0].face.dim + 1 == d
    });
    let star = condition_star_from(&reports, r);
    let equalization = equalization_check(input);
    let amfm = if equalization.equalized { Some(amfm_check(input)?) } else { None };
    let mut seen = vec![0usize; p.vertices().len()];
    for f in &reports {
        for &v in &f.face.vertices {
            seen[v] += 1;
        }
    }
    Ok(ActionAnalysis {
        nu: input.nu().to_vec(),
        vertex_weights: input.vertex_weights(),
        bandwidth: crit[r].clone(),
        critical_values: crit,
        criticality: r,
        edges: edges(input),
        equalization,
        amfm,
        smoothness: normal_fan(p)?.is_smooth(),
        b_type: sink_source_facets,
        bordism: sink_source_facets && star.all_inner,
        condition_star: star,
        nu_codim_consistent: reports.iter().all(FixedFaceReport::nu_matches_codim),
        fixed_faces_partition: seen.iter().all(|&c| c == 1),
        fixed_faces: reports,
        warnings: input.warnings().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int_vec, rat_vec};
    use crate::polytope::hull;

    fn cube(n: usize) -> LatticePolytope {
        let pts: Vec<Vec<Rational>> = (0..1u32 << n)
            .map(|m| (0..n).map(|i| Rational::from_integer(Integer::from((m >> i) & 1))).collect())
            .collect();
        hull(&pts).unwrap()
    }

    fn square() -> LatticePolytope {
        cube(2)
    }

    fn input(p: LatticePolytope, nu: &[i64]) -> ActionInput {
        ActionInput::new(p, int_vec(nu)).unwrap()
    }

    #[test]
    fn cube_critical_values_and_fixed_faces() {
        for n in 1..=4 {
            let a = input(cube(n), &vec![1; n]);
            let expect: Vec<Integer> = (0..=n as i64).map(Integer::from).collect();
            assert_eq!(critical_values(&a), expect);
        }
        let a = input(cube(3), &[1, 1, 1]);
        let ff = fixed_faces(&a);
        assert_eq!(ff.len(), 8);
        let per_weight: Vec<usize> = (0..4).map(|k| ff.iter().filter(|f| f.index == k).count()).collect();
        // binomial oracle
        assert_eq!(per_weight, vec![1, 3, 3, 1]);
        assert!(ff.iter().all(|f| f.dim == 0));
    }

    #[test]
    fn square_product_action_fixes_two_facets() {
        let a = input(square(), &[1, 0]);
        let ff = fixed_faces(&a);
        assert_eq!(ff.len(), 2);
        assert!(ff.iter().all(|f| f.dim == 1));
        assert_eq!(critical_values(&a), int_vec(&[0, 1]));
    }

    #[test]
    fn segment_and_trivial_action() {
        let seg = hull(&[rat_vec(&[0]), rat_vec(&[1])]).unwrap();
        assert_eq!(critical_values(&input(seg, &[1])), int_vec(&[0, 1]));
        assert_eq!(ActionInput::new(square(), int_vec(&[0, 0])).unwrap_err(), ActionError::TrivialAction);
        assert_eq!(ActionInput::new(square(), int_vec(&[1])).unwrap_err(), ActionError::BadCovector(2));
        let flat = hull(&[rat_vec(&[0, 0]), rat_vec(&[1, 0])]).unwrap();
        assert!(matches!(
            ActionInput::new(flat, int_vec(&[0, 1])),
            Err(ActionError::NotFullDimensional { .. })
        ));
        let half = hull(&[rat_vec(&[0]), vec![Rational::new(1.into(), 2.into())]]).unwrap();
        assert_eq!(ActionInput::new(half, int_vec(&[1])).unwrap_err(), ActionError::NotLatticePolytope);
    }

    #[test]
    fn reparametrization_warns() {
        let a = input(square(), &[2, 2]);
        assert_eq!(a.nu(), int_vec(&[1, 1]).as_slice());
        assert_eq!(a.warnings().len(), 1);
        assert!(a.warnings()[0].contains("re-parametrized to (1, 1)"));
    }

    #[test]
    fn equalization_examples() {
        assert!(equalization_check(&input(cube(3), &[1, 1, 1])).equalized);
        let a = input(square(), &[2, 1]);
        let rep = equalization_check(&a);
        assert!(!rep.equalized);
        // oracle: edges in direction e1 pair to 2
        let es = edges(&a);
        let expected: Vec<usize> = es
            .iter()
            .enumerate()
            .filter(|(_, e)| e.direction == int_vec(&[1, 0]))
            .map(|(k, _)| k)
            .collect();
        assert_eq!(rep.offending.iter().map(|(k, _)| *k).collect::<Vec<_>>(), expected);
        assert!(rep.offending.iter().all(|(_, o)| *o == Integer::from(2)));
        assert_eq!(amfm_check(&a).unwrap_err(), ActionError::NotEqualized(2));
    }

    #[test]
    fn amfm_examples() {
        let rep = amfm_check(&input(cube(3), &[1, 1, 1])).unwrap();
        assert_eq!(rep.len(), 12);
        assert!(rep.iter().all(|e| e.ok && e.degree == Integer::one()));
        let seg = hull(&[rat_vec(&[0]), rat_vec(&[2])]).unwrap();
        let rep = amfm_check(&input(seg, &[1])).unwrap();
        assert_eq!(rep[0].lattice_length, Integer::from(2));
        assert!(rep[0].ok);
    }

    #[test]
    fn cube_bb_closures() {
        let a = input(cube(3), &[1, 1, 1]);
        let e1 = a
            .polytope()
            .vertices()
            .iter()
            .position(|v| *v == rat_vec(&[1, 0, 0]))
            .unwrap();
        let plus = bb_closure(&a, &[e1], Sign::Plus).unwrap();
        assert_eq!(plus.codim, 2);
        assert_eq!(plus.transverse_edges, 1);
        assert_eq!(plus.faces.len(), 1);
        let minus = bb_closure(&a, &[e1], Sign::Minus).unwrap();
        assert_eq!(minus.codim, 1);
        assert_eq!(minus.transverse_edges, 2);
        // the facet x1 = 1
        let facet: Vec<usize> = (0..8)
            .filter(|&v| a.polytope().vertices()[v][0] == Rational::one())
            .collect();
        assert_eq!(minus.faces, vec![facet]);

        let origin = 0;
        assert_eq!(bb_closure(&a, &[origin], Sign::Minus).unwrap().codim, 0);
        assert_eq!(bb_closure(&a, &[origin], Sign::Plus).unwrap().dim, 0);
        assert!(bb_closure(&a, &[0, 1], Sign::Plus).is_err());
    }

    #[test]
    fn condition_star_examples() {
        let c5 = condition_star(&input(cube(5), &[1; 5]));
        assert!(c5.holds);
        assert!(!c5.all_inner);
        assert_eq!(c5.failing_indices, vec![1, 4]);
        assert!(condition_star(&input(square(), &[1, 1])).holds);
    }

    #[test]
    fn cube_analysis() {
        let an = analyze(&input(cube(3), &[1, 1, 1])).unwrap();
        assert_eq!(an.criticality, 3);
        assert_eq!(an.bandwidth, Integer::from(3));
        assert!(an.smoothness.smooth);
        assert!(!an.b_type);
        assert!(!an.bordism);
        assert!(an.nu_codim_consistent);
        assert!(an.fixed_faces_partition);
        for f in &an.fixed_faces {
            assert_eq!(f.bb_plus.transverse_edges + f.bb_minus.transverse_edges + f.face.dim, 3);
        }
    }
}
