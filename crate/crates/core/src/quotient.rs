//! GIT quotients, prunings and Chow quotients of a toric C*-action, and the
//! triangular diagram relating them.
//!
//! Node `(i, j)`: for `i == j` the slice at the critical value `a_i`; for
//! `j == i + 1` the slice at a level strictly between `a_i` and `a_{i+1}`;
//! for `j >= i + 2` the fiber polytope of the pruning `P ∩ {τ- <= nu <= τ+}`.
//! All quotient polytopes live in the same chart of `ker nu`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::action::{critical_values, equalization_check, fixed_face_reports, ActionError, ActionInput};
use crate::exactnum::{Integer, Rational};
use crate::fan::{classify_morphism, common_refinement, Fan, FanError, MorphismClassification, MorphismKind, SmoothnessReport};
use crate::polytope::{
    canonicalize, dilate, minkowski_sum, normal_fan, slice_in_chart, truncate_between, AffineChart, Canonicalization,
    LatticePolytope, PolytopeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("node ({i}, {j}) is out of range for criticality {r}")]
    IndexOutOfRange { i: usize, j: usize, r: usize },
    #[error("NotEqualized: {0} edge(s) have nontrivial isotropy; the diagram hypotheses fail")]
    NotEqualized(usize),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

type Result<T> = std::result::Result<T, QuotientError>;

fn rat(v: &Integer) -> Rational {
    Rational::from_integer(v.clone())
}

fn check_pair(r: usize, i: usize, j: usize, strict: bool) -> Result<()> {
    if i > j || j > r || (strict && i == j) {
        return Err(QuotientError::IndexOutOfRange { i, j, r });
    }
    Ok(())
}

/// `(τ-, τ+)` used for the pruning `(i, j)`, `i < j`, in normalized weights:
/// midpoints of the outer intervals, or the quarter points when both lie in
/// the same interval.
pub fn chamber_representative(crit: &[Integer], i: usize, j: usize) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    if j == i + 1 {
        let gap = rat(&crit[j]) - rat(&crit[i]);
        let q = &gap / Rational::from_integer(4.into());
        (rat(&crit[i]) + &q, rat(&crit[i]) + q * Rational::from_integer(3.into()))
    } else {
        (
            (rat(&crit[i]) + rat(&crit[i + 1])) / &two,
            (rat(&crit[j - 1]) + rat(&crit[j])) / two,
        )
    }
}

/// A second representative of the same chamber, distinct from
/// [`chamber_representative`].
fn alternate_representative(crit: &[Integer], i: usize, j: usize) -> (Rational, Rational) {
    let third = |a: &Integer, b: &Integer, k: i64| rat(a) + (rat(b) - rat(a)) * Rational::new(k.into(), 3.into());
    if j == i + 1 {
        (third(&crit[i], &crit[j], 1), third(&crit[i], &crit[j], 2))
    } else {
        (third(&crit[i], &crit[i + 1], 1), third(&crit[j - 1], &crit[j], 2))
    }
}

/// `P ∩ {lo <= nu <= hi}` for normalized weights `lo < hi`.
pub fn pruning_between(input: &ActionInput, lo: &Rational, hi: &Rational) -> Result<LatticePolytope> {
    Ok(truncate_between(input.polytope(), input.nu(), &input.level(lo), &input.level(hi))?)
}

pub fn pruning(input: &ActionInput, i: usize, j: usize) -> Result<LatticePolytope> {
    let crit = critical_values(input);
    check_pair(crit.len() - 1, i, j, true)?;
    let (lo, hi) = chamber_representative(&crit, i, j);
    pruning_between(input, &lo, &hi)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub i: usize,
    pub j: usize,
    pub tau_minus: Rational,
    pub tau_plus: Rational,
    pub alt_tau_minus: Rational,
    pub alt_tau_plus: Rational,
    /// The two representatives give prunings with equal normal fans.
    pub invariant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberGrid {
    pub r: usize,
    pub walls: Vec<Integer>,
    pub chambers: Vec<Chamber>,
}

pub fn chamber_grid(input: &ActionInput) -> Result<ChamberGrid> {
    let crit = critical_values(input);
    let r = crit.len() - 1;
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..=r).map(move |j| (i, j))).collect();
    let chambers = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let (tm, tp) = chamber_representative(&crit, i, j);
            let (am, ap) = alternate_representative(&crit, i, j);
            let f1 = normal_fan(&pruning_between(input, &tm, &tp)?)?;
            let f2 = normal_fan(&pruning_between(input, &am, &ap)?)?;
            Ok(Chamber {
                i,
                j,
                tau_minus: tm,
                tau_plus: tp,
                alt_tau_minus: am,
                alt_tau_plus: ap,
                invariant: f1 == f2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChamberGrid { r, walls: crit, chambers })
}

/// A quotient polytope in the chart of `ker nu`, as computed and after
/// canonicalization, with its normal fan when it is full-dimensional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPolytope {
    pub raw: LatticePolytope,
    pub canonical: Canonicalization,
    pub fan: Option<Fan>,
}

impl QuotientPolytope {
    fn new(raw: LatticePolytope) -> Result<QuotientPolytope> {
        let fan = if raw.is_full_dimensional() { Some(normal_fan(&raw)?) } else { None };
        Ok(QuotientPolytope {
            canonical: canonicalize(&raw),
            raw,
            fan,
        })
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.canonical.polytope
    }
}

/// Slice at `a_i` for `j == i`, at the midpoint of `(a_i, a_{i+1})` for
/// `j == i + 1`.
pub fn git_quotient(input: &ActionInput, i: usize, j: usize) -> Result<QuotientPolytope> {
    let crit = critical_values(input);
    let r = crit.len() - 1;
    if j != i && j != i + 1 {
        return Err(QuotientError::IndexOutOfRange { i, j, r });
    }
    check_pair(r, i, j, false)?;
    let level = if i == j {
        rat(&crit[i])
    } else {
        (rat(&crit[i]) + rat(&crit[j])) / Rational::from_integer(2.into())
    };
    let chart = AffineChart::new(input.nu())?;
    QuotientPolytope::new(slice_in_chart(input.polytope(), &chart, &input.level(&level))?)
}

fn sum_all(parts: Vec<LatticePolytope>) -> Result<LatticePolytope> {
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one summand");
    it.try_fold(first, |acc, p| minkowski_sum(&acc, &p)).map_err(Into::into)
}

/// Fiber polytope of `q` under `nu`: the sum over consecutive vertex levels
/// `c_k < c_{k+1}` of `(c_{k+1} - c_k) * slice(midpoint)`, in the chart.
pub fn fiber_polytope(q: &LatticePolytope, chart: &AffineChart) -> Result<LatticePolytope> {
    let mut levels = q.vertex_levels(chart.nu());
    levels.sort();
    levels.dedup();
    let two = Rational::from_integer(2.into());
    let parts = levels
        .par_windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / &two;
            Ok(dilate(&slice_in_chart(q, chart, &mid)?, &(&w[1] - &w[0])))
        })
        .collect::<Result<Vec<_>>>()?;
    sum_all(parts)
}

/// Chow quotient of the pruning `(i, j)` as a fiber polytope.
pub fn chow_fiber_polytope(input: &ActionInput, i: usize, j: usize) -> Result<QuotientPolytope> {
    let chart = AffineChart::new(input.nu())?;
    QuotientPolytope::new(fiber_polytope(&pruning(input, i, j)?, &chart)?)
}

/// Chow quotient of the pruning `(i, j)` as the Minkowski sum of the
/// wall slices at `a_i, …, a_j`.
pub fn chow_minkowski_polytope(input: &ActionInput, i: usize, j: usize) -> Result<QuotientPolytope> {
    let crit = critical_values(input);
    check_pair(crit.len() - 1, i, j, true)?;
    let chart = AffineChart::new(input.nu())?;
    let parts = (i..=j)
        .into_par_iter()
        .map(|k| Ok(slice_in_chart(input.polytope(), &chart, &input.level(&rat(&crit[k])))?))
        .collect::<Result<Vec<_>>>()?;
    QuotientPolytope::new(sum_all(parts)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeRole {
    SemigeometricGit,
    GeometricGit,
    Chow,
}

impl NodeRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeRole::SemigeometricGit => "GIT_semigeometric",
            NodeRole::GeometricGit => "GIT_geometric",
            NodeRole::Chow => "Chow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub i: usize,
    pub j: usize,
    pub role: NodeRole,
    pub quotient: QuotientPolytope,
    pub smoothness: Option<SmoothnessReport>,
    /// The second construction, when cross-validation is enabled.
    pub minkowski: Option<QuotientPolytope>,
    pub cross_validated: Option<bool>,
}

impl Node {
    pub fn fan(&self) -> Option<&Fan> {
        self.quotient.fan.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    S,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramEdge {
    pub kind: EdgeKind,
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub classification: Option<MorphismClassification>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    pub top: (usize, usize),
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub holds: bool,
    pub diagnostic: Option<String>,
}

pub type Comparison = ((usize, usize), (usize, usize), bool);

/// When a fixed component next to the sink (source) has a BB closure of
/// codimension 1, the Chow quotients along that side coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseCheck {
    pub side: &'static str,
    pub applies: bool,
    /// `(node, node, fans equal)`.
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramOptions {
    pub check_squares: bool,
    pub cross_validate: bool,
    /// Build even when the action is not equalized.
    pub force: bool,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions {
            check_squares: true,
            cross_validate: true,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientDiagram {
    pub r: usize,
    pub critical_values: Vec<Integer>,
    pub lattice_dim: usize,
    pub nodes: BTreeMap<(usize, usize), Node>,
    pub edges: Vec<DiagramEdge>,
    pub squares: Vec<Square>,
    pub collapse: Vec<CollapseCheck>,
    pub equalized: bool,
    pub warnings: Vec<String>,
}

impl QuotientDiagram {
    pub fn node(&self, i: usize, j: usize) -> Option<&Node> {
        self.nodes.get(&(i, j))
    }

    pub fn fan(&self, i: usize, j: usize) -> Option<&Fan> {
        self.node(i, j).and_then(Node::fan)
    }

    pub fn edge(&self, from: (usize, usize), to: (usize, usize)) -> Option<&DiagramEdge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    pub fn squares_hold(&self) -> bool {
        self.squares.iter().all(|s| s.holds)
    }

    pub fn cross_validation_holds(&self) -> bool {
        self.nodes.values().all(|n| n.cross_validated != Some(false))
    }

    pub fn collapse_holds(&self) -> bool {
        self.collapse.iter().all(|c| c.comparisons.iter().all(|x| x.2))
    }
}

fn build_node(input: &ActionInput, i: usize, j: usize, opts: &DiagramOptions) -> Result<Node> {
    let role = match j - i {
        0 => NodeRole::SemigeometricGit,
        1 => NodeRole::GeometricGit,
        _ => NodeRole::Chow,
    };
    let quotient = match role {
        NodeRole::SemigeometricGit | NodeRole::GeometricGit => git_quotient(input, i, j)?,
        NodeRole::Chow => chow_fiber_polytope(input, i, j)?,
    };
    let minkowski = if opts.cross_validate && j > i { Some(chow_minkowski_polytope(input, i, j)?) } else { None };
    let cross_validated = minkowski.as_ref().map(|m| m.fan.is_some() && m.fan == quotient.fan);
    Ok(Node {
        i,
        j,
        role,
        smoothness: quotient.fan.as_ref().map(Fan::is_smooth),
        quotient,
        minkowski,
        cross_validated,
    })
}

fn classify_edge(nodes: &BTreeMap<(usize, usize), Node>, kind: EdgeKind, from: (usize, usize), to: (usize, usize)) -> DiagramEdge {
    let (source, target) = (nodes[&from].fan(), nodes[&to].fan());
    let (classification, diagnostic) = match (source, target) {
        (Some(s), Some(t)) => match s.refines(t) {
            Ok(true) => match classify_morphism(s, t) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            },
            Ok(false) => (None, Some("NotARefinement: the source fan does not refine the target fan".into())),
            Err(e) => (None, Some(e.to_string())),
        },
        _ => (None, Some("a node polytope is not full-dimensional in the chart".into())),
    };
    DiagramEdge {
        kind,
        from,
        to,
        classification,
        diagnostic,
    }
}

fn check_square(nodes: &BTreeMap<(usize, usize), Node>, i: usize, j: usize) -> Square {
    let (top, left, right) = ((i, j), (i, j - 1), (i + 1, j));
    let (holds, diagnostic) = match (nodes[&top].fan(), nodes[&left].fan(), nodes[&right].fan()) {
        (Some(t), Some(l), Some(r)) => match common_refinement(l, r) {
            Ok(c) if &c == t => (true, None),
            Ok(c) => (
                false,
                Some(format!(
                    "common refinement has {} rays / {} cones, node has {} / {}",
                    c.rays().len(),
                    c.cones().len(),
                    t.rays().len(),
                    t.cones().len()
                )),
            ),
            Err(e) => (false, Some(e.to_string())),
        },
        _ => (false, Some("a node fan is missing".into())),
    };
    Square {
        top,
        left,
        right,
        holds,
        diagnostic,
    }
}

fn collapse_checks(input: &ActionInput, r: usize, nodes: &BTreeMap<(usize, usize), Node>) -> Vec<CollapseCheck> {
    let reports = fixed_face_reports(input);
    let sink_side = r >= 2 && reports.iter().any(|f| f.face.index == 1 && f.bb_minus.codim == 1);
    let source_side = r >= 2 && reports.iter().any(|f| f.face.index == r - 1 && f.bb_plus.codim == 1);
    let cmp = |a: (usize, usize), b: (usize, usize)| {
        let eq = matches!((nodes[&a].fan(), nodes[&b].fan()), (Some(x), Some(y)) if x == y);
        (a, b, eq)
    };
    vec![
        CollapseCheck {
            side: "sink",
            applies: sink_side,
            comparisons: if sink_side { (2..=r).map(|j| cmp((0, j), (1, j))).collect() } else { Vec::new() },
        },
        CollapseCheck {
            side: "source",
            applies: source_side,
            comparisons: if source_side {
                (0..=r - 2).map(|i| cmp((i, r - 1), (i, r))).collect()
            } else {
                Vec::new()
            },
        },
    ]
}

/// Computes every node `(i, j)`, `0 <= i <= j <= r`, classifies the `s` and
/// `d` maps between Chow nodes and, as requested, checks rhombi and compares
/// the two Chow constructions.
pub fn build_diagram(input: &ActionInput, opts: &DiagramOptions) -> Result<QuotientDiagram> {
    let eq = equalization_check(input);
    let mut warnings = input.warnings().to_vec();
    if !eq.equalized {
        if !opts.force {
            return Err(QuotientError::NotEqualized(eq.offending.len()));
        }
        warnings.push(format!(
            "action is not equalized ({} offending edges); diagram claims are unsupported",
            eq.offending.len()
        ));
    }
    let crit = critical_values(input);
    let r = crit.len() - 1;
    let pairs: Vec<(usize, usize)> = (0..=r).flat_map(|i| (i..=r).map(move |j| (i, j))).collect();
    let nodes: BTreeMap<(usize, usize), Node> = pairs
        .par_iter()
        .map(|&(i, j)| build_node(input, i, j, opts).map(|n| ((i, j), n)))
        .collect::<Result<_>>()?;

    let mut edge_specs = Vec::new();
    for i in 0..=r {
        for j in i + 2..=r {
            edge_specs.push((EdgeKind::S, (i, j), (i, j - 1)));
            edge_specs.push((EdgeKind::D, (i, j), (i + 1, j)));
        }
    }
    let edges = edge_specs
        .par_iter()
        .map(|&(k, from, to)| classify_edge(&nodes, k, from, to))
        .collect();
    let squares = if opts.check_squares {
        pairs
            .par_iter()
            .filter(|(i, j)| j - i >= 2)
            .map(|&(i, j)| check_square(&nodes, i, j))
            .collect()
    } else {
        Vec::new()
    };
    let collapse = collapse_checks(input, r, &nodes);
    Ok(QuotientDiagram {
        r,
        critical_values: crit,
        lattice_dim: input.nu().len() - 1,
        nodes,
        edges,
        squares,
        collapse,
        equalized: eq.equalized,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterInfo {
    pub cone: Vec<Vec<Integer>>,
    pub new_ray: Vec<Integer>,
    /// Cone dimension, i.e. the codimension of the blown-up stratum.
    pub codim: usize,
    pub stratum_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCenters {
    pub kind: EdgeKind,
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub centers: Vec<CenterInfo>,
    /// Indices into `centers`, grouped into connected components: two
    /// strata meet iff their cones lie in a common cone of the target fan.
    pub components: Vec<Vec<usize>>,
}

pub fn centers_report(diagram: &QuotientDiagram) -> Vec<EdgeCenters> {
    diagram
        .edges
        .iter()
        .map(|e| {
            let centers: Vec<CenterInfo> = match &e.classification {
                Some(c) if c.kind == MorphismKind::SmoothBlowup => c
                    .centers
                    .iter()
                    .map(|b| CenterInfo {
                        cone: b.cone.clone(),
                        new_ray: b.new_ray.clone(),
                        codim: b.codim(),
                        stratum_dim: diagram.lattice_dim - b.codim(),
                    })
                    .collect(),
                _ => Vec::new(),
            };
            let target = diagram.fan(e.to.0, e.to.1);
            let meet = |a: &CenterInfo, b: &CenterInfo| {
                target.is_some_and(|f| {
                    (0..f.cones().len()).any(|k| {
                        let gens = f.cone_generators(k);
                        a.cone.iter().chain(&b.cone).all(|r| gens.contains(r))
                    })
                })
            };
            let mut parent: Vec<usize> = (0..centers.len()).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    let root = find(p, p[x]);
                    p[x] = root;
                }
                p[x]
            }
            for a in 0..centers.len() {
                for b in a + 1..centers.len() {
                    if meet(&centers[a], &centers[b]) {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for k in 0..centers.len() {
                let root = find(&mut parent, k);
                groups.entry(root).or_default().push(k);
            }
            EdgeCenters {
                kind: e.kind,
                from: e.from,
                to: e.to,
                centers,
                components: groups.into_values().collect(),
            }
        })
        .collect()
}

/// Fiber polytope of the whole polytope, without pruning.
pub fn chow_quotient_unpruned(input: &ActionInput) -> Result<QuotientPolytope> {
    let chart = AffineChart::new(input.nu())?;
    QuotientPolytope::new(fiber_polytope(input.polytope(), &chart)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::exactnum::{int_vec, rat, rat_vec};
    use crate::polytope::{hull, hull_tagged, LatticeTag};

    fn input(ex: examples::Example) -> ActionInput {
        ActionInput::new(hull(&ex.vertices).unwrap(), ex.nu).unwrap()
    }

    fn cube(n: usize) -> ActionInput {
        input(examples::cube(n).unwrap())
    }

    #[test]
    fn representatives() {
        let crit = int_vec(&[0, 1, 3, 4]);
        assert_eq!(chamber_representative(&crit, 0, 1), (rat(1, 4), rat(3, 4)));
        assert_eq!(chamber_representative(&crit, 0, 3), (rat(1, 2), rat(7, 2)));
        assert_eq!(chamber_representative(&crit, 1, 2), (rat(3, 2), rat(5, 2)));
    }

    #[test]
    fn segment_pruning() {
        let seg = input(examples::segment());
        assert_eq!(pruning(&seg, 0, 1).unwrap().vertices(), &[vec![rat(1, 4)], vec![rat(3, 4)]]);
        assert!(pruning(&seg, 1, 1).is_err());
        assert!(pruning(&seg, 0, 2).is_err());
    }

    #[test]
    fn cube_prunings_and_grid() {
        let c = cube(3);
        // both corners cut: the corner vertices are replaced by triangles
        let p = pruning(&c, 0, 3).unwrap();
        assert_eq!(p.vertices().len(), 12);
        let grid = chamber_grid(&c).unwrap();
        assert_eq!(grid.chambers.len(), 6);
        assert!(grid.chambers.iter().all(|ch| ch.invariant));
        let seg = chamber_grid(&input(examples::segment())).unwrap();
        assert_eq!(seg.chambers.len(), 1);
    }

    #[test]
    fn cube_git_quotients() {
        let c = cube(3);
        let wall = git_quotient(&c, 1, 1).unwrap();
        assert_eq!(wall.raw.vertices().len(), 3);
        assert!(wall.fan.as_ref().unwrap().is_smooth().smooth);
        let geo = git_quotient(&c, 0, 1).unwrap();
        assert_eq!(geo.raw.vertices().len(), 3);
        // the projective-plane fan
        let f = geo.fan.unwrap();
        assert_eq!(f.rays().len(), 3);
        assert!(f.is_smooth().smooth);
        assert_eq!(f, wall.fan.unwrap());
        assert!(git_quotient(&c, 0, 0).unwrap().fan.is_none());
        assert!(git_quotient(&c, 0, 2).is_err());
        assert!(git_quotient(&c, 3, 4).is_err());
    }

    #[test]
    fn square_chow() {
        let sq = input(examples::square());
        let fib = chow_fiber_polytope(&sq, 0, 2).unwrap();
        assert_eq!(fib.polytope().vertices(), &[rat_vec(&[0]), rat_vec(&[1])]);
        let mink = chow_minkowski_polytope(&sq, 0, 2).unwrap();
        assert_eq!(mink.fan, fib.fan);
        // ambient oracle: slices at 0, 1, 2 sum to conv{(2,1),(1,2)}
        let chart = AffineChart::new(sq.nu()).unwrap();
        let pts: Vec<Vec<Rational>> = [[2, 1], [1, 2]].iter().map(|p| chart.forward(&rat_vec(p)).1).collect();
        let mut expected = pts.clone();
        expected.sort();
        assert_eq!(mink.raw.vertices(), expected.as_slice());
    }

    #[test]
    fn segment_minkowski_is_point() {
        let seg = input(examples::segment());
        let m = chow_minkowski_polytope(&seg, 0, 1).unwrap();
        assert_eq!(m.raw.vertices().len(), 1);
        assert_eq!(m.fan, Some(Fan::trivial()));
    }

    #[test]
    fn cube3_is_hexagon() {
        let c = cube(3);
        let fib = chow_fiber_polytope(&c, 0, 3).unwrap();
        assert_eq!(fib.raw.vertices().len(), 6);
        // permutations of (2,1,0) pushed into the chart and canonicalized
        let chart = AffineChart::new(c.nu()).unwrap();
        let perms = [[2, 1, 0], [2, 0, 1], [1, 2, 0], [1, 0, 2], [0, 2, 1], [0, 1, 2]];
        let pts: Vec<Vec<Rational>> = perms.iter().map(|p| chart.forward(&rat_vec(p)).1).collect();
        let oracle = canonicalize(&hull_tagged(&pts, LatticeTag::Quotient).unwrap());
        assert_eq!(fib.canonical.polytope, oracle.polytope);
    }

    #[test]
    fn square_diagram() {
        let d = build_diagram(&input(examples::square()), &DiagramOptions::default()).unwrap();
        assert_eq!(d.nodes.len(), 6);
        let quotients: Vec<&Node> = d.nodes.values().filter(|n| n.j > n.i).collect();
        assert_eq!(quotients.len(), 3);
        assert!(quotients.iter().all(|n| n.quotient.raw.intrinsic_dim() == 1));
        assert_eq!(d.edges.len(), 2);
        for e in &d.edges {
            assert_eq!(e.classification.as_ref().unwrap().kind, MorphismKind::Isomorphism);
        }
        assert!(d.squares_hold());
        assert!(d.cross_validation_holds());
    }

    #[test]
    fn cube3_diagram() {
        let d = build_diagram(&cube(3), &DiagramOptions::default()).unwrap();
        let e = d.edge((0, 2), (0, 1)).unwrap();
        let cls = e.classification.as_ref().unwrap();
        assert_eq!(cls.kind, MorphismKind::SmoothBlowup);
        assert_eq!(cls.centers.len(), 3);
        assert!(cls.centers.iter().all(|c| c.codim() == 2));
        let top = d.edge((0, 3), (0, 2)).unwrap();
        assert_eq!(top.classification.as_ref().unwrap().kind, MorphismKind::Isomorphism);
        assert!(d.squares_hold());
        assert!(d.cross_validation_holds());
        assert!(d.collapse_holds());
        assert!(d.collapse.iter().all(|c| c.applies));
        let rep = centers_report(&d);
        let c = rep.iter().find(|x| x.from == (0, 2) && x.to == (0, 1)).unwrap();
        assert_eq!(c.components.len(), 3);
        assert!(c.centers.iter().all(|x| x.stratum_dim == 0));
        assert!(rep.iter().find(|x| x.from == (0, 3) && x.to == (0, 2)).unwrap().centers.is_empty());
        // the unpruned fiber polytope gives the same fan as node (0, r)
        assert_eq!(chow_quotient_unpruned(&cube(3)).unwrap().fan.as_ref(), d.fan(0, 3));
    }

    #[test]
    fn non_equalized_is_refused() {
        let sq = examples::square();
        let a = ActionInput::new(hull(&sq.vertices).unwrap(), int_vec(&[2, 1])).unwrap();
        assert_eq!(build_diagram(&a, &DiagramOptions::default()).unwrap_err(), QuotientError::NotEqualized(2));
        let forced = build_diagram(
            &a,
            &DiagramOptions {
                force: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!forced.equalized);
        assert!(!forced.warnings.is_empty());
    }
}
