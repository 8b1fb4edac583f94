//! JSON input documents and deterministic JSON reports.
//!
//! Numbers that may be large or fractional are written as strings (`"p/q"`
//! or `"p"`); indices and counts are plain JSON integers. Object keys are
//! sorted, so identical input gives byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{ActionAnalysis, BbClosure};
use crate::exactnum::{format_rational, parse_integer, parse_rational, Integer, Rational};
use crate::examples::Example;
use crate::fan::{Fan, MorphismClassification};
use crate::polytope::LatticePolytope;
use crate::quotient::{centers_report, EdgeKind, QuotientDiagram, QuotientPolytope};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

/// A JSON number or string holding an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Int(i64),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Text(s) => s.clone(),
            Scalar::Int(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    pub schema_version: String,
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<Scalar>>,
    pub nu: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Validated contents of a [`PolytopeDocument`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedDocument {
    pub name: Option<String>,
    pub vertices: Vec<Vec<Rational>>,
    pub nu: Vec<Integer>,
}

impl PolytopeDocument {
    pub fn from_json(text: &str) -> Result<PolytopeDocument, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_example(ex: &Example) -> PolytopeDocument {
        PolytopeDocument {
            schema_version: SCHEMA_VERSION.into(),
            ambient_dim: ex.nu.len(),
            vertices: ex
                .vertices
                .iter()
                .map(|v| v.iter().map(|q| Scalar::Text(format_rational(q))).collect())
                .collect(),
            nu: ex.nu.iter().map(|x| Scalar::Text(x.to_string())).collect(),
            name: Some(ex.name.clone()),
        }
    }

    pub fn parse(&self) -> Result<ParsedDocument, DocumentError> {
        let field = |path: String, message: String| DocumentError::Field { path, message };
        if self.schema_version != SCHEMA_VERSION {
            return Err(field(
                "schema_version".into(),
                format!("unsupported version {:?}, expected {:?}", self.schema_version, SCHEMA_VERSION),
            ));
        }
        if self.vertices.is_empty() {
            return Err(field("vertices".into(), "at least one vertex is required".into()));
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (r, row) in self.vertices.iter().enumerate() {
            if row.len() != self.ambient_dim {
                return Err(field(
                    format!("vertices[{r}]"),
                    format!("has {} coordinates, ambient_dim is {}", row.len(), self.ambient_dim),
                ));
            }
            let mut out = Vec::with_capacity(row.len());
            for (c, x) in row.iter().enumerate() {
                out.push(
                    parse_rational(&x.text())
                        .map_err(|_| field(format!("vertices[{r}][{c}]"), format!("not a rational: {:?}", x.text())))?,
                );
            }
            vertices.push(out);
        }
        if self.nu.len() != self.ambient_dim {
            return Err(field(
                "nu".into(),
                format!("has {} entries, ambient_dim is {}", self.nu.len(), self.ambient_dim),
            ));
        }
        let nu = self
            .nu
            .iter()
            .enumerate()
            .map(|(k, x)| parse_integer(&x.text()).map_err(|_| field(format!("nu[{k}]"), format!("not an integer: {:?}", x.text()))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParsedDocument {
            name: self.name.clone(),
            vertices,
            nu,
        })
    }

    pub fn to_json(&self) -> String {
        to_pretty(&serde_json::to_value(self).expect("document serializes"))
    }
}

/// Sorted-key pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn z(x: &Integer) -> Value {
    Value::String(x.to_string())
}

pub fn q_vec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

pub fn z_vec(v: &[Integer]) -> Value {
    Value::Array(v.iter().map(z).collect())
}

pub fn points(v: &[Vec<Rational>]) -> Value {
    Value::Array(v.iter().map(|p| q_vec(p)).collect())
}

pub fn polytope_json(p: &LatticePolytope) -> Value {
    json!({
        "lattice": p.lattice().to_string(),
        "ambient_dim": p.ambient_dim(),
        "intrinsic_dim": p.intrinsic_dim(),
        "vertices": points(p.vertices()),
        "f_vector": p.face_lattice().f_vector(),
        "facets": p.facets().iter().map(|f| json!({"normal": z_vec(&f.normal), "offset": q(&f.offset)})).collect::<Vec<_>>(),
    })
}

pub fn fan_json(f: &Fan) -> Value {
    let smooth = f.is_smooth();
    json!({
        "dim": f.dim(),
        "rays": f.rays().iter().map(|r| z_vec(r)).collect::<Vec<_>>(),
        "cones": f.cones(),
        "complete": f.is_complete(),
        "smooth": smooth.smooth,
        "non_smooth_cones": smooth.offending,
    })
}

fn bb_json(b: &BbClosure, nu_pm: usize) -> Value {
    json!({
        "codim": b.codim,
        "dim": b.dim,
        "faces": b.faces,
        "nu": nu_pm,
    })
}

pub fn analysis_json(p: &LatticePolytope, an: &ActionAnalysis) -> Value {
    let fixed: Vec<Value> = an
        .fixed_faces
        .iter()
        .map(|f| {
            json!({
                "vertices": f.face.vertices,
                "dim": f.face.dim,
                "weight": z(&f.face.weight),
                "critical_index": f.face.index,
                "bb_plus": bb_json(&f.bb_plus, f.bb_plus.transverse_edges),
                "bb_minus": bb_json(&f.bb_minus, f.bb_minus.transverse_edges),
            })
        })
        .collect();
    let offending: Vec<Value> = an
        .equalization
        .offending
        .iter()
        .map(|(k, order)| {
            let e = &an.edges[*k];
            json!({
                "edge": k,
                "sink": e.sink,
                "source": e.source,
                "sink_vertex": q_vec(&p.vertices()[e.sink]),
                "source_vertex": q_vec(&p.vertices()[e.source]),
                "direction": z_vec(&e.direction),
                "isotropy_order": z(order),
            })
        })
        .collect();
    let amfm = an.amfm.as_ref().map(|edges| {
        json!({
            "passes": edges.iter().all(|e| e.ok),
            "edges": edges.iter().map(|e| json!({
                "edge": e.edge,
                "sink": e.sink,
                "source": e.source,
                "degree": z(&e.degree),
                "lattice_length": z(&e.lattice_length),
                "ok": e.ok,
            })).collect::<Vec<_>>(),
        })
    });
    json!({
        "nu": z_vec(&an.nu),
        "vertices": points(p.vertices()),
        "vertex_weights": z_vec(&an.vertex_weights),
        "critical_values": z_vec(&an.critical_values),
        "criticality": an.criticality,
        "bandwidth": z(&an.bandwidth),
        "fixed_faces": fixed,
        "fixed_faces_partition_vertices": an.fixed_faces_partition,
        "edge_count": an.edges.len(),
        "equalized": an.equalization.equalized,
        "offending_edges": offending,
        "amfm": amfm,
        "smooth": an.smoothness.smooth,
        "non_smooth_vertices": an.smoothness.offending,
        "b_type": an.b_type,
        "bordism": an.bordism,
        "condition_star": an.condition_star.holds,
        "inner_codim_hypothesis": an.condition_star.all_inner,
        "codim_one_indices": an.condition_star.failing_indices,
        "nu_codim_consistent": an.nu_codim_consistent,
        "fixed_locus_model": "combinatorial model",
        "warnings": an.warnings,
    })
}

fn kind_str(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::S => "s",
        EdgeKind::D => "d",
    }
}

fn classification_json(c: &MorphismClassification) -> Value {
    json!({
        "kind": format!("{:?}", c.kind),
        "reason": c.reason,
    })
}

pub fn quotient_json(qp: &QuotientPolytope, emit_polytopes: bool) -> Value {
    let p = qp.polytope();
    let mut v = json!({
        "vertices": points(p.vertices()),
        "vertex_count": p.vertices().len(),
        "intrinsic_dim": p.intrinsic_dim(),
        "f_vector": p.face_lattice().f_vector(),
        "smooth": qp.fan.as_ref().map(|f| f.is_smooth().smooth),
        "canonicalization": {
            "translation": q_vec(&qp.canonical.translation),
            "scale": q(&qp.canonical.scale),
        },
    });
    if emit_polytopes {
        v["polytope"] = polytope_json(p);
        v["chart_vertices"] = points(qp.raw.vertices());
        v["fan"] = qp.fan.as_ref().map_or(Value::Null, fan_json);
    }
    v
}

pub fn diagram_json(
    name: Option<&str>,
    p: &LatticePolytope,
    an: &ActionAnalysis,
    d: &QuotientDiagram,
    emit_polytopes: bool,
) -> Value {
    let nodes: Vec<Value> = d
        .nodes
        .values()
        .map(|n| {
            let mut v = quotient_json(&n.quotient, emit_polytopes);
            v["i"] = json!(n.i);
            v["j"] = json!(n.j);
            v["role"] = json!(n.role.as_str());
            v
        })
        .collect();
    let centers = centers_report(d);
    let edges: Vec<Value> = d
        .edges
        .iter()
        .zip(&centers)
        .map(|(e, c)| {
            json!({
                "kind": kind_str(e.kind),
                "from": [e.from.0, e.from.1],
                "to": [e.to.0, e.to.1],
                "classification": e.classification.as_ref().map(classification_json),
                "diagnostic": e.diagnostic,
                "centers": c.centers.iter().map(|x| json!({
                    "cone": x.cone.iter().map(|r| z_vec(r)).collect::<Vec<_>>(),
                    "new_ray": z_vec(&x.new_ray),
                    "cone_dim": x.codim,
                    "stratum_dim": x.stratum_dim,
                })).collect::<Vec<_>>(),
                "center_components": c.components,
            })
        })
        .collect();
    let squares: Vec<Value> = d
        .squares
        .iter()
        .map(|s| {
            json!({
                "top": [s.top.0, s.top.1],
                "left": [s.left.0, s.left.1],
                "right": [s.right.0, s.right.1],
                "holds": s.holds,
                "diagnostic": s.diagnostic,
            })
        })
        .collect();
    let cross: Vec<Value> = d
        .nodes
        .values()
        .filter_map(|n| n.cross_validated.map(|eq| json!({"i": n.i, "j": n.j, "fans_equal": eq})))
        .collect();
    let collapse: Vec<Value> = d
        .collapse
        .iter()
        .map(|c| {
            json!({
                "side": c.side,
                "applies": c.applies,
                "comparisons": c.comparisons.iter().map(|(a, b, eq)| json!({
                    "a": [a.0, a.1], "b": [b.0, b.1], "fans_equal": eq,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "action_analysis": analysis_json(p, an),
        "criticality": d.r,
        "lattice_dim": d.lattice_dim,
        "nodes": nodes,
        "edges": edges,
        "squares": squares,
        "cross_validation": cross,
        "collapse": collapse,
        "equalized": d.equalized,
        "warnings": d.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn document_round_trip() {
        let doc = PolytopeDocument::from_example(&examples::brus());
        let text = doc.to_json();
        let back = PolytopeDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        let parsed = back.parse().unwrap();
        assert_eq!(parsed.vertices, examples::brus().vertices);
        assert_eq!(parsed.nu, examples::brus().nu);
    }

    #[test]
    fn document_errors() {
        let e = PolytopeDocument::from_json("{\"schema_version\": \"1\",\n \"ambient_dim\": 2,").unwrap_err();
        assert!(matches!(e, DocumentError::Json { line: 2, .. }));
        let doc = PolytopeDocument::from_json(
            r#"{"schema_version":"1","ambient_dim":2,"vertices":[["0","1/0"]],"nu":["1","1"]}"#,
        )
        .unwrap();
        assert_eq!(
            doc.parse().unwrap_err(),
            DocumentError::Field {
                path: "vertices[0][1]".into(),
                message: "not a rational: \"1/0\"".into()
            }
        );
        let doc = PolytopeDocument::from_json(
            r#"{"schema_version":"1","ambient_dim":2,"vertices":[[0, "1/2"]],"nu":[1]}"#,
        )
        .unwrap();
        assert!(matches!(doc.parse().unwrap_err(), DocumentError::Field { ref path, .. } if path == "nu"));
    }
}
