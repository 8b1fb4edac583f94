//! Python bindings. Documents go in as dicts (or JSON text) in the same
//! schema the CLI reads; reports come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::Value;

use chowbench_core::action::{analyze as analyze_action, critical_values, ActionError, ActionInput};
use chowbench_core::examples;
use chowbench_core::exactnum::Integer;
use chowbench_core::polytope::hull;
use chowbench_core::quotient::{
    build_diagram, chow_fiber_polytope, chow_minkowski_polytope, DiagramOptions, QuotientError,
};
use chowbench_core::report::{analysis_json, diagram_json, quotient_json, PolytopeDocument, SCHEMA_VERSION};

create_exception!(chowbench, TrivialActionError, PyException);
create_exception!(chowbench, NotEqualizedError, PyException);

fn action_err(e: ActionError) -> PyErr {
    match e {
        ActionError::TrivialAction => TrivialActionError::new_err(e.to_string()),
        ActionError::NotEqualized(_) => NotEqualizedError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn quotient_err(e: QuotientError) -> PyErr {
    match e {
        QuotientError::NotEqualized(_) => NotEqualizedError::new_err(e.to_string()),
        QuotientError::Action(a) => action_err(a),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_python<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn load(py: Python<'_>, doc: &Bound<'_, PyAny>, nu: Option<Vec<i64>>) -> PyResult<(Option<String>, ActionInput)> {
    let text: String = if doc.is_instance_of::<PyString>() {
        doc.extract()?
    } else {
        py.import("json")?.call_method1("dumps", (doc,))?.extract()?
    };
    let parsed = PolytopeDocument::from_json(&text)
        .and_then(|d| d.parse())
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let nu = nu.map_or(parsed.nu, |v| v.into_iter().map(Integer::from).collect());
    let polytope = hull(&parsed.vertices).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((parsed.name, ActionInput::new(polytope, nu).map_err(action_err)?))
}

/// Built-in document: `cube` (dimension `n`), `brus`, `segment` or `square`.
#[pyfunction]
#[pyo3(signature = (name, n = 3))]
fn example<'py>(py: Python<'py>, name: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let ex = examples::by_name(name, n).ok_or_else(|| PyValueError::new_err(format!("unknown example {name:?} (n = {n})")))?;
    to_python(py, &serde_json::to_value(PolytopeDocument::from_example(&ex)).expect("document serializes"))
}

#[pyfunction]
#[pyo3(signature = (document, nu = None))]
fn analyze<'py>(py: Python<'py>, document: &Bound<'py, PyAny>, nu: Option<Vec<i64>>) -> PyResult<Bound<'py, PyAny>> {
    let (_, input) = load(py, document, nu)?;
    let an = analyze_action(&input).map_err(action_err)?;
    to_python(py, &analysis_json(input.polytope(), &an))
}

#[pyfunction]
#[pyo3(signature = (document, nu = None, force = false, check_squares = true, cross_validate = true, emit_polytopes = false))]
fn diagram<'py>(
    py: Python<'py>,
    document: &Bound<'py, PyAny>,
    nu: Option<Vec<i64>>,
    force: bool,
    check_squares: bool,
    cross_validate: bool,
    emit_polytopes: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let (name, input) = load(py, document, nu)?;
    let an = analyze_action(&input).map_err(action_err)?;
    let opts = DiagramOptions {
        check_squares,
        cross_validate,
        force,
    };
    let d = py.detach(|| build_diagram(&input, &opts)).map_err(quotient_err)?;
    to_python(py, &diagram_json(name.as_deref(), input.polytope(), &an, &d, emit_polytopes))
}

/// Chow quotient of the pruning `(i, j)` by both constructions; defaults to
/// the full quotient.
#[pyfunction]
#[pyo3(signature = (document, i = None, j = None, nu = None))]
fn chow<'py>(
    py: Python<'py>,
    document: &Bound<'py, PyAny>,
    i: Option<usize>,
    j: Option<usize>,
    nu: Option<Vec<i64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (_, input) = load(py, document, nu)?;
    let r = critical_values(&input).len() - 1;
    let (i, j) = (i.unwrap_or(0), j.unwrap_or(r));
    let fiber = chow_fiber_polytope(&input, i, j).map_err(quotient_err)?;
    let mink = chow_minkowski_polytope(&input, i, j).map_err(quotient_err)?;
    let v = serde_json::json!({
        "i": i,
        "j": j,
        "fiber": quotient_json(&fiber, true),
        "minkowski": quotient_json(&mink, true),
        "fans_equal": fiber.fan.is_some() && fiber.fan == mink.fan,
    });
    to_python(py, &v)
}

/// Warnings raised while ingesting a document (e.g. a non-primitive covector).
#[pyfunction]
#[pyo3(signature = (document, nu = None))]
fn warnings(py: Python<'_>, document: &Bound<'_, PyAny>, nu: Option<Vec<i64>>) -> PyResult<Vec<String>> {
    Ok(load(py, document, nu)?.1.warnings().to_vec())
}

#[pymodule]
fn chowbench(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", SCHEMA_VERSION)?;
    m.add("TrivialActionError", m.py().get_type::<TrivialActionError>())?;
    m.add("NotEqualizedError", m.py().get_type::<NotEqualizedError>())?;
    m.add_function(wrap_pyfunction!(example, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(diagram, m)?)?;
    m.add_function(wrap_pyfunction!(chow, m)?)?;
    m.add_function(wrap_pyfunction!(warnings, m)?)?;
    Ok(())
}
