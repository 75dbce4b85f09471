//! JSON forms of the core types.
//!
//! Scalars are written as strings: `"p/q"` for rationals and 17 significant
//! digits for floats. Readers also accept JSON numbers.
//!
//! ```text
//! polygon: {"scalar": "rational", "n": 3, "closed": true,
//!           "vertices": [["1/1","0/1"], ...], "monodromy": [["1/1","0/1"],["0/1","1/1"]]}
//! sv:      {"scalar": "float", "s": [...], "v": [...]}
//! form:    {"a": ..., "b": ..., "c": ...}
//! integrals: {"F": [...]}
//! ```

use crate::error::{Error, Result};
use crate::geom::{Mat2, Vec2};
use crate::integrals::IntegralVector;
use crate::polygon::{PolygonData, SVCoords};
use crate::scalar::Scalar;
use crate::symplectic::QuadraticForm;
use serde_json::{json, Value};

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_text())
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    let parsed = match v {
        Value::String(s) => S::parse_text(s),
        Value::Number(n) => S::parse_text(&n.to_string()),
        _ => None,
    };
    parsed.ok_or_else(|| Error::Parse(format!("not a {} scalar: {v}", S::NAME)))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

fn scalars<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?.iter().map(scalar_from_json).collect()
}

fn vec2_to_json<S: Scalar>(p: &Vec2<S>) -> Value {
    json!([scalar_to_json(&p.x), scalar_to_json(&p.y)])
}

fn vec2_from_json<S: Scalar>(v: &Value) -> Result<Vec2<S>> {
    match scalars::<S>(v, "vertex")?.as_slice() {
        [x, y] => Ok(Vec2::new(x.clone(), y.clone())),
        _ => Err(Error::Parse("a vertex has two coordinates".into())),
    }
}

fn mat2_to_json<S: Scalar>(m: &Mat2<S>) -> Value {
    json!([[scalar_to_json(&m.a), scalar_to_json(&m.b)], [scalar_to_json(&m.c), scalar_to_json(&m.d)]])
}

fn mat2_from_json<S: Scalar>(v: &Value) -> Result<Mat2<S>> {
    let rows = array(v, "monodromy")?;
    if rows.len() != 2 {
        return Err(Error::Parse("monodromy has two rows".into()));
    }
    let (r0, r1) = (vec2_from_json::<S>(&rows[0])?, vec2_from_json::<S>(&rows[1])?);
    Ok(Mat2::new(r0.x, r0.y, r1.x, r1.y))
}

pub fn polygon_to_json<S: Scalar>(p: &PolygonData<S>) -> Value {
    json!({
        "scalar": S::NAME,
        "n": p.n(),
        "closed": p.closed,
        "vertices": p.vertices.iter().map(vec2_to_json).collect::<Vec<_>>(),
        "monodromy": mat2_to_json(&p.monodromy),
    })
}

/// Reads a polygon; a missing monodromy means closed. Validates the bracket invariants.
pub fn polygon_from_json<S: Scalar>(v: &Value) -> Result<PolygonData<S>> {
    let vertices = array(field(v, "vertices")?, "vertices")?.iter().map(vec2_from_json).collect::<Result<Vec<_>>>()?;
    match v.get("monodromy") {
        Some(m) => PolygonData::twisted(vertices, mat2_from_json(m)?),
        None => PolygonData::closed(vertices),
    }
}

pub fn sv_to_json<S: Scalar>(sv: &SVCoords<S>) -> Value {
    json!({
        "scalar": S::NAME,
        "s": sv.s.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "v": sv.v.iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn sv_from_json<S: Scalar>(v: &Value) -> Result<SVCoords<S>> {
    SVCoords::new(scalars(field(v, "s")?, "s")?, scalars(field(v, "v")?, "v")?)
}

pub fn form_to_json<S: Scalar>(q: &QuadraticForm<S>) -> Value {
    json!({"a": scalar_to_json(&q.a), "b": scalar_to_json(&q.b), "c": scalar_to_json(&q.c)})
}

pub fn form_from_json<S: Scalar>(v: &Value) -> Result<QuadraticForm<S>> {
    Ok(QuadraticForm::new(
        scalar_from_json(field(v, "a")?)?,
        scalar_from_json(field(v, "b")?)?,
        scalar_from_json(field(v, "c")?)?,
    ))
}

pub fn integrals_to_json<S: Scalar>(f: &IntegralVector<S>) -> Value {
    json!({"F": f.f.iter().map(scalar_to_json).collect::<Vec<_>>()})
}

pub fn integrals_from_json<S: Scalar>(v: &Value) -> Result<IntegralVector<S>> {
    Ok(IntegralVector { f: scalars(field(v, "F")?, "F")? })
}

/// Parses JSON text, mapping syntax errors into [`Error::Parse`].
pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
