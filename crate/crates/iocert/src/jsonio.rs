//! JSON interchange for matrices, vectors, models, and norm
//! specifications, plus a deterministic emitter for reports.
//!
//! Parsing goes through `serde_json`; emission is hand-assembled so that
//! key order and float formatting are fixed: identical values always
//! produce identical bytes. Floats are printed with 17 significant digits
//! (`{:.16e}`), which round-trips every finite f64 exactly; infinities
//! (only produced, never consumed, by reports such as an unbounded optimal
//! constant) serialize as the strings "+inf" / "-inf".

use nalgebra::{Complex, DMatrix, DVector};
use serde_json::Value;

use crate::error::Error;
use crate::linalg::{orthonormalize, Subspace, DEFAULT_RANK_TOL};
use crate::model::Model;
use crate::norms::NormSpec;
use crate::Result;

fn parse_error(context: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{context}: {detail}"))
}

fn as_finite_f64(v: &Value, context: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| parse_error(context, format!("expected a number, got {v}")))?;
    if !x.is_finite() {
        return Err(parse_error(context, format!("non-finite number {x}")));
    }
    Ok(x)
}

fn as_count(v: &Value, context: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_error(context, format!("expected a nonnegative integer, got {v}")))
}

fn as_array<'a>(v: &'a Value, context: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| parse_error(context, format!("expected an array, got {v}")))
}

fn field<'a>(obj: &'a Value, key: &str, context: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| parse_error(context, format!("missing field \"{key}\"")))
}

/// Parses a JSON value into a string first; convenience for file contents.
pub fn json_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_error("json", e))
}

/// Vector as a flat array of finite numbers.
pub fn parse_vector_value(v: &Value, context: &str) -> Result<DVector<f64>> {
    let items = as_array(v, context)?;
    let mut out = DVector::zeros(items.len());
    for (i, item) in items.iter().enumerate() {
        out[i] = as_finite_f64(item, context)?;
    }
    Ok(out)
}

/// Matrix as nested arrays, row-major; all rows must have equal length and
/// finite entries. An empty outer array is rejected (no way to infer the
/// column count).
pub fn parse_matrix_value(v: &Value, context: &str) -> Result<DMatrix<f64>> {
    let rows = as_array(v, context)?;
    if rows.is_empty() {
        return Err(parse_error(context, "matrix needs at least one row"));
    }
    let first = as_array(&rows[0], context)?.len();
    let mut data = Vec::with_capacity(rows.len() * first);
    for row in rows {
        let entries = as_array(row, context)?;
        if entries.len() != first {
            return Err(parse_error(
                context,
                format!("ragged rows: {} vs {}", entries.len(), first),
            ));
        }
        for e in entries {
            data.push(as_finite_f64(e, context)?);
        }
    }
    Ok(DMatrix::from_row_slice(rows.len(), first, &data))
}

/// Model from its tagged JSON form:
/// `{"kind":"ksparse","n":6,"k":1}`,
/// `{"kind":"uos","bases":[[[...],...],...]}` (each basis a list of
/// spanning vectors),
/// `{"kind":"lowrank","n1":2,"n2":2,"r":1}`,
/// `{"kind":"pointcloud","points":[[...],...]}`,
/// `{"kind":"blocksparse","n":4,"blocks":[[0,1],[2,3]],"k":1}`.
/// Semantic validity (k ≤ n, index ranges, …) is checked here too, so a
/// file that parses is a file that works.
pub fn parse_model_value(v: &Value) -> Result<Model> {
    let context = "model";
    let kind = field(v, "kind", context)?
        .as_str()
        .ok_or_else(|| parse_error(context, "\"kind\" must be a string"))?;
    let model = match kind {
        "ksparse" => Model::KSparse {
            n: as_count(field(v, "n", context)?, context)?,
            k: as_count(field(v, "k", context)?, context)?,
        },
        "uos" => {
            let bases = as_array(field(v, "bases", context)?, context)?;
            if bases.is_empty() {
                return Err(parse_error(context, "uos needs at least one basis"));
            }
            let mut spaces: Vec<Subspace> = Vec::with_capacity(bases.len());
            for basis in bases {
                let vector_values = as_array(basis, context)?;
                if vector_values.is_empty() {
                    return Err(parse_error(context, "each basis needs at least one vector"));
                }
                let vectors = vector_values
                    .iter()
                    .map(|w| parse_vector_value(w, context))
                    .collect::<Result<Vec<_>>>()?;
                spaces.push(orthonormalize(&vectors, DEFAULT_RANK_TOL)?);
            }
            Model::ExplicitUoS(spaces)
        }
        "lowrank" => Model::LowRank {
            n1: as_count(field(v, "n1", context)?, context)?,
            n2: as_count(field(v, "n2", context)?, context)?,
            r: as_count(field(v, "r", context)?, context)?,
        },
        "pointcloud" => {
            let points = as_array(field(v, "points", context)?, context)?
                .iter()
                .map(|w| parse_vector_value(w, context))
                .collect::<Result<Vec<_>>>()?;
            Model::PointCloud(points)
        }
        "blocksparse" => {
            let blocks_value = as_array(field(v, "blocks", context)?, context)?;
            let mut blocks = Vec::with_capacity(blocks_value.len());
            for block in blocks_value {
                blocks.push(
                    as_array(block, context)?
                        .iter()
                        .map(|idx| as_count(idx, context))
                        .collect::<Result<Vec<usize>>>()?,
                );
            }
            Model::BlockSparse {
                n: as_count(field(v, "n", context)?, context)?,
                blocks,
                k: as_count(field(v, "k", context)?, context)?,
            }
        }
        other => {
            return Err(parse_error(
                context,
                format!("unknown model kind \"{other}\""),
            ))
        }
    };
    model
        .validate()
        .map_err(|e| parse_error(context, format!("invalid model: {e}")))?;
    Ok(model)
}

/// Norm specification from its tagged JSON form: `{"kind":"l2"}`,
/// `{"kind":"l1"}`, `{"kind":"mnorm","alpha":0.7,"M":[[...]]}`,
/// `{"kind":"atomic"}` (atoms come from `model`), and
/// `{"kind":"task","A":[[...]],"inner":{...}}`.
pub fn parse_norm_spec_value(
    v: &Value,
    model: Option<&Model>,
    atomic_tol: f64,
) -> Result<NormSpec> {
    let context = "norm spec";
    let kind = field(v, "kind", context)?
        .as_str()
        .ok_or_else(|| parse_error(context, "\"kind\" must be a string"))?;
    match kind {
        "l2" => Ok(NormSpec::L2),
        "l1" => Ok(NormSpec::L1),
        "mnorm" => {
            let alpha = as_finite_f64(field(v, "alpha", context)?, context)?;
            if alpha <= 0.0 {
                return Err(parse_error(context, format!("mnorm alpha {alpha} <= 0")));
            }
            Ok(NormSpec::MNorm {
                m: parse_matrix_value(field(v, "M", context)?, context)?,
                alpha,
            })
        }
        "atomic" => {
            let model = model.ok_or_else(|| {
                parse_error(context, "atomic norm needs a model (pass --model)")
            })?;
            Ok(NormSpec::Atomic {
                model: model.clone(),
                tol: atomic_tol,
            })
        }
        "task" => Ok(NormSpec::Task {
            a: parse_matrix_value(field(v, "A", context)?, context)?,
            inner: Box::new(parse_norm_spec_value(
                field(v, "inner", context)?,
                model,
                atomic_tol,
            )?),
        }),
        other => Err(parse_error(
            context,
            format!("unknown norm kind \"{other}\""),
        )),
    }
}

/// Convenience string front ends.
pub fn matrix_from_str(text: &str) -> Result<DMatrix<f64>> {
    parse_matrix_value(&json_value(text)?, "matrix")
}
pub fn vector_from_str(text: &str) -> Result<DVector<f64>> {
    parse_vector_value(&json_value(text)?, "vector")
}
pub fn model_from_str(text: &str) -> Result<Model> {
    parse_model_value(&json_value(text)?)
}
pub fn norm_spec_from_str(
    text: &str,
    model: Option<&Model>,
    atomic_tol: f64,
) -> Result<NormSpec> {
    parse_norm_spec_value(&json_value(text)?, model, atomic_tol)
}

/// 17-significant-digit decimal form of a finite float; exact round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON fragment for a real that may be infinite (reports only):
/// finite → bare number, ±∞ → quoted "+inf"/"-inf".
pub fn json_real(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".to_owned()
    } else if x == f64::INFINITY {
        "\"+inf\"".to_owned()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".to_owned()
    } else {
        fmt_f64(x)
    }
}

/// JSON string literal with escaping.
pub fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

/// JSON array from raw fragments.
pub fn json_array<I>(items: I) -> String
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut out = String::from("[");
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(item.as_ref());
    }
    out.push(']');
    out
}

/// Ordered JSON object builder: fields serialize in insertion order, so
/// emission is byte-deterministic.
#[derive(Debug, Default, Clone)]
pub struct JsonObject {
    parts: Vec<(String, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        Self::default()
    }

    /// Raw JSON fragment under `key`.
    pub fn raw(mut self, key: &str, fragment: impl Into<String>) -> Self {
        self.parts.push((key.to_owned(), fragment.into()));
        self
    }

    pub fn real(self, key: &str, x: f64) -> Self {
        let fragment = json_real(x);
        self.raw(key, fragment)
    }

    pub fn count(self, key: &str, x: usize) -> Self {
        self.raw(key, x.to_string())
    }

    pub fn string(self, key: &str, s: &str) -> Self {
        let fragment = json_string(s);
        self.raw(key, fragment)
    }

    pub fn boolean(self, key: &str, b: bool) -> Self {
        self.raw(key, if b { "true" } else { "false" })
    }

    pub fn finish(self) -> String {
        let mut out = String::from("{");
        for (i, (key, fragment)) in self.parts.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&json_string(key));
            out.push(':');
            out.push_str(fragment);
        }
        out.push('}');
        out
    }
}

/// Vector as a JSON array of 17-digit numbers.
pub fn vector_json(v: &DVector<f64>) -> String {
    json_array(v.iter().map(|x| fmt_f64(*x)))
}

/// Matrix as nested row-major arrays of 17-digit numbers.
pub fn matrix_json(m: &DMatrix<f64>) -> String {
    json_array((0..m.nrows()).map(|i| json_array(m.row(i).iter().map(|x| fmt_f64(*x)))))
}

/// Complex matrix as nested row-major arrays of [re, im] pairs.
pub fn complex_matrix_json(m: &DMatrix<Complex<f64>>) -> String {
    json_array((0..m.nrows()).map(|i| {
        json_array(
            m.row(i)
                .iter()
                .map(|z| json_array([fmt_f64(z.re), fmt_f64(z.im)])),
        )
    }))
}

/// Model in the same tagged form [`parse_model_value`] consumes; emitted
/// subspace bases are the orthonormal columns, so re-parsing yields equal
/// spans.
pub fn model_json(model: &Model) -> String {
    match model {
        Model::KSparse { n, k } => JsonObject::new()
            .string("kind", "ksparse")
            .count("n", *n)
            .count("k", *k)
            .finish(),
        Model::ExplicitUoS(spaces) => {
            let bases = json_array(spaces.iter().map(|s| {
                json_array(
                    (0..s.dim().max(1)).map(|j| {
                        if s.dim() == 0 {
                            vector_json(&DVector::zeros(s.ambient_dim()))
                        } else {
                            vector_json(&s.basis().column(j).into_owned())
                        }
                    }),
                )
            }));
            JsonObject::new()
                .string("kind", "uos")
                .raw("bases", bases)
                .finish()
        }
        Model::LowRank { n1, n2, r } => JsonObject::new()
            .string("kind", "lowrank")
            .count("n1", *n1)
            .count("n2", *n2)
            .count("r", *r)
            .finish(),
        Model::PointCloud(points) => JsonObject::new()
            .string("kind", "pointcloud")
            .raw("points", json_array(points.iter().map(vector_json)))
            .finish(),
        Model::BlockSparse { n, blocks, k } => JsonObject::new()
            .string("kind", "blocksparse")
            .count("n", *n)
            .raw(
                "blocks",
                json_array(
                    blocks
                        .iter()
                        .map(|b| json_array(b.iter().map(|i| i.to_string()))),
                ),
            )
            .count("k", *k)
            .finish(),
    }
}
