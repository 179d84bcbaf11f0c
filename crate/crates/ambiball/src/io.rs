//! File formats behind the command front end.
//!
//! Documents are JSON. Spaces are either an explicit labeled distance
//! matrix or a point cloud with a named norm; measures and couplings are
//! label-keyed atom lists, optionally carrying their space so an emitted
//! file stands alone. Floats are always written with 17 significant
//! digits, which round-trips every finite `f64` exactly, and writers emit
//! fields in a fixed order so identical inputs produce byte-identical
//! output. Tabular reports can also be rendered as CSV.

use crate::measures::{Coupling, DiscreteMeasure, MeasureError};
use crate::metric_space::{FiniteMetricSpace, MetricError, PointMetric};
use crate::optimizer::LinearObjective;
use serde_json::Value;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {message}")]
    Json { path: String, message: String },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: invalid space: {source}")]
    Space { path: String, source: MetricError },
    #[error("{path}: invalid measure: {source}")]
    Measure { path: String, source: MeasureError },
    #[error("input files disagree on the underlying space")]
    SpaceMismatch,
    #[error("no space given: pass --space or embed a \"space\" object in the measure file")]
    MissingSpace,
}

impl IoError {
    /// Stable diagnostic code for machine-readable stderr output.
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Read { .. } | IoError::Write { .. } => "io_error",
            IoError::Json { .. } | IoError::Format { .. } => "parse_error",
            IoError::Space { .. } => "invalid_space",
            IoError::Measure { .. } => "invalid_measure",
            IoError::SpaceMismatch => "space_mismatch",
            IoError::MissingSpace => "missing_space",
        }
    }
}

/// 17 significant digits: exact round-trip for every finite `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn esc(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Incremental writer for a JSON object with caller-controlled field
/// order and raw (already serialized) values.
pub struct JsonObj {
    buf: String,
}

impl JsonObj {
    pub fn new() -> Self {
        JsonObj {
            buf: String::from("{"),
        }
    }
    pub fn raw(mut self, key: &str, value: &str) -> Self {
        if self.buf.len() > 1 {
            self.buf.push(',');
        }
        self.buf.push_str(&esc(key));
        self.buf.push(':');
        self.buf.push_str(value);
        self
    }
    pub fn str_field(self, key: &str, value: &str) -> Self {
        let quoted = esc(value);
        self.raw(key, &quoted)
    }
    pub fn float_field(self, key: &str, value: f64) -> Self {
        let formatted = fmt_float(value);
        self.raw(key, &formatted)
    }
    pub fn int_field(self, key: &str, value: u128) -> Self {
        let formatted = value.to_string();
        self.raw(key, &formatted)
    }
    pub fn bool_field(self, key: &str, value: bool) -> Self {
        self.raw(key, if value { "true" } else { "false" })
    }
    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

impl Default for JsonObj {
    fn default() -> Self {
        Self::new()
    }
}

pub fn json_array<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut buf = String::from("[");
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            buf.push(',');
        }
        buf.push_str(&item);
    }
    buf.push(']');
    buf
}

pub fn space_json(space: &FiniteMetricSpace) -> String {
    let labels = json_array(space.labels().iter().map(|l| esc(l)));
    let dist = json_array(
        space
            .matrix()
            .iter()
            .map(|row| json_array(row.iter().map(|&v| fmt_float(v)))),
    );
    JsonObj::new()
        .raw("labels", &labels)
        .raw("dist", &dist)
        .finish()
}

/// Measure document with its space embedded, so the file stands alone.
pub fn measure_json(mu: &DiscreteMeasure) -> String {
    let atoms = json_array(
        mu.atoms()
            .iter()
            .map(|&(i, w)| format!("[{},{}]", esc(mu.space().label(i)), fmt_float(w))),
    );
    JsonObj::new()
        .raw("space", &space_json(mu.space()))
        .raw("atoms", &atoms)
        .finish()
}

pub fn coupling_json(nu: &Coupling) -> String {
    let atoms = json_array(nu.atoms().iter().map(|&((i, j), w)| {
        format!(
            "[[{},{}],{}]",
            esc(nu.space().label(i)),
            esc(nu.space().label(j)),
            fmt_float(w)
        )
    }));
    JsonObj::new()
        .raw("space", &space_json(nu.space()))
        .raw("atoms", &atoms)
        .finish()
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, content: &str) -> Result<(), IoError> {
    std::fs::write(path, content).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_json(path: &Path) -> Result<Value, IoError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn format_err(path: &str, message: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.to_string(),
        message: message.into(),
    }
}

fn as_f64(v: &Value, path: &str, what: &str) -> Result<f64, IoError> {
    v.as_f64()
        .ok_or_else(|| format_err(path, format!("{what} must be a number")))
}

fn as_str<'a>(v: &'a Value, path: &str, what: &str) -> Result<&'a str, IoError> {
    v.as_str()
        .ok_or_else(|| format_err(path, format!("{what} must be a string")))
}

fn as_array<'a>(v: &'a Value, path: &str, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array()
        .ok_or_else(|| format_err(path, format!("{what} must be an array")))
}

/// Space from a JSON value: either `{"labels":[...],"dist":[[...]]}` or
/// `{"points":[[...]],"metric":"euclidean","labels":[...]?}`.
pub fn space_from_value(v: &Value, path: &str) -> Result<FiniteMetricSpace, IoError> {
    if let Some(dist_v) = v.get("dist") {
        let labels = as_array(
            v.get("labels")
                .ok_or_else(|| format_err(path, "space with \"dist\" needs \"labels\""))?,
            path,
            "\"labels\"",
        )?
        .iter()
        .map(|l| as_str(l, path, "label").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
        let dist = as_array(dist_v, path, "\"dist\"")?
            .iter()
            .map(|row| {
                as_array(row, path, "distance row")?
                    .iter()
                    .map(|x| as_f64(x, path, "distance"))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        return FiniteMetricSpace::new(labels, dist).map_err(|source| IoError::Space {
            path: path.to_string(),
            source,
        });
    }
    if let Some(points_v) = v.get("points") {
        let points = as_array(points_v, path, "\"points\"")?
            .iter()
            .map(|p| {
                as_array(p, path, "point")?
                    .iter()
                    .map(|x| as_f64(x, path, "coordinate"))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let metric = match v.get("metric").map(|m| as_str(m, path, "\"metric\"")) {
            None => PointMetric::Euclidean,
            Some(m) => match m? {
                "euclidean" => PointMetric::Euclidean,
                "manhattan" => PointMetric::Manhattan,
                "chebyshev" => PointMetric::Chebyshev,
                other => {
                    return Err(format_err(
                        path,
                        format!(
                            "unknown metric {other:?}, expected euclidean, manhattan, or chebyshev"
                        ),
                    ))
                }
            },
        };
        let labels = match v.get("labels") {
            None => None,
            Some(ls) => Some(
                as_array(ls, path, "\"labels\"")?
                    .iter()
                    .map(|l| as_str(l, path, "label").map(str::to_string))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        return FiniteMetricSpace::from_points(&points, metric, labels).map_err(|source| {
            IoError::Space {
                path: path.to_string(),
                source,
            }
        });
    }
    Err(format_err(
        path,
        "space needs either \"dist\" or \"points\"",
    ))
}

pub fn load_space(path: &Path) -> Result<Arc<FiniteMetricSpace>, IoError> {
    let v = load_json(path)?;
    Ok(Arc::new(space_from_value(&v, &path.display().to_string())?))
}

/// Parsed measure file: labeled atoms plus an optional embedded space.
pub struct MeasureDoc {
    pub space: Option<FiniteMetricSpace>,
    pub atoms: Vec<(String, f64)>,
}

pub fn load_measure_doc(path: &Path) -> Result<MeasureDoc, IoError> {
    let v = load_json(path)?;
    let p = path.display().to_string();
    let space = match v.get("space") {
        None => None,
        Some(sv) => Some(space_from_value(sv, &p)?),
    };
    let atoms = as_array(
        v.get("atoms")
            .ok_or_else(|| format_err(&p, "measure file needs \"atoms\""))?,
        &p,
        "\"atoms\"",
    )?
    .iter()
    .map(|pair| {
        let pair = as_array(pair, &p, "atom")?;
        if pair.len() != 2 {
            return Err(format_err(&p, "each atom must be [label, weight]"));
        }
        Ok((
            as_str(&pair[0], &p, "atom label")?.to_string(),
            as_f64(&pair[1], &p, "atom weight")?,
        ))
    })
    .collect::<Result<Vec<_>, _>>()?;
    Ok(MeasureDoc { space, atoms })
}

/// Exact structural equality: same labels, identical distance entries.
pub fn spaces_equal(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> bool {
    a.labels() == b.labels() && a.matrix() == b.matrix()
}

/// Binds labeled atoms to a concrete space.
pub fn resolve_measure(
    doc: &MeasureDoc,
    space: &Arc<FiniteMetricSpace>,
    path: &str,
) -> Result<DiscreteMeasure, IoError> {
    let atoms = doc
        .atoms
        .iter()
        .map(|(label, w)| {
            space
                .index_of(label)
                .map(|i| (i, *w))
                .ok_or_else(|| format_err(path, format!("unknown point label {label:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    DiscreteMeasure::new(space.clone(), atoms).map_err(|source| IoError::Measure {
        path: path.to_string(),
        source,
    })
}

pub fn load_coupling(path: &Path, space: &Arc<FiniteMetricSpace>) -> Result<Coupling, IoError> {
    let v = load_json(path)?;
    let p = path.display().to_string();
    let atoms = as_array(
        v.get("atoms")
            .ok_or_else(|| format_err(&p, "coupling file needs \"atoms\""))?,
        &p,
        "\"atoms\"",
    )?
    .iter()
    .map(|entry| {
        let entry = as_array(entry, &p, "coupling atom")?;
        if entry.len() != 2 {
            return Err(format_err(
                &p,
                "each coupling atom must be [[l1,l2], weight]",
            ));
        }
        let pair = as_array(&entry[0], &p, "coupling pair")?;
        if pair.len() != 2 {
            return Err(format_err(
                &p,
                "each coupling atom must be [[l1,l2], weight]",
            ));
        }
        let mut idx = [0usize; 2];
        for (k, lv) in pair.iter().enumerate() {
            let label = as_str(lv, &p, "coupling label")?;
            idx[k] = space
                .index_of(label)
                .ok_or_else(|| format_err(&p, format!("unknown point label {label:?}")))?;
        }
        Ok(((idx[0], idx[1]), as_f64(&entry[1], &p, "coupling weight")?))
    })
    .collect::<Result<Vec<_>, _>>()?;
    Coupling::new(space.clone(), atoms).map_err(|source| IoError::Measure { path: p, source })
}

/// Objective values per point: `{"values":[...]}` in label order, or
/// `{"values":{"a":1.0,...}}` covering every label.
pub fn load_objective(path: &Path, space: &FiniteMetricSpace) -> Result<LinearObjective, IoError> {
    let v = load_json(path)?;
    let p = path.display().to_string();
    let values = v
        .get("values")
        .ok_or_else(|| format_err(&p, "objective file needs \"values\""))?;
    let values = match values {
        Value::Array(items) => {
            if items.len() != space.size() {
                return Err(format_err(
                    &p,
                    format!(
                        "objective has {} values for a space of size {}",
                        items.len(),
                        space.size()
                    ),
                ));
            }
            items
                .iter()
                .map(|x| as_f64(x, &p, "objective value"))
                .collect::<Result<Vec<_>, _>>()?
        }
        Value::Object(map) => {
            for key in map.keys() {
                if space.index_of(key).is_none() {
                    return Err(format_err(&p, format!("unknown point label {key:?}")));
                }
            }
            space
                .labels()
                .iter()
                .map(|label| {
                    map.get(label)
                        .ok_or_else(|| {
                            format_err(&p, format!("objective is missing label {label:?}"))
                        })
                        .and_then(|x| as_f64(x, &p, "objective value"))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => return Err(format_err(&p, "\"values\" must be an array or an object")),
    };
    Ok(LinearObjective::new(values))
}

/// Sample list for empirical centers: `{"samples":["a","a","b"]}`.
pub fn load_samples(path: &Path, space: &FiniteMetricSpace) -> Result<Vec<usize>, IoError> {
    let v = load_json(path)?;
    let p = path.display().to_string();
    as_array(
        v.get("samples")
            .ok_or_else(|| format_err(&p, "samples file needs \"samples\""))?,
        &p,
        "\"samples\"",
    )?
    .iter()
    .map(|s| {
        let label = as_str(s, &p, "sample")?;
        space
            .index_of(label)
            .ok_or_else(|| format_err(&p, format!("unknown point label {label:?}")))
    })
    .collect()
}

/// CSV with one header row; fields are quoted only when needed.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for row in rows {
        w.write_record(row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

pub fn config_hash(description: &str) -> String {
    format!("{:016x}", fnv1a(description.as_bytes()))
}
