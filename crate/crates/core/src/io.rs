//! JSON serialization for groups, representations, coherent systems and
//! removal certificates.
//!
//! Complex numbers are `[re, im]` pairs, matrices are flat row-major lists of
//! such pairs and sets are sorted arrays. Loaders validate structure and report
//! problems with a JSON pointer to the offending value.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::CoherentSystem;
use crate::geometry::{IndexSet, Window};
use crate::group::{make_cyclic_product, make_heisenberg, FiniteGroup, GroupKind};
use crate::linalg::{CMatrix, CVector};
use crate::rep::{ProjectiveRep, UNITARY_TOL};
use crate::removal::RemovalCertificate;

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Matrix as a list of rows of `[re, im]` pairs, used for audit output.
pub fn matrix_rows_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| complex_to_json(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_to_json(z)).collect())
}

fn flat_matrix_to_json(m: &CMatrix) -> Value {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(complex_to_json(m[(r, c)]));
        }
    }
    Value::Array(out)
}

pub fn group_to_json(group: &FiniteGroup) -> Value {
    json!({
        "order": group.order(),
        "cayley": group.cayley_rows(),
        "label": group.label(),
    })
}

pub fn rep_to_json(rep: &ProjectiveRep) -> Value {
    json!({
        "group": group_to_json(rep.group()),
        "dim": rep.dim(),
        "matrices": rep.matrices().iter().map(flat_matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn system_to_json(sys: &CoherentSystem) -> Value {
    json!({
        "rep": rep_to_json(sys.rep()),
        "g": vector_to_json(sys.g()),
        "lambda": sys.lambda().elements(),
        "Q": sys.q().elements(),
    })
}

pub fn certificate_to_json(cert: &RemovalCertificate) -> Value {
    serde_json::to_value(cert).expect("certificates serialize")
}

fn join(path: &str, key: impl std::fmt::Display) -> String {
    format!("{path}/{key}")
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| Error::schema(path_or_root(path), "expected an object"))?
        .get(key)
        .ok_or_else(|| Error::schema(path_or_root(path), format!("missing field `{key}`")))
}

fn path_or_root(path: &str) -> String {
    if path.is_empty() {
        "/".to_string()
    } else {
        path.to_string()
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::schema(path_or_root(path), "expected a nonnegative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::schema(path_or_root(path), "expected an array"))
}

fn as_complex(v: &Value, path: &str) -> Result<Complex64> {
    let pair = as_array(v, path)?;
    if pair.len() != 2 {
        return Err(Error::schema(path, "expected a [re, im] pair"));
    }
    let part = |i: usize| {
        pair[i]
            .as_f64()
            .ok_or_else(|| Error::schema(join(path, i), "expected a number"))
    };
    Ok(Complex64::new(part(0)?, part(1)?))
}

fn as_index_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    let items = as_array(v, path)?;
    let out: Vec<usize> = items
        .iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &join(path, i)))
        .collect::<Result<_>>()?;
    if let Some(i) = out.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::schema(join(path, i + 1), "set entries must be strictly increasing"));
    }
    Ok(out)
}

/// Rebuilds a builtin group from its label, if the label names one.
fn builtin_from_label(label: &str) -> Option<FiniteGroup> {
    if let Some(n) = label.strip_prefix("Heisenberg(").and_then(|s| s.strip_suffix(')')) {
        return make_heisenberg(n.parse().ok()?).ok();
    }
    let moduli: Vec<usize> = label
        .split('x')
        .map(|part| part.strip_prefix('Z')?.parse().ok())
        .collect::<Option<_>>()?;
    make_cyclic_product(&moduli).ok()
}

pub fn group_from_json(v: &Value) -> Result<FiniteGroup> {
    group_at(v, "")
}

fn group_at(v: &Value, path: &str) -> Result<FiniteGroup> {
    if let Some(label) = v.as_str() {
        return builtin_from_label(label)
            .ok_or_else(|| Error::schema(path_or_root(path), format!("unknown builtin group `{label}`")));
    }
    let order = as_usize(field(v, path, "order")?, &join(path, "order"))?;
    let cayley_path = join(path, "cayley");
    let rows = as_array(field(v, path, "cayley")?, &cayley_path)?;
    if rows.len() != order {
        return Err(Error::schema(
            &cayley_path,
            format!("table has {} rows, expected {order}", rows.len()),
        ));
    }
    let mut table = Vec::with_capacity(order);
    for (r, row) in rows.iter().enumerate() {
        let row_path = join(&cayley_path, r);
        let entries = as_array(row, &row_path)?;
        if entries.len() != order {
            return Err(Error::schema(
                &row_path,
                format!("row {r} has length {}, expected {order}", entries.len()),
            ));
        }
        let parsed: Vec<usize> = entries
            .iter()
            .enumerate()
            .map(|(c, x)| as_usize(x, &join(&row_path, c)))
            .collect::<Result<_>>()?;
        table.push(parsed);
    }
    let label = match v.get("label") {
        None => "custom".to_string(),
        Some(l) => l
            .as_str()
            .ok_or_else(|| Error::schema(join(path, "label"), "expected a string"))?
            .to_string(),
    };
    if let Some(builtin) = builtin_from_label(&label) {
        if builtin.cayley_rows() == table {
            return Ok(builtin);
        }
    }
    FiniteGroup::from_cayley(&table, label).map_err(|e| Error::schema(cayley_path, e.to_string()))
}

pub fn rep_from_json(v: &Value) -> Result<ProjectiveRep> {
    rep_at(v, "")
}

fn rep_at(v: &Value, path: &str) -> Result<ProjectiveRep> {
    let group = Arc::new(group_at(field(v, path, "group")?, &join(path, "group"))?);
    let dim = as_usize(field(v, path, "dim")?, &join(path, "dim"))?;
    if dim == 0 {
        return Err(Error::schema(join(path, "dim"), "dimension must be positive"));
    }
    let mats_path = join(path, "matrices");
    let mats = as_array(field(v, path, "matrices")?, &mats_path)?;
    if mats.len() != group.order() {
        return Err(Error::schema(
            &mats_path,
            format!("{} matrices for a group of order {}", mats.len(), group.order()),
        ));
    }
    let mut matrices = Vec::with_capacity(mats.len());
    for (x, m) in mats.iter().enumerate() {
        let m_path = join(&mats_path, x);
        let entries = as_array(m, &m_path)?;
        if entries.len() != dim * dim {
            return Err(Error::schema(
                &m_path,
                format!("{} entries, expected {}", entries.len(), dim * dim),
            ));
        }
        let values: Vec<Complex64> = entries
            .iter()
            .enumerate()
            .map(|(i, z)| as_complex(z, &join(&m_path, i)))
            .collect::<Result<_>>()?;
        matrices.push(CMatrix::from_row_slice(dim, dim, &values));
    }
    ProjectiveRep::with_tolerance(group, matrices, UNITARY_TOL).map_err(|e| Error::schema(mats_path, e.to_string()))
}

pub fn system_from_json(v: &Value) -> Result<CoherentSystem> {
    let rep = Arc::new(rep_at(field(v, "", "rep")?, "/rep")?);
    let group = rep.group().clone();
    let g_items = as_array(field(v, "", "g")?, "/g")?;
    let g: Vec<Complex64> = g_items
        .iter()
        .enumerate()
        .map(|(i, z)| as_complex(z, &join("/g", i)))
        .collect::<Result<_>>()?;
    if g.len() != rep.dim() {
        return Err(Error::schema("/g", format!("length {}, expected {}", g.len(), rep.dim())));
    }
    let lambda = as_index_list(field(v, "", "lambda")?, "/lambda")?;
    let lambda = IndexSet::new(&group, lambda).map_err(|e| Error::schema("/lambda", e.to_string()))?;
    let q = as_index_list(field(v, "", "Q")?, "/Q")?;
    let q = Window::new(&group, q).map_err(|e| Error::schema("/Q", e.to_string()))?;
    CoherentSystem::new(rep, CVector::from_vec(g), lambda, q).map_err(|e| match e {
        Error::InvalidSet(m) | Error::InvalidConfig(m) => Error::schema("/", m),
        other => other,
    })
}

pub fn certificate_from_json(v: &Value) -> Result<RemovalCertificate> {
    let cert: RemovalCertificate =
        serde_json::from_value(v.clone()).map_err(|e| Error::schema("/", e.to_string()))?;
    if let Some(i) = cert.gamma.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::schema(
            format!("/gamma/{}", i + 1),
            "set entries must be strictly increasing",
        ));
    }
    Ok(cert)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Parses JSON text; syntax errors carry line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_json(path: &Path) -> Result<Value> {
    parse_json(&fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn load_group(path: &Path) -> Result<FiniteGroup> {
    group_from_json(&read_json(path)?)
}

pub fn save_group(path: &Path, group: &FiniteGroup) -> Result<()> {
    write_json(path, &group_to_json(group))
}

pub fn load_rep(path: &Path) -> Result<ProjectiveRep> {
    rep_from_json(&read_json(path)?)
}

pub fn save_rep(path: &Path, rep: &ProjectiveRep) -> Result<()> {
    write_json(path, &rep_to_json(rep))
}

pub fn load_system(path: &Path) -> Result<CoherentSystem> {
    system_from_json(&read_json(path)?)
}

pub fn save_system(path: &Path, sys: &CoherentSystem) -> Result<()> {
    write_json(path, &system_to_json(sys))
}

pub fn load_certificate(path: &Path) -> Result<RemovalCertificate> {
    certificate_from_json(&read_json(path)?)
}

pub fn save_certificate(path: &Path, cert: &RemovalCertificate) -> Result<()> {
    write_json(path, &certificate_to_json(cert))
}

/// Kind recovered for a builtin group; convenience for callers that only
/// hold the JSON value.
pub fn group_kind(v: &Value) -> Result<GroupKind> {
    Ok(group_from_json(v)?.kind().clone())
}
