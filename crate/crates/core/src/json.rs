//! JSON encodings of the domain values.
//!
//! Encodings follow the per-type schemas: field specs as
//! `{"p","f","e","eis"}` (with `eis` omitted when `e = 1`), finite-field
//! elements as coefficient arrays over `F_p` (lowest degree first), series
//! as `{"val","prec","coeffs"}` with `prec = null` meaning exact, and
//! matrices as row-major series arrays with shape metadata. Decoders take
//! the coefficient field as context where the value alone does not
//! determine it.

use crate::error::{Error, Result};
use crate::ffield::{FFElem, FiniteField};
use crate::padic::LocalFieldSpec;
use crate::phigamma::Mat;
use crate::reps::RepClass;
use crate::series::{TSeries, EXACT_PREC};
use crate::unit_exp::PExponent;
use serde_json::{json, Value};
use std::sync::Arc;

fn bad(msg: &str) -> Error {
    Error::Invalid(format!("malformed JSON: {msg}"))
}

pub fn spec_to_json(spec: &LocalFieldSpec) -> Value {
    if spec.e == 1 {
        json!({ "p": spec.p, "f": spec.f, "e": 1 })
    } else {
        json!({ "p": spec.p, "f": spec.f, "e": spec.e, "eis": spec.eis })
    }
}

pub fn spec_from_json(v: &Value) -> Result<Arc<LocalFieldSpec>> {
    let p = v["p"].as_u64().ok_or_else(|| bad("spec.p"))?;
    let f = v["f"].as_u64().unwrap_or(1) as usize;
    let e = v["e"].as_u64().unwrap_or(1) as usize;
    let eis = match v.get("eis") {
        None | Some(Value::Null) => None,
        Some(arr) => {
            let rows = arr.as_array().ok_or_else(|| bad("spec.eis"))?;
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                let digits = row.as_array().ok_or_else(|| bad("spec.eis row"))?;
                out.push(
                    digits
                        .iter()
                        .map(|d| d.as_i64().ok_or_else(|| bad("spec.eis digit")))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            Some(out)
        }
    };
    LocalFieldSpec::new(p, f, e, eis)
}

pub fn ffelem_to_json(x: &FFElem) -> Value {
    json!(x.coeffs())
}

pub fn ffelem_from_json(v: &Value, field: &Arc<FiniteField>) -> Result<FFElem> {
    let arr = v.as_array().ok_or_else(|| bad("FFElem"))?;
    let coeffs = arr
        .iter()
        .map(|c| c.as_u64().ok_or_else(|| bad("FFElem coefficient")))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() > field.m {
        return Err(bad("FFElem has too many coefficients"));
    }
    Ok(field.elem(&coeffs))
}

fn prec_to_json(prec: i64) -> Value {
    if prec >= EXACT_PREC {
        Value::Null
    } else {
        json!(prec)
    }
}

fn prec_from_json(v: &Value) -> Result<i64> {
    match v {
        Value::Null => Ok(EXACT_PREC),
        _ => v.as_i64().ok_or_else(|| bad("prec")),
    }
}

pub fn tseries_to_json(f: &TSeries) -> Value {
    let coeffs: Vec<Value> = f.terms().map(|(_, c)| ffelem_to_json(c)).collect();
    json!({ "val": f.val(), "prec": prec_to_json(f.prec()), "coeffs": coeffs })
}

pub fn tseries_from_json(v: &Value, field: &Arc<FiniteField>) -> Result<TSeries> {
    let val = v["val"].as_i64().ok_or_else(|| bad("TSeries.val"))?;
    let prec = prec_from_json(&v["prec"])?;
    let coeffs = v["coeffs"]
        .as_array()
        .ok_or_else(|| bad("TSeries.coeffs"))?
        .iter()
        .map(|c| ffelem_from_json(c, field))
        .collect::<Result<Vec<_>>>()?;
    Ok(TSeries::new(field, val, prec, coeffs))
}

pub fn pexponent_to_json(e: &PExponent) -> Value {
    json!({ "num": e.num, "den": e.den })
}

pub fn pexponent_from_json(v: &Value) -> Result<PExponent> {
    let num = v["num"].as_i64().ok_or_else(|| bad("PExponent.num"))?;
    let den = v["den"].as_u64().ok_or_else(|| bad("PExponent.den"))?;
    Ok(PExponent::new(num, den))
}

pub fn field_to_json(field: &FiniteField) -> Value {
    json!({ "p": field.p, "m": field.m })
}

pub fn field_from_json(v: &Value) -> Result<Arc<FiniteField>> {
    let p = v["p"].as_u64().ok_or_else(|| bad("field.p"))?;
    let m = v["m"].as_u64().ok_or_else(|| bad("field.m"))? as usize;
    Ok(FiniteField::get(p, m))
}

pub fn mat_to_json(m: &Mat) -> Value {
    let prec = m
        .rows
        .iter()
        .flatten()
        .map(|x| x.prec())
        .min()
        .unwrap_or(EXACT_PREC);
    let rows: Vec<Vec<Value>> = m
        .rows
        .iter()
        .map(|r| r.iter().map(tseries_to_json).collect())
        .collect();
    json!({
        "n": m.n,
        "prec": prec_to_json(prec),
        "field": field_to_json(&m.field),
        "rows": rows,
    })
}

pub fn mat_from_json(v: &Value) -> Result<Mat> {
    let field = field_from_json(&v["field"])?;
    let rows = v["rows"]
        .as_array()
        .ok_or_else(|| bad("Mat.rows"))?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("Mat row"))?
                .iter()
                .map(|x| tseries_from_json(x, &field))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Mat::new(&field, rows)?;
    if v["n"].as_u64() != Some(m.n as u64) {
        return Err(bad("Mat.n disagrees with row count"));
    }
    Ok(m)
}

pub fn repclass_to_json(r: &RepClass) -> Value {
    json!({
        "q": r.q,
        "n": r.n,
        "h": r.h,
        "s": r.s,
        "lambda": ffelem_to_json(&r.lam),
        "lambda_pow_n": ffelem_to_json(&r.lam_pow_n),
    })
}
