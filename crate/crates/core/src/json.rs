//! JSON encodings shared by the library and the command-line tool.
//!
//! Rationals are strings `"p/q"` (or `"p"`); elements of Q(t) are
//! `{"num": [...], "den": [...]}` with ascending rational coefficients.

use serde_json::{json, Value};

use crate::eqcurves::{Curve, CurveQ, CurveQt};
use crate::error::{Error, Result};
use crate::field::{parse_q, Q};
use crate::modmat::{FiniteMatrixGroup, GroupSpec};
use crate::poly::Poly;
use crate::qpoly::ExactPolynomial;
use crate::ratfunc::RatFunc;

/// A curve over either base.
#[derive(Clone, Debug, PartialEq)]
pub enum EllipticCurveModel {
    Q(CurveQ),
    Qt(CurveQt),
}

pub fn q_to_json(c: &Q) -> Value {
    Value::String(c.to_string())
}

pub fn q_from_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => parse_q(&n.to_string()),
        _ => Err(Error::invalid(format!("expected a rational, got {v}"))),
    }
}

fn qs_to_json(cs: &[Q]) -> Value {
    Value::Array(cs.iter().map(q_to_json).collect())
}

fn qs_from_json(v: &Value) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::invalid(format!("expected an array of rationals, got {v}")))?
        .iter()
        .map(q_from_json)
        .collect()
}

pub fn ratfunc_to_json(r: &RatFunc) -> Value {
    json!({"num": qs_to_json(r.num().coeffs()), "den": qs_to_json(r.den().coeffs())})
}

/// Accepts `{"num", "den"}` objects and plain rationals.
pub fn ratfunc_from_json(v: &Value) -> Result<RatFunc> {
    match v {
        Value::Object(o) => {
            let num = Poly::new(qs_from_json(o.get("num").ok_or_else(|| Error::invalid("missing \"num\""))?)?);
            let den = match o.get("den") {
                Some(d) => Poly::new(qs_from_json(d)?),
                None => Poly::one(),
            };
            RatFunc::new(num, den).ok_or_else(|| Error::invalid("zero denominator"))
        }
        _ => Ok(RatFunc::from_poly(Poly::constant(q_from_json(v)?))),
    }
}

pub fn poly_to_json(p: &ExactPolynomial) -> Value {
    match p {
        ExactPolynomial::Q(f) => json!({"base": "Q", "coefficients": qs_to_json(f.coeffs())}),
        ExactPolynomial::Qt(f) => json!({
            "base": "Q(t)",
            "coefficients": f.coeffs().iter().map(ratfunc_to_json).collect::<Vec<_>>(),
        }),
    }
}

fn base_is_qt(v: &Value, items: &[Value]) -> Result<bool> {
    match v.get("base").and_then(Value::as_str) {
        Some("Q") => Ok(false),
        Some("Q(t)") => Ok(true),
        Some(other) => Err(Error::invalid(format!("unknown base {other:?}"))),
        None => Ok(items.iter().any(Value::is_object)),
    }
}

/// `{"base", "coefficients"}` or a bare ascending array.
pub fn poly_from_json(v: &Value) -> Result<ExactPolynomial> {
    let items = match v {
        Value::Array(a) => a.clone(),
        Value::Object(o) => o
            .get("coefficients")
            .and_then(Value::as_array)
            .cloned()
            .ok_or_else(|| Error::invalid("polynomial needs a \"coefficients\" array"))?,
        _ => return Err(Error::invalid("polynomial must be an object or an array")),
    };
    if base_is_qt(v, &items)? {
        Ok(ExactPolynomial::Qt(Poly::new(items.iter().map(ratfunc_from_json).collect::<Result<_>>()?)))
    } else {
        Ok(ExactPolynomial::Q(Poly::new(items.iter().map(q_from_json).collect::<Result<_>>()?)))
    }
}

pub fn curve_to_json(c: &EllipticCurveModel) -> Value {
    match c {
        EllipticCurveModel::Q(e) => json!({
            "base": "Q",
            "a_invariants": qs_to_json(e.a_invariants()),
            "label": e.label(),
        }),
        EllipticCurveModel::Qt(e) => json!({
            "base": "Q(t)",
            "a_invariants": e.a_invariants().iter().map(ratfunc_to_json).collect::<Vec<_>>(),
            "label": e.label(),
        }),
    }
}

pub fn curve_from_json(v: &Value) -> Result<EllipticCurveModel> {
    let items = v
        .get("a_invariants")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::invalid("curve needs an \"a_invariants\" array"))?;
    if items.len() != 5 {
        return Err(Error::invalid("a_invariants must list a1, a2, a3, a4, a6"));
    }
    let label = v.get("label").and_then(Value::as_str).unwrap_or("").to_string();
    if base_is_qt(v, items)? {
        let a: Vec<RatFunc> = items.iter().map(ratfunc_from_json).collect::<Result<_>>()?;
        let a: [RatFunc; 5] = a.try_into().unwrap();
        Ok(EllipticCurveModel::Qt(Curve::new(a, label)?))
    } else {
        let a: Vec<Q> = items.iter().map(q_from_json).collect::<Result<_>>()?;
        let a: [Q; 5] = a.try_into().unwrap();
        Ok(EllipticCurveModel::Q(Curve::new(a, label)?))
    }
}

/// Subgroup JSON with order and fingerprint attached.
pub fn group_to_json(g: &FiniteMatrixGroup) -> Value {
    let spec = GroupSpec::of(g);
    json!({
        "level": spec.level,
        "generators": spec.generators,
        "order": g.order(),
        "fingerprint": g.fingerprint(),
    })
}

/// Reads `{"level", "generators"}`; other keys are ignored.
pub fn group_spec_from_json(v: &Value) -> Result<GroupSpec> {
    let level = v
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid("group needs a positive integer \"level\""))?;
    let gens = v
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::invalid("group needs a \"generators\" array"))?;
    let mut generators = Vec::with_capacity(gens.len());
    for m in gens {
        let bad = || Error::invalid(format!("generator must be [[a,b],[c,d]] with integer entries, got {m}"));
        let rows = m.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        let mut out = [[0i64; 2]; 2];
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
            for (j, x) in r.iter().enumerate() {
                out[i][j] = x.as_i64().ok_or_else(bad)?;
            }
        }
        generators.push(out);
    }
    Ok(GroupSpec {
        level: u32::try_from(level).map_err(|_| Error::invalid("level too large"))?,
        generators,
    })
}
