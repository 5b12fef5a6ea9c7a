//! Artifact formats: JSON documents with sorted keys and decimal-string integers, and the
//! step-function CSV.

use std::io::{Read, Write};

use dlab_core::bounds::{BoundCheck, CheckStatus, Estimates};
use dlab_core::cf::{check_sandwiches, convergents, qnorm_table, RowKind};
use dlab_core::constructors::Construction;
use dlab_core::exponents::{ExponentEstimate, ExponentReport, Sample};
use dlab_core::lattice::{Lattice2, LatticeExponents, LatticeMinimum};
use dlab_core::lemma::{ConditionReport, PieceCheck, Witness};
use dlab_core::{PartialQuotients, StepFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] dlab_core::Error),
}

pub fn int_str(x: &BigInt) -> Value {
    Value::String(x.to_str_radix(10))
}

pub fn ratio_str(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

/// Finite floats as JSON numbers, everything else as `"inf"`, `"-inf"` or `"nan"`.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn parse_int(s: &str, field: &'static str) -> Result<BigInt, FormatError> {
    s.trim().parse().map_err(|_| FormatError::Invalid { field, message: format!("not an integer: {s:?}") })
}

/// `p/q` or a plain integer.
pub fn parse_ratio(s: &str, field: &'static str) -> Result<BigRational, FormatError> {
    let invalid = || FormatError::Invalid { field, message: format!("not a rational: {s:?}") };
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| invalid())?;
            let q: BigInt = q.trim().parse().map_err(|_| invalid())?;
            if q == BigInt::from(0) {
                return Err(invalid());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from(s.parse::<BigInt>().map_err(|_| invalid())?)),
    }
}

/// `[a0; a1, a2, ...]`.
pub fn parse_inline_cf(s: &str) -> Result<PartialQuotients, FormatError> {
    let invalid = |message: &str| FormatError::Invalid { field: "cf", message: message.into() };
    let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(|| invalid("expected [a0; a1, ...]"))?;
    let (a0, tail) = inner.split_once(';').ok_or_else(|| invalid("missing ';' after a0"))?;
    let tail = tail
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_int(t, "cf"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PartialQuotients::new(parse_int(a0, "cf")?, tail)?)
}

pub fn pq_to_json(pq: &PartialQuotients) -> Value {
    json!({ "a0": int_str(pq.a0()), "tail": pq.tail().iter().map(int_str).collect::<Vec<_>>() })
}

pub fn pq_from_json(v: &Value) -> Result<PartialQuotients, FormatError> {
    let a0 = v.get("a0").and_then(Value::as_str).ok_or(FormatError::Missing("a0"))?;
    let tail = v.get("tail").and_then(Value::as_array).ok_or(FormatError::Missing("tail"))?;
    let tail = tail
        .iter()
        .map(|t| t.as_str().ok_or(FormatError::Invalid { field: "tail", message: "entries must be strings".into() }))
        .map(|t| t.and_then(|t| parse_int(t, "tail")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PartialQuotients::new(parse_int(a0, "a0")?, tail)?)
}

pub fn construction_to_json(scheme: &str, gamma: &BigRational, construction: &Construction) -> Value {
    let mut doc = json!({ "scheme": scheme, "gamma": ratio_str(gamma) });
    match construction {
        Construction::Single(theta) => doc["theta"] = pq_to_json(theta),
        Construction::Pair { theta, eta } => {
            doc["theta"] = pq_to_json(theta);
            doc["eta"] = pq_to_json(eta);
        }
    }
    doc
}

/// A bare prefix, or a construction document holding `theta` and optionally `eta`.
pub fn prefixes_from_json(v: &Value) -> Result<(PartialQuotients, Option<PartialQuotients>), FormatError> {
    if v.get("a0").is_some() {
        return Ok((pq_from_json(v)?, None));
    }
    let theta = pq_from_json(v.get("theta").ok_or(FormatError::Missing("theta"))?)?;
    let eta = v.get("eta").map(pq_from_json).transpose()?;
    Ok((theta, eta))
}

/// Convergents, exact distances and sandwich checks of one prefix.
pub fn cf_table(pq: &PartialQuotients) -> Result<Value, FormatError> {
    let conv: Vec<Value> = convergents(pq)
        .iter()
        .map(|c| json!({ "index": c.index, "p": int_str(&c.p), "q": int_str(&c.q) }))
        .collect();
    let rows: Vec<Value> = qnorm_table(pq)?
        .iter()
        .map(|row| {
            let kind = match row.kind {
                RowKind::Interior => "interior",
                RowKind::Duplicate => "duplicate",
                RowKind::TailDegenerate => "tail",
            };
            json!({ "index": row.index, "q": int_str(&row.q), "distance": ratio_str(&row.value), "kind": kind })
        })
        .collect();
    let sandwiches: Vec<Value> = check_sandwiches(pq)?
        .iter()
        .map(|s| json!({ "index": s.index, "by_denominator": s.by_denominator, "by_quotient": s.by_quotient }))
        .collect();
    Ok(json!({ "prefix": pq_to_json(pq), "convergents": conv, "distances": rows, "sandwiches": sandwiches }))
}

/// `t,value_num,value_den` per breakpoint, then `domain_end,,`.
pub fn write_step_csv<W: Write>(f: &StepFunction, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "value_num", "value_den"])?;
    for (t, v) in f.breakpoints().iter().zip(f.values()) {
        w.write_record([t.to_string(), v.numer().to_string(), v.denom().to_string()])?;
    }
    w.write_record([f.domain_end().to_string(), String::new(), String::new()])?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_step_csv<R: Read>(input: R) -> Result<StepFunction, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut end = None;
    for record in r.records() {
        let record = record?;
        if end.is_some() {
            return Err(FormatError::Invalid { field: "t", message: "rows after the domain end".into() });
        }
        let t = parse_int(record.get(0).unwrap_or(""), "t")?;
        match (record.get(1).unwrap_or(""), record.get(2).unwrap_or("")) {
            ("", "") => end = Some(t),
            (num, den) => {
                breakpoints.push(t);
                values.push(parse_ratio(&format!("{num}/{den}"), "value")?);
            }
        }
    }
    let end = end.ok_or(FormatError::Missing("domain end row"))?;
    Ok(StepFunction::new(breakpoints, values, end)?)
}

fn sample_json(s: &Sample) -> Value {
    json!({ "t": ratio_str(&s.t), "ln_t": float(s.ln_t), "local": float(s.local) })
}

pub fn estimate_json(e: &ExponentEstimate) -> Value {
    json!({
        "kind": e.kind.name(),
        "value": float(e.value),
        "window": [e.window.start, e.window.end],
        "samples": e.samples.iter().map(sample_json).collect::<Vec<_>>(),
    })
}

pub fn report_json(r: &ExponentReport) -> Value {
    let opt = |e: &Option<ExponentEstimate>| e.as_ref().map_or(Value::Null, estimate_json);
    json!({
        "omega_theta": estimate_json(&r.omega_theta),
        "omega_eta": estimate_json(&r.omega_eta),
        "omega_bar_theta": opt(&r.omega_bar_theta),
        "omega_bar_eta": opt(&r.omega_bar_eta),
        "varpi_psi": opt(&r.varpi_psi),
        "varpi_upsilon": opt(&r.varpi_upsilon),
        "flags": r.flags.iter().map(|f| json!({
            "relation": f.relation.name(),
            "lhs": float(f.lhs),
            "rhs": float(f.rhs),
            "tolerance": float(f.tolerance),
        })).collect::<Vec<_>>(),
    })
}

pub fn lattice_to_json(l: &Lattice2) -> Value {
    let [[a11, a12], [a21, a22]] = l.entries();
    json!({ "a11": ratio_str(a11), "a12": ratio_str(a12), "a21": ratio_str(a21), "a22": ratio_str(a22) })
}

pub fn lattice_from_json(v: &Value) -> Result<Lattice2, FormatError> {
    let entry = |key: &'static str| {
        let s = v.get(key).and_then(Value::as_str).ok_or(FormatError::Missing(key))?;
        parse_ratio(s, key)
    };
    Ok(Lattice2::new(entry("a11")?, entry("a12")?, entry("a21")?, entry("a22")?)?)
}

fn minimum_json(m: &LatticeMinimum) -> Value {
    json!({
        "t": ratio_str(&m.t),
        "m": int_str(&m.point.0),
        "n": int_str(&m.point.1),
        "x1": ratio_str(&m.image.0),
        "x2": ratio_str(&m.image.1),
        "product_sq": ratio_str(&m.product_sq),
        "ln_psi": float(m.ln_psi()),
    })
}

pub fn lattice_exponents_json(l: &Lattice2, e: &LatticeExponents) -> Value {
    json!({
        "lattice": lattice_to_json(l),
        "omega_lattice": estimate_json(&e.omega),
        "omega_bar_lattice": estimate_json(&e.omega_bar),
        "jumps": e.jumps.iter().map(minimum_json).collect::<Vec<_>>(),
        "truncated_at": e.truncated_at.as_ref().map_or(Value::Null, ratio_str),
    })
}

fn estimates_json(e: &Estimates) -> Value {
    let mut m = Map::new();
    let fields = [
        ("omega_theta", e.omega_theta),
        ("omega_eta", e.omega_eta),
        ("omega_bar_theta", e.omega_bar_theta),
        ("varpi_psi", e.varpi_psi),
        ("varpi_upsilon", e.varpi_upsilon),
        ("omega_lattice", e.omega_lattice),
        ("omega_bar_lattice", e.omega_bar_lattice),
    ];
    for (k, v) in fields {
        m.insert(k.into(), v.map_or(Value::Null, float));
    }
    Value::Object(m)
}

pub fn bound_check_json(c: &BoundCheck) -> Value {
    let mut doc = json!({ "theorem": c.theorem.name(), "inputs": estimates_json(&c.inputs) });
    match &c.status {
        CheckStatus::Checked { lhs, bound, slack, satisfied } => {
            doc["status"] = json!("checked");
            doc["lhs"] = float(*lhs);
            doc["bound"] = float(*bound);
            doc["slack"] = float(*slack);
            doc["satisfied"] = json!(satisfied);
        }
        CheckStatus::NotApplicable(reason) => {
            doc["status"] = json!("not_applicable");
            doc["reason"] = json!(reason);
        }
    }
    doc
}

fn piece_json(p: &PieceCheck) -> Value {
    json!({
        "index": p.index,
        "start": int_str(&p.start),
        "end": int_str(&p.end),
        "witness": p.witness.as_ref().map_or(Value::Null, int_str),
    })
}

pub fn conditions_json(r: &ConditionReport) -> Value {
    json!({
        "a_holds": r.a_holds(),
        "b_holds": r.b_holds(),
        "a": r.a.iter().map(piece_json).collect::<Vec<_>>(),
        "b": r.b.iter().map(piece_json).collect::<Vec<_>>(),
    })
}

/// Witness with the compared values of each inequality clause.
pub fn witness_json(w: &Witness) -> Value {
    json!({
        "nu_star": w.nu_star,
        "mu_star": w.mu_star,
        "q": [int_str(&w.q[0]), int_str(&w.q[1])],
        "s": [int_str(&w.s[0]), int_str(&w.s[1])],
        "clauses": {
            "interleaving": w.q[0] < w.s[0] && w.s[0] < w.q[1] && w.q[1] < w.s[1],
            "u_at_s_below_v_before_s": {
                "u_at_s": ratio_str(&w.u_at_s),
                "v_before_s": ratio_str(&w.v_before_s),
                "holds": w.u_at_s < w.v_before_s,
            },
            "v_before_q_below_u_before_q": {
                "v_before_q": ratio_str(&w.v_before_q),
                "u_before_q": ratio_str(&w.u_before_q),
                "holds": w.v_before_q < w.u_before_q,
            },
        },
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serialising a Value cannot fail");
    out.push(b'\n');
    out
}
