//! JSON decoding of problem files and encoding of results.
//!
//! Ring elements are `{"monomial": coefficient}` objects, or bare integers
//! for scalars; Witt vectors are arrays of elements, lowest index first;
//! matrices are arrays of rows. Coefficients are emitted as canonical
//! decimal, as JSON numbers when they fit in i64 and as strings otherwise.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Rational64;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use gmdisp::frames::{Frame, FrameSpec};
use gmdisp::{BiWitt, CRing, Datum, Elem, Ideal, Integers, Mat, PdIdeal, PdWitt, Ring, RingSpec, WittVec};

/// Failure of a command: malformed input is a usage error, the rest are
/// typed domain errors.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(gmdisp::Error),
}

impl From<gmdisp::Error> for CliError {
    fn from(e: gmdisp::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// The decoded problem file.
pub struct Input {
    root: Map<String, Value>,
}

impl Input {
    pub fn parse(text: &str) -> CliResult<Input> {
        match serde_json::from_str(text) {
            Ok(Value::Object(root)) => Ok(Input { root }),
            Ok(_) => usage("input must be a JSON object"),
            Err(e) => usage(format!("input is not valid JSON: {e}")),
        }
    }

    pub fn empty() -> Input {
        Input { root: Map::new() }
    }

    pub fn get(&self, key: &str) -> CliResult<&Value> {
        self.root.get(key).ok_or_else(|| CliError::Usage(format!("missing field \"{key}\"")))
    }

    pub fn opt(&self, key: &str) -> Option<&Value> {
        self.root.get(key)
    }

    pub fn typed<T: DeserializeOwned>(&self, key: &str) -> CliResult<T> {
        typed(self.get(key)?, key)
    }

    pub fn typed_or<T: DeserializeOwned>(&self, key: &str, default: T) -> CliResult<T> {
        self.opt(key).map_or(Ok(default), |v| typed(v, key))
    }
}

pub fn typed<T: DeserializeOwned>(v: &Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("field \"{what}\": {e}")))
}

fn bigint(v: &Value, what: &str) -> CliResult<BigInt> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(BigInt::from(i)),
            None => n.as_u64().map(BigInt::from).ok_or_else(|| CliError::Usage(format!("{what}: {n} is not an integer"))),
        },
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| CliError::Usage(format!("{what}: \"{s}\" is not an integer"))),
        _ => usage(format!("{what}: expected an integer")),
    }
}

pub fn emit_int(n: &BigInt) -> Value {
    i64::try_from(n).map_or_else(|_| Value::String(n.to_string()), Value::from)
}

/// Element codec for the coefficient rings the command line accepts.
pub trait Codec: CRing {
    fn parse(&self, v: &Value) -> CliResult<Self::E>;
    fn emit(&self, a: &Self::E) -> Value;
}

impl Codec for Ring {
    fn parse(&self, v: &Value) -> CliResult<Elem> {
        match v {
            Value::Object(terms) => {
                let parsed: Vec<(String, BigInt)> =
                    terms.iter().map(|(k, c)| Ok((k.clone(), bigint(c, k)?))).collect::<CliResult<_>>()?;
                Ok(self.elem_from_terms(parsed.iter().map(|(k, c)| (k.as_str(), c)))?)
            }
            _ => Ok(self.from_bigint(&bigint(v, "element")?)),
        }
    }

    fn emit(&self, a: &Elem) -> Value {
        let terms: Map<String, Value> = self.elem_to_terms(a).into_iter().map(|(k, c)| (k, Value::from(c))).collect();
        Value::Object(terms)
    }
}

impl Codec for Integers {
    fn parse(&self, v: &Value) -> CliResult<BigInt> {
        bigint(v, "integer")
    }

    fn emit(&self, a: &BigInt) -> Value {
        emit_int(a)
    }
}

pub fn witt_vec<R: Codec>(r: &R, v: &Value) -> CliResult<WittVec<R::E>> {
    match v {
        Value::Array(cs) => Ok(WittVec(cs.iter().map(|c| r.parse(c)).collect::<CliResult<_>>()?)),
        _ => usage("a Witt vector is an array of components"),
    }
}

pub fn emit_witt<R: Codec>(r: &R, x: &WittVec<R::E>) -> Value {
    Value::Array(x.0.iter().map(|c| r.emit(c)).collect())
}

pub fn elems<R: Codec>(r: &R, v: &Value) -> CliResult<Vec<R::E>> {
    match v {
        Value::Array(cs) => cs.iter().map(|c| r.parse(c)).collect(),
        _ => usage("expected an array of elements"),
    }
}

pub fn emit_elems<R: Codec>(r: &R, xs: &[R::E]) -> Value {
    Value::Array(xs.iter().map(|c| r.emit(c)).collect())
}

pub fn matrix<E: Clone>(v: &Value, entry: impl Fn(&Value) -> CliResult<E>) -> CliResult<Mat<E>> {
    let Value::Array(rows) = v else { return usage("a matrix is an array of rows") };
    let rows: Vec<Vec<E>> = rows
        .iter()
        .map(|row| match row {
            Value::Array(es) => es.iter().map(&entry).collect(),
            _ => usage("a matrix row is an array"),
        })
        .collect::<CliResult<_>>()?;
    Ok(Mat::from_rows(rows)?)
}

pub fn emit_matrix<E: Clone>(m: &Mat<E>, entry: impl Fn(&E) -> Value) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(&entry).collect())).collect())
}

pub fn elem_matrix(r: &Ring, v: &Value) -> CliResult<Mat<Elem>> {
    matrix(v, |e| r.parse(e))
}

pub fn witt_matrix(r: &Ring, v: &Value) -> CliResult<Mat<WittVec<Elem>>> {
    matrix(v, |e| witt_vec(r, e))
}

pub fn emit_elem_matrix(r: &Ring, m: &Mat<Elem>) -> Value {
    emit_matrix(m, |e| r.emit(e))
}

pub fn emit_witt_matrix(r: &Ring, m: &Mat<WittVec<Elem>>) -> Value {
    emit_matrix(m, |v| emit_witt(r, v))
}

/// A ring description: a RingSpec object, or `{"integers": true, "p": p}`.
pub enum AnyRing {
    Finite(Ring),
    Integers(Integers),
}

pub fn any_ring(input: &Input, precision: Option<u32>) -> CliResult<AnyRing> {
    let v = input.get("ring")?;
    if v.get("integers").and_then(Value::as_bool) == Some(true) {
        let p = v.get("p").and_then(Value::as_u64).ok_or_else(|| CliError::Usage("integers need a prime \"p\"".into()))?;
        if !gmdisp::algebra::is_prime(p) {
            return Err(gmdisp::Error::InvalidSpec(format!("{p} is not prime")).into());
        }
        return Ok(AnyRing::Integers(Integers::new(p)));
    }
    Ok(AnyRing::Finite(ring(input, precision)?))
}

pub fn ring_spec(input: &Input, precision: Option<u32>) -> CliResult<RingSpec> {
    let mut spec: RingSpec = input.typed("ring")?;
    if let Some(n) = precision {
        spec.n = n;
    }
    Ok(spec)
}

pub fn ring(input: &Input, precision: Option<u32>) -> CliResult<Ring> {
    Ok(Ring::new(ring_spec(input, precision)?)?)
}

/// `{"weights": [...]}` or `{"h": h, "d": d}` for mu_{h,d}.
pub fn datum(input: &Input) -> CliResult<Datum> {
    let v = input.get("datum")?;
    if let Some(w) = v.get("weights") {
        let weights: Vec<i64> = typed(w, "datum.weights")?;
        return Ok(Datum::new(&weights)?);
    }
    match (v.get("h").and_then(Value::as_u64), v.get("d").and_then(Value::as_u64)) {
        (Some(h), Some(d)) if d <= h && h > 0 => Ok(Datum::mu(h as usize, d as usize)),
        _ => usage("datum needs \"weights\" or \"h\" and \"d\" with 0 <= d <= h, h > 0"),
    }
}

/// The pd-ideal from `"ideal"` (generators, default pR) and `"pd"`
/// ("trivial" or "canonical", default canonical).
pub fn pd_ideal(input: &Input, r: &Ring) -> CliResult<PdIdeal> {
    let ideal = match input.opt("ideal") {
        Some(v) => Ideal::new(r, &elems(r, v)?)?,
        None => Ideal::p_power(r, 1),
    };
    let kind: String = input.typed_or("pd", "canonical".to_string())?;
    Ok(match kind.as_str() {
        "trivial" => PdIdeal::trivial(ideal)?,
        "canonical" => PdIdeal::canonical(ideal)?,
        other => return usage(format!("unknown pd structure \"{other}\"")),
    })
}

pub fn pd_witt(input: &Input, r: &Ring) -> CliResult<PdWitt> {
    Ok(PdWitt::new(pd_ideal(input, r)?))
}

pub fn frame(input: &Input, precision: Option<u32>) -> CliResult<Frame> {
    let mut spec: FrameSpec = input.typed("frame")?;
    if let Some(n) = precision {
        spec.base.n = n;
    }
    Ok(Frame::new(spec)?)
}

pub fn rational(v: &Value, what: &str) -> CliResult<Rational64> {
    match v {
        Value::Number(n) => n.as_i64().map(Rational64::from).ok_or_else(|| CliError::Usage(format!("{what}: not a rational"))),
        Value::String(s) => Rational64::from_str(s.trim()).map_err(|_| CliError::Usage(format!("{what}: \"{s}\" is not a rational"))),
        _ => usage(format!("{what}: expected a rational as a string \"a/b\" or an integer")),
    }
}

/// A bi-infinite Witt vector as a list of terms `{"i": i, "e": "a/b", "c": c}`,
/// each standing for c p^i [t^e].
pub fn biwitt(field: &Ring, v: &Value) -> CliResult<BiWitt> {
    let Value::Array(terms) = v else { return usage("a bi-Witt vector is an array of terms") };
    let mut acc = BiWitt::zero(field);
    for t in terms {
        let i = t.get("i").and_then(Value::as_i64).ok_or_else(|| CliError::Usage("term needs an integer \"i\"".into()))?;
        let e = rational(t.get("e").ok_or_else(|| CliError::Usage("term needs an exponent \"e\"".into()))?, "e")?;
        let c = match t.get("c") {
            Some(c) => field.parse(c)?,
            None => field.one(),
        };
        acc = acc.add(&BiWitt::monomial(field, i, e, c));
    }
    Ok(acc)
}

pub fn emit_rational(r: Rational64) -> Value {
    if *r.denom() == 1 {
        json!(r.numer())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

/// `{"field": RingSpec}` or `{"p": p}` for F_p; the residue field of the bi-Witt model.
pub fn residue_field(input: &Input) -> CliResult<Ring> {
    let spec = match input.opt("field") {
        Some(v) => typed::<RingSpec>(v, "field")?,
        None => RingSpec::zmod(input.typed("p")?, 1),
    };
    if spec.n != 1 || !spec.vars.is_empty() {
        return usage("the residue field must have N = 1 and no variables");
    }
    Ok(Ring::new(spec)?)
}

pub fn labels(r: &Ring) -> Value {
    Value::Array(r.basis_labels().into_iter().map(Value::from).collect())
}

pub fn terms_map(r: &Ring, xs: &[Elem]) -> Vec<BTreeMap<String, u64>> {
    xs.iter().map(|x| r.elem_to_terms(x)).collect()
}
