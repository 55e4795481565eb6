//! Subcommand handlers. Each reads its problem from the decoded input and
//! returns a JSON result, plus a table when the result is naturally tabular.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use gmdisp::displays::{self, WMat};
use gmdisp::group;
use gmdisp::mat;
use gmdisp::rigidity;
use gmdisp::{CRing, Strategy, Witt};

use crate::input::*;

pub struct Ctx {
    pub seed: u64,
    pub cap: u128,
    pub length: Option<usize>,
    pub precision: Option<u32>,
}

impl Ctx {
    fn length(&self, input: &Input) -> CliResult<usize> {
        match self.length {
            Some(m) => Ok(m),
            None => input.typed("length"),
        }
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Output {
    pub result: Value,
    pub table: Option<Table>,
}

impl From<Value> for Output {
    fn from(result: Value) -> Self {
        Output { result, table: None }
    }
}

fn strategy(input: &Input) -> CliResult<Strategy> {
    let s: String = input.typed_or("strategy", "ghost-lift".to_string())?;
    match s.as_str() {
        "ghost-lift" => Ok(Strategy::GhostLift),
        "polynomial" => Ok(Strategy::Polynomial),
        other => usage(format!("unknown strategy \"{other}\"")),
    }
}

pub fn ring_validate(ctx: &Ctx, input: &Input) -> CliResult<Output> {
    Ok(match any_ring(input, ctx.precision)? {
        AnyRing::Integers(z) => json!({ "integers": true, "p": z.prime() }),
        AnyRing::Finite(r) => json!({
            "p": r.p(),
            "N": r.precision(),
            "dim": r.dim(),
            "galois_degree": r.galois_degree(),
            "size": r.size().map_or(Value::Null, |s| emit_int(&s.into())),
            "basis": labels(&r),
        }),
    }
    .into())
}

fn witt_op<R: FrobeniusLift>(r: &R, op: &str, ctx: &Ctx, input: &Input) -> CliResult<Value> {
    let w = Witt::with_strategy(r.clone(), strategy(input)?);
    let vec = |key: &str| witt_vec(r, input.get(key)?);
    Ok(match op {
        "add" => emit_witt(r, &w.add(&vec("x")?, &vec("y")?)?),
        "mul" => emit_witt(r, &w.mul(&vec("x")?, &vec("y")?)?),
        "frobenius" => emit_witt(r, &w.frobenius(&vec("x")?)?),
        "verschiebung" => emit_witt(r, &w.verschiebung(&vec("x")?)),
        "ghost" => emit_elems(r, &w.ghosts(&vec("x")?)),
        "teichmuller" => emit_witt(r, &w.teichmuller(&r.parse(input.get("a")?)?, ctx.length(input)?)),
        "from-ghost" => {
            let g = elems(r, input.get("ghosts")?)?;
            emit_witt(r, &w.from_ghost(&g, &|x| r.frobenius_image(x))?)
        }
        _ => unreachable!("witt subcommands are fixed by the parser"),
    })
}

/// The Frobenius lift used to invert ghost vectors.
trait FrobeniusLift: Codec {
    fn frobenius_image(&self, a: &Self::E) -> Self::E;
}

impl FrobeniusLift for gmdisp::Ring {
    fn frobenius_image(&self, a: &gmdisp::Elem) -> gmdisp::Elem {
        self.frobenius_lift(a)
    }
}

impl FrobeniusLift for gmdisp::Integers {
    fn frobenius_image(&self, a: &num_bigint::BigInt) -> num_bigint::BigInt {
        a.clone()
    }
}

pub fn witt(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    Ok(match any_ring(input, ctx.precision)? {
        AnyRing::Integers(z) => witt_op(&z, op, ctx, input)?,
        AnyRing::Finite(r) => witt_op(&r, op, ctx, input)?,
    }
    .into())
}

pub fn pd(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    let r = ring(input, ctx.precision)?;
    let pw = pd_witt(input, &r)?;
    Ok(match op {
        "validate" => {
            let report = pw.pd().validate(input.typed_or("n_max", 6)?, ctx.seed)?;
            json!({
                "valid": report.is_valid(),
                "exhaustive": report.exhaustive,
                "cases": report.cases,
                "ideal": terms_map(&r, &pw.pd().ideal().generators()),
                "violations": report.violations.iter().map(|v| json!({
                    "axiom": v.axiom, "n": v.n, "m": v.m,
                    "x": r.emit(&v.x),
                    "y": v.y.as_ref().map(|y| r.emit(y)),
                    "detail": v.detail,
                })).collect::<Vec<_>>(),
            })
        }
        "logghost" => emit_elems(&r, &pw.log_ghosts(&witt_vec(&r, input.get("x")?)?)?),
        "project" => emit_witt(&r, &pw.project_pos(&witt_vec(&r, input.get("x")?)?)?),
        _ => unreachable!("pd subcommands are fixed by the parser"),
    }
    .into())
}

pub fn group(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    let r = ring(input, ctx.precision)?;
    Ok(match op {
        "factor" => {
            let datum = datum(input)?;
            let g = elem_matrix(&r, input.get("g")?)?;
            let (g0, x) = group::factor(&r, &datum, &g)?;
            json!({ "g0": emit_elem_matrix(&r, &g0), "X": emit_elem_matrix(&r, &x) })
        }
        "phi" => {
            let datum = datum(input)?;
            let w = Witt::new(r.clone());
            let h = witt_matrix(&r, input.get("h")?)?;
            emit_witt_matrix(&r, &group::phi_mu(&w, &datum, &h)?)
        }
        "psi" => {
            let datum = datum(input)?;
            let pw = pd_witt(input, &r)?;
            let h = witt_matrix(&r, input.get("h")?)?;
            emit_witt_matrix(&r, &group::psi_mu(&pw, &datum, &h)?)
        }
        "exp" => {
            let weights: Vec<i64> = input.typed("weights")?;
            let d = elem_matrix(&r, input.get("d")?)?;
            emit_elem_matrix(&r, &group::graded_exp(&r, &weights, &d)?)
        }
        _ => unreachable!("group subcommands are fixed by the parser"),
    }
    .into())
}

fn display_len(u: &WMat) -> usize {
    u.a.first().map_or(0, |v| v.len())
}

pub fn display(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    let r = ring(input, ctx.precision)?;
    let datum = datum(input)?;
    let w = Witt::new(r.clone());
    match op {
        "nilpotent" => {
            let u = witt_matrix(&r, input.get("u")?)?;
            let chain = displays::nilpotence_chain(&r, &datum, &group::w0_mat(&u))?;
            Ok(json!({ "nilpotent": displays::adjoint_nilpotent_witt(&r, &datum, &u)?, "chain": chain }).into())
        }
        "conjugate" => {
            let u = witt_matrix(&r, input.get("u")?)?;
            let h = witt_matrix(&r, input.get("h")?)?;
            Ok(emit_witt_matrix(&r, &displays::phi_conjugate(&w, &datum, &u, &h)?).into())
        }
        "solve" => {
            let pw = pd_witt(input, &r)?;
            let u = witt_matrix(&r, input.get("u")?)?;
            let o = witt_matrix(&r, input.get("o")?)?;
            let sol = displays::deform_solve(&pw, &datum, &u, &o)?;
            let wr = pw.witt().ring(display_len(&u));
            let ginv = mat::inverse(&wr, &sol.h).ok_or(gmdisp::Error::NotInvertible)?;
            let check = mat::mul(&wr, &mat::mul(&wr, &ginv, &u), &displays::psi_pad(&pw, &datum, &sol.h)?) == o;
            Ok(json!({
                "kind": "deformation",
                "datum": datum,
                "length": display_len(&u),
                "g": emit_witt_matrix(&r, &sol.h),
                "iterations": sol.iterations,
                "iteration_bound": displays::iteration_bound(&pw, &datum, display_len(&u)),
                "verified": check,
            })
            .into())
        }
        "orbits" => {
            let m = ctx.length(input)?;
            let table = displays::orbit_enumerate(&w, &datum, m, ctx.cap)?;
            let rows = table
                .classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let rep = serde_json::to_string(&c.representative).expect("strings serialise");
                    vec![i.to_string(), c.size.to_string(), c.stabilizer.to_string(), c.nilpotent.to_string(), rep]
                })
                .collect();
            let header = ["class", "size", "stabilizer", "nilpotent", "representative"].map(String::from).to_vec();
            let mut result = serde_json::to_value(&table).expect("orbit tables serialise");
            result["class_count"] = json!(table.classes.len());
            Ok(Output { result, table: Some(Table { header, rows }) })
        }
        "lifts" => {
            let pw = pd_witt(input, &r)?;
            let u = witt_matrix(&r, input.get("u")?)?;
            let (reps, report) = displays::lift_displays(&pw, &datum, &u)?;
            Ok(json!({
                "lifts": report.lifts,
                "classes": report.classes,
                "representatives": reps.iter().map(|g| emit_witt_matrix(&r, g)).collect::<Vec<_>>(),
            })
            .into())
        }
        "automorphisms" => {
            let pw = pd_witt(input, &r)?;
            let u = witt_matrix(&r, input.get("u")?)?;
            let aut = displays::automorphisms_mod(&pw, &datum, &u)?;
            Ok(json!({
                "count": aut.len(),
                "trivial": aut.len() == 1 && mat::is_identity(&pw.witt().ring(display_len(&u)), &aut[0]),
                "elements": aut.iter().map(|g| emit_witt_matrix(&r, g)).collect::<Vec<_>>(),
            })
            .into())
        }
        _ => unreachable!("display subcommands are fixed by the parser"),
    }
}

pub fn frame(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    let f = crate::input::frame(input, ctx.precision)?;
    let c = f.contract_ring();
    let r = f.ring();
    let contracted = |m: &WMat| emit_witt_matrix(c, &f.contract_mat(m));
    Ok(match op {
        "validate" => {
            let report = f.validate(input.typed_or("n_max", 4)?, ctx.seed)?;
            json!({
                "valid": report.valid,
                "frobenius_failures": report.frobenius_failures,
                "inclusion_failures": report.inclusion_failures,
                "pd_valid": report.pd.is_valid(),
                "pd_cases": report.pd.cases,
            })
        }
        "cartier" => {
            let a = r.parse(input.get("a")?)?;
            emit_witt(c, &f.contract_witt(&f.cartier_diagonal(&a, ctx.length(input)?)?))
        }
        "change" => {
            let u = elem_matrix(r, input.get("u")?)?;
            contracted(&f.frame_change(&u, ctx.length(input)?)?)
        }
        "descend" => {
            let datum = datum(input)?;
            let u = witt_matrix(r, input.get("u")?)?;
            let d = f.descend_to_fixed(&datum, &u)?;
            let ghosts = |gs: &[gmdisp::Mat<gmdisp::Elem>]| {
                gs.iter().map(|g| emit_elem_matrix(c, &g.map(|x| f.contract(x)))).collect::<Vec<_>>()
            };
            json!({
                "kind": "descent",
                "datum": datum,
                "precision": d.precision,
                "length": d.length,
                "iterations": d.iterations,
                "k": contracted(&d.k),
                "h": contracted(&d.h),
                "k_ghosts": ghosts(&d.k_ghosts),
                "h_ghosts": ghosts(&d.h_ghosts),
                "u_prime": contracted(&d.u_prime),
                "f_equals_tau": f.is_f_sigma_fixed(&d.u_prime)?,
            })
        }
        "roundtrip" => {
            let datum = datum(input)?;
            let u = elem_matrix(r, input.get("u")?)?;
            let m = ctx.length(input)?;
            let (q, d) = f.window_to_display(&u, m)?;
            let back = f.display_to_window(&datum, &d)?;
            let (_, d2) = f.window_to_display(&back, m)?;
            json!({
                "display": emit_witt_matrix(&q, &d),
                "window": emit_elem_matrix(c, &back.map(|x| f.contract(x))),
                "display_of_window": emit_witt_matrix(&q, &d2),
            })
        }
        _ => unreachable!("frame subcommands are fixed by the parser"),
    }
    .into())
}

pub fn rigid(op: &str, ctx: &Ctx, input: &Input) -> CliResult<Output> {
    match op {
        "chain" => {
            let r = ring(input, ctx.precision)?;
            let n: u32 = input.typed("n")?;
            let (chain, _) = rigidity::torsion_ideal_chain(&r, n)?;
            Ok(json!({
                "n": n,
                "is_ideal": chain.is_ideal,
                "size": chain.members.len(),
                "generators": terms_map(&r, &chain.generators),
                "members": terms_map(&r, &chain.members),
            })
            .into())
        }
        "vr" => {
            let field = residue_field(input)?;
            let x = biwitt(&field, input.get("x")?)?;
            let Value::Array(rs) = input.get("r")? else { return usage("\"r\" is an array of rationals") };
            let rs: Vec<Rational64> = rs.iter().map(|v| rational(v, "r")).collect::<CliResult<_>>()?;
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for r in rs {
                let v = x.v_r(r);
                let lower = if x.in_w_tkt() && r > Rational64::from(0) {
                    Some(rigidity::vr_lower_bound_check(&x, r)?)
                } else {
                    None
                };
                let bound = rigidity::vr_bound_upper(field.p(), r.to_f64().unwrap_or(f64::NAN));
                rows.push(json!({
                    "r": emit_rational(r),
                    "v_r": v.map_or(Value::Null, emit_rational),
                    "bound": format!("{bound:.12}"),
                    "lower_bound_holds": lower,
                    "frobenius_scaling": rigidity::vr_frobenius_scaling(&x, r),
                }));
                let opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
                table.push(vec![
                    rational_str(r),
                    v.map_or("inf".into(), rational_str),
                    format!("{bound:.12}"),
                    opt(lower),
                    rigidity::vr_frobenius_scaling(&x, r).to_string(),
                ]);
            }
            let header = ["r", "v_r", "bound", "lower_bound_holds", "frobenius_scaling"].map(String::from).to_vec();
            Ok(Output { result: json!({ "x": rigidity::render(&x), "rows": rows }), table: Some(Table { header, rows: table }) })
        }
        "solve-check" => {
            let field = residue_field(input)?;
            let Value::Array(rows) = input.get("b")? else { return usage("\"b\" is a matrix of bi-Witt vectors") };
            let b: Vec<Vec<_>> = rows
                .iter()
                .map(|row| match row {
                    Value::Array(es) => es.iter().map(|e| biwitt(&field, e)).collect(),
                    _ => usage("a matrix row is an array"),
                })
                .collect::<CliResult<_>>()?;
            let report = rigidity::rigid_solve_check(&b, input.typed_or("s", 1)?, input.typed_or("t", 4)?, input.typed_or("growth_limit", 4)?)?;
            Ok(json!({
                "kind": "rigidity",
                "only_zero": report.only_zero,
                "candidates_dim": report.candidates_dim,
                "solutions_dim": report.solutions_dim,
                "witness": report.witness,
                "growth": report.growth.iter().map(|(n, g)| json!([n, format!("{g:.12}")])).collect::<Vec<_>>(),
            })
            .into())
        }
        _ => unreachable!("rigid subcommands are fixed by the parser"),
    }
}

fn rational_str(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
