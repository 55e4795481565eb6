//! A fast, self-contained miniature of the acceptance suite: one small
//! exhaustive or brute-force check per property, each against an oracle
//! computed by other means than the routine under test.

use std::collections::{BTreeSet, HashSet};

use num_rational::Rational64;
use serde_json::{json, Value};

use gmdisp::displays::{self, witt_elements, WMat};
use gmdisp::frames::{Frame, FrameSpec};
use gmdisp::group::{self, phi_mu};
use gmdisp::mat;
use gmdisp::rigidity;
use gmdisp::{BiWitt, CRing, Datum, Elem, Ideal, Mat, PdIdeal, PdWitt, Ring, RingSpec, Strategy, Witt, WittVec};

type Check = Result<String, String>;

fn ring(spec: RingSpec) -> Result<Ring, String> {
    Ring::new(spec).map_err(|e| e.to_string())
}

fn all(r: &Ring) -> Result<Vec<Elem>, String> {
    Ok(r.elements().map_err(|e| e.to_string())?.collect())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: gmdisp::Error) -> String {
    e.to_string()
}

fn witt_laws() -> Check {
    let r = ring(RingSpec::zmod(2, 1))?;
    let w = Witt::new(r.clone());
    let xs = witt_elements(&all(&r)?, 3);
    let mut n = 0;
    for x in &xs {
        ensure(w.sub(&w.frobenius(&w.verschiebung(x)).map_err(err)?, &w.mul(&w.from_int(&2.into(), 3), x).map_err(err)?).map_err(err)? == w.zero(3), || {
            format!("FV != p at {x:?}")
        })?;
        for y in &xs {
            for z in &xs {
                let l = w.mul(x, &w.add(y, z).map_err(err)?).map_err(err)?;
                let rr = w.add(&w.mul(x, y).map_err(err)?, &w.mul(x, z).map_err(err)?).map_err(err)?;
                ensure(l == rr, || format!("distributivity fails at {x:?} {y:?} {z:?}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("W_3(F_2): {n} distributivity triples and FV = p"))
}

fn strategies() -> Check {
    let r = ring(RingSpec::zmod(2, 2))?;
    let (a, b) = (Witt::with_strategy(r.clone(), Strategy::Polynomial), Witt::with_strategy(r.clone(), Strategy::GhostLift));
    let xs = witt_elements(&all(&r)?, 2);
    for x in &xs {
        for y in &xs {
            ensure(a.add(x, y).map_err(err)? == b.add(x, y).map_err(err)?, || "sums differ".into())?;
            ensure(a.mul(x, y).map_err(err)? == b.mul(x, y).map_err(err)?, || "products differ".into())?;
        }
    }
    Ok(format!("W_2(Z/4): {} pairs agree", xs.len() * xs.len()))
}

fn log_ghost() -> Check {
    let r = ring(RingSpec::zmod(2, 3))?;
    let pw = PdWitt::new(PdIdeal::canonical_p(&r));
    let members = pw.pd().ideal().elements().map_err(err)?;
    let xs = witt_elements(&members, 2);
    let logs: Vec<Vec<Elem>> = xs.iter().map(|x| pw.log_ghosts(x)).collect::<Result<_, _>>().map_err(err)?;
    ensure(logs.iter().collect::<HashSet<_>>().len() == xs.len(), || "w' is not injective".into())?;
    let w = pw.witt();
    for (x, lx) in xs.iter().zip(&logs) {
        for (y, ly) in xs.iter().zip(&logs) {
            let s = pw.log_ghosts(&w.add(x, y).map_err(err)?).map_err(err)?;
            let sum: Vec<Elem> = lx.iter().zip(ly).map(|(a, b)| r.add(a, b)).collect();
            ensure(s == sum, || "w' is not additive".into())?;
        }
    }
    Ok(format!("W_2(2Z/8): w' bijective and additive on {} elements", xs.len()))
}

fn phi_hom() -> Check {
    let r = ring(RingSpec::zmod(2, 1))?;
    let w = Witt::new(r);
    let datum = Datum::mu(2, 1);
    let hs = displays::general_linear(&w, &datum, 2, true, 1 << 16).map_err(err)?;
    let (long, short) = (w.ring(2), w.ring(1));
    let phis: Vec<WMat> = hs.iter().map(|h| phi_mu(&w, &datum, h)).collect::<Result<_, _>>().map_err(err)?;
    for (a, pa) in hs.iter().zip(&phis) {
        for (b, pb) in hs.iter().zip(&phis) {
            let pab = phi_mu(&w, &datum, &mat::mul(&long, a, b)).map_err(err)?;
            ensure(pab == mat::mul(&short, pa, pb), || "Phi_mu is not multiplicative".into())?;
        }
    }
    Ok(format!("H_mu(W_2(F_2)): {} pairs", hs.len() * hs.len()))
}

fn dual_numbers_pd() -> Result<(Ring, PdWitt), String> {
    let r = ring(RingSpec::dual_numbers(2, 1))?;
    let e = r.var("e").map_err(err)?;
    let ideal = Ideal::new(&r, &[e]).map_err(err)?;
    Ok((r, PdWitt::new(PdIdeal::trivial(ideal).map_err(err)?)))
}

fn nilpotent_unit(r: &Ring, len: usize) -> WMat {
    let one = |c: u64| {
        let mut v = vec![r.zero(); len];
        v[0] = r.from_u64(c);
        WittVec(v)
    };
    Mat::from_rows(vec![vec![one(0), one(1)], vec![one(1), one(1)]]).unwrap()
}

fn deformation() -> Check {
    let (r, pw) = dual_numbers_pd()?;
    let datum = Datum::mu(2, 1);
    let u = nilpotent_unit(&r, 2);
    ensure(displays::adjoint_nilpotent_witt(&r, &datum, &u).map_err(err)?, || "fixture is not nilpotent".into())?;
    let wr = pw.witt().ring(2);
    let group = displays::congruence_group(&pw, &datum, 2, false).map_err(err)?;
    let conj = |g: &WMat| -> Result<WMat, String> {
        let ginv = mat::inverse(&wr, g).ok_or("not invertible")?;
        Ok(mat::mul(&wr, &mat::mul(&wr, &ginv, &u), &displays::psi_pad(&pw, &datum, g).map_err(err)?))
    };
    let target = group.iter().rev().nth(1).ok_or("group too small")?;
    let o = conj(target)?;
    let sol = displays::deform_solve(&pw, &datum, &u, &o).map_err(err)?;
    let mut found = Vec::new();
    for g in &group {
        if conj(g)? == o {
            found.push(g.clone());
        }
    }
    ensure(found == vec![sol.h], || format!("search finds {} solutions, solver disagrees", found.len()))?;
    Ok(format!("GL_2 over F_2[e]: unique solution among {} candidates", group.len()))
}

fn automorphisms() -> Check {
    let (r, pw) = dual_numbers_pd()?;
    let datum = Datum::mu(2, 1);
    let u = nilpotent_unit(&r, 2);
    let aut = displays::automorphisms_mod(&pw, &datum, &u).map_err(err)?;
    ensure(aut.len() == 1 && mat::is_identity(&pw.witt().ring(2), &aut[0]), || format!("{} automorphisms", aut.len()))?;
    Ok("nilpotent display over F_2[e] has only the trivial automorphism mod (e)".into())
}

fn lifts() -> Check {
    let (r, pw) = dual_numbers_pd()?;
    let datum = Datum::mu(1, 0);
    let base = Mat::from_rows(vec![vec![WittVec(vec![r.one(), r.zero()])]]).unwrap();
    let (reps, report) = displays::lift_displays(&pw, &datum, &base).map_err(err)?;
    let all = displays::all_lifts(&pw, &datum, &base).map_err(err)?;
    ensure(!reps.is_empty() && report.lifts == all.len(), || "lift count mismatch".into())?;
    // orbit oracle: close each lift under the congruence group action
    let wr = pw.witt().ring(2);
    let acts: Vec<(WMat, WMat)> = displays::congruence_group(&pw, &datum, 2, true)
        .map_err(err)?
        .iter()
        .map(|g| (mat::inverse(&wr, g).unwrap(), displays::psi_pad(&pw, &datum, g).unwrap()))
        .collect();
    let orbits: BTreeSet<WMat> =
        all.iter().map(|u| acts.iter().map(|(gi, p)| mat::mul(&wr, &mat::mul(&wr, gi, u), p)).min().unwrap()).collect();
    ensure(orbits.len() == report.classes, || format!("{} classes, oracle {}", report.classes, orbits.len()))?;
    Ok(format!("GL_1 over F_2[e]: {} lifts in {} classes", report.lifts, report.classes))
}

fn descent() -> Check {
    let f = Frame::new(FrameSpec::zp(3, 6)).map_err(err)?;
    let r = f.ring();
    let datum = Datum::mu(2, 1);
    let c = |a: u64, b: u64, k: u64| WittVec(vec![r.from_u64(a), r.from_u64(b), r.from_u64(k), r.from_u64(a + b), r.zero()]);
    let u = Mat::from_rows(vec![vec![c(0, 2, 0), c(1, 1, 2)], vec![c(1, 0, 1), c(1, 2, 2)]]).unwrap();
    let d = f.descend_to_fixed(&datum, &u).map_err(err)?;
    ensure(f.is_f_sigma_fixed(&d.u_prime).map_err(err)?, || "F(U') != tau(U')".into())?;
    Ok("Z_3 frame: F(U') = tau(U') at contract precision".into())
}

fn roundtrip() -> Check {
    let f = Frame::new(FrameSpec::zp(2, 3)).map_err(err)?;
    let r = f.ring();
    let q = r.with_precision(2).map_err(err)?;
    let datum = Datum::mu(1, 0);
    for a in [1u64, 3] {
        let u = Mat::from_rows(vec![vec![r.from_u64(a)]]).unwrap();
        let (_, d) = f.window_to_display(&u, 2).map_err(err)?;
        let back = f.display_to_window(&datum, &d).map_err(err)?;
        // over Z_2 sigma = id, so GL_1 window classes mod 4 are single units
        ensure(q.reduce(r, back.get(0, 0)) == q.from_u64(a), || format!("window {a} does not come back"))?;
    }
    Ok("GL_1 windows over Z_2 come back mod 4".into())
}

fn graded_exp() -> Check {
    let r = ring(RingSpec::zmod(3, 4))?;
    let weights = [0i64, 1, 2];
    let d = Mat::from_rows(vec![
        vec![r.zero(), r.zero(), r.zero()],
        vec![r.from_u64(5), r.zero(), r.zero()],
        vec![r.from_u64(7), r.from_u64(11), r.zero()],
    ])
    .unwrap();
    let e = group::graded_exp(&r, &weights, &d).map_err(err)?;
    // exp(D) = 1 + D + D^2/2 with D^2 = [[0,0,0],[0,0,0],[55,0,0]], 55/2 mod 81 = 68
    let expect = Mat::from_rows(vec![
        vec![r.one(), r.zero(), r.zero()],
        vec![r.from_u64(5), r.one(), r.zero()],
        vec![r.from_u64(7 + 68), r.from_u64(11), r.one()],
    ])
    .unwrap();
    ensure(e == expect, || "exp(D) differs from the hand series".into())?;
    Ok("exp of a graded 3x3 matrix over Z/81".into())
}

fn rigid() -> Check {
    let k = ring(RingSpec::zmod(2, 1))?;
    let z = BiWitt::zero(&k);
    let one = BiWitt::p_t(&k, 0, Rational64::from(0));
    let t = BiWitt::p_t(&k, 0, Rational64::from(1));
    ensure(t.v_r(Rational64::new(1, 2)) == Some(Rational64::from(1)), || "v_r([t]) != 1".into())?;
    let b = vec![vec![one.clone(), z.clone()], vec![z, one]];
    let rep = rigidity::rigid_solve_check(&b, 1, 4, 2).map_err(err)?;
    ensure(rep.only_zero, || "nonzero solution for B = 1".into())?;
    Ok(format!("B = 1: only x = 0 among {} candidates", rep.candidates_dim))
}

pub fn run() -> Value {
    let checks: [(&str, fn() -> Check); 11] = [
        ("witt laws", witt_laws),
        ("strategy agreement", strategies),
        ("log ghost coordinates", log_ghost),
        ("Phi_mu homomorphism", phi_hom),
        ("deformation uniqueness", deformation),
        ("automorphisms mod a", automorphisms),
        ("lift classes", lifts),
        ("descent certificate", descent),
        ("window round trip", roundtrip),
        ("graded exponential", graded_exp),
        ("rigidity", rigid),
    ];
    let results: Vec<Value> = checks
        .iter()
        .map(|(name, f)| match f() {
            Ok(detail) => json!({ "name": name, "pass": true, "detail": detail }),
            Err(detail) => json!({ "name": name, "pass": false, "detail": detail }),
        })
        .collect();
    let passed = results.iter().filter(|v| v["pass"] == true).count();
    json!({ "passed": passed, "failed": results.len() - passed, "checks": results })
}
