//! Windows over a frame with a = pA against displays over A/p.
//!
//! GL_1: window classes mod p^M under U ~ k^-1 U sigma(k) are enumerated by
//! brute force. The map to displays of length M over A/p must be a bijection
//! on classes onto the orbits found by orbit_enumerate, and every window must
//! come back to its own class after display_to_window.
//!
//! GL_2: the antidiagonal windows come back to their class, decided by
//! searching k in Gamma modulo p^(M+1) and comparing modulo p^M.

use std::collections::BTreeSet;

use gmdisp::displays::{general_linear, orbit_enumerate, WMat, ORBIT_CAP};
use gmdisp::frames::{Frame, FrameSpec};
use gmdisp::group::{phi_mu, truncate_mat};
use gmdisp::mat;
use gmdisp::{CRing, Datum, Elem, Mat, Ring, RingSpec};

use super::fixtures::{elements, ensure};
use super::Outcome;

const M: usize = 2;

/// Reduction mod p^e of a working-ring element, as an element of A/p^e.
fn reduce(f: &Frame, q: &Ring, a: &Elem) -> Elem {
    q.reduce(f.ring(), a)
}

/// Coefficients of A/p^e are already reduced representatives in A/p^(N + guard).
fn lift(a: &Elem) -> Elem {
    a.clone()
}

/// The smallest element of the class of U mod p^M under GL_1 window conjugation.
fn window_class_1(f: &Frame, q: &Ring, units: &[Elem], u: &Elem) -> Elem {
    let r = f.ring();
    units
        .iter()
        .map(|k| {
            let kl = lift(k);
            let kinv = r.inv(&kl).unwrap();
            reduce(f, q, &r.mul(&r.mul(&kinv, u), &f.sigma(&kl)))
        })
        .min()
        .unwrap()
}

/// The smallest element of the Phi_mu-orbit of a display.
fn display_class(w: &gmdisp::Witt<Ring>, hs: &[(WMat, WMat)], d: &WMat) -> WMat {
    let short = w.ring(M);
    hs.iter().map(|(hinv, phi)| mat::mul(&short, &mat::mul(&short, hinv, d), phi)).min().unwrap()
}

fn gl1(name: &str, spec: FrameSpec) -> Result<String, String> {
    let f = Frame::new(spec).map_err(|e| e.to_string())?;
    let datum = Datum::mu(1, 0);
    let q = f.ring().with_precision(M as u32).map_err(|e| e.to_string())?;
    let units: Vec<Elem> = elements(&q).into_iter().filter(|a| q.is_unit(a)).collect();
    let mut window_classes = BTreeSet::new();
    let mut display_classes = BTreeSet::new();
    let (d_ring, _) = f.window_to_display(&mat::identity(f.ring(), 1), M).map_err(|e| e.to_string())?;
    let w = gmdisp::Witt::new(d_ring.clone());
    let long = w.ring(M + 1);
    let hs: Vec<(WMat, WMat)> = general_linear(&w, &datum, M + 1, true, ORBIT_CAP)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|h| (truncate_mat(&mat::inverse(&long, &h).unwrap(), M), phi_mu(&w, &datum, &h).unwrap()))
        .collect();
    for a in &units {
        let u = lift(a);
        let class = window_class_1(&f, &q, &units, &u);
        let um = Mat::from_rows(vec![vec![u.clone()]]).unwrap();
        let (_, d) = f.window_to_display(&um, M).map_err(|e| e.to_string())?;
        let dclass = display_class(&w, &hs, &d);
        if window_classes.insert(class.clone()) {
            display_classes.insert(dclass);
        }
        let back = f.display_to_window(&datum, &d).map_err(|e| format!("{name}: {e}"))?;
        let back_class = window_class_1(&f, &q, &units, back.get(0, 0));
        ensure(back_class == class, || format!("{name}: window {a:?} does not come back to its class"))?;
    }
    let table = orbit_enumerate(&w, &datum, M, ORBIT_CAP).map_err(|e| e.to_string())?;
    ensure(display_classes.len() == window_classes.len(), || format!("{name}: two window classes share a display class"))?;
    ensure(table.classes.len() == window_classes.len(), || {
        format!("{name}: {} window classes, {} display classes", window_classes.len(), table.classes.len())
    })?;
    Ok(format!("{name} {}", window_classes.len()))
}

/// Whether k^-1 U hatPhi(k) = U2 mod p^M for some k in Gamma mod p^(M+1).
fn window_iso_2(f: &Frame, datum: &Datum, u: &Mat<Elem>, u2: &Mat<Elem>) -> Result<bool, String> {
    let r = f.ring();
    let p = r.p();
    let q = r.with_precision(M as u32).map_err(|e| e.to_string())?;
    let modulus = p.pow(M as u32 + 1);
    let target = u2.map(|x| reduce(f, &q, x));
    let neg: Vec<usize> = datum.negative_positions().iter().map(|&(i, j)| 2 * i + j).collect();
    for code in 0..modulus.pow(4) {
        let mut c = code;
        let entries: Vec<u64> = (0..4)
            .map(|_| {
                let e = c % modulus;
                c /= modulus;
                e
            })
            .collect();
        if neg.iter().any(|&k| entries[k] % p != 0) {
            continue;
        }
        let k = Mat::from_rows(vec![vec![r.from_u64(entries[0]), r.from_u64(entries[1])], vec![r.from_u64(entries[2]), r.from_u64(entries[3])]]).unwrap();
        if mat::inverse(r, &k).is_none() {
            continue;
        }
        let conj = f.window_conjugate(datum, u, &k).map_err(|e| e.to_string())?;
        if conj.map(|x| reduce(f, &q, x)) == target {
            return Ok(true);
        }
    }
    Ok(false)
}

fn gl2_antidiagonal() -> Result<String, String> {
    let f = Frame::new(FrameSpec::zp(2, 3)).map_err(|e| e.to_string())?;
    let r = f.ring().clone();
    let datum = Datum::mu(2, 1);
    let windows = [
        vec![vec![r.zero(), r.one()], vec![r.one(), r.zero()]],
        vec![vec![r.from_u64(2), r.one()], vec![r.one(), r.zero()]],
        vec![vec![r.zero(), r.from_u64(3)], vec![r.one(), r.from_u64(4)]],
    ];
    for rows in windows {
        let u = Mat::from_rows(rows).unwrap();
        let (_, d) = f.window_to_display(&u, M).map_err(|e| e.to_string())?;
        let back = f.display_to_window(&datum, &d).map_err(|e| e.to_string())?;
        ensure(window_iso_2(&f, &datum, &u, &back)?, || format!("GL_2 window {u:?} does not come back to its class"))?;
    }
    Ok("GL_2 antidiagonal windows return to their class".into())
}

pub fn run() -> Outcome {
    let galois = FrameSpec { base: RingSpec::galois(2, 3, &[1, 1, 1]), ..FrameSpec::zp(2, 3) };
    let counts = [
        gl1("Z_2", FrameSpec::zp(2, 3))?,
        gl1("Z_3", FrameSpec::zp(3, 3))?,
        gl1("W(F_4)", galois)?,
    ];
    let gl2 = gl2_antidiagonal()?;
    Ok(format!("GL_1 class counts agree ({}); {gl2}", counts.join(", ")))
}
