//! Banal displays over W_M(R): Phi_mu-conjugation, the adjoint nilpotence
//! test, the deformation solver and the enumerations built on it.
//!
//! Lengths: a display is U in G(W_M(R)) and a morphism is h in H_mu(W_{M+1}(R)),
//! acting by U -> h^-1 U Phi_mu(h). Along a pd-ideal a the congruence group
//! G(W_M(a)) acts through Psi_L(g) = Psi_mu(pad(g)), where pad extends by zero
//! logarithmic ghost coordinates. pad is a group homomorphism, so this is an
//! action of G(W_M(a)) on G(W_M(R)) that agrees with Psi_mu on pad(G(W_M(a))).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::CRing;
use crate::error::{Error, Result};
use crate::group::{self, Datum};
use crate::mat::{self, Mat};
use crate::pd_witt::PdWitt;
use crate::ring::{Elem, Ring, ENUMERATION_CAP};
use crate::witt::{Witt, WittVec};

pub type WMat = Mat<WittVec<Elem>>;

fn len_of(m: &WMat) -> usize {
    m.a.first().map_or(0, |v| v.len())
}

fn check_display(datum: &Datum, u: &WMat) -> Result<usize> {
    if u.rows != datum.h || u.cols != datum.h {
        return Err(Error::ShapeMismatch(format!("expected {0}x{0} matrix", datum.h)));
    }
    let len = len_of(u);
    if len == 0 || u.a.iter().any(|v| v.len() != len) {
        return Err(Error::ShapeMismatch("entries must share a positive Witt length".into()));
    }
    Ok(len)
}

/// h^-1 U Phi_mu(h) for U of length M and h in H_mu of length M + 1.
pub fn phi_conjugate(w: &Witt<Ring>, datum: &Datum, u: &WMat, h: &WMat) -> Result<WMat> {
    let m = check_display(datum, u)?;
    if check_display(datum, h)? != m + 1 {
        return Err(Error::ShapeMismatch("morphism must be one Witt component longer than the display".into()));
    }
    let phi = group::phi_mu(w, datum, h)?;
    let hinv = mat::inverse(&w.ring(m + 1), h).ok_or(Error::NotInvertible)?;
    let short = w.ring(m);
    Ok(mat::mul(&short, &mat::mul(&short, &group::truncate_mat(&hinv, m), u), &phi))
}

/// Nilpotence of f = Ad(u) o Frob o pi on (R/pR) (x) gl_h, decided by the
/// chain N_0 = everything, N_{k+1} = R-span of f(N_k).
pub fn adjoint_nilpotent(r: &Ring, datum: &Datum, u: &Mat<Elem>) -> Result<bool> {
    Ok(nilpotence_chain(r, datum, u)?.last() == Some(&0))
}

/// The same test on the zeroth component of a display over W_M(R).
pub fn adjoint_nilpotent_witt(r: &Ring, datum: &Datum, u: &WMat) -> Result<bool> {
    adjoint_nilpotent(r, datum, &group::w0_mat(u))
}

/// F_p-dimensions of the chain N_0 ⊇ N_1 ⊇ ... up to zero or stabilisation.
pub fn nilpotence_chain(r: &Ring, datum: &Datum, u: &Mat<Elem>) -> Result<Vec<usize>> {
    if u.rows != datum.h || u.cols != datum.h {
        return Err(Error::ShapeMismatch(format!("expected {0}x{0} matrix", datum.h)));
    }
    let rp = r.with_precision(1)?;
    let p = r.p();
    let u = u.map(|x| rp.reduce(r, x));
    let uinv = mat::inverse(&rp, &u).ok_or(Error::NotInvertible)?;
    let (h, dim) = (datum.h, rp.dim());
    let neg: BTreeSet<(usize, usize)> = datum.negative_positions().into_iter().collect();
    let to_vec = |m: &Mat<Elem>| -> Vec<u64> { m.a.iter().flat_map(|e| e.0.iter().copied()).collect() };
    let from_vec = |v: &[u64]| -> Mat<Elem> { Mat::from_fn(h, h, |i, j| Elem(v[(i * h + j) * dim..(i * h + j + 1) * dim].to_vec())) };
    let f = |x: &Mat<Elem>| -> Mat<Elem> {
        let fx = Mat::from_fn(h, h, |i, j| {
            if neg.contains(&(i, j)) {
                rp.pow(x.get(i, j), p)
            } else {
                rp.zero()
            }
        });
        mat::mul(&rp, &mat::mul(&rp, &u, &fx), &uinv)
    };
    let total = h * h * dim;
    let mut basis: Vec<Vec<u64>> = (0..total)
        .map(|k| {
            let mut v = vec![0; total];
            v[k] = 1;
            v
        })
        .collect();
    let mut dims = vec![total];
    loop {
        let mut gens = Vec::new();
        for v in &basis {
            let fv = f(&from_vec(v));
            for t in 0..dim {
                gens.push(to_vec(&mat::scale(&rp, &rp.basis(t), &fv)));
            }
        }
        basis = echelon_mod_p(gens, p);
        let d = basis.len();
        let prev = *dims.last().unwrap();
        dims.push(d);
        if d == 0 || d == prev {
            return Ok(dims);
        }
    }
}

// Row echelon basis of the F_p-span of the rows.
fn echelon_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let inv = |a: u64| (1..p).find(|b| a * b % p == 1).unwrap();
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(piv) = (row..rows.len()).find(|&i| rows[i][col] % p != 0) else { continue };
        rows.swap(row, piv);
        let c = inv(rows[row][col] % p);
        for x in rows[row].iter_mut() {
            *x = *x * c % p;
        }
        let pivot = rows[row].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != row && r[col] % p != 0 {
                let f = r[col] % p;
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x = (*x % p + p * p - f * y % p) % p;
                }
            }
        }
        row += 1;
    }
    out.extend(rows.into_iter().take(row));
    out
}

/// Whether adjoint nilpotence of U and of its Phi_mu-conjugate by h agree.
pub fn nilpotence_conjugation_invariance(w: &Witt<Ring>, datum: &Datum, u: &WMat, h: &WMat) -> Result<bool> {
    let conj = phi_conjugate(w, datum, u, h)?;
    Ok(adjoint_nilpotent_witt(w.base(), datum, u)? == adjoint_nilpotent_witt(w.base(), datum, &conj)?)
}

/// Psi_L(g) = Psi_mu(pad(g)) for g in G(W_M(a)); output of length M.
pub fn psi_pad(pw: &PdWitt, datum: &Datum, g: &WMat) -> Result<WMat> {
    let m = check_display(datum, g)?;
    let padded = pad_mat(pw, g, m + 1)?;
    group::psi_mu(pw, datum, &padded)
}

/// Entrywise pad of g - 1 over W(a), extended to length `len`.
pub fn pad_mat(pw: &PdWitt, g: &WMat, len: usize) -> Result<WMat> {
    let w = pw.witt();
    let m = len_of(g);
    let (one, lone) = (w.one(m), w.one(len));
    g.map_indexed(|i, j, v| {
        if i == j {
            w.add(&pw.pad_log(&w.sub(v, &one)?, len)?, &lone)
        } else {
            pw.pad_log(v, len)
        }
    })
    .map_err(|e| match e {
        Error::NotInWIdeal => Error::DisplacementNotInIdeal,
        e => e,
    })
}

/// Whether g - 1 has every Witt component in a.
pub fn in_congruence_group(pw: &PdWitt, g: &WMat) -> bool {
    let w = pw.witt();
    let one = w.one(len_of(g));
    (0..g.rows).all(|i| {
        (0..g.cols).all(|j| {
            let v = if i == j { w.sub(g.get(i, j), &one).unwrap() } else { g.get(i, j).clone() };
            pw.in_w_ideal(&v)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformSolution {
    pub h: WMat,
    pub iterations: usize,
}

/// The unique g in G(W_M(a)) with O = g^-1 U Psi_L(g), by iterating
/// g -> U Psi_L(g) O^-1 from g = 1. The error of an approximate solution
/// is moved by Ad(O) o Psi_L, which is nilpotent on every layer of the
/// a-adic and p-adic filtration of W_M(a) when U and O are adjoint
/// nilpotent, so the iteration reaches the fixed point.
pub fn deform_solve(pw: &PdWitt, datum: &Datum, u: &WMat, o: &WMat) -> Result<DeformSolution> {
    let m = check_display(datum, u)?;
    if check_display(datum, o)? != m {
        return Err(Error::ShapeMismatch("displays of different lengths".into()));
    }
    let r = pw.ring();
    if !adjoint_nilpotent_witt(r, datum, u)? || !adjoint_nilpotent_witt(r, datum, o)? {
        return Err(Error::NotAdjointNilpotent);
    }
    let wr = pw.witt().ring(m);
    let oinv = mat::inverse(&wr, o).ok_or(Error::NotInvertible)?;
    if !in_congruence_group(pw, &mat::mul(&wr, u, &oinv)) {
        return Err(Error::DisplacementNotInIdeal);
    }
    let bound = iteration_bound(pw, datum, m);
    let mut g = mat::identity(&wr, datum.h);
    for it in 0..=bound {
        let next = mat::mul(&wr, &mat::mul(&wr, u, &psi_pad(pw, datum, &g)?), &oinv);
        if next == g {
            let ginv = mat::inverse(&wr, &g).ok_or(Error::NotInvertible)?;
            let check = mat::mul(&wr, &mat::mul(&wr, &ginv, u), &psi_pad(pw, datum, &g)?);
            if check != *o {
                return Err(Error::CertificateFailure("deformation fixed point does not solve the equation".into()));
            }
            return Ok(DeformSolution { h: g, iterations: it });
        }
        g = next;
    }
    Err(Error::IterationDiverged(bound))
}

/// h^2 M log_p|a|: the length of the filtration of gl_h (x) W_M(a) by
/// simple subquotients, each step of the iteration clearing at least one.
pub fn iteration_bound(pw: &PdWitt, datum: &Datum, m: usize) -> usize {
    let size = pw.pd().ideal().size();
    let mut lg = 0usize;
    let mut s = 1u128;
    while s < size {
        s *= pw.ring().p() as u128;
        lg += 1;
    }
    datum.h * datum.h * m * lg.max(1) + 1
}

/// h~ = h0 pad(g) in Gamma of length M + 1 with O = h~^-1 U Psi_mu(h~),
/// where h0 has defect h0^-1 U Psi_mu(h0) O^-1 in G(W(a)).
pub fn normalize_descent(pw: &PdWitt, datum: &Datum, u: &WMat, o: &WMat, h0: &WMat) -> Result<WMat> {
    let m = check_display(datum, u)?;
    if check_display(datum, h0)? != m + 1 {
        return Err(Error::ShapeMismatch("h0 must be one Witt component longer than the display".into()));
    }
    let w = pw.witt();
    let long = w.ring(m + 1);
    let short = w.ring(m);
    let psi0 = group::psi_mu(pw, datum, h0)?;
    let h0inv = mat::inverse(&long, h0).ok_or(Error::NotInvertible)?;
    let ustar = mat::mul(&short, &mat::mul(&short, &group::truncate_mat(&h0inv, m), u), &psi0);
    let g = deform_solve(pw, datum, &ustar, o)?.h;
    let ht = mat::mul(&long, h0, &pad_mat(pw, &g, m + 1)?);
    let htinv = mat::inverse(&long, &ht).ok_or(Error::NotInvertible)?;
    let check = mat::mul(&short, &mat::mul(&short, &group::truncate_mat(&htinv, m), u), &group::psi_mu(pw, datum, &ht)?);
    if check != *o {
        return Err(Error::CertificateFailure("normalised morphism does not solve the equation".into()));
    }
    Ok(ht)
}

/// All Witt vectors of length `len` with components in `members`.
pub fn witt_elements(members: &[Elem], len: usize) -> Vec<WittVec<Elem>> {
    let mut out: Vec<Vec<Elem>> = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                members.iter().map(move |m| {
                    let mut v = v.clone();
                    v.push(m.clone());
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(WittVec).collect()
}

fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|v| {
                c.iter().map(move |x| {
                    let mut v = v.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn checked_count(counts: impl Iterator<Item = usize>) -> Result<u128> {
    let mut total = 1u128;
    for c in counts {
        total = total.saturating_mul(c as u128);
    }
    if total > ENUMERATION_CAP * 4 {
        return Err(Error::SizeOverflow(total.to_string()));
    }
    Ok(total)
}

/// Every element of G(W_M(a)), or of G(W_M(a)) ∩ H_mu when `h_mu` is set.
pub fn congruence_group(pw: &PdWitt, datum: &Datum, m: usize, h_mu: bool) -> Result<Vec<WMat>> {
    let w = pw.witt();
    let members = pw.pd().ideal().elements()?;
    let all = witt_elements(&members, m);
    let zero = pw.ring().zero();
    let neg: BTreeSet<(usize, usize)> = datum.negative_positions().into_iter().collect();
    let one = w.one(m);
    let mut choices = Vec::new();
    for i in 0..datum.h {
        for j in 0..datum.h {
            let mut c: Vec<WittVec<Elem>> = if h_mu && neg.contains(&(i, j)) {
                all.iter().filter(|v| v.0[0] == zero).cloned().collect()
            } else {
                all.clone()
            };
            if i == j {
                c = c.iter().map(|v| w.add(v, &one)).collect::<Result<_>>()?;
            }
            choices.push(c);
        }
    }
    checked_count(choices.iter().map(|c| c.len()))?;
    let wr = w.ring(m);
    Ok(cartesian(&choices)
        .into_iter()
        .map(|a| Mat { rows: datum.h, cols: datum.h, a })
        .filter(|g| mat::inverse(&wr, g).is_some())
        .collect())
}

/// All automorphisms g of U in H_mu with g = 1 mod a, that is g in
/// G(W_M(a)) ∩ H_mu with g U = U Psi_L(g). Sorted.
pub fn automorphisms_mod(pw: &PdWitt, datum: &Datum, u: &WMat) -> Result<Vec<WMat>> {
    let m = check_display(datum, u)?;
    let wr = pw.witt().ring(m);
    let mut out = Vec::new();
    for g in congruence_group(pw, datum, m, true)? {
        let psi = psi_pad(pw, datum, &g)?;
        if mat::mul(&wr, &g, u) == mat::mul(&wr, u, &psi) {
            out.push(g);
        }
    }
    out.sort();
    Ok(out)
}

/// Reduction of a display mod W(a), componentwise to canonical representatives.
pub fn reduce_mod(pw: &PdWitt, u: &WMat) -> WMat {
    let ideal = pw.pd().ideal();
    u.map(|v| WittVec(v.0.iter().map(|c| ideal.reduce(c)).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub lifts: usize,
    pub classes: usize,
}

/// Lifts of the reduction of U0 mod W(a), up to isomorphisms that are the
/// identity mod a. Two lifts U, U' are compared through the unique g in
/// G(W_M(a)) with U' = g^-1 U Psi_L(g); they are isomorphic as lifts iff g
/// lies in H_mu. Returns one representative per class, in order of first
/// appearance in the sorted list of lifts.
pub fn lift_displays(pw: &PdWitt, datum: &Datum, u0: &WMat) -> Result<(Vec<WMat>, LiftReport)> {
    check_display(datum, u0)?;
    let base = reduce_mod(pw, u0);
    if !adjoint_nilpotent_witt(pw.ring(), datum, &base)? {
        return Err(Error::NotAdjointNilpotent);
    }
    let all = all_lifts(pw, datum, &base)?;
    let zero = pw.ring().zero();
    let neg = datum.negative_positions();
    let mut reps: Vec<WMat> = Vec::new();
    for u in &all {
        let mut found = false;
        for rep in &reps {
            let g = deform_solve(pw, datum, rep, u)?.h;
            if neg.iter().all(|&(i, j)| g.get(i, j).0[0] == zero) {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(u.clone());
        }
    }
    let report = LiftReport { lifts: all.len(), classes: reps.len() };
    Ok((reps, report))
}

/// Every matrix over W_M(R) congruent to `base` mod W(a). Sorted.
pub fn all_lifts(pw: &PdWitt, datum: &Datum, base: &WMat) -> Result<Vec<WMat>> {
    let m = check_display(datum, base)?;
    let w = pw.witt();
    let members = pw.pd().ideal().elements()?;
    let deltas = witt_elements(&members, m);
    checked_count(std::iter::repeat(deltas.len()).take(datum.h * datum.h))?;
    let choices: Vec<Vec<WittVec<Elem>>> =
        base.a.iter().map(|b| deltas.iter().map(|d| w.add(b, d)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let mut out: Vec<WMat> = cartesian(&choices).into_iter().map(|a| Mat { rows: datum.h, cols: datum.h, a }).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// A triple over (R, a) with its canonical reduction equal to U0 mod W(a):
/// U0 itself, read as a matrix over W_M(R).
pub fn triple_lift(pw: &PdWitt, datum: &Datum, u0: &WMat) -> Result<WMat> {
    check_display(datum, u0)?;
    if !adjoint_nilpotent_witt(pw.ring(), datum, u0)? {
        return Err(Error::NotAdjointNilpotent);
    }
    Ok(u0.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub representative: Vec<Vec<Vec<String>>>,
    pub size: usize,
    pub stabilizer: usize,
    pub nilpotent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub datum: Datum,
    pub length: usize,
    pub group_order: usize,
    pub acting_order: usize,
    pub classes: Vec<OrbitClass>,
}

/// Default cap on group elements scanned by the orbit enumeration.
pub const ORBIT_CAP: u128 = 1 << 22;

/// All invertible h x h matrices over W_len(R) (restricted to H_mu when
/// `h_mu`), sorted.
pub fn general_linear(w: &Witt<Ring>, datum: &Datum, len: usize, h_mu: bool, cap: u128) -> Result<Vec<WMat>> {
    let r = w.base();
    let els: Vec<Elem> = r.elements()?.collect();
    let all = witt_elements(&els, len);
    let zero = r.zero();
    let neg: BTreeSet<(usize, usize)> = datum.negative_positions().into_iter().collect();
    let mut choices = Vec::new();
    for i in 0..datum.h {
        for j in 0..datum.h {
            choices.push(if h_mu && neg.contains(&(i, j)) {
                all.iter().filter(|v| v.0[0] == zero).cloned().collect()
            } else {
                all.clone()
            });
        }
    }
    let total = choices.iter().fold(1u128, |a, c| a.saturating_mul(c.len() as u128));
    if total > cap {
        return Err(Error::SizeOverflow(total.to_string()));
    }
    // invertibility only depends on the zeroth components
    let mut out: Vec<WMat> = cartesian(&choices)
        .into_iter()
        .map(|a| Mat { rows: datum.h, cols: datum.h, a })
        .filter(|g| mat::inverse(r, &group::w0_mat(g)).is_some())
        .collect();
    out.sort();
    Ok(out)
}

/// Partition of G(W_M(R)) into Phi_mu-conjugacy classes under H_mu(W_{M+1}(R)).
pub fn orbit_enumerate(w: &Witt<Ring>, datum: &Datum, m: usize, cap: u128) -> Result<OrbitTable> {
    let r = w.base();
    let g = general_linear(w, datum, m, false, cap)?;
    let hs = general_linear(w, datum, m + 1, true, cap)?;
    let long = w.ring(m + 1);
    let short = w.ring(m);
    let acts: Vec<(WMat, WMat)> = hs
        .iter()
        .map(|h| {
            let hinv = mat::inverse(&long, h).ok_or(Error::NotInvertible)?;
            Ok((group::truncate_mat(&hinv, m), group::phi_mu(w, datum, h)?))
        })
        .collect::<Result<_>>()?;
    let index: std::collections::HashMap<&WMat, usize> = g.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let mut class_of = vec![usize::MAX; g.len()];
    let mut classes = Vec::new();
    for start in 0..g.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let u = &g[start];
        let mut size = 0;
        for (hinv, phi) in &acts {
            let v = mat::mul(&short, &mat::mul(&short, hinv, u), phi);
            let k = *index.get(&v).ok_or(Error::CertificateFailure("conjugate left the group".into()))?;
            if class_of[k] == usize::MAX {
                class_of[k] = id;
                size += 1;
            }
        }
        classes.push(OrbitClass {
            representative: render(r, u),
            size,
            stabilizer: acts.len() / size,
            nilpotent: adjoint_nilpotent_witt(r, datum, u)?,
        });
    }
    Ok(OrbitTable { datum: datum.clone(), length: m, group_order: g.len(), acting_order: hs.len(), classes })
}

/// Canonical decimal rendering: rows of entries of component lists.
pub fn render(r: &Ring, u: &WMat) -> Vec<Vec<Vec<String>>> {
    u.to_rows().iter().map(|row| row.iter().map(|v| v.0.iter().map(|c| r.format(c)).collect()).collect()).collect()
}
