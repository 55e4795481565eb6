//! Phi_mu is a homomorphism on H_mu ⊂ GL_2(W_2(R)), checked on all pairs, and
//! Psi_mu along (e) restricts to Phi_mu, kills G(a) on both sides and is
//! multiplicative on random pairs of Gamma. R is F_2 and F_2[e]/e^2.
//!
//! Pairs are checked through index tables: matrices over W_2(R) are encoded
//! by their four entry indices, Phi_mu is tabulated once per element, and
//! products use the tabulated rings W_2(R) and W_1(R).

use gmdisp::displays::witt_elements;
use gmdisp::group::{phi_mu, psi_mu};
use gmdisp::mat;
use gmdisp::{CRing, Datum, Elem, Mat, PdIdeal, PdWitt, Ring, RingSpec, TableRing, Tabulated, Witt, WittVec};
use rand::Rng;

use super::fixtures::{elements, ensure, ring, rng, trivial_pd};
use super::Outcome;

type Check = Result<(), String>;
type WMat = Mat<WittVec<Elem>>;

const PSI_PAIRS: usize = 1 << 20;

struct Encoded {
    t2: Tabulated<WittVec<Elem>>,
    t1: Tabulated<WittVec<Elem>>,
}

impl Encoded {
    fn code(n: usize, e: [u32; 4]) -> usize {
        ((e[0] as usize * n + e[1] as usize) * n + e[2] as usize) * n + e[3] as usize
    }
    fn entries1(&self, g: &WMat) -> [u32; 4] {
        [0, 1, 2, 3].map(|k| self.t1.idx(&g.a[k]))
    }
    fn decode2(&self, e: [u32; 4]) -> WMat {
        Mat { rows: 2, cols: 2, a: e.iter().map(|&i| self.t2.elem(i).clone()).collect() }
    }
}

fn mul4(t: &TableRing, x: [u32; 4], y: [u32; 4]) -> [u32; 4] {
    let dot = |a: u32, b: u32, c: u32, d: u32| t.add(&t.mul(&a, &b), &t.mul(&c, &d));
    [dot(x[0], y[0], x[1], y[2]), dot(x[0], y[1], x[1], y[3]), dot(x[2], y[0], x[3], y[2]), dot(x[2], y[1], x[3], y[3])]
}

fn unit_det(t: &TableRing, x: [u32; 4]) -> bool {
    t.is_unit(t.sub(&t.mul(&x[0], &x[3]), &t.mul(&x[1], &x[2])))
}

/// All invertible 2x2 index matrices whose weight -1 entry satisfies `neg_ok`.
fn group_by(t: &TableRing, datum: &Datum, neg_ok: &dyn Fn(u32) -> bool) -> Vec<[u32; 4]> {
    let n = t.size() as u32;
    let negs: Vec<usize> = datum.negative_positions().iter().map(|&(i, j)| 2 * i + j).collect();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let e = [a, b, c, d];
                    if negs.iter().all(|&k| neg_ok(e[k])) && unit_det(t, e) {
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

fn phi_hom(r: &Ring, datum: &Datum, checks: &mut u64) -> Result<(Encoded, Vec<[u32; 4]>, Vec<Option<[u32; 4]>>), String> {
    let w = Witt::new(r.clone());
    let els = elements(r);
    let t2 = TableRing::build(&w.ring(2), witt_elements(&els, 2)).map_err(|e| e.to_string())?;
    let t1 = TableRing::build(&w.ring(1), witt_elements(&els, 1)).map_err(|e| e.to_string())?;
    let enc = Encoded { t2, t1 };
    let n = enc.t2.ring.size();
    let zero = r.zero();
    let h_mu = group_by(&enc.t2.ring, datum, &|i| enc.t2.elem(i).0[0] == zero);
    let mut phi: Vec<Option<[u32; 4]>> = vec![None; n.pow(4)];
    for &e in &h_mu {
        let image = phi_mu(&w, datum, &enc.decode2(e)).map_err(|err| format!("Phi fails on {e:?}: {err}"))?;
        phi[Encoded::code(n, e)] = Some(enc.entries1(&image));
    }
    let (t1r, t2r) = (&enc.t1.ring, &enc.t2.ring);
    for &g in &h_mu {
        let pg = phi[Encoded::code(n, g)].unwrap();
        for &h in &h_mu {
            let gh = mul4(t2r, g, h);
            let pgh = phi[Encoded::code(n, gh)].ok_or_else(|| format!("H_mu not closed at {g:?}, {h:?}"))?;
            ensure(pgh == mul4(t1r, pg, phi[Encoded::code(n, h)].unwrap()), || format!("Phi(gh) != Phi(g)Phi(h) at {g:?}, {h:?}"))?;
        }
    }
    *checks += (h_mu.len() * h_mu.len()) as u64;
    Ok((enc, h_mu, phi))
}

fn psi_checks(pw: &PdWitt, datum: &Datum, enc: &Encoded, h_mu: &[[u32; 4]], phi: &[Option<[u32; 4]>], checks: &mut u64) -> Check {
    let w = pw.witt();
    let wr = w.ring(2);
    let n = enc.t2.ring.size();
    let ideal = pw.pd().ideal();
    let psi = |g: &WMat| psi_mu(pw, datum, g).map_err(|e| format!("Psi fails: {e}"));
    for &h in h_mu {
        let image = psi(&enc.decode2(h))?;
        ensure(Some(enc.entries1(&image)) == phi[Encoded::code(n, h)], || format!("Psi != Phi on H_mu at {h:?}"))?;
    }
    *checks += h_mu.len() as u64;
    // G(a) = {1 + s(Y)}
    let members = ideal.elements().map_err(|e| e.to_string())?;
    let sections: Vec<u32> = members.iter().map(|a| enc.t2.idx(&pw.section(a, 2).unwrap())).collect();
    let mut kernel = Vec::new();
    for &a in &sections {
        for &b in &sections {
            for &c in &sections {
                for &d in &sections {
                    let k = mat::add(&wr, &mat::identity(&wr, 2), &enc.decode2([a, b, c, d]));
                    if mat::inverse(&wr, &k).is_some() {
                        kernel.push(k);
                    }
                }
            }
        }
    }
    let one = mat::identity(&w.ring(1), 2);
    for k in &kernel {
        ensure(psi(k)? == one, || format!("Psi does not kill {k:?}"))?;
    }
    let gamma = group_by(&enc.t2.ring, datum, &|i| ideal.contains(&enc.t2.elem(i).0[0]));
    let mut table: Vec<Option<[u32; 4]>> = vec![None; n.pow(4)];
    for &g in &gamma {
        table[Encoded::code(n, g)] = Some(enc.entries1(&psi(&enc.decode2(g))?));
    }
    let kernel: Vec<[u32; 4]> = kernel.iter().map(|k| [0, 1, 2, 3].map(|i| enc.t2.idx(&k.a[i]))).collect();
    let (t1r, t2r) = (&enc.t1.ring, &enc.t2.ring);
    let look = |g: [u32; 4]| table[Encoded::code(n, g)].ok_or_else(|| format!("Gamma not closed at {g:?}"));
    for &g in &gamma {
        let pg = look(g)?;
        for &k in &kernel {
            ensure(look(mul4(t2r, g, k))? == pg, || format!("Psi(gk) != Psi(g) at {g:?}, {k:?}"))?;
            ensure(look(mul4(t2r, k, g))? == pg, || format!("Psi(kg) != Psi(g) at {g:?}, {k:?}"))?;
        }
    }
    *checks += (gamma.len() * kernel.len() * 2 + kernel.len()) as u64;
    let mut rng = rng(0x5eed_0004);
    for _ in 0..PSI_PAIRS {
        let (g, h) = (gamma[rng.gen_range(0..gamma.len())], gamma[rng.gen_range(0..gamma.len())]);
        ensure(look(mul4(t2r, g, h))? == mul4(t1r, look(g)?, look(h)?), || format!("Psi(gh) != Psi(g)Psi(h) at {g:?}, {h:?}"))?;
    }
    *checks += PSI_PAIRS as u64;
    Ok(())
}

pub fn run() -> Outcome {
    let datum = Datum::mu(2, 1);
    let mut checks = 0u64;
    let f2 = ring(RingSpec::zmod(2, 1));
    let (enc, h_mu, phi) = phi_hom(&f2, &datum, &mut checks).map_err(|e| format!("F2: {e}"))?;
    let zero_pd = PdWitt::new(PdIdeal::trivial(gmdisp::Ideal::zero(&f2)).map_err(|e| e.to_string())?);
    psi_checks(&zero_pd, &datum, &enc, &h_mu, &phi, &mut checks).map_err(|e| format!("F2: {e}"))?;
    let sizes = h_mu.len();
    let dual = ring(RingSpec::dual_numbers(2, 1));
    let (enc, h_mu, phi) = phi_hom(&dual, &datum, &mut checks).map_err(|e| format!("F2[e]: {e}"))?;
    let pw = trivial_pd(&dual, &["e"]);
    psi_checks(&pw, &datum, &enc, &h_mu, &phi, &mut checks).map_err(|e| format!("F2[e]: {e}"))?;
    Ok(format!("|H_mu| = {sizes} and {} over F2 and F2[e], {checks} checks", h_mu.len()))
}
