//! Shared rings, pd-ideals, random elements and small matrix helpers.

use gmdisp::displays::WMat;
use gmdisp::mat;
use gmdisp::{Elem, Ideal, Mat, PdIdeal, PdWitt, Ring, RingSpec, WittVec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ring(spec: RingSpec) -> Ring {
    Ring::new(spec).unwrap()
}

pub fn f4() -> RingSpec {
    RingSpec::galois(2, 1, &[1, 1, 1])
}

/// F_p[u, v]/(u, v)^2.
pub fn square_zero_plane(p: u64) -> RingSpec {
    RingSpec::zmod(p, 1).with_vars(&["u", "v"], &["u^2", "u*v", "v^2"])
}

pub fn elements(r: &Ring) -> Vec<Elem> {
    r.elements().unwrap().collect()
}

pub fn random_elem(r: &Ring, rng: &mut ChaCha8Rng) -> Elem {
    let q = r.modulus();
    Elem((0..r.dim()).map(|_| rng.gen_range(0..q)).collect())
}

pub fn random_witt(r: &Ring, len: usize, rng: &mut ChaCha8Rng) -> WittVec<Elem> {
    WittVec((0..len).map(|_| random_elem(r, rng)).collect())
}

/// Trivial pd on the ideal generated by the named variables.
pub fn trivial_pd(r: &Ring, vars: &[&str]) -> PdWitt {
    let gens: Vec<Elem> = vars.iter().map(|v| r.var(v).unwrap()).collect();
    PdWitt::new(PdIdeal::trivial(Ideal::new(r, &gens).unwrap()).unwrap())
}

pub fn canonical_pd(r: &Ring) -> PdWitt {
    PdWitt::new(PdIdeal::canonical_p(r))
}

/// A small display fixture: pd context, datum and a name.
pub struct PdFixture {
    pub name: String,
    pub pw: PdWitt,
    pub datum: gmdisp::Datum,
}

/// GL_1 and GL_2 fixtures over rings of at most 2^6 elements.
pub fn display_fixtures() -> Vec<PdFixture> {
    use gmdisp::Datum;
    let dual2 = ring(RingSpec::dual_numbers(2, 1));
    let dual3 = ring(RingSpec::dual_numbers(3, 1));
    let z8 = ring(RingSpec::zmod(2, 3));
    let z4 = ring(RingSpec::zmod(2, 2));
    let plane = ring(square_zero_plane(2));
    vec![
        PdFixture { name: "GL_1 F2[e], (e) trivial".into(), pw: trivial_pd(&dual2, &["e"]), datum: Datum::mu(1, 0) },
        PdFixture { name: "GL_1 Z/8, 2Z/8 canonical".into(), pw: canonical_pd(&z8), datum: Datum::mu(1, 1) },
        PdFixture { name: "GL_2 F2[e], (e) trivial".into(), pw: trivial_pd(&dual2, &["e"]), datum: Datum::mu(2, 1) },
        PdFixture { name: "GL_2 Z/4, 2Z/4 canonical".into(), pw: canonical_pd(&z4), datum: Datum::mu(2, 1) },
        PdFixture { name: "GL_2 F3[e], (e) trivial".into(), pw: trivial_pd(&dual3, &["e"]), datum: Datum::mu(2, 1) },
        PdFixture { name: "GL_2 F2[u,v]/(u,v)^2, (u) trivial".into(), pw: trivial_pd(&plane, &["u"]), datum: Datum::mu(2, 1) },
    ]
}

/// A random invertible matrix over W_len(R) whose reduction is adjoint nilpotent.
pub fn random_nilpotent(pw: &PdWitt, datum: &gmdisp::Datum, len: usize, rng: &mut ChaCha8Rng) -> WMat {
    let r = pw.ring();
    loop {
        let u = Mat::from_fn(datum.h, datum.h, |_, _| random_witt(r, len, rng));
        if mat::inverse(r, &gmdisp::group::w0_mat(&u)).is_some()
            && gmdisp::displays::adjoint_nilpotent_witt(r, datum, &u).unwrap()
        {
            return u;
        }
    }
}

/// A uniformly random element of a nonempty list.
pub fn pick<'a, T>(xs: &'a [T], rng: &mut ChaCha8Rng) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
