//! Deterministic inputs shared by the benchmarks under benches/.

use gmdisp::displays::{adjoint_nilpotent_witt, WMat};
use gmdisp::group::w0_mat;
use gmdisp::mat;
use gmdisp::{Datum, Elem, Mat, Ring, RingSpec, WittVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ring(spec: RingSpec) -> Ring {
    Ring::new(spec).expect("benchmark rings are valid")
}

pub fn random_elem(r: &Ring, rng: &mut ChaCha8Rng) -> Elem {
    let q = r.modulus();
    Elem((0..r.dim()).map(|_| rng.gen_range(0..q)).collect())
}

pub fn random_witt(r: &Ring, len: usize, rng: &mut ChaCha8Rng) -> WittVec<Elem> {
    WittVec((0..len).map(|_| random_elem(r, rng)).collect())
}

/// A random display of length `len` with invertible, adjoint nilpotent reduction.
pub fn random_nilpotent(r: &Ring, datum: &Datum, len: usize, rng: &mut ChaCha8Rng) -> WMat {
    loop {
        let u = Mat::from_fn(datum.h, datum.h, |_, _| random_witt(r, len, rng));
        if mat::inverse(r, &w0_mat(&u)).is_some() && adjoint_nilpotent_witt(r, datum, &u).unwrap() {
            return u;
        }
    }
}
