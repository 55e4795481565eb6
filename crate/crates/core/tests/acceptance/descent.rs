//! Constructive descent over the Z_p frame with N = 6: random GL_2 displays of
//! length 5 descend to U' of length 4 with F(U') = tau(U') at length 3 mod p^6,
//! and the ghost coordinates of h follow h_i = k_(i-1) sigma(h_(i-1)).

use gmdisp::frames::{Frame, FrameSpec};
use gmdisp::group::truncate_mat;
use gmdisp::mat;
use gmdisp::{Datum, Elem, Mat, PdWitt};

use super::fixtures::{ensure, random_nilpotent, rng};
use super::Outcome;

const N: u32 = 6;
const LENGTH: usize = 5;
const INSTANCES: usize = 10;

pub fn run() -> Outcome {
    let mut rng = rng(0x5eed_0008);
    let datum = Datum::mu(2, 1);
    let mut nontrivial = 0;
    for i in 0..INSTANCES {
        let p = [2u64, 3, 5][i % 3];
        let f = Frame::new(FrameSpec::zp(p, N)).map_err(|e| e.to_string())?;
        let r = f.ring().clone();
        let pw = PdWitt::with_witt(gmdisp::PdIdeal::canonical_p(&r), f.witt().clone());
        let u = random_nilpotent(&pw, &datum, LENGTH, &mut rng);
        let name = format!("instance {i} (p = {p})");
        let d = f.descend_to_fixed(&datum, &u).map_err(|e| format!("{name}: {e}"))?;
        ensure(d.u_prime.a[0].len() == LENGTH - 1, || format!("{name}: U' has the wrong length"))?;
        ensure(f.is_f_sigma_fixed(&d.u_prime).map_err(|e| e.to_string())?, || format!("{name}: certificate fails"))?;
        // U' = h^-1 U Phi_mu(h) by construction, checked independently
        let w = f.witt();
        let short = w.ring(LENGTH - 1);
        let hinv = mat::inverse(&w.ring(LENGTH), &d.h).ok_or("h is not invertible")?;
        let phi = gmdisp::group::phi_mu(w, &datum, &d.h).map_err(|e| e.to_string())?;
        let expect = mat::mul(&short, &mat::mul(&short, &truncate_mat(&hinv, LENGTH - 1), &truncate_mat(&u, LENGTH - 1)), &phi);
        ensure(f.contract_mat(&expect) == f.contract_mat(&d.u_prime), || format!("{name}: U' is not the Phi-conjugate"))?;
        let cm = |m: &Mat<Elem>| m.map(|x| f.contract(x));
        let gh = |k: usize| d.h.try_map(|v| w.ghost(v, k)).map_err(|e| e.to_string());
        ensure(cm(&gh(0)?) == cm(&mat::identity(&r, 2)), || format!("{name}: h_0 != 1"))?;
        ensure(cm(&gh(1)?) == cm(&d.k_ghosts[0]), || format!("{name}: h_1 != k_0"))?;
        let h2 = mat::mul(&r, &d.k_ghosts[1], &f.sigma_mat(&d.k_ghosts[0]));
        ensure(cm(&gh(2)?) == cm(&h2), || format!("{name}: h_2 != k_1 sigma(k_0)"))?;
        if !mat::is_identity(&w.ring(LENGTH), &d.h) {
            nontrivial += 1;
        }
    }
    Ok(format!("{INSTANCES} instances over Z_2, Z_3, Z_5 ({nontrivial} with h != 1), certificates hold mod p^{N}"))
}
