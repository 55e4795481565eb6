//! The deformation equation O = g^-1 U Psi_L(g) has exactly one solution in
//! G(W_2(a)), found by exhaustive search and equal to the solver's output.

use gmdisp::displays::{congruence_group, deform_solve, psi_pad, WMat};
use gmdisp::mat;

use super::fixtures::{display_fixtures, ensure, pick, random_nilpotent, rng};
use super::Outcome;

const M: usize = 2;
const INSTANCES_PER_FIXTURE: usize = 2;

pub fn run() -> Outcome {
    let mut rng = rng(0x5eed_0005);
    let mut instances = 0;
    let mut searched = 0usize;
    for fx in display_fixtures() {
        let (pw, datum) = (&fx.pw, &fx.datum);
        let wr = pw.witt().ring(M);
        let group = congruence_group(pw, datum, M, false).map_err(|e| format!("{}: {e}", fx.name))?;
        let actions: Vec<(WMat, WMat)> = group
            .iter()
            .map(|g| (mat::inverse(&wr, g).expect("congruence elements are invertible"), psi_pad(pw, datum, g).unwrap()))
            .collect();
        let conj = |u: &WMat, (ginv, psi): &(WMat, WMat)| mat::mul(&wr, &mat::mul(&wr, ginv, u), psi);
        for _ in 0..INSTANCES_PER_FIXTURE {
            let u = random_nilpotent(pw, datum, M, &mut rng);
            let o = conj(&u, pick(&actions, &mut rng));
            let sol = deform_solve(pw, datum, &u, &o).map_err(|e| format!("{}: {e}", fx.name))?;
            let found: Vec<&WMat> = group.iter().zip(&actions).filter(|(_, a)| conj(&u, a) == o).map(|(g, _)| g).collect();
            ensure(found.len() == 1, || format!("{}: {} solutions by search", fx.name, found.len()))?;
            ensure(*found[0] == sol.h, || format!("{}: solver and search disagree", fx.name))?;
            instances += 1;
            searched += group.len();
        }
    }
    Ok(format!("{instances} instances, {searched} candidates searched, one solution each"))
}
