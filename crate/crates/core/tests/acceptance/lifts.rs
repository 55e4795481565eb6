//! Lifts of a nilpotent display along a: lift_displays is nonempty, every lift
//! has only the trivial automorphism that is 1 mod a (so reduction of
//! automorphisms is injective), and the number of lift classes equals the
//! number of orbits of G(W_M(a)) ∩ H_mu on all lifts, found by union-find.

use std::collections::HashMap;

use gmdisp::displays::{all_lifts, automorphisms_mod, congruence_group, lift_displays, psi_pad, reduce_mod, WMat};
use gmdisp::mat;

use super::fixtures::{display_fixtures, ensure, random_nilpotent, rng};
use super::Outcome;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Orbits of G(W_M(a)) ∩ H_mu on the lifts of `base`.
fn orbit_count(pw: &gmdisp::PdWitt, datum: &gmdisp::Datum, lifts: &[WMat], m: usize) -> Result<usize, String> {
    let wr = pw.witt().ring(m);
    let index: HashMap<&WMat, usize> = lifts.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let mut parent: Vec<usize> = (0..lifts.len()).collect();
    for g in congruence_group(pw, datum, m, true).map_err(|e| e.to_string())? {
        let ginv = mat::inverse(&wr, &g).unwrap();
        let psi = psi_pad(pw, datum, &g).map_err(|e| e.to_string())?;
        for (i, u) in lifts.iter().enumerate() {
            let v = mat::mul(&wr, &mat::mul(&wr, &ginv, u), &psi);
            let j = *index.get(&v).ok_or("the action leaves the set of lifts")?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    Ok((0..lifts.len()).filter(|&i| find(&mut parent, i) == i).count())
}

pub fn run() -> Outcome {
    let mut rng = rng(0x5eed_0007);
    let mut fixtures = 0;
    let mut lifts_checked = 0;
    let mut classes = Vec::new();
    for fx in display_fixtures() {
        let (pw, datum) = (&fx.pw, &fx.datum);
        // GL_2 at M = 2 has |W_2(a)|^4 >= 256 lifts, each scanned for automorphisms
        let lengths: &[usize] = if datum.h == 1 { &[1, 2, 3] } else { &[1] };
        for &m in lengths {
            let name = format!("{} M={m}", fx.name);
            let u0 = reduce_mod(pw, &random_nilpotent(pw, datum, m, &mut rng));
            let (reps, report) = lift_displays(pw, datum, &u0).map_err(|e| format!("{name}: {e}"))?;
            ensure(!reps.is_empty(), || format!("{name}: no lifts"))?;
            let lifts = all_lifts(pw, datum, &u0).map_err(|e| format!("{name}: {e}"))?;
            ensure(report.lifts == lifts.len(), || format!("{name}: lift count"))?;
            for u in &lifts {
                let aut = automorphisms_mod(pw, datum, u).map_err(|e| format!("{name}: {e}"))?;
                ensure(aut.len() == 1 && mat::is_identity(&pw.witt().ring(m), &aut[0]), || {
                    format!("{name}: {} automorphisms of a lift", aut.len())
                })?;
            }
            let oracle = orbit_count(pw, datum, &lifts, m).map_err(|e| format!("{name}: {e}"))?;
            ensure(oracle == report.classes, || format!("{name}: {} classes, oracle finds {oracle}", report.classes))?;
            fixtures += 1;
            lifts_checked += lifts.len();
            classes.push(report.classes);
        }
    }
    Ok(format!("{fixtures} fixtures, {lifts_checked} lifts, class counts {classes:?} match the orbit oracle"))
}
