//! Bi-infinite Witt vectors in the coefficient model, the torsion chain and
//! the rigidity search.
//!
//! - v_r([t]) = 1 and v_r(p) = r; Frobenius scaling and the lower bound on
//!   W(t k[[t]]) over a grid of r.
//! - a_n is an ideal for n = 0..3 on the fixture rings, increasing in n, and
//!   its membership agrees with a direct test of p^(n-k) x^(p^k) = 0.
//! - x = B F(x) has only x = 0 among the T = 4 candidates for each B, and
//!   for T = 1 the F_p-kernel agrees with brute force over every candidate
//!   where the space has at most 2^16 elements.

use num_rational::Rational64;

use gmdisp::rigidity::{rigid_solve_check, torsion_ideal_chain, vr_frobenius_scaling, vr_lower_bound_check};
use gmdisp::{BiWitt, CRing, Ring, RingSpec};

use super::fixtures::{elements, ensure, f4, ring, square_zero_plane};
use super::Outcome;

type BMat = Vec<Vec<BiWitt>>;

/// Candidate spaces with more elements than this are not enumerated.
const BRUTE_FORCE_LIMIT: f64 = 65536.0;

fn q(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn valuations() -> Result<usize, String> {
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        let k = ring(RingSpec::zmod(p, 1));
        let t = BiWitt::p_t(&k, 0, q(1, 1));
        let pp = BiWitt::p_t(&k, 1, q(0, 1));
        let samples = [t.clone(), BiWitt::p_t(&k, 1, q(1, p as i64)), BiWitt::p_t(&k, 2, q(3, 1)).add(&t), t.frobenius()];
        for num in 1..=24 {
            let r = q(num, 6);
            ensure(t.v_r(r) == Some(q(1, 1)), || format!("p = {p}: v_r([t]) != 1 at r = {r}"))?;
            ensure(pp.v_r(r) == Some(r), || format!("p = {p}: v_r(p) != r at r = {r}"))?;
            for x in &samples {
                ensure(vr_frobenius_scaling(x, r), || format!("p = {p}: Frobenius scaling fails at r = {r}"))?;
                let ok = vr_lower_bound_check(x, r).map_err(|e| e.to_string())?;
                ensure(ok, || format!("p = {p}: lower bound fails at r = {r}"))?;
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn chains() -> Result<usize, String> {
    let specs = [
        RingSpec::zmod(2, 3),
        RingSpec::zmod(3, 2),
        RingSpec::dual_numbers(2, 1),
        RingSpec::dual_numbers(3, 1),
        RingSpec::dual_numbers(2, 2),
        square_zero_plane(2),
        f4(),
        RingSpec::galois(2, 2, &[1, 1, 1]),
    ];
    let mut rings = 0;
    for spec in specs {
        let r = ring(spec);
        let p = r.p();
        let all = elements(&r);
        let mut prev: Option<gmdisp::Ideal> = None;
        for n in 0..=3u32 {
            let (chain, ideal) = torsion_ideal_chain(&r, n).map_err(|e| e.to_string())?;
            ensure(chain.is_ideal, || format!("{r:?}: a_{n} is not an ideal"))?;
            let direct: Vec<_> = all
                .iter()
                .filter(|x| (0..=n).all(|k| r.is_zero(&r.scale(p.pow(n - k) as i64, &r.pow(x, p.pow(k))))))
                .cloned()
                .collect();
            ensure(direct.iter().all(|x| ideal.contains(x)) && direct.len() == chain.members.len(), || {
                format!("{r:?}: a_{n} membership differs from the direct test")
            })?;
            for x in &direct {
                ensure(all.iter().all(|y| ideal.contains(&r.mul(x, y))), || format!("{r:?}: a_{n} not closed under products"))?;
                ensure(direct.iter().all(|y| ideal.contains(&r.sub(x, y))), || format!("{r:?}: a_{n} not closed under differences"))?;
            }
            if let Some(pr) = &prev {
                ensure(ideal.contains_ideal(pr), || format!("{r:?}: a_{} is not contained in a_{n}", n - 1))?;
            }
            prev = Some(ideal);
        }
        rings += 1;
    }
    Ok(rings)
}

/// Nonzero candidates with T = 1 solving x = B F(x), by enumerating every
/// F_p-combination of the candidate monomials.
fn brute_force_solutions(k: &Ring, b: &BMat) -> usize {
    let d = b.len();
    let p = k.p();
    let mut monomials = Vec::new();
    for entry in 0..d {
        for i in -1..1 {
            for num in 1..=p as i64 {
                for fb in 0..k.dim() {
                    monomials.push((entry, BiWitt::monomial(k, i, q(num, p as i64), k.basis(fb))));
                }
            }
        }
    }
    let total = (p as usize).pow(monomials.len() as u32);
    let mut solutions = 0;
    for code in 1..total {
        let mut c = code;
        let mut x = vec![BiWitt::zero(k); d];
        for (entry, m) in &monomials {
            for _ in 0..c % p as usize {
                x[*entry] = x[*entry].add(m);
            }
            c /= p as usize;
        }
        let bf: Vec<BiWitt> = b
            .iter()
            .map(|row| row.iter().zip(&x).fold(BiWitt::zero(k), |acc, (bij, xj)| acc.add(&bij.mul(&xj.frobenius()))))
            .collect();
        if bf == x {
            solutions += 1;
        }
    }
    solutions
}

fn rigid() -> Result<usize, String> {
    let mut cases = 0;
    for (name, spec) in [("F_2", RingSpec::zmod(2, 1)), ("F_3", RingSpec::zmod(3, 1)), ("F_4", f4())] {
        let k = ring(spec);
        let z = BiWitt::zero(&k);
        let one = BiWitt::p_t(&k, 0, q(0, 1));
        let t = BiWitt::p_t(&k, 0, q(1, 1));
        let mut bs: Vec<(&str, BMat, u32)> = vec![
            ("0", vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]], 1),
            ("1", vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]], 1),
            ("antidiagonal", vec![vec![z.clone(), one.shift(-1)], vec![one.clone(), z.clone()]], 2),
            ("diag([t], 1)", vec![vec![t.clone(), z.clone()], vec![z.clone(), one.clone()]], 1),
        ];
        if k.dim() > 1 {
            let g = BiWitt::monomial(&k, 0, q(0, 1), k.galois_gen());
            bs.push(("galois unit", vec![vec![g.clone(), t.clone()], vec![z.clone(), g]], 1));
        }
        for (bname, b, s) in bs {
            let label = format!("{name} B = {bname}");
            let rep = rigid_solve_check(&b, s, 4, 3).map_err(|e| format!("{label}: {e}"))?;
            ensure(rep.only_zero, || format!("{label}: nonzero solution {:?}", rep.witness))?;
            let small = rigid_solve_check(&b, s, 1, 0).map_err(|e| format!("{label}: {e}"))?;
            if (k.p() as f64).powi(small.candidates_dim as i32) <= BRUTE_FORCE_LIMIT {
                let brute = brute_force_solutions(&k, &b);
                let expect = (k.p() as usize).pow(small.solutions_dim as u32) - 1;
                ensure(brute == expect, || format!("{label}: brute force finds {brute} nonzero solutions, kernel {expect}"))?;
            }
            cases += 1;
        }
    }
    Ok(cases)
}

pub fn run() -> Outcome {
    let v = valuations()?;
    let c = chains()?;
    let r = rigid()?;
    Ok(format!("{v} valuation checks, torsion chains on {c} rings, {r} rigidity systems with only x = 0"))
}
