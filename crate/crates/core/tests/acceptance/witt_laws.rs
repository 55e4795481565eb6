//! Ring laws and structure identities of W_M(R), exhaustively on rings with
//! |W_M(R)| <= 2^8 and M <= 3 and on random inputs up to M = 5, together with
//! the agreement of the two evaluation strategies on the same inputs.

use gmdisp::displays::witt_elements;
use gmdisp::{CRing, Elem, Ring, RingSpec, Strategy, TableRing, Witt, WittVec};
use num_bigint::BigInt;
use rand::Rng;

use super::fixtures::{elements, ensure, f4, random_witt, ring, rng, square_zero_plane};
use super::Outcome;

type Check = Result<(), String>;

struct Tally {
    law_checks: u64,
    dual_checks: u64,
}

fn exhaustive_fixtures() -> Vec<(&'static str, RingSpec)> {
    vec![
        ("F2", RingSpec::zmod(2, 1)),
        ("F3", RingSpec::zmod(3, 1)),
        ("F5", RingSpec::zmod(5, 1)),
        ("F7", RingSpec::zmod(7, 1)),
        ("F4", f4()),
        ("F16", RingSpec::galois(2, 1, &[1, 1, 0, 0, 1])),
        ("Z/4", RingSpec::zmod(2, 2)),
        ("Z/8", RingSpec::zmod(2, 3)),
        ("Z/16", RingSpec::zmod(2, 4)),
        ("Z/9", RingSpec::zmod(3, 2)),
        ("F2[e]", RingSpec::dual_numbers(2, 1)),
        ("F3[e]", RingSpec::dual_numbers(3, 1)),
        ("F2[u,v]/(u,v)^2", square_zero_plane(2)),
        ("GR(4,2)", RingSpec::galois(2, 2, &[1, 1, 1])),
    ]
}

fn structure_identities(w: &Witt<Ring>, r: &Ring, els: &[Elem], m: usize, ws: &[WittVec<Elem>], t: &mut Tally) -> Check {
    let p = w.p();
    let pm = w.from_int(&BigInt::from(p), m);
    for x in ws {
        // F V = p
        let fv = w.frobenius(&w.verschiebung(x)).map_err(|e| e.to_string())?;
        ensure(fv == w.mul(&pm, x).unwrap(), || format!("FV(x) != p x for {x:?}"))?;
        // w_k F = w_(k+1)
        if m >= 2 {
            let fx = w.frobenius(x).unwrap();
            for k in 0..m - 1 {
                ensure(w.ghost(&fx, k).unwrap() == w.ghost(x, k + 1).unwrap(), || format!("w_{k} F != w_{} at {x:?}", k + 1))?;
            }
        }
        t.law_checks += 2;
    }
    // V(x F(y)) = y V(x) for x in W_(M-1), y in W_M
    if m >= 2 {
        for x in &witt_elements(els, m - 1) {
            let vx = w.verschiebung(x);
            for y in ws {
                let lhs = w.verschiebung(&w.mul(x, &w.frobenius(y).unwrap()).unwrap());
                ensure(lhs == w.mul(y, &vx).unwrap(), || format!("V(xF(y)) != yV(x) at {x:?}, {y:?}"))?;
                t.law_checks += 1;
            }
        }
    }
    for a in els {
        let ta = w.teichmuller(a, m);
        for b in els {
            let lhs = w.teichmuller(&r.mul(a, b), m);
            ensure(lhs == w.mul(&ta, &w.teichmuller(b, m)).unwrap(), || format!("[ab] != [a][b] at {a:?}, {b:?}"))?;
            t.law_checks += 1;
        }
    }
    Ok(())
}

fn table_laws(t: &TableRing, tally: &mut Tally) -> Check {
    let n = t.size() as u32;
    let (zero, one) = (t.zero(), t.one());
    for a in 0..n {
        ensure(t.add(&a, &zero) == a && t.mul(&a, &one) == a, || format!("identity law fails at {a}"))?;
        ensure(t.add(&a, &t.neg(&a)) == zero, || format!("negation fails at {a}"))?;
        for b in 0..n {
            let (ab, apb) = (t.mul(&a, &b), t.add(&a, &b));
            ensure(ab == t.mul(&b, &a) && apb == t.add(&b, &a), || format!("commutativity fails at {a}, {b}"))?;
            for c in 0..n {
                ensure(t.mul(&ab, &c) == t.mul(&a, &t.mul(&b, &c)), || format!("mul associativity fails at {a},{b},{c}"))?;
                ensure(t.add(&apb, &c) == t.add(&a, &t.add(&b, &c)), || format!("add associativity fails at {a},{b},{c}"))?;
                ensure(t.mul(&a, &t.add(&b, &c)) == t.add(&ab, &t.mul(&a, &c)), || format!("distributivity fails at {a},{b},{c}"))?;
            }
        }
    }
    tally.law_checks += u64::from(n) * u64::from(n) * u64::from(n) * 3;
    Ok(())
}

fn ghost_homomorphism(w: &Witt<Ring>, r: &Ring, t: &TableRing, ws: &[WittVec<Elem>], tally: &mut Tally) -> Check {
    let gh: Vec<Vec<Elem>> = ws.iter().map(|x| w.ghosts(x)).collect();
    let n = ws.len() as u32;
    for a in 0..n {
        for b in 0..n {
            let (s, p) = (t.add(&a, &b) as usize, t.mul(&a, &b) as usize);
            for k in 0..gh[0].len() {
                let (ga, gb) = (&gh[a as usize][k], &gh[b as usize][k]);
                ensure(gh[s][k] == r.add(ga, gb) && gh[p][k] == r.mul(ga, gb), || format!("w_{k} is not a ring map at {a}, {b}"))?;
            }
            tally.law_checks += 1;
        }
    }
    Ok(())
}

fn exhaustive(tally: &mut Tally) -> (Check, Check) {
    let mut dual: Check = Ok(());
    for (name, spec) in exhaustive_fixtures() {
        let r = ring(spec);
        let els = elements(&r);
        let wg = Witt::with_strategy(r.clone(), Strategy::GhostLift);
        let wp = Witt::with_strategy(r.clone(), Strategy::Polynomial);
        for m in 1..=3usize {
            if (els.len() as u128).pow(m as u32) > 1 << 8 {
                break;
            }
            let ws = witt_elements(&els, m);
            let tg = match TableRing::build(&wg.ring(m), ws.clone()) {
                Ok(t) => t,
                Err(e) => return (Err(format!("{name} M={m}: {e}")), dual),
            };
            let tp = match TableRing::build(&wp.ring(m), ws.clone()) {
                Ok(t) => t,
                Err(e) => return (Err(format!("{name} M={m}: {e}")), dual),
            };
            let laws = table_laws(&tg.ring, tally)
                .and_then(|_| ghost_homomorphism(&wg, &r, &tg.ring, &ws, tally))
                .and_then(|_| structure_identities(&wg, &r, &els, m, &ws, tally));
            if let Err(e) = laws {
                return (Err(format!("{name} M={m}: {e}")), dual);
            }
            if dual.is_ok() {
                dual = dual_tables(&wg, &wp, &tg.ring, &tp.ring, &ws, m, tally).map_err(|e| format!("{name} M={m}: {e}"));
            }
        }
    }
    (Ok(()), dual)
}

fn dual_tables(wg: &Witt<Ring>, wp: &Witt<Ring>, tg: &TableRing, tp: &TableRing, ws: &[WittVec<Elem>], m: usize, tally: &mut Tally) -> Check {
    let n = ws.len() as u32;
    for a in 0..n {
        ensure(tg.neg(&a) == tp.neg(&a), || format!("negation differs at {:?}", ws[a as usize]))?;
        if m >= 2 {
            let x = &ws[a as usize];
            ensure(wg.frobenius(x).unwrap() == wp.frobenius(x).unwrap(), || format!("F differs at {x:?}"))?;
        }
        for b in 0..n {
            ensure(tg.add(&a, &b) == tp.add(&a, &b), || format!("sum differs at {:?}, {:?}", ws[a as usize], ws[b as usize]))?;
            ensure(tg.mul(&a, &b) == tp.mul(&a, &b), || format!("product differs at {:?}, {:?}", ws[a as usize], ws[b as usize]))?;
            tally.dual_checks += 2;
        }
    }
    Ok(())
}

// Polynomial evaluation grows quickly with p and M; each ring is sampled up
// to the largest length where it stays cheap, with M = 5 reached at p = 2.
fn random_fixtures() -> Vec<(&'static str, RingSpec, usize)> {
    vec![
        ("Z/64", RingSpec::zmod(2, 6), 5),
        ("Z/8[e]", RingSpec::dual_numbers(2, 3), 5),
        ("GR(4,2)", RingSpec::galois(2, 2, &[1, 1, 1]), 5),
        ("Z/81", RingSpec::zmod(3, 4), 4),
        ("F3[e]", RingSpec::dual_numbers(3, 1), 4),
        ("GR(9,2)", RingSpec::galois(3, 2, &[1, 0, 1]), 4),
        ("Z/125", RingSpec::zmod(5, 3), 3),
        ("Z/25[e]", RingSpec::dual_numbers(5, 2), 3),
    ]
}

const RANDOM_CASES: usize = 10_000;

fn random_case(wg: &Witt<Ring>, wp: &Witt<Ring>, r: &Ring, m: usize, rng: &mut rand_chacha::ChaCha8Rng, tally: &mut Tally) -> (Check, Check) {
    let [x, y, z] = [0; 3].map(|_| random_witt(r, m, rng));
    let laws = (|| -> Check {
        let add = |a: &WittVec<Elem>, b: &WittVec<Elem>| wg.add(a, b).unwrap();
        let mul = |a: &WittVec<Elem>, b: &WittVec<Elem>| wg.mul(a, b).unwrap();
        let (xy, xpy) = (mul(&x, &y), add(&x, &y));
        ensure(xy == mul(&y, &x) && xpy == add(&y, &x), || format!("commutativity at {x:?}, {y:?}"))?;
        ensure(mul(&xy, &z) == mul(&x, &mul(&y, &z)), || format!("mul associativity at {x:?}, {y:?}, {z:?}"))?;
        ensure(add(&xpy, &z) == add(&x, &add(&y, &z)), || format!("add associativity at {x:?}, {y:?}, {z:?}"))?;
        ensure(mul(&x, &add(&y, &z)) == add(&xy, &mul(&x, &z)), || format!("distributivity at {x:?}, {y:?}, {z:?}"))?;
        ensure(add(&x, &wg.neg(&x).unwrap()) == wg.zero(m) && mul(&x, &wg.one(m)) == x, || format!("units at {x:?}"))?;
        let pm = wg.from_int(&BigInt::from(wg.p()), m);
        ensure(wg.frobenius(&wg.verschiebung(&x)).unwrap() == mul(&pm, &x), || format!("FV != p at {x:?}"))?;
        let (a, b) = (&x.0[0], &y.0[0]);
        ensure(wg.teichmuller(&r.mul(a, b), m) == mul(&wg.teichmuller(a, m), &wg.teichmuller(b, m)), || format!("Teichmuller at {a:?}, {b:?}"))?;
        for k in 0..m {
            let (gx, gy) = (wg.ghost(&x, k).unwrap(), wg.ghost(&y, k).unwrap());
            ensure(wg.ghost(&xpy, k).unwrap() == r.add(&gx, &gy) && wg.ghost(&xy, k).unwrap() == r.mul(&gx, &gy), || format!("w_{k} at {x:?}, {y:?}"))?;
        }
        if m >= 2 {
            let fx = wg.frobenius(&x).unwrap();
            for k in 0..m - 1 {
                ensure(wg.ghost(&fx, k).unwrap() == wg.ghost(&x, k + 1).unwrap(), || format!("w_{k} F at {x:?}"))?;
            }
            let xs = wg.truncate(&x, m - 1);
            let lhs = wg.verschiebung(&mul(&xs, &wg.frobenius(&y).unwrap()));
            ensure(lhs == mul(&y, &wg.verschiebung(&xs)), || format!("V(xF(y)) at {xs:?}, {y:?}"))?;
        }
        tally.law_checks += 12;
        Ok(())
    })();
    let dual = (|| -> Check {
        ensure(wg.add(&x, &y).unwrap() == wp.add(&x, &y).unwrap(), || format!("sum differs at {x:?}, {y:?}"))?;
        ensure(wg.mul(&x, &y).unwrap() == wp.mul(&x, &y).unwrap(), || format!("product differs at {x:?}, {y:?}"))?;
        ensure(wg.neg(&x).unwrap() == wp.neg(&x).unwrap(), || format!("negation differs at {x:?}"))?;
        if m >= 2 {
            ensure(wg.frobenius(&x).unwrap() == wp.frobenius(&x).unwrap(), || format!("F differs at {x:?}"))?;
        }
        tally.dual_checks += 4;
        Ok(())
    })();
    (laws, dual)
}

fn random(tally: &mut Tally) -> (Check, Check) {
    let mut rng = rng(0x5eed_0001);
    let fixtures: Vec<(&str, Ring, usize)> = random_fixtures().into_iter().map(|(n, s, m)| (n, ring(s), m)).collect();
    let witts: Vec<(Witt<Ring>, Witt<Ring>)> = fixtures
        .iter()
        .map(|(_, r, _)| (Witt::with_strategy(r.clone(), Strategy::GhostLift), Witt::with_strategy(r.clone(), Strategy::Polynomial)))
        .collect();
    let (mut laws, mut dual): (Check, Check) = (Ok(()), Ok(()));
    for case in 0..RANDOM_CASES {
        let i = case % fixtures.len();
        let (name, r, max_m) = &fixtures[i];
        let m = rng.gen_range(1..=*max_m);
        let (l, d) = random_case(&witts[i].0, &witts[i].1, r, m, &mut rng, tally);
        if laws.is_ok() {
            laws = l.map_err(|e| format!("{name} M={m}: {e}"));
        }
        if dual.is_ok() {
            dual = d.map_err(|e| format!("{name} M={m}: {e}"));
        }
    }
    (laws, dual)
}

pub fn run() -> (Outcome, Outcome) {
    let mut tally = Tally { law_checks: 0, dual_checks: 0 };
    let (ex_laws, ex_dual) = exhaustive(&mut tally);
    let (ex_checks, ex_dual_checks) = (tally.law_checks, tally.dual_checks);
    let (rnd_laws, rnd_dual) = random(&mut tally);
    let laws = ex_laws.and(rnd_laws).map(|_| {
        format!("{ex_checks} exhaustive checks, {RANDOM_CASES} random cases ({} checks)", tally.law_checks - ex_checks)
    });
    let dual = ex_dual.and(rnd_dual).map(|_| {
        format!("{ex_dual_checks} exhaustive comparisons, {} on random cases", tally.dual_checks - ex_dual_checks)
    });
    (laws, dual)
}
