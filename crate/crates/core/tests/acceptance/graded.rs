//! graded_exp over Z/p^4 against exact rational arithmetic: for random D
//! supported in strictly positive weights, exp(D) = sum D^n / n! is computed
//! over Q with integer lifts of the entries and then reduced mod p^4.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use gmdisp::group::graded_exp;
use gmdisp::{CRing, Mat, RingSpec};

use super::fixtures::{ensure, ring, rng};
use super::Outcome;

const N: u32 = 4;
const PER_PRIME: usize = 100;

type QMat = Vec<Vec<BigRational>>;

fn qmul(x: &QMat, y: &QMat) -> QMat {
    let h = x.len();
    (0..h).map(|i| (0..h).map(|j| (0..h).map(|k| &x[i][k] * &y[k][j]).sum()).collect()).collect()
}

/// exp of a nilpotent rational matrix, exactly.
fn rational_exp(d: &QMat) -> QMat {
    let h = d.len();
    let mut acc: QMat = (0..h).map(|i| (0..h).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut term = acc.clone();
    for n in 1..=h {
        term = qmul(&term, d);
        let inv = BigRational::new(BigInt::one(), BigInt::from(n));
        term = term.iter().map(|row| row.iter().map(|x| x * &inv).collect()).collect();
        for i in 0..h {
            for j in 0..h {
                acc[i][j] = &acc[i][j] + &term[i][j];
            }
        }
    }
    acc
}

/// a/b mod m for b prime to m.
fn reduce_rational(x: &BigRational, m: &BigInt) -> BigInt {
    let (num, den) = (x.numer(), x.denom());
    let g = den.extended_gcd(m);
    assert!(g.gcd.is_one(), "denominator {den} is not a unit mod {m}");
    (num * g.x).mod_floor(m)
}

pub fn run() -> Outcome {
    let mut rng = rng(0x5eed_0010);
    let mut total = 0;
    for p in [2u64, 3, 5] {
        let r = ring(RingSpec::zmod(p, N));
        let m = BigInt::from(p.pow(N));
        for i in 0..PER_PRIME {
            let h = rng.gen_range(2..=4);
            let weights: Vec<i64> = (0..h).map(|_| rng.gen_range(0..p as i64)).collect();
            let ints: Vec<Vec<u64>> = (0..h)
                .map(|a| (0..h).map(|b| if weights[a] - weights[b] >= 1 { rng.gen_range(0..p.pow(N)) } else { 0 }).collect())
                .collect();
            let d = Mat::from_fn(h, h, |a, b| r.from_u64(ints[a][b]));
            let got = graded_exp(&r, &weights, &d).map_err(|e| format!("p = {p} case {i}: {e}"))?;
            let q: QMat = ints.iter().map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
            let expect = rational_exp(&q);
            for a in 0..h {
                for b in 0..h {
                    let want = reduce_rational(&expect[a][b], &m);
                    let have = BigInt::from(got.get(a, b).coeffs()[0]);
                    ensure(want == have, || format!("p = {p} case {i}: entry ({a},{b}) is {have}, expected {want}"))?;
                }
            }
            ensure(gmdisp::mat::det(&r, &got) == r.one(), || format!("p = {p} case {i}: det != 1"))?;
            total += 1;
        }
    }
    Ok(format!("{total} random positive-weight D over Z/p^{N} (p = 2, 3, 5) agree with the rational series"))
}
