//! Universal Witt polynomials over the integers.
//!
//! Variables are shared across lengths: for the binary operations x_i has
//! index 2i and y_i index 2i+1; for negation and Frobenius x_i has index i.
//! Component n of every family therefore does not depend on the length.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Mono = Vec<u16>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: HashMap<Mono, BigInt>,
}

fn trim(m: &mut Mono) {
    while m.last() == Some(&0) {
        m.pop();
    }
}

impl Poly {
    pub fn var(i: usize) -> Poly {
        let mut m = vec![0u16; i + 1];
        m[i] = 1;
        Poly { terms: HashMap::from([(m, BigInt::one())]) }
    }

    pub fn constant(c: BigInt) -> Poly {
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(vec![], c);
        }
        Poly { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let n = ma.len().max(mb.len());
                let mut m: Mono = (0..n)
                    .map(|i| ma.get(i).copied().unwrap_or(0) + mb.get(i).copied().unwrap_or(0))
                    .collect();
                trim(&mut m);
                r.add_term(m, ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(BigInt::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn div_exact(&self, d: &BigInt) -> Result<Poly> {
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            terms.insert(m.clone(), q);
        }
        Ok(Poly { terms })
    }

    /// Evaluates at integer points.
    pub fn eval(&self, at: &[BigInt]) -> BigInt {
        let mut s = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= at[i].pow(e as u32);
                }
            }
            s += t;
        }
        s
    }

    /// Terms sorted by monomial, for deterministic output.
    pub fn sorted_terms(&self) -> Vec<(Mono, BigInt)> {
        let mut v: Vec<(Mono, BigInt)> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort();
        v
    }
}

/// Ghost polynomial w_n in the variables `var(0..=n)`.
pub fn ghost_poly(p: u64, n: usize, var: impl Fn(usize) -> usize) -> Poly {
    let mut s = Poly::default();
    for i in 0..=n {
        let pi = BigInt::from(p).pow(i as u32);
        s = s.add(&Poly::var(var(i)).pow(p.pow((n - i) as u32)).scale(&pi));
    }
    s
}

/// The universal polynomials for components 0..len.
#[derive(Debug)]
pub struct Universal {
    pub p: u64,
    pub sum: Vec<Poly>,
    pub prod: Vec<Poly>,
    pub neg: Vec<Poly>,
    /// Component n of F: W_{len+1} -> W_len, in x_0..x_{n+1}.
    pub frob: Vec<Poly>,
}

// One family: solves sum_{i<=n} p^i Q_i^(p^(n-i)) = target_n for Q_n.
struct Family {
    p: u64,
    comps: Vec<Poly>,
    // powers[i][k] = comps[i]^(p^k)
    powers: Vec<Vec<Poly>>,
}

impl Family {
    fn new(p: u64) -> Self {
        Family { p, comps: vec![], powers: vec![] }
    }

    fn push(&mut self, target: Poly) -> Result<()> {
        let n = self.comps.len();
        let p = self.p;
        let mut rest = target;
        for i in 0..n {
            while self.powers[i].len() <= n - i {
                let next = self.powers[i].last().unwrap().pow(p);
                self.powers[i].push(next);
            }
            let pi = BigInt::from(p).pow(i as u32);
            rest = rest.sub(&self.powers[i][n - i].scale(&pi));
        }
        let q = rest.div_exact(&BigInt::from(p).pow(n as u32))?;
        self.powers.push(vec![q.clone()]);
        self.comps.push(q);
        Ok(())
    }
}

fn build(p: u64, len: usize) -> Result<Universal> {
    let (mut s, mut m, mut ng, mut f) = (Family::new(p), Family::new(p), Family::new(p), Family::new(p));
    for n in 0..len {
        let wx = ghost_poly(p, n, |i| 2 * i);
        let wy = ghost_poly(p, n, |i| 2 * i + 1);
        s.push(wx.add(&wy))?;
        m.push(wx.mul(&wy))?;
        let w = ghost_poly(p, n, |i| i);
        ng.push(Poly::default().sub(&w))?;
        f.push(ghost_poly(p, n + 1, |i| i))?;
    }
    let u = Universal { p, sum: s.comps, prod: m.comps, neg: ng.comps, frob: f.comps };
    if len <= VERIFY_UP_TO {
        verify(&u)?;
    }
    Ok(u)
}

const VERIFY_UP_TO: usize = 5;

/// Substitutes the components back into the defining ghost identities.
pub fn verify(u: &Universal) -> Result<()> {
    let p = u.p;
    let lhs = |fam: &[Poly], n: usize| {
        (0..=n).fold(Poly::default(), |acc, i| {
            acc.add(&fam[i].pow(p.pow((n - i) as u32)).scale(&BigInt::from(p).pow(i as u32)))
        })
    };
    for n in 0..u.sum.len() {
        let wx = ghost_poly(p, n, |i| 2 * i);
        let wy = ghost_poly(p, n, |i| 2 * i + 1);
        let ok = lhs(&u.sum, n) == wx.add(&wy)
            && lhs(&u.prod, n) == wx.mul(&wy)
            && lhs(&u.neg, n) == Poly::default().sub(&ghost_poly(p, n, |i| i))
            && lhs(&u.frob, n) == ghost_poly(p, n + 1, |i| i);
        if !ok {
            return Err(Error::InexactDivision);
        }
    }
    Ok(())
}

type Cache = Mutex<HashMap<(u64, usize), Arc<Universal>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cached universal polynomials for W_len at p. Every division in the
/// recursion is checked; a failure would be an internal error.
pub fn universal(p: u64, len: usize) -> Result<Arc<Universal>> {
    if let Some(u) = cache().lock().unwrap().get(&(p, len)) {
        return Ok(u.clone());
    }
    let u = Arc::new(build(p, len)?);
    cache().lock().unwrap().insert((p, len), u.clone());
    Ok(u)
}
