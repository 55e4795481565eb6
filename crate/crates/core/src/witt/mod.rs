//! Truncated p-typical Witt vectors over a coefficient ring.
//!
//! Two evaluation strategies are kept side by side: the cached universal
//! polynomials, and a ghost route that lifts to a cover of higher
//! precision, computes in ghost coordinates, inverts the ghost map there
//! and reduces back. The polynomial route is the reference.

pub mod poly;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::CRing;
use crate::error::{Error, Result};
use poly::{universal, Poly};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WittVec<E>(pub Vec<E>);

impl<E> WittVec<E> {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn comps(&self) -> &[E] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Polynomial,
    GhostLift,
}

struct CompiledPoly<E> {
    terms: Vec<(E, Vec<(usize, u32)>)>,
}

struct Compiled<E> {
    sum: Vec<CompiledPoly<E>>,
    prod: Vec<CompiledPoly<E>>,
    neg: Vec<CompiledPoly<E>>,
    frob: Vec<CompiledPoly<E>>,
}

/// Witt vector arithmetic of every length over one base ring.
pub struct Witt<R: CRing> {
    base: R,
    strategy: Strategy,
    compiled: Arc<Mutex<HashMap<usize, Arc<Compiled<R::E>>>>>,
    covers: Arc<Mutex<HashMap<u32, Option<R>>>>,
}

impl<R: CRing> Clone for Witt<R> {
    fn clone(&self) -> Self {
        Witt {
            base: self.base.clone(),
            strategy: self.strategy,
            compiled: self.compiled.clone(),
            covers: self.covers.clone(),
        }
    }
}

impl<R: CRing + std::fmt::Debug> std::fmt::Debug for Witt<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Witt({:?}, {:?})", self.base, self.strategy)
    }
}

fn compile<R: CRing>(r: &R, p: &Poly) -> CompiledPoly<R::E> {
    let mut terms: Vec<(R::E, Vec<(usize, u32)>)> = p
        .sorted_terms()
        .into_iter()
        .filter_map(|(m, c)| {
            let c = r.from_bigint(&c);
            if r.is_zero(&c) {
                return None;
            }
            let vars = m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as u32)).collect();
            Some((c, vars))
        })
        .collect();
    terms.shrink_to_fit();
    CompiledPoly { terms }
}

// Powers of each variable up to the exponents a family needs.
fn power_table<R: CRing>(r: &R, vals: &[R::E], max_exp: &[u32]) -> Vec<Vec<R::E>> {
    vals.iter()
        .zip(max_exp)
        .map(|(v, &m)| {
            let mut t = Vec::with_capacity(m as usize + 1);
            t.push(r.one());
            for k in 1..=m as usize {
                let next = r.mul(&t[k - 1], v);
                t.push(next);
            }
            t
        })
        .collect()
}

fn eval_compiled<R: CRing>(r: &R, polys: &[CompiledPoly<R::E>], vals: &[R::E], out_len: usize) -> Vec<R::E> {
    let mut max_exp = vec![0u32; vals.len()];
    for cp in &polys[..out_len] {
        for (_, vs) in &cp.terms {
            for &(i, e) in vs {
                max_exp[i] = max_exp[i].max(e);
            }
        }
    }
    let table = power_table(r, vals, &max_exp);
    polys[..out_len]
        .iter()
        .map(|cp| {
            let mut acc = r.zero();
            for (c, vs) in &cp.terms {
                let mut t = c.clone();
                for &(i, e) in vs {
                    t = r.mul(&t, &table[i][e as usize]);
                }
                acc = r.add(&acc, &t);
            }
            acc
        })
        .collect()
}

impl<R: CRing> Witt<R> {
    pub fn new(base: R) -> Self {
        Self::with_strategy(base, Strategy::GhostLift)
    }

    pub fn with_strategy(base: R, strategy: Strategy) -> Self {
        Witt {
            base,
            strategy,
            compiled: Arc::new(Mutex::new(HashMap::new())),
            covers: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// A handle sharing caches but evaluating with another strategy.
    pub fn using(&self, strategy: Strategy) -> Self {
        Witt { strategy, ..self.clone() }
    }

    pub fn base(&self) -> &R {
        &self.base
    }
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }
    pub fn p(&self) -> u64 {
        self.base.prime()
    }

    fn compiled(&self, len: usize) -> Result<Arc<Compiled<R::E>>> {
        if let Some(c) = self.compiled.lock().unwrap().get(&len) {
            return Ok(c.clone());
        }
        let u = universal(self.p(), len)?;
        let r = &self.base;
        let c = Arc::new(Compiled {
            sum: u.sum.iter().map(|q| compile(r, q)).collect(),
            prod: u.prod.iter().map(|q| compile(r, q)).collect(),
            neg: u.neg.iter().map(|q| compile(r, q)).collect(),
            frob: u.frob.iter().map(|q| compile(r, q)).collect(),
        });
        self.compiled.lock().unwrap().insert(len, c.clone());
        Ok(c)
    }

    fn cover(&self, extra: u32) -> Option<R> {
        let mut covers = self.covers.lock().unwrap();
        covers.entry(extra).or_insert_with(|| self.base.cover(extra)).clone()
    }

    pub fn zero(&self, len: usize) -> WittVec<R::E> {
        WittVec(vec![self.base.zero(); len])
    }

    pub fn one(&self, len: usize) -> WittVec<R::E> {
        self.teichmuller(&self.base.one(), len)
    }

    /// The Teichmüller lift [a] = (a, 0, ..., 0).
    pub fn teichmuller(&self, a: &R::E, len: usize) -> WittVec<R::E> {
        let mut v = self.zero(len);
        if len > 0 {
            v.0[0] = a.clone();
        }
        v
    }

    /// The image of an integer; its ghost vector is constant.
    pub fn from_int(&self, n: &BigInt, len: usize) -> WittVec<R::E> {
        let p = BigInt::from(self.p());
        let mut xs: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            let mut rest = n.clone();
            for (i, x) in xs.iter().enumerate() {
                rest -= p.pow(i as u32) * x.pow(self.p().pow((k - i) as u32) as u32);
            }
            let pk = p.pow(k as u32);
            debug_assert!((&rest % &pk).is_zero());
            xs.push(rest / pk);
        }
        WittVec(xs.iter().map(|x| self.base.from_bigint(x)).collect())
    }

    fn same_len(&self, x: &WittVec<R::E>, y: &WittVec<R::E>) -> Result<usize> {
        if x.len() != y.len() {
            return Err(Error::ShapeMismatch(format!("Witt lengths {} and {}", x.len(), y.len())));
        }
        Ok(x.len())
    }

    fn interleave(x: &WittVec<R::E>, y: &WittVec<R::E>) -> Vec<R::E> {
        x.0.iter().zip(&y.0).flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn add(&self, x: &WittVec<R::E>, y: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        let len = self.same_len(x, y)?;
        if let Some(v) = self.via_cover(&[x, y], len, 0, |r, g| r.add(&g[0], &g[1]))? {
            return Ok(v);
        }
        let c = self.compiled(len)?;
        Ok(WittVec(eval_compiled(&self.base, &c.sum, &Self::interleave(x, y), len)))
    }

    pub fn mul(&self, x: &WittVec<R::E>, y: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        let len = self.same_len(x, y)?;
        if let Some(v) = self.via_cover(&[x, y], len, 0, |r, g| r.mul(&g[0], &g[1]))? {
            return Ok(v);
        }
        let c = self.compiled(len)?;
        Ok(WittVec(eval_compiled(&self.base, &c.prod, &Self::interleave(x, y), len)))
    }

    pub fn neg(&self, x: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        let len = x.len();
        if let Some(v) = self.via_cover(&[x], len, 0, |r, g| r.neg(&g[0]))? {
            return Ok(v);
        }
        let c = self.compiled(len)?;
        Ok(WittVec(eval_compiled(&self.base, &c.neg, &x.0, len)))
    }

    pub fn sub(&self, x: &WittVec<R::E>, y: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        self.add(x, &self.neg(y)?)
    }

    /// F: W_{M+1} -> W_M with w_k(F x) = w_{k+1}(x).
    pub fn frobenius(&self, x: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        if x.len() < 2 {
            return Err(Error::LengthUnderflow);
        }
        let len = x.len() - 1;
        if let Some(v) = self.via_cover(&[x], len, 1, |_, g| g[0].clone())? {
            return Ok(v);
        }
        let c = self.compiled(len)?;
        Ok(WittVec(eval_compiled(&self.base, &c.frob, &x.0, len)))
    }

    /// F keeping the length: the top component is dropped first when needed.
    pub fn frobenius_truncated(&self, x: &WittVec<R::E>, len: usize) -> Result<WittVec<R::E>> {
        if x.len() < len + 1 {
            return Err(Error::LengthUnderflow);
        }
        self.frobenius(&self.truncate(x, len + 1))
    }

    /// V: (a_0, a_1, ...) -> (0, a_0, a_1, ...), one component longer.
    pub fn verschiebung(&self, x: &WittVec<R::E>) -> WittVec<R::E> {
        let mut v = Vec::with_capacity(x.len() + 1);
        v.push(self.base.zero());
        v.extend(x.0.iter().cloned());
        WittVec(v)
    }

    /// V followed by truncation to `budget` components.
    pub fn verschiebung_capped(&self, x: &WittVec<R::E>, budget: usize) -> WittVec<R::E> {
        let v = self.verschiebung(x);
        self.truncate(&v, budget.min(v.len()))
    }

    /// The inverse of V on I: drops a zero first component.
    pub fn v_inverse(&self, x: &WittVec<R::E>) -> Result<WittVec<R::E>> {
        if x.is_empty() || !self.base.is_zero(&x.0[0]) {
            return Err(Error::NotInWIdeal);
        }
        Ok(WittVec(x.0[1..].to_vec()))
    }

    pub fn truncate(&self, x: &WittVec<R::E>, len: usize) -> WittVec<R::E> {
        WittVec(x.0[..len.min(x.len())].to_vec())
    }

    /// Membership in I = {x_0 = 0}.
    pub fn in_i(&self, x: &WittVec<R::E>) -> bool {
        x.is_empty() || self.base.is_zero(&x.0[0])
    }

    pub fn ghost(&self, x: &WittVec<R::E>, k: usize) -> Result<R::E> {
        if k >= x.len() {
            return Err(Error::IndexOutOfRange(k));
        }
        Ok(ghosts_in(&self.base, &x.0, k + 1).pop().unwrap())
    }

    pub fn ghosts(&self, x: &WittVec<R::E>) -> Vec<R::E> {
        ghosts_in(&self.base, &x.0, x.len())
    }

    /// Dwork inversion of a ghost vector with respect to a Frobenius lift
    /// `phi`: requires g_k = phi(g_{k-1}) mod p^k and divides exactly.
    pub fn from_ghost(&self, g: &[R::E], phi: &dyn Fn(&R::E) -> R::E) -> Result<WittVec<R::E>> {
        let r = &self.base;
        for k in 1..g.len() {
            let d = r.sub(&g[k], &phi(&g[k - 1]));
            match r.div_p_pow(&d, k as u32) {
                Ok(_) => {}
                Err(Error::InexactDivision) => return Err(Error::DworkCongruenceViolation(k)),
                Err(e) => return Err(e),
            }
        }
        invert_ghosts(r, g).map_err(|e| match e {
            Error::InexactDivision => Error::DworkCongruenceViolation(g.len()),
            e => e,
        })
    }

    // Ghost route: None when the strategy or the base ring rules it out.
    fn via_cover(
        &self,
        xs: &[&WittVec<R::E>],
        out_len: usize,
        shift: usize,
        combine: impl Fn(&R, &[R::E]) -> R::E,
    ) -> Result<Option<WittVec<R::E>>> {
        if self.strategy != Strategy::GhostLift || out_len == 0 {
            return Ok(None);
        }
        let Some(cover) = self.cover(out_len as u32 - 1) else { return Ok(None) };
        let base = &self.base;
        let ghosts: Vec<Vec<R::E>> = xs
            .iter()
            .map(|x| {
                let lifted: Vec<R::E> = x.0.iter().map(|a| base.lift_into(&cover, a)).collect();
                ghosts_in(&cover, &lifted, out_len + shift)
            })
            .collect();
        let target: Vec<R::E> = (shift..out_len + shift)
            .map(|k| {
                let at: Vec<R::E> = ghosts.iter().map(|g| g[k].clone()).collect();
                combine(&cover, &at)
            })
            .collect();
        let comps = invert_ghosts(&cover, &target)?;
        Ok(Some(WittVec(comps.0.iter().map(|c| base.reduce_from(&cover, c)).collect())))
    }

    /// Inverse in W_M(R) by Newton iteration from the Teichmüller lift of the
    /// inverse of x_0; converges when I(R) + pW(R) is nilpotent.
    pub fn inv(&self, x: &WittVec<R::E>) -> Option<WittVec<R::E>> {
        let len = x.len();
        let a = self.base.inv(x.0.first()?)?;
        let one = self.one(len);
        let mut y = self.teichmuller(&a, len);
        for _ in 0..(2 * len + 8) {
            let e = self.sub(&one, &self.mul(x, &y).ok()?).ok()?;
            if e == self.zero(len) {
                return Some(y);
            }
            y = self.add(&y, &self.mul(&y, &e).ok()?).ok()?;
        }
        None
    }

    /// The ring W_len(R) as a value implementing [`CRing`].
    pub fn ring(&self, len: usize) -> WittRing<R> {
        WittRing { witt: self.clone(), len }
    }
}

fn ghosts_in<R: CRing>(r: &R, x: &[R::E], count: usize) -> Vec<R::E> {
    let p = r.prime();
    // pw[i] = x_i^(p^(k-i)) for the current k
    let mut pw: Vec<R::E> = Vec::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        for v in pw.iter_mut() {
            *v = r.pow(v, p);
        }
        pw.push(x[k].clone());
        let mut acc = r.zero();
        for (i, v) in pw.iter().enumerate() {
            let t = r.mul(&r.from_bigint(&BigInt::from(p).pow(i as u32)), v);
            acc = r.add(&acc, &t);
        }
        out.push(acc);
    }
    out
}

// x_n = (g_n - sum_{i<n} p^i x_i^(p^(n-i))) / p^n with exactness checked.
fn invert_ghosts<R: CRing>(r: &R, g: &[R::E]) -> Result<WittVec<R::E>> {
    let p = r.prime();
    let mut xs: Vec<R::E> = Vec::with_capacity(g.len());
    let mut pw: Vec<R::E> = Vec::with_capacity(g.len());
    for (n, gn) in g.iter().enumerate() {
        for v in pw.iter_mut() {
            *v = r.pow(v, p);
        }
        let mut rest = gn.clone();
        for (i, v) in pw.iter().enumerate() {
            let t = r.mul(&r.from_bigint(&BigInt::from(p).pow(i as u32)), v);
            rest = r.sub(&rest, &t);
        }
        let x = if n == 0 { rest } else { r.div_p_pow(&rest, n as u32)? };
        pw.push(x.clone());
        xs.push(x);
    }
    Ok(WittVec(xs))
}

/// W_len(R) as a ring value.
pub struct WittRing<R: CRing> {
    witt: Witt<R>,
    len: usize,
}

impl<R: CRing> Clone for WittRing<R> {
    fn clone(&self) -> Self {
        WittRing { witt: self.witt.clone(), len: self.len }
    }
}

impl<R: CRing> WittRing<R> {
    pub fn witt(&self) -> &Witt<R> {
        &self.witt
    }
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl<R: CRing> CRing for WittRing<R> {
    type E = WittVec<R::E>;

    fn prime(&self) -> u64 {
        self.witt.p()
    }
    fn zero(&self) -> Self::E {
        self.witt.zero(self.len)
    }
    fn one(&self) -> Self::E {
        self.witt.one(self.len)
    }
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.witt.add(a, b).expect("lengths agree")
    }
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.witt.sub(a, b).expect("lengths agree")
    }
    fn neg(&self, a: &Self::E) -> Self::E {
        self.witt.neg(a).expect("lengths agree")
    }
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.witt.mul(a, b).expect("lengths agree")
    }
    fn from_bigint(&self, n: &BigInt) -> Self::E {
        if n.is_one() {
            return self.one();
        }
        self.witt.from_int(n, self.len)
    }
    fn inv(&self, a: &Self::E) -> Option<Self::E> {
        self.witt.inv(a)
    }
}
