//! Logarithmic ghost coordinates on W(a) for a pd-ideal a, the splitting
//! W(a) = a_[w0] + I(a), the section s and the projector x -> x^{>0}.

use num_bigint::BigInt;

use crate::algebra::{factorial, CRing};
use crate::error::{Error, Result};
use crate::pd::PdIdeal;
use crate::ring::{Elem, Ring};
use crate::witt::{Witt, WittVec};

#[derive(Clone, Debug)]
pub struct PdWitt {
    pd: PdIdeal,
    witt: Witt<Ring>,
    // (p^i - 1)! reduced into the ring
    facts: Vec<Elem>,
}

const MAX_LEVEL: usize = 12;

impl PdWitt {
    pub fn new(pd: PdIdeal) -> Self {
        let witt = Witt::new(pd.ring().clone());
        Self::with_witt(pd, witt)
    }

    pub fn with_witt(pd: PdIdeal, witt: Witt<Ring>) -> Self {
        let r = pd.ring().clone();
        let p = r.p();
        let facts = (0..MAX_LEVEL)
            .map_while(|i| p.checked_pow(i as u32).filter(|q| *q < 1 << 12))
            .map(|q| r.from_bigint(&factorial(q - 1)))
            .collect();
        PdWitt { pd, witt, facts }
    }

    pub fn pd(&self) -> &PdIdeal {
        &self.pd
    }
    pub fn witt(&self) -> &Witt<Ring> {
        &self.witt
    }
    pub fn ring(&self) -> &Ring {
        self.pd.ring()
    }

    pub fn in_w_ideal(&self, x: &WittVec<Elem>) -> bool {
        x.0.iter().all(|c| self.pd.ideal().contains(c))
    }

    fn check(&self, x: &WittVec<Elem>) -> Result<()> {
        if self.in_w_ideal(x) {
            Ok(())
        } else {
            Err(Error::NotInWIdeal)
        }
    }

    // (p^i - 1)! gamma_{p^i}(a)
    fn term(&self, i: usize, a: &Elem) -> Result<Elem> {
        let r = self.ring();
        let f = self.facts.get(i).ok_or(Error::PrecisionExhausted)?;
        let k = r.p().pow(i as u32);
        Ok(r.mul(f, &self.pd.eval(k, a)?))
    }

    /// w'_n(x) = sum_{i<=n} (p^i - 1)! gamma_{p^i}(x_{n-i}).
    pub fn log_ghost(&self, x: &WittVec<Elem>, n: usize) -> Result<Elem> {
        self.check(x)?;
        if n >= x.len() {
            return Err(Error::IndexOutOfRange(n));
        }
        let r = self.ring();
        let mut acc = r.zero();
        for i in 0..=n {
            acc = r.add(&acc, &self.term(i, &x.0[n - i])?);
        }
        Ok(acc)
    }

    pub fn log_ghosts(&self, x: &WittVec<Elem>) -> Result<Vec<Elem>> {
        (0..x.len()).map(|n| self.log_ghost(x, n)).collect()
    }

    /// Inverse of the logarithmic ghost map on a vector over a.
    pub fn from_log_ghosts(&self, w: &[Elem]) -> Result<WittVec<Elem>> {
        if !w.iter().all(|c| self.pd.ideal().contains(c)) {
            return Err(Error::NotInWIdeal);
        }
        let r = self.ring();
        let mut xs: Vec<Elem> = Vec::with_capacity(w.len());
        for (n, wn) in w.iter().enumerate() {
            let mut rest = wn.clone();
            for i in 1..=n {
                rest = r.sub(&rest, &self.term(i, &xs[n - i])?);
            }
            xs.push(rest);
        }
        Ok(WittVec(xs))
    }

    /// s(a): w_0 = a and w'_n = 0 for n >= 1.
    pub fn section(&self, a: &Elem, len: usize) -> Result<WittVec<Elem>> {
        if !self.pd.ideal().contains(a) {
            return Err(Error::NotInIdeal);
        }
        let r = self.ring();
        let mut w = vec![r.zero(); len];
        if len > 0 {
            w[0] = a.clone();
        }
        self.from_log_ghosts(&w)
    }

    /// x^{>0} = x - s(x_0) on W(a).
    pub fn project_pos(&self, x: &WittVec<Elem>) -> Result<WittVec<Elem>> {
        self.check(x)?;
        self.project_pos_rel(x)
    }

    /// x - s(x_0) for x with x_0 in a, landing in I(R).
    pub fn project_pos_rel(&self, x: &WittVec<Elem>) -> Result<WittVec<Elem>> {
        let Some(x0) = x.0.first() else { return Ok(x.clone()) };
        if !self.pd.ideal().contains(x0) {
            return Err(Error::FirstComponentNotInIdeal);
        }
        let s = self.section(x0, x.len())?;
        self.witt.sub(x, &s)
    }

    /// Extends x in W_M(a) to W_len(a) by zero logarithmic ghost coordinates.
    /// In these coordinates W(a) is a product and W(R) acts through the
    /// ghost maps, so this is additive, multiplicative and W(R)-compatible.
    pub fn pad_log(&self, x: &WittVec<Elem>, len: usize) -> Result<WittVec<Elem>> {
        let mut w = self.log_ghosts(x)?;
        w.resize(len, self.ring().zero());
        self.from_log_ghosts(&w[..len])
    }

    /// Exact divisibility witness used by callers: the integer (p^i - 1)!.
    pub fn level_factorial(&self, i: usize) -> BigInt {
        factorial(self.ring().p().pow(i as u32) - 1)
    }
}
