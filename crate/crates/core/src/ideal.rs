//! Ideals as Z/p^N-submodules in Howell normal form.
//!
//! A Howell basis over the local ring Z/p^N is a list of rows with strictly
//! increasing pivot columns, pivots normalised to p^v, entries above each
//! pivot reduced below p^v, and the span closed under annihilator shifts:
//! p^(N-v) times a row lies in the span of the later rows. Under these
//! conditions reduction decides membership and the basis is canonical.

use crate::algebra::{vp_u64, CRing};
use crate::error::{Error, Result};
use crate::ring::{Elem, Ring, ENUMERATION_CAP};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    col: usize,
    val: u32,
    v: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Ring,
    rows: Vec<Row>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.rows == other.rows
    }
}
impl Eq for Ideal {}

fn pow_u64(p: u64, k: u32) -> u64 {
    p.pow(k)
}

fn unit_inverse(u: u64, q: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (q as i128, u as i128);
    while nr != 0 {
        let k = r / nr;
        (t, nt) = (nt, t - k * nt);
        (r, nr) = (nr, r - k * nr);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(q as i128) as u64
}

fn axpy(q: u64, y: &mut [u64], a: u64, x: &[u64]) {
    // y -= a * x
    for (yi, &xi) in y.iter_mut().zip(x) {
        let t = ((a as u128 * xi as u128) % q as u128) as u64;
        *yi = if *yi >= t { *yi - t } else { *yi + q - t };
    }
}

/// Howell form of the span of `gens` in (Z/q)^dim, q = p^n.
fn howell(p: u64, n: u32, dim: usize, gens: Vec<Vec<u64>>) -> Vec<Row> {
    let q = pow_u64(p, n);
    let mut pending: Vec<Vec<u64>> = gens.into_iter().filter(|g| g.iter().any(|&c| c != 0)).collect();
    let mut rows: Vec<Row> = Vec::new();
    for col in 0..dim {
        let best = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| vp_u64(r[col], p))
            .map(|(i, _)| i);
        let Some(bi) = best else { continue };
        let mut piv = pending.swap_remove(bi);
        let val = vp_u64(piv[col], p);
        let pv = pow_u64(p, val);
        let u = unit_inverse((piv[col] / pv) % (q / pv).max(1), q);
        for c in piv.iter_mut() {
            *c = ((*c as u128 * u as u128) % q as u128) as u64;
        }
        debug_assert_eq!(piv[col], pv);
        for r in pending.iter_mut() {
            if r[col] != 0 {
                let a = r[col] / pv;
                axpy(q, r, a, &piv);
            }
        }
        let shift = pow_u64(p, n - val);
        let ann: Vec<u64> = piv.iter().map(|&c| ((c as u128 * shift as u128) % q as u128) as u64).collect();
        pending.retain(|r| r.iter().any(|&c| c != 0));
        if ann.iter().any(|&c| c != 0) {
            pending.push(ann);
        }
        rows.push(Row { col, val, v: piv });
    }
    // reduce entries above later pivots
    for j in 0..rows.len() {
        let (col, pv) = (rows[j].col, pow_u64(p, rows[j].val));
        let pj = rows[j].v.clone();
        for row in rows.iter_mut().take(j) {
            let a = row.v[col] / pv;
            if a != 0 {
                axpy(q, &mut row.v, a, &pj);
            }
        }
    }
    rows
}

impl Ideal {
    pub fn new(ring: &Ring, gens: &[Elem]) -> Result<Ideal> {
        for g in gens {
            ring.check_elem(g)?;
        }
        let dim = ring.dim();
        let mut span = Vec::with_capacity(gens.len() * dim);
        for g in gens {
            for b in 0..dim {
                span.push(ring.mul(g, &ring.basis(b)).0);
            }
        }
        Ok(Ideal { ring: ring.clone(), rows: howell(ring.p(), ring.precision(), dim, span) })
    }

    pub fn zero(ring: &Ring) -> Ideal {
        Ideal { ring: ring.clone(), rows: vec![] }
    }

    /// p^k R.
    pub fn p_power(ring: &Ring, k: u32) -> Ideal {
        let g = ring.from_u64(ring.p().pow(k.min(ring.precision())));
        Ideal::new(ring, &[g]).expect("constant lies in the ring")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// The canonical basis: each row with its pivot column and valuation.
    pub fn basis(&self) -> Vec<(usize, u32, Elem)> {
        self.rows.iter().map(|r| (r.col, r.val, Elem(r.v.clone()))).collect()
    }

    pub fn generators(&self) -> Vec<Elem> {
        self.rows.iter().map(|r| Elem(r.v.clone())).collect()
    }

    /// Canonical representative of the class of `a` modulo the ideal.
    pub fn reduce(&self, a: &Elem) -> Elem {
        let q = self.ring.modulus();
        let mut v = a.0.clone();
        for r in &self.rows {
            let a = v[r.col] / pow_u64(self.ring.p(), r.val);
            if a != 0 {
                axpy(q, &mut v, a, &r.v);
            }
        }
        Elem(v)
    }

    pub fn contains(&self, a: &Elem) -> bool {
        self.ring.is_zero(&self.reduce(a))
    }

    /// Coefficients c with a = sum c_i * row_i, if a is a member.
    pub fn coordinates(&self, a: &Elem) -> Option<Vec<u64>> {
        let q = self.ring.modulus();
        let mut v = a.0.clone();
        let mut coords = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let pv = pow_u64(self.ring.p(), r.val);
            if v[r.col] % pv != 0 {
                return None;
            }
            let c = v[r.col] / pv;
            axpy(q, &mut v, c, &r.v);
            coords.push(c);
        }
        v.iter().all(|&c| c == 0).then_some(coords)
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.rows.iter().all(|r| self.contains(&Elem(r.v.clone())))
    }

    pub fn size(&self) -> u128 {
        self.rows
            .iter()
            .map(|r| (self.ring.p() as u128).pow(self.ring.precision() - r.val))
            .product()
    }

    /// All members, in lexicographic order.
    pub fn elements(&self) -> Result<Vec<Elem>> {
        if self.size() > ENUMERATION_CAP {
            return Err(Error::SizeOverflow(self.size().to_string()));
        }
        let p = self.ring.p();
        let n = self.ring.precision();
        let mut out = vec![self.ring.zero()];
        for r in &self.rows {
            let range = pow_u64(p, n - r.val);
            let row = Elem(r.v.clone());
            let mut next = Vec::with_capacity(out.len() * range as usize);
            for base in &out {
                let mut cur = base.clone();
                for _ in 0..range {
                    next.push(cur.clone());
                    cur = self.ring.add(&cur, &row);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::MixedRings);
        }
        let gens: Vec<Elem> = self.generators().into_iter().chain(other.generators()).collect();
        Ideal::new(&self.ring, &gens)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::MixedRings);
        }
        let mut gens = Vec::new();
        for a in self.generators() {
            for b in other.generators() {
                gens.push(self.ring.mul(&a, &b));
            }
        }
        Ideal::new(&self.ring, &gens)
    }

    /// The ideal p times this one.
    pub fn times_p(&self) -> Ideal {
        let p = self.ring.from_u64(self.ring.p());
        let gens: Vec<Elem> = self.generators().iter().map(|g| self.ring.mul(&p, g)).collect();
        Ideal::new(&self.ring, &gens).expect("same ring")
    }

    /// {x : p x in self}.
    pub fn p_colon(&self) -> Ideal {
        let ring = &self.ring;
        let dim = ring.dim();
        let p = ring.p();
        let mut gens = Vec::new();
        for b in 0..dim {
            let mut v = vec![0u64; 2 * dim];
            v[b] = p % ring.modulus();
            v[dim + b] = 1;
            gens.push(v);
        }
        self.kernel_part(gens)
    }

    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::MixedRings);
        }
        let gens = other
            .rows
            .iter()
            .map(|r| r.v.iter().chain(r.v.iter()).copied().collect())
            .collect();
        Ok(self.kernel_part(gens))
    }

    // Given rows [f(x) | x], returns {x : f(x) in self} using the Howell
    // property that rows pivoting past a column span the vectors vanishing
    // on all earlier columns.
    fn kernel_part(&self, mut gens: Vec<Vec<u64>>) -> Ideal {
        let ring = &self.ring;
        let dim = ring.dim();
        for r in &self.rows {
            let mut v = r.v.clone();
            v.resize(2 * dim, 0);
            gens.push(v);
        }
        let h = howell(ring.p(), ring.precision(), 2 * dim, gens);
        let right: Vec<Vec<u64>> = h.into_iter().filter(|r| r.col >= dim).map(|r| r.v[dim..].to_vec()).collect();
        Ideal { ring: ring.clone(), rows: howell(ring.p(), ring.precision(), dim, right) }
    }
}
