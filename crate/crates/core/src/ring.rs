//! Finite coefficient rings: a Galois ring GR(p^N, d) tensored with a
//! monomial quotient of a polynomial ring in nilpotent variables.
//!
//! Elements are coefficient vectors over Z/p^N on the monomial basis
//! `x^i * m` (i < d, m a surviving nilpotent monomial), indexed as
//! `m_index * d + i`. Ordering of elements is lexicographic on this vector.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{is_prime, CRing};
use crate::error::{Error, Result};

/// Name of the Galois generator in monomial strings.
pub const GALOIS_GEN: &str = "x";

/// Rings with more elements than this refuse full enumeration.
pub const ENUMERATION_CAP: u128 = 1 << 20;

const MAX_MONOMIALS: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Monic polynomial, lowest coefficient first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub galois_poly: Option<Vec<i64>>,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
}

impl RingSpec {
    pub fn zmod(p: u64, n: u32) -> Self {
        RingSpec { p, n, galois_poly: None, vars: vec![], relations: vec![] }
    }

    pub fn galois(p: u64, n: u32, f: &[i64]) -> Self {
        RingSpec { p, n, galois_poly: Some(f.to_vec()), vars: vec![], relations: vec![] }
    }

    pub fn with_vars(mut self, vars: &[&str], relations: &[&str]) -> Self {
        self.vars = vars.iter().map(|s| s.to_string()).collect();
        self.relations = relations.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Z/p^N with one variable e and e^2 = 0.
    pub fn dual_numbers(p: u64, n: u32) -> Self {
        Self::zmod(p, n).with_vars(&["e"], &["e^2"])
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Elem(pub Vec<u64>);

impl Elem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

struct RingData {
    spec: RingSpec,
    p: u64,
    n: u32,
    q: u64,
    d: usize,
    f: Vec<u64>,
    nil: Vec<Vec<u32>>,
    nil_index: HashMap<Vec<u32>, usize>,
    dim: usize,
    table: Vec<Vec<(u32, u64)>>,
    frob_images: Vec<Elem>,
    galois_root: Elem,
}

/// Shared handle to a ring; cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({:?})", self.0.spec)
    }
}

fn parse_monomial(s: &str, vars: &[String], allow_galois: bool) -> Result<(u32, Vec<u32>)> {
    let mut g = 0u32;
    let mut exps = vec![0u32; vars.len()];
    let s = s.trim();
    if s == "1" || s.is_empty() {
        return Ok((g, exps));
    }
    for tok in s.split('*') {
        let tok = tok.trim();
        let (name, e) = match tok.split_once('^') {
            Some((a, b)) => {
                let e: u32 = b
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad exponent in {s:?}")))?;
                (a.trim(), e)
            }
            None => (tok, 1),
        };
        if name == "1" {
            continue;
        }
        if name == GALOIS_GEN && allow_galois {
            g += e;
        } else if let Some(i) = vars.iter().position(|v| v == name) {
            exps[i] += e;
        } else {
            return Err(Error::InvalidSpec(format!("unknown symbol {name:?} in {s:?}")));
        }
    }
    Ok((g, exps))
}

fn divides(r: &[u32], m: &[u32]) -> bool {
    r.iter().zip(m).all(|(a, b)| a <= b)
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn reduce_i128(c: i128, q: u64) -> u64 {
    c.rem_euclid(q as i128) as u64
}

// ---- polynomials over F_p, lowest coefficient first ----

fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let (g, x, _) = egcd(a as i128, p as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(p as i128) as u64
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = fp_inv(b[db], p);
    while r.len() > db {
        let k = r.len() - 1;
        let c = mulmod(r[k], lead_inv, p);
        for i in 0..=db {
            let t = mulmod(c, b[i], p);
            r[k - db + i] = (r[k - db + i] + p - t) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_rem(&c, f, p)
}

fn fp_pow_p(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = a.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, f, p);
        }
        e >>= 1;
        if e > 0 {
            base = fp_mulmod(&base, &base, f, p);
        }
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test for a monic polynomial over F_p.
fn fp_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d <= 1 {
        return true;
    }
    // x^(p^k) mod f for k = 0..=d
    let x = fp_rem(&[0, 1], f, p);
    let mut frob = vec![x.clone()];
    for k in 0..d {
        let next = fp_pow_p(&frob[k], f, p);
        frob.push(next);
    }
    let sub_x = |a: &Vec<u64>| {
        let mut r = a.clone();
        r.resize(r.len().max(2), 0);
        r[1] = (r[1] + p - 1) % p;
        fp_trim(&mut r);
        r
    };
    if !sub_x(&frob[d]).is_empty() {
        return false;
    }
    for r in 2..=d {
        if d % r == 0 && is_prime(r as u64) {
            let g = fp_gcd(&sub_x(&frob[d / r]), f, p);
            if g.len() > 1 {
                return false;
            }
        }
    }
    true
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        if spec.n == 0 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        let q = p
            .checked_pow(spec.n)
            .filter(|q| *q < (1u64 << 62))
            .ok_or_else(|| Error::InvalidSpec("p^N does not fit in 62 bits".into()))?;
        for v in &spec.vars {
            if v == GALOIS_GEN || v == "1" || v.is_empty() || v.contains(['*', '^', ' ']) {
                return Err(Error::InvalidSpec(format!("illegal variable name {v:?}")));
            }
        }

        let (d, f) = match &spec.galois_poly {
            None => (1usize, vec![0u64, 1]),
            Some(c) => {
                if c.len() < 2 || *c.last().unwrap() != 1 {
                    return Err(Error::InvalidSpec("galois polynomial must be monic of degree >= 1".into()));
                }
                let fp: Vec<u64> = c.iter().map(|&x| reduce_i128(x as i128, p)).collect();
                if !fp_irreducible(&fp, p) {
                    return Err(Error::ReduciblePolynomial);
                }
                (c.len() - 1, c.iter().map(|&x| reduce_i128(x as i128, q)).collect())
            }
        };

        let nv = spec.vars.len();
        let mut rels = Vec::new();
        for r in &spec.relations {
            let (g, e) = parse_monomial(r, &spec.vars, false)?;
            debug_assert_eq!(g, 0);
            if e.iter().all(|&x| x == 0) {
                return Err(Error::InvalidSpec("relation 1 = 0 kills the ring".into()));
            }
            rels.push(e);
        }
        for i in 0..nv {
            let pure = rels.iter().any(|r| r[i] > 0 && r.iter().enumerate().all(|(j, &x)| j == i || x == 0));
            if !pure {
                return Err(Error::NonSaturatedRelations(format!(
                    "no pure power of {} is declared zero",
                    spec.vars[i]
                )));
            }
        }
        let survives = |m: &[u32]| !rels.iter().any(|r| divides(r, m));
        let mut nil = vec![vec![0u32; nv]];
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        seen.insert(nil[0].clone(), ());
        let mut queue = VecDeque::from(vec![nil[0].clone()]);
        while let Some(m) = queue.pop_front() {
            for i in 0..nv {
                let mut m2 = m.clone();
                m2[i] += 1;
                if survives(&m2) && !seen.contains_key(&m2) {
                    seen.insert(m2.clone(), ());
                    nil.push(m2.clone());
                    queue.push_back(m2);
                    if nil.len() > MAX_MONOMIALS {
                        return Err(Error::NonSaturatedRelations("too many surviving monomials".into()));
                    }
                }
            }
        }
        nil.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let nil_index: HashMap<Vec<u32>, usize> = nil.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let dim = nil.len() * d;

        // x^k reduced modulo f, k < 2d - 1
        let mut xpow: Vec<Vec<u64>> = Vec::new();
        let mut cur = vec![0u64; d];
        cur[0] = 1;
        for _ in 0..(2 * d).max(2) {
            xpow.push(cur.clone());
            // multiply by x
            let top = cur[d - 1];
            let mut next = vec![0u64; d];
            for i in 0..d {
                let shifted = if i > 0 { cur[i - 1] } else { 0 };
                next[i] = (shifted + q - mulmod(top, f[i], q)) % q;
            }
            cur = next;
        }

        let mut table = vec![Vec::new(); dim * dim];
        for (ia, ma) in nil.iter().enumerate() {
            for (ib, mb) in nil.iter().enumerate() {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                let Some(&im) = nil_index.get(&m) else { continue };
                for i in 0..d {
                    for j in 0..d {
                        let entry = &mut table[(ia * d + i) * dim + ib * d + j];
                        for (t, &c) in xpow[i + j].iter().enumerate() {
                            if c != 0 {
                                entry.push(((im * d + t) as u32, c));
                            }
                        }
                    }
                }
            }
        }

        let n = spec.n;
        let data = RingData {
            spec,
            p,
            n,
            q,
            d,
            f,
            nil,
            nil_index,
            dim,
            table,
            frob_images: vec![],
            galois_root: Elem(vec![]),
        };
        let ring = Ring(Arc::new(data));
        let root = ring.hensel_frobenius_root();
        let frob: Vec<Elem> = (0..dim)
            .map(|b| {
                let (mi, gi) = (b / d, b % d);
                let mon: Vec<u32> = ring.0.nil[mi].iter().map(|e| e * p as u32).collect();
                let g = ring.pow(&root, gi as u64);
                match ring.0.nil_index.get(&mon) {
                    Some(&j) => ring.mul(&g, &ring.basis(j * d)),
                    None => ring.zero(),
                }
            })
            .collect();
        let mut data = Arc::try_unwrap(ring.0).ok().expect("fresh ring has one owner");
        data.frob_images = frob;
        data.galois_root = root;
        Ok(Ring(Arc::new(data)))
    }

    // Root of f congruent to x^p modulo p, by Newton iteration.
    fn hensel_frobenius_root(&self) -> Elem {
        let d = self.0.d;
        if d == 1 {
            return self.galois_gen();
        }
        let mut r = self.pow(&self.galois_gen(), self.0.p);
        for _ in 0..128 {
            let fr = self.eval_galois_poly(&r, false);
            if self.is_zero(&fr) {
                return r;
            }
            let dfr = self.eval_galois_poly(&r, true);
            let inv = self.inv(&dfr).expect("f is separable modulo p");
            r = self.sub(&r, &self.mul(&fr, &inv));
        }
        panic!("Newton iteration for the Frobenius root did not converge");
    }

    fn eval_galois_poly(&self, r: &Elem, derivative: bool) -> Elem {
        let f = &self.0.f;
        let mut acc = self.zero();
        for k in (0..f.len()).rev() {
            let c = if derivative {
                if k == 0 {
                    continue;
                }
                mulmod(f[k], k as u64 % self.0.q, self.0.q)
            } else {
                f[k]
            };
            let deg = if derivative { k - 1 } else { k };
            acc = self.add(&acc, &self.scalar_mul(c, &self.pow(r, deg as u64)));
        }
        acc
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }
    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn precision(&self) -> u32 {
        self.0.n
    }
    /// p^N.
    pub fn modulus(&self) -> u64 {
        self.0.q
    }
    pub fn dim(&self) -> usize {
        self.0.dim
    }
    pub fn galois_degree(&self) -> usize {
        self.0.d
    }
    pub fn nil_monomials(&self) -> &[Vec<u32>] {
        &self.0.nil
    }

    /// Number of elements, if it fits in 128 bits.
    pub fn size(&self) -> Option<u128> {
        (self.0.q as u128).checked_pow(self.0.dim as u32)
    }

    pub fn basis(&self, i: usize) -> Elem {
        let mut v = vec![0u64; self.0.dim];
        v[i] = 1 % self.0.q;
        Elem(v)
    }

    pub fn galois_gen(&self) -> Elem {
        let d = self.0.d;
        if d == 1 {
            let mut v = vec![0u64; self.0.dim];
            v[0] = (self.0.q - self.0.f[0]) % self.0.q;
            Elem(v)
        } else {
            self.basis(1)
        }
    }

    pub fn var(&self, name: &str) -> Result<Elem> {
        let i = self
            .0
            .spec
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown variable {name}")))?;
        let mut m = vec![0u32; self.0.spec.vars.len()];
        m[i] = 1;
        Ok(match self.0.nil_index.get(&m) {
            Some(&j) => self.basis(j * self.0.d),
            None => self.zero(),
        })
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.0.dim).map(|b| self.basis_label(b)).collect()
    }

    fn basis_label(&self, b: usize) -> String {
        let d = self.0.d;
        let (mi, gi) = (b / d, b % d);
        let mut parts = Vec::new();
        match gi {
            0 => {}
            1 => parts.push(GALOIS_GEN.to_string()),
            k => parts.push(format!("{GALOIS_GEN}^{k}")),
        }
        for (v, &e) in self.0.spec.vars.iter().zip(&self.0.nil[mi]) {
            match e {
                0 => {}
                1 => parts.push(v.clone()),
                k => parts.push(format!("{v}^{k}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Builds an element from `{"monomial": coefficient}` pairs.
    pub fn elem_from_terms<'a, I>(&self, terms: I) -> Result<Elem>
    where
        I: IntoIterator<Item = (&'a str, &'a BigInt)>,
    {
        let mut acc = self.zero();
        for (mono, c) in terms {
            let (g, e) = parse_monomial(mono, &self.0.spec.vars, true)?;
            let mut t = self.from_bigint(c);
            t = self.mul(&t, &self.pow(&self.galois_gen(), g as u64));
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let v = self.var(&self.0.spec.vars[i])?;
                    t = self.mul(&t, &self.pow(&v, k as u64));
                }
            }
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Nonzero coefficients keyed by basis monomial.
    pub fn elem_to_terms(&self, a: &Elem) -> BTreeMap<String, u64> {
        a.0.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.basis_label(i), c))
            .collect()
    }

    pub fn format(&self, a: &Elem) -> String {
        let terms: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let l = self.basis_label(i);
                if l == "1" {
                    c.to_string()
                } else if c == 1 {
                    l
                } else {
                    format!("{c}*{l}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn check_elem(&self, a: &Elem) -> Result<()> {
        if a.0.len() != self.0.dim || a.0.iter().any(|&c| c >= self.0.q) {
            Err(Error::MixedRings)
        } else {
            Ok(())
        }
    }

    pub fn scalar_mul(&self, c: u64, a: &Elem) -> Elem {
        let q = self.0.q;
        Elem(a.0.iter().map(|&x| mulmod(x, c % q, q)).collect())
    }

    pub fn from_u64(&self, c: u64) -> Elem {
        let mut v = vec![0u64; self.0.dim];
        v[0] = c % self.0.q;
        Elem(v)
    }

    /// Same presentation at another precision.
    pub fn with_precision(&self, n: u32) -> Result<Ring> {
        let mut s = self.0.spec.clone();
        s.n = n;
        Ring::new(s)
    }

    /// Coefficientwise reduction from a ring of higher precision.
    pub fn reduce(&self, from: &Ring, a: &Elem) -> Elem {
        debug_assert_eq!(from.dim(), self.dim());
        let q = self.0.q;
        let _ = from;
        Elem(a.0.iter().map(|&c| c % q).collect())
    }

    /// The unit-group test: invertible exactly when the residue in F_{p^d} is nonzero.
    pub fn is_unit(&self, a: &Elem) -> bool {
        a.0[..self.0.d].iter().any(|&c| c % self.0.p != 0)
    }

    /// True iff every coefficient is divisible by p.
    pub fn in_p_multiple(&self, a: &Elem) -> bool {
        a.0.iter().all(|&c| c % self.0.p == 0)
    }

    /// The Frobenius lift: x goes to the root of f congruent to x^p, each
    /// nilpotent variable goes to its p-th power, coefficients are fixed.
    pub fn frobenius_lift(&self, a: &Elem) -> Elem {
        let mut acc = self.zero();
        for (b, &c) in a.0.iter().enumerate() {
            if c != 0 {
                acc = self.add(&acc, &self.scalar_mul(c, &self.0.frob_images[b]));
            }
        }
        acc
    }

    pub fn galois_frobenius_root(&self) -> &Elem {
        &self.0.galois_root
    }

    /// Images of the basis under the ring map determined by the images of
    /// the Galois generator and the variables; checks it is well defined.
    pub fn hom_basis_images(&self, gen_img: &Elem, var_imgs: &[Elem]) -> Result<Vec<Elem>> {
        if var_imgs.len() != self.0.spec.vars.len() {
            return Err(Error::ShapeMismatch("one image per variable".into()));
        }
        if !self.is_zero(&self.eval_poly_at(gen_img)) {
            return Err(Error::InvalidSpec("generator image is not a root of the galois polynomial".into()));
        }
        let mono_img = |m: &[u32]| {
            m.iter()
                .zip(var_imgs)
                .fold(self.one(), |acc, (&e, v)| self.mul(&acc, &self.pow(v, e as u64)))
        };
        for r in &self.0.spec.relations {
            let (_, e) = parse_monomial(r, &self.0.spec.vars, false)?;
            if !self.is_zero(&mono_img(&e)) {
                return Err(Error::InvalidSpec(format!("relation {r} is not preserved")));
            }
        }
        let d = self.0.d;
        Ok((0..self.0.dim)
            .map(|b| {
                let (mi, gi) = (b / d, b % d);
                self.mul(&self.pow(gen_img, gi as u64), &mono_img(&self.0.nil[mi]))
            })
            .collect())
    }

    fn eval_poly_at(&self, r: &Elem) -> Elem {
        if self.0.spec.galois_poly.is_none() {
            return self.zero();
        }
        self.eval_galois_poly(r, false)
    }

    /// Applies a linear map given by basis images.
    pub fn apply_basis_map(&self, images: &[Elem], a: &Elem) -> Elem {
        let mut acc = self.zero();
        for (b, &c) in a.0.iter().enumerate() {
            if c != 0 {
                acc = self.add(&acc, &self.scalar_mul(c, &images[b]));
            }
        }
        acc
    }

    pub fn elements(&self) -> Result<ElemIter> {
        match self.size() {
            Some(s) if s <= ENUMERATION_CAP => Ok(ElemIter { q: self.0.q, cur: Some(vec![0; self.0.dim]) }),
            _ => Err(Error::SizeOverflow(format!("{:?}", self.size()))),
        }
    }

    /// The p-adic valuation of the content of a (N if a = 0).
    pub fn valuation(&self, a: &Elem) -> u32 {
        a.0.iter()
            .filter(|&&c| c != 0)
            .map(|&c| crate::algebra::vp_u64(c, self.0.p))
            .min()
            .unwrap_or(self.0.n)
    }
}

pub struct ElemIter {
    q: u64,
    cur: Option<Vec<u64>>,
}

impl Iterator for ElemIter {
    type Item = Elem;
    fn next(&mut self) -> Option<Elem> {
        let cur = self.cur.as_mut()?;
        let out = Elem(cur.clone());
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.q {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

impl CRing for Ring {
    type E = Elem;

    fn prime(&self) -> u64 {
        self.0.p
    }
    fn zero(&self) -> Elem {
        Elem(vec![0; self.0.dim])
    }
    fn one(&self) -> Elem {
        self.from_u64(1)
    }
    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let q = self.0.q;
        Elem(a.0.iter().zip(&b.0).map(|(&x, &y)| {
            let s = x + y;
            if s >= q { s - q } else { s }
        }).collect())
    }
    fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let q = self.0.q;
        Elem(a.0.iter().zip(&b.0).map(|(&x, &y)| if x >= y { x - y } else { x + q - y }).collect())
    }
    fn neg(&self, a: &Elem) -> Elem {
        let q = self.0.q;
        Elem(a.0.iter().map(|&x| if x == 0 { 0 } else { q - x }).collect())
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let dim = self.0.dim;
        let q = self.0.q as u128;
        if dim == 1 {
            return Elem(vec![((a.0[0] as u128 * b.0[0] as u128) % q) as u64]);
        }
        let mut acc = vec![0u128; dim];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let xy = (x as u128 * y as u128) % q;
                for &(k, c) in &self.0.table[i * dim + j] {
                    let slot = &mut acc[k as usize];
                    *slot = (*slot + xy * c as u128) % q;
                }
            }
        }
        Elem(acc.into_iter().map(|c| c as u64).collect())
    }
    fn from_bigint(&self, n: &BigInt) -> Elem {
        let q = BigInt::from(self.0.q);
        let r = n.mod_floor(&q).to_u64().unwrap();
        self.from_u64(r)
    }
    fn from_i64(&self, n: i64) -> Elem {
        self.from_u64(reduce_i128(n as i128, self.0.q))
    }
    fn is_zero(&self, a: &Elem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn inv(&self, a: &Elem) -> Option<Elem> {
        if !self.is_unit(a) {
            return None;
        }
        // a^(|k|-2) inverts a modulo the maximal ideal; Newton does the rest.
        let residue_order = self.0.p.checked_pow(self.0.d as u32)?;
        let mut b = self.pow(a, residue_order - 2);
        let two = self.from_u64(2);
        for _ in 0..128 {
            let ab = self.mul(a, &b);
            if ab == self.one() {
                return Some(b);
            }
            b = self.mul(&b, &self.sub(&two, &ab));
        }
        panic!("Newton inversion did not converge");
    }
    fn cover(&self, extra: u32) -> Option<Ring> {
        self.with_precision(self.0.n + extra).ok()
    }
    fn lift_into(&self, cover: &Ring, a: &Elem) -> Elem {
        debug_assert!(cover.dim() == self.dim());
        a.clone()
    }
    fn reduce_from(&self, cover: &Ring, a: &Elem) -> Elem {
        self.reduce(cover, a)
    }
    fn div_p_pow(&self, a: &Elem, k: u32) -> Result<Elem> {
        if k > 0 && k >= self.0.n {
            return Err(Error::PrecisionExhausted);
        }
        let pk = self.0.p.pow(k);
        let mut out = Vec::with_capacity(a.0.len());
        for &c in &a.0 {
            if c % pk != 0 {
                return Err(Error::InexactDivision);
            }
            out.push(c / pk);
        }
        Ok(Elem(out))
    }
}

impl Ring {
    /// Exact integer coefficients of an element, for lifting.
    pub fn coeffs_bigint(&self, a: &Elem) -> Vec<BigInt> {
        a.0.iter().map(|&c| BigInt::from(c)).collect()
    }
}
