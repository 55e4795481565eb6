//! The torsion ideal chain a_n and the valuations v_r on a finite-support
//! model of rational Witt vectors over Laurent series in t over F_q.
//!
//! Model: an element is a finite sum of p^i [a_i] with a_i a Laurent
//! polynomial in t with exponents in Z[1/p]. Addition merges terms of equal
//! index, products are p^i [a] p^j [b] = p^(i+j) [ab], and F raises every
//! a_i to the p-th power. v_r(x) = min_i (r i + v(a_i)) with v the t-adic
//! valuation.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebra::CRing;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{Elem, Ring};

/// A Laurent polynomial: exponent to nonzero coefficient.
pub type Laurent = BTreeMap<Rational64, Elem>;

#[derive(Clone)]
pub struct BiWitt {
    field: Ring,
    terms: BTreeMap<i64, Laurent>,
}

impl PartialEq for BiWitt {
    fn eq(&self, other: &BiWitt) -> bool {
        self.terms == other.terms
    }
}

impl Eq for BiWitt {}

impl std::fmt::Debug for BiWitt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self))
    }
}

impl BiWitt {
    /// `field` must be F_q (precision 1).
    pub fn zero(field: &Ring) -> BiWitt {
        BiWitt { field: field.clone(), terms: BTreeMap::new() }
    }

    /// c p^i [t^e].
    pub fn monomial(field: &Ring, i: i64, e: Rational64, c: Elem) -> BiWitt {
        let mut x = BiWitt::zero(field);
        if !field.is_zero(&c) {
            x.terms.insert(i, BTreeMap::from([(e, c)]));
        }
        x
    }

    /// p^i [t^e].
    pub fn p_t(field: &Ring, i: i64, e: Rational64) -> BiWitt {
        BiWitt::monomial(field, i, e, field.one())
    }

    pub fn field(&self) -> &Ring {
        &self.field
    }
    pub fn terms(&self) -> &BTreeMap<i64, Laurent> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, i: i64, e: Rational64, c: Elem) {
        let f = &self.field;
        let a = self.terms.entry(i).or_default();
        let cur = a.remove(&e).unwrap_or_else(|| f.zero());
        let s = f.add(&cur, &c);
        if !f.is_zero(&s) {
            a.insert(e, s);
        }
        if a.is_empty() {
            self.terms.remove(&i);
        }
    }

    pub fn add(&self, y: &BiWitt) -> BiWitt {
        let mut out = self.clone();
        for (&i, a) in &y.terms {
            for (&e, c) in a {
                out.insert(i, e, c.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> BiWitt {
        let f = &self.field;
        BiWitt {
            field: f.clone(),
            terms: self.terms.iter().map(|(&i, a)| (i, a.iter().map(|(&e, c)| (e, f.neg(c))).collect())).collect(),
        }
    }

    pub fn sub(&self, y: &BiWitt) -> BiWitt {
        self.add(&y.neg())
    }

    pub fn mul(&self, y: &BiWitt) -> BiWitt {
        let f = &self.field;
        let mut out = BiWitt::zero(f);
        for (&i, a) in &self.terms {
            for (&j, b) in &y.terms {
                for (&e, c) in a {
                    for (&g, d) in b {
                        out.insert(i + j, e + g, f.mul(c, d));
                    }
                }
            }
        }
        out
    }

    /// Multiplication by p^k.
    pub fn shift(&self, k: i64) -> BiWitt {
        BiWitt { field: self.field.clone(), terms: self.terms.iter().map(|(&i, a)| (i + k, a.clone())).collect() }
    }

    /// F: every a_i goes to a_i^p.
    pub fn frobenius(&self) -> BiWitt {
        let f = &self.field;
        let p = f.p();
        let mut out = BiWitt::zero(f);
        for (&i, a) in &self.terms {
            for (&e, c) in a {
                out.insert(i, e * Rational64::from(p as i64), f.pow(c, p));
            }
        }
        out
    }

    /// v_r(x) = min_i (r i + v(a_i)); None stands for infinity.
    pub fn v_r(&self, r: Rational64) -> Option<Rational64> {
        self.terms.iter().map(|(&i, a)| r * Rational64::from(i) + *a.keys().next().unwrap()).min()
    }

    /// Whether x models an element of W(t k[[t]]): i >= 0, every exponent
    /// positive, and a_i^(p^i) a power series in t.
    pub fn in_w_tkt(&self) -> bool {
        let p = self.field.p() as i64;
        self.terms.iter().all(|(&i, a)| {
            i >= 0 && a.keys().all(|e| e.is_positive() && (*e * Rational64::from(p.pow(i as u32))).is_integer())
        })
    }

    /// Entries in W(k[[t]]): i >= 0 and exponents >= 0.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(&i, a)| i >= 0 && a.keys().all(|e| !e.is_negative()))
    }
}

/// v_r(F x) = p v_(r/p)(x).
pub fn vr_frobenius_scaling(x: &BiWitt, r: Rational64) -> bool {
    let p = Rational64::from(x.field.p() as i64);
    x.frobenius().v_r(r) == x.v_r(r / p).map(|v| v * p)
}

/// (r / log p)(1 + log log p - log r), rounded upward.
pub fn vr_bound_upper(p: u64, r: f64) -> f64 {
    let lp = (p as f64).ln();
    let b = (r / lp) * (1.0 + lp.ln() - r.ln());
    // a few ulps of slack cover the rounding of ln and the products
    b + b.abs() * 16.0 * f64::EPSILON + f64::MIN_POSITIVE
}

/// v_r(x) >= (r / log p)(1 + log log p - log r) for x in W(t k[[t]]), with
/// the real side rounded outward.
pub fn vr_lower_bound_check(x: &BiWitt, r: Rational64) -> Result<bool> {
    if !x.in_w_tkt() {
        return Err(Error::ConventionViolation);
    }
    if !r.is_positive() {
        return Err(Error::InvalidSpec("r must be positive".into()));
    }
    let Some(v) = x.v_r(r) else { return Ok(true) };
    let bound = vr_bound_upper(x.field.p(), r.to_f64().unwrap());
    let v_down = v.to_f64().unwrap() * (1.0 - 4.0 * f64::EPSILON) - f64::MIN_POSITIVE;
    Ok(v_down >= bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionChain {
    pub n: u32,
    pub members: Vec<Elem>,
    pub generators: Vec<Elem>,
    /// The scanned set equals the ideal it generates.
    pub is_ideal: bool,
}

/// a_n = {x : p^(n-k) x^(p^k) = 0 for 0 <= k <= n}, by scan, with the ideal
/// property verified by comparing against the ideal the set generates.
pub fn torsion_ideal_chain(r: &Ring, n: u32) -> Result<(TorsionChain, Ideal)> {
    let p = r.p();
    let members: Vec<Elem> = r
        .elements()?
        .filter(|x| {
            (0..=n).all(|k| {
                let xp = r.pow(x, p.pow(k));
                r.is_zero(&r.scale(p.pow(n - k) as i64, &xp))
            })
        })
        .collect();
    let ideal = Ideal::new(r, &members)?;
    let mut closure = ideal.elements()?;
    closure.sort();
    let mut sorted = members.clone();
    sorted.sort();
    let is_ideal = closure == sorted;
    Ok((TorsionChain { n, members: sorted, generators: ideal.generators(), is_ideal }, ideal))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidReport {
    pub only_zero: bool,
    /// F_p-dimension of the candidate space searched.
    pub candidates_dim: usize,
    /// F_p-dimension of the solution space found in it.
    pub solutions_dim: usize,
    /// Entries of a nonzero solution, rendered, when one exists.
    pub witness: Option<Vec<String>>,
    /// (n, n r + (r / log p)(1 + log log p - log r)) at r = 1.
    pub growth: Vec<(u32, f64)>,
}

fn mat_vec(b: &[Vec<BiWitt>], x: &[BiWitt]) -> Vec<BiWitt> {
    b.iter()
        .map(|row| row.iter().zip(x).fold(BiWitt::zero(&x[0].field), |acc, (bij, xj)| acc.add(&bij.mul(xj))))
        .collect()
}

fn mat_mul(a: &[Vec<BiWitt>], b: &[Vec<BiWitt>]) -> Vec<Vec<BiWitt>> {
    let n = b.len();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..n).fold(BiWitt::zero(&a[i][0].field), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// Searches the candidate space of vectors with entries sum c p^i [t^e],
/// -T <= i < T, e in (1/p) Z with 0 < e <= T, for solutions of x = B F(x).
/// The map x -> B F(x) - x is F_p-linear in the model, so the search is a
/// kernel computation over F_p covering every candidate.
pub fn rigid_solve_check(b: &[Vec<BiWitt>], s: u32, t: u32, growth_limit: u32) -> Result<RigidReport> {
    let d = b.len();
    if d == 0 || b.iter().any(|row| row.len() != d) || s == 0 {
        return Err(Error::ShapeMismatch("B must be square and s positive".into()));
    }
    let field = b[0][0].field.clone();
    let p = field.p();
    let mut c = b.to_vec();
    let mut fb = b.to_vec();
    for _ in 1..s {
        fb = fb.iter().map(|row| row.iter().map(|x| x.frobenius()).collect()).collect();
        c = mat_mul(&c, &fb);
    }
    if !c.iter().flatten().all(|x| x.shift(s as i64 - 1).is_integral()) {
        return Err(Error::HypothesisViolated("p^(s-1) B F(B) ... F^(s-1)(B) is not integral".into()));
    }
    let (ti, pi) = (t as i64, p as i64);
    let mut basis: Vec<Vec<BiWitt>> = Vec::new();
    for entry in 0..d {
        for i in -ti..ti {
            for k in 1..=ti * pi {
                for fb in 0..field.dim() {
                    let mut v = vec![BiWitt::zero(&field); d];
                    v[entry] = BiWitt::monomial(&field, i, Rational64::new(k, pi), field.basis(fb));
                    basis.push(v);
                }
            }
        }
    }
    // coordinates of L(v) - v over the union of (entry, i, e, basis) keys
    let images: Vec<Vec<BiWitt>> = basis
        .iter()
        .map(|v| {
            let fx: Vec<BiWitt> = v.iter().map(|x| x.frobenius()).collect();
            mat_vec(b, &fx).iter().zip(v).map(|(l, x)| l.sub(x)).collect()
        })
        .collect();
    let mut keys: BTreeMap<(usize, i64, Rational64, usize), usize> = BTreeMap::new();
    for img in &images {
        for (entry, x) in img.iter().enumerate() {
            for (&i, a) in &x.terms {
                for (&e, cf) in a {
                    for (fb, &co) in cf.0.iter().enumerate() {
                        if co % p != 0 {
                            let next = keys.len();
                            keys.entry((entry, i, e, fb)).or_insert(next);
                        }
                    }
                }
            }
        }
    }
    let cols: Vec<Vec<u64>> = images
        .iter()
        .map(|img| {
            let mut col = vec![0u64; keys.len()];
            for (entry, x) in img.iter().enumerate() {
                for (&i, a) in &x.terms {
                    for (&e, cf) in a {
                        for (fb, &co) in cf.0.iter().enumerate() {
                            if co % p != 0 {
                                col[keys[&(entry, i, e, fb)]] = co % p;
                            }
                        }
                    }
                }
            }
            col
        })
        .collect();
    let kernel = kernel_mod_p(&cols, keys.len(), p);
    let witness = kernel.first().map(|k| {
        let mut x = vec![BiWitt::zero(&field); d];
        for (idx, &coef) in k.iter().enumerate() {
            if coef != 0 {
                for (entry, term) in basis[idx].iter().enumerate() {
                    for _ in 0..coef {
                        x[entry] = x[entry].add(term);
                    }
                }
            }
        }
        x.iter().map(render).collect()
    });
    let lp = (p as f64).ln();
    let growth = (0..=growth_limit).map(|n| (n, n as f64 + (1.0 / lp) * (1.0 + lp.ln()))).collect();
    Ok(RigidReport { only_zero: kernel.is_empty(), candidates_dim: basis.len(), solutions_dim: kernel.len(), witness, growth })
}

// Basis of {c : sum_j c_j cols[j] = 0} over F_p.
fn kernel_mod_p(cols: &[Vec<u64>], rows: usize, p: u64) -> Vec<Vec<u64>> {
    let n = cols.len();
    // augmented rows: [col_j | e_j], eliminate on the first `rows` coordinates
    let mut m: Vec<Vec<u64>> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let mut r = c.clone();
            r.extend((0..n).map(|k| u64::from(k == j)));
            r
        })
        .collect();
    let inv = |a: u64| (1..p).find(|b| a * b % p == 1).unwrap();
    let mut row = 0;
    for col in 0..rows {
        let Some(piv) = (row..n).find(|&i| m[i][col] != 0) else { continue };
        m.swap(row, piv);
        let c = inv(m[row][col]);
        for x in m[row].iter_mut() {
            *x = *x * c % p;
        }
        let pivot = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i != row && r[col] != 0 {
                let f = r[col];
                for (x, y) in r.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        row += 1;
    }
    m.into_iter().skip(row).map(|r| r[rows..].to_vec()).collect()
}

/// Canonical text form: terms "p^i[c t^e]" joined by " + ", lowest index first.
pub fn render(x: &BiWitt) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (&i, a) in &x.terms {
        for (&e, c) in a {
            parts.push(format!("p^{i}[({}) t^{e}]", x.field.format(c)));
        }
    }
    parts.join(" + ")
}
