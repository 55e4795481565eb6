//! Divided power structures on ideals of finite coefficient rings.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, vp_factorial, CRing};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ring::{Elem, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PdRule {
    /// gamma_k = 0 for k >= 2.
    Trivial,
    /// gamma_k(x) = x^k / k! computed through x = p y.
    Canonical,
    /// gamma_k on ideal generators for k = 2..=values.len()+1, extended by
    /// additivity and gamma_k(a g) = a^k gamma_k(g). Past the table the rule
    /// is zero if `zero_tail`, undefined otherwise.
    Table { gens: Vec<Elem>, values: Vec<Vec<Elem>>, zero_tail: bool },
}

#[derive(Clone, Debug)]
pub struct PdIdeal {
    ideal: Ideal,
    rule: PdRule,
    // module generators b*g with their tabulated divided powers
    table: Option<TableData>,
}

#[derive(Clone, Debug)]
struct TableData {
    mods: Vec<(Elem, Vec<Elem>)>,
}

fn mod_inverse(u: u64, q: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (q as i128, (u % q) as i128);
    while nr != 0 {
        let k = r / nr;
        (t, nt) = (nt, t - k * nt);
        (r, nr) = (nr, r - k * nr);
    }
    t.rem_euclid(q as i128) as u64
}

impl PdIdeal {
    /// The trivial rule, accepted only when a^2 = 0 and p a = 0.
    pub fn trivial(ideal: Ideal) -> Result<PdIdeal> {
        let sq = ideal.product(&ideal)?;
        if !sq.is_zero() {
            return Err(Error::PdInvalid("trivial rule needs a^2 = 0".into()));
        }
        if !ideal.times_p().is_zero() {
            return Err(Error::PdInvalid("trivial rule needs p a = 0".into()));
        }
        Ok(Self::trivial_unchecked(ideal))
    }

    /// The trivial rule without its preconditions, for validation probes.
    pub fn trivial_unchecked(ideal: Ideal) -> PdIdeal {
        PdIdeal { ideal, rule: PdRule::Trivial, table: None }
    }

    /// x^k / k! on an ideal contained in pR.
    pub fn canonical(ideal: Ideal) -> Result<PdIdeal> {
        let r = ideal.ring().clone();
        if !ideal.generators().iter().all(|g| r.in_p_multiple(g)) {
            return Err(Error::PdInvalid("canonical rule needs the ideal inside pR".into()));
        }
        Ok(PdIdeal { ideal, rule: PdRule::Canonical, table: None })
    }

    /// The canonical rule on pR itself.
    pub fn canonical_p(ring: &Ring) -> PdIdeal {
        Self::canonical(Ideal::p_power(ring, 1)).expect("pR lies in pR")
    }

    pub fn table(ideal: Ideal, gens: Vec<Elem>, values: Vec<Vec<Elem>>, zero_tail: bool) -> Result<PdIdeal> {
        let ring = ideal.ring().clone();
        if gens.len() != values.len() {
            return Err(Error::ShapeMismatch("one value list per generator".into()));
        }
        if Ideal::new(&ring, &gens)? != ideal {
            return Err(Error::PdInvalid("table generators do not generate the ideal".into()));
        }
        let mut mods = Vec::new();
        for (g, vals) in gens.iter().zip(&values) {
            for b in 0..ring.dim() {
                let bb = ring.basis(b);
                let m = ring.mul(&bb, g);
                let scaled: Vec<Elem> =
                    vals.iter().enumerate().map(|(i, v)| ring.mul(&ring.pow(&bb, i as u64 + 2), v)).collect();
                mods.push((m, scaled));
            }
        }
        let rule = PdRule::Table { gens, values, zero_tail };
        Ok(PdIdeal { ideal, rule, table: Some(TableData { mods }) })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }
    pub fn ring(&self) -> &Ring {
        self.ideal.ring()
    }
    pub fn rule(&self) -> &PdRule {
        &self.rule
    }

    /// gamma_k(x).
    pub fn eval(&self, k: u64, x: &Elem) -> Result<Elem> {
        if !self.ideal.contains(x) {
            return Err(Error::NotInIdeal);
        }
        self.eval_unchecked(k, x)
    }

    fn eval_unchecked(&self, k: u64, x: &Elem) -> Result<Elem> {
        let r = self.ring();
        if k == 0 {
            return Ok(r.one());
        }
        if k == 1 {
            return Ok(x.clone());
        }
        match &self.rule {
            PdRule::Trivial => Ok(r.zero()),
            PdRule::Canonical => Ok(canonical_gamma(r, k, x)),
            PdRule::Table { zero_tail, values, .. } => {
                let kmax = values.first().map_or(1, |v| v.len() as u64 + 1);
                let data = self.table.as_ref().expect("table data present");
                let coeffs = decompose(r, &data.mods, x).ok_or(Error::NotInIdeal)?;
                // product of the truncated series sum_j c^j gamma_j(m)
                let mut series = vec![r.zero(); k as usize + 1];
                series[0] = r.one();
                for ((m, vals), c) in data.mods.iter().zip(coeffs) {
                    if c == 0 {
                        continue;
                    }
                    let cm = r.scalar_mul(c, m);
                    let mut s = vec![r.one(), cm];
                    for j in 2..=k {
                        let g = if j <= kmax {
                            vals[j as usize - 2].clone()
                        } else if *zero_tail {
                            r.zero()
                        } else {
                            return Err(Error::RuleUndefined(j));
                        };
                        s.push(r.mul(&r.pow(&r.from_u64(c), j), &g));
                    }
                    let mut next = vec![r.zero(); k as usize + 1];
                    for (a, sa) in series.iter().enumerate() {
                        if r.is_zero(sa) {
                            continue;
                        }
                        for (b, sb) in s.iter().enumerate().take(k as usize + 1 - a) {
                            next[a + b] = r.add(&next[a + b], &r.mul(sa, sb));
                        }
                    }
                    series = next;
                }
                Ok(series.pop().unwrap())
            }
        }
    }

    /// Checks axioms (i)-(iv) and closure for divided powers up to `n_max`.
    /// Exhaustive on rings of at most 2^16 elements while the pair counts
    /// stay below 2^22, sampled otherwise.
    pub fn validate(&self, n_max: u64, seed: u64) -> Result<ValidationReport> {
        let r = self.ring().clone();
        let members = self.ideal.elements()?;
        let all: Vec<Elem> = r.elements()?.collect();
        let budget = 1usize << 22;
        let exhaustive =
            all.len() <= 1 << 16 && members.len() * members.len() <= budget && all.len() * members.len() <= budget;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ValidationReport { exhaustive, cases: 0, violations: vec![] };

        let mut gamma: HashMap<Elem, Vec<Option<Elem>>> = HashMap::new();
        let mut table_for = |x: &Elem, report: &mut ValidationReport| -> Vec<Option<Elem>> {
            gamma
                .entry(x.clone())
                .or_insert_with(|| {
                    (0..=n_max)
                        .map(|k| match self.eval_unchecked(k, x) {
                            Ok(v) => {
                                if k >= 1 && !self.ideal.contains(&v) {
                                    report.push(0, k, 0, x, None, "gamma value leaves the ideal");
                                }
                                Some(v)
                            }
                            Err(e) => {
                                report.push(0, k, 0, x, None, e.name());
                                None
                            }
                        })
                        .collect()
                })
                .clone()
        };

        let pairs = |a: &[Elem], b: &[Elem], rng: &mut ChaCha8Rng| -> Vec<(Elem, Elem)> {
            if exhaustive {
                a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).collect()
            } else {
                (0..4096)
                    .map(|_| (a.choose(rng).unwrap().clone(), b.choose(rng).unwrap().clone()))
                    .collect()
            }
        };

        // (i) additivity
        for (x, y) in pairs(&members, &members, &mut rng) {
            let gx = table_for(&x, &mut report);
            let gy = table_for(&y, &mut report);
            let gs = table_for(&r.add(&x, &y), &mut report);
            for n in 1..=n_max as usize {
                report.cases += 1;
                let mut rhs = r.zero();
                let mut defined = gs[n].is_some() && gx[n].is_some() && gy[n].is_some();
                for k in 1..n {
                    match (&gx[k], &gy[n - k]) {
                        (Some(a), Some(b)) => rhs = r.add(&rhs, &r.mul(a, b)),
                        _ => defined = false,
                    }
                }
                if defined {
                    let lhs = r.sub(&r.sub(gs[n].as_ref().unwrap(), gx[n].as_ref().unwrap()), gy[n].as_ref().unwrap());
                    if lhs != rhs {
                        report.push(1, n as u64, 0, &x, Some(&y), "additivity");
                    }
                }
            }
        }
        // (ii) homogeneity
        for (a, y) in pairs(&all, &members, &mut rng) {
            let gy = table_for(&y, &mut report);
            let gay = table_for(&r.mul(&a, &y), &mut report);
            for n in 1..=n_max as usize {
                report.cases += 1;
                if let (Some(u), Some(v)) = (&gay[n], &gy[n]) {
                    if *u != r.mul(&r.pow(&a, n as u64), v) {
                        report.push(2, n as u64, 0, &a, Some(&y), "homogeneity");
                    }
                }
            }
        }
        // (iii) n! gamma_n(x) = x^n and (iv) composition
        let singles: Vec<Elem> = if exhaustive {
            members.clone()
        } else {
            (0..4096).map(|_| members.choose(&mut rng).unwrap().clone()).collect()
        };
        for x in &singles {
            let gx = table_for(x, &mut report);
            for n in 1..=n_max as usize {
                report.cases += 1;
                if let Some(v) = &gx[n] {
                    if r.mul(&r.from_bigint(&factorial(n as u64)), v) != r.pow(x, n as u64) {
                        report.push(3, n as u64, 0, x, None, "n! gamma_n(x) = x^n");
                    }
                }
            }
            for n in 1..=n_max {
                for m in 1..=n_max / n {
                    report.cases += 1;
                    let Some(gn) = &gx[n as usize] else { continue };
                    let Some(gmn) = &gx[(m * n) as usize] else { continue };
                    if !self.ideal.contains(gn) {
                        continue;
                    }
                    let Ok(lhs) = self.eval_unchecked(m, gn) else { continue };
                    let c = factorial(m * n) / (factorial(m) * factorial(n).pow(m as u32));
                    if lhs != r.mul(&r.from_bigint(&c), gmn) {
                        report.push(4, n, m, x, None, "composition");
                    }
                }
            }
        }
        Ok(report)
    }
}

fn canonical_gamma(r: &Ring, k: u64, x: &Elem) -> Elem {
    let p = r.p();
    let n = r.precision();
    let v = vp_factorial(k, p) as u64;
    // x^k / k! = p^(k-v) y^k / u with x = p y and k! = p^v u
    if k - v >= n as u64 {
        return r.zero();
    }
    let q = r.modulus();
    let y = Elem(x.0.iter().map(|&c| c / p).collect());
    let mut u = 1u64;
    for i in 1..=k {
        let mut f = i;
        while f % p == 0 {
            f /= p;
        }
        u = ((u as u128 * (f % q) as u128) % q as u128) as u64;
    }
    let scale = ((p.pow((k - v) as u32) as u128 * mod_inverse(u, q) as u128) % q as u128) as u64;
    r.scalar_mul(scale, &r.pow(&y, k))
}

// Integer coefficients of x over the given module generators.
fn decompose(r: &Ring, mods: &[(Elem, Vec<Elem>)], x: &Elem) -> Option<Vec<u64>> {
    let dim = r.dim();
    let q = r.modulus();
    let p = r.p();
    let g = mods.len();
    let mut rows: Vec<Vec<u64>> = mods
        .iter()
        .enumerate()
        .map(|(j, (m, _))| {
            let mut v = m.0.clone();
            v.resize(dim + g, 0);
            v[dim + j] = 1;
            v
        })
        .collect();
    // Howell elimination restricted to the left block keeps track of combinations.
    let mut target: Vec<u64> = x.0.clone();
    target.resize(dim + g, 0);
    let vp = |c: u64| crate::algebra::vp_u64(c, p);
    for col in 0..dim {
        let best = rows.iter().enumerate().filter(|(_, v)| v[col] != 0).min_by_key(|(_, v)| vp(v[col])).map(|(i, _)| i);
        let Some(bi) = best else {
            if target[col] != 0 {
                return None;
            }
            continue;
        };
        let piv = rows.swap_remove(bi);
        let val = vp(piv[col]);
        let pv = p.pow(val);
        let u = mod_inverse(piv[col] / pv, q);
        let piv: Vec<u64> = piv.iter().map(|&c| ((c as u128 * u as u128) % q as u128) as u64).collect();
        let sub = |v: &mut Vec<u64>, a: u64| {
            for (vi, &pi) in v.iter_mut().zip(&piv) {
                let t = ((a as u128 * pi as u128) % q as u128) as u64;
                *vi = (*vi + q - t) % q;
            }
        };
        for v in rows.iter_mut() {
            if v[col] != 0 {
                let a = v[col] / pv;
                sub(v, a);
            }
        }
        let shift = p.pow(r.precision() - val);
        let ann: Vec<u64> = piv.iter().map(|&c| ((c as u128 * shift as u128) % q as u128) as u64).collect();
        if ann.iter().any(|&c| c != 0) {
            rows.push(ann);
        }
        if target[col] % pv != 0 {
            return None;
        }
        let a = target[col] / pv;
        sub(&mut target, a);
    }
    // target = [0 | -coefficients]
    Some(target[dim..].iter().map(|&c| (q - c) % q).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 0 for closure or evaluation failures, 1..=4 for the axioms.
    pub axiom: u8,
    pub n: u64,
    pub m: u64,
    pub x: Elem,
    pub y: Option<Elem>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub exhaustive: bool,
    pub cases: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// A report carrying a single structural failure.
    pub fn failed(detail: String) -> Self {
        let x = Elem(vec![]);
        ValidationReport { exhaustive: false, cases: 0, violations: vec![Violation { axiom: 0, n: 0, m: 0, x, y: None, detail }] }
    }

    fn push(&mut self, axiom: u8, n: u64, m: u64, x: &Elem, y: Option<&Elem>, detail: &str) {
        self.violations.push(Violation { axiom, n, m, x: x.clone(), y: y.cloned(), detail: detail.into() });
    }
}
