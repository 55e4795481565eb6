//! Small finite rings as addition and multiplication tables over element
//! indices, for exhaustive checks.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::algebra::CRing;
use crate::error::{Error, Result};

/// Tables larger than this many elements are refused.
pub const TABLE_CAP: usize = 1 << 12;

struct Tables {
    p: u64,
    n: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<Option<u32>>,
    // k * 1 for k below the additive order of 1
    ints: Vec<u32>,
    zero: u32,
    one: u32,
}

#[derive(Clone)]
pub struct TableRing(Arc<Tables>);

impl std::fmt::Debug for TableRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TableRing({} elements)", self.0.n)
    }
}

/// A table ring together with the element lists translating indices.
pub struct Tabulated<E> {
    pub ring: TableRing,
    pub elements: Vec<E>,
    pub index: HashMap<E, u32>,
}

impl<E: Clone + Eq + Hash> Tabulated<E> {
    pub fn idx(&self, e: &E) -> u32 {
        self.index[e]
    }
    pub fn elem(&self, i: u32) -> &E {
        &self.elements[i as usize]
    }
}

impl TableRing {
    /// Tabulates a finite ring from the complete list of its elements.
    pub fn build<R: CRing>(r: &R, elements: Vec<R::E>) -> Result<Tabulated<R::E>> {
        let n = elements.len();
        if n > TABLE_CAP {
            return Err(Error::SizeOverflow(n.to_string()));
        }
        let index: HashMap<R::E, u32> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i as u32)).collect();
        if index.len() != n {
            return Err(Error::InvalidSpec("duplicate elements".into()));
        }
        let look = |e: &R::E| index.get(e).copied().ok_or(Error::MixedRings);
        let mut add = Vec::with_capacity(n * n);
        let mut mul = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                add.push(look(&r.add(a, b))?);
                mul.push(look(&r.mul(a, b))?);
            }
        }
        let neg = elements.iter().map(|a| look(&r.neg(a))).collect::<Result<Vec<_>>>()?;
        let zero = look(&r.zero())?;
        let one = look(&r.one())?;
        let inv = (0..n as u32)
            .map(|a| (0..n as u32).find(|&b| mul[a as usize * n + b as usize] == one))
            .collect();
        let mut ints = vec![zero];
        let mut cur = one;
        while cur != zero {
            ints.push(cur);
            cur = add[cur as usize * n + one as usize];
        }
        let ring = TableRing(Arc::new(Tables { p: r.prime(), n, add, mul, neg, inv, ints, zero, one }));
        Ok(Tabulated { ring, elements, index })
    }

    pub fn size(&self) -> usize {
        self.0.n
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.n as u32
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.0.inv[a as usize].is_some()
    }
}

impl CRing for TableRing {
    type E = u32;

    fn prime(&self) -> u64 {
        self.0.p
    }
    fn zero(&self) -> u32 {
        self.0.zero
    }
    fn one(&self) -> u32 {
        self.0.one
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.0.add[*a as usize * self.0.n + *b as usize]
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.0.neg[*b as usize])
    }
    fn neg(&self, a: &u32) -> u32 {
        self.0.neg[*a as usize]
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.0.mul[*a as usize * self.0.n + *b as usize]
    }
    fn from_bigint(&self, n: &BigInt) -> u32 {
        let ord = BigInt::from(self.0.ints.len());
        self.0.ints[n.mod_floor(&ord).to_usize().unwrap()]
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        self.0.inv[*a as usize]
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == self.0.zero
    }
}
