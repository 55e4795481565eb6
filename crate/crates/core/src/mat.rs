//! Dense matrices over any [`CRing`].

use crate::algebra::CRing;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut a = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                a.push(f(i, j));
            }
        }
        Mat { rows, cols, a }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Mat { rows: r, cols: c, a: rows.into_iter().flatten().collect() })
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.a[i * self.cols + j] = v;
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, a: self.a.iter().map(f).collect() }
    }

    pub fn try_map<F: Clone>(&self, f: impl FnMut(&E) -> Result<F>) -> Result<Mat<F>> {
        Ok(Mat { rows: self.rows, cols: self.cols, a: self.a.iter().map(f).collect::<Result<_>>()? })
    }

    /// Applies `f(i, j, entry)` to every entry.
    pub fn map_indexed<F: Clone>(&self, mut f: impl FnMut(usize, usize, &E) -> Result<F>) -> Result<Mat<F>> {
        let mut a = Vec::with_capacity(self.a.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                a.push(f(i, j, self.get(i, j))?);
            }
        }
        Ok(Mat { rows: self.rows, cols: self.cols, a })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.a[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

pub fn identity<R: CRing>(r: &R, n: usize) -> Mat<R::E> {
    Mat::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn zero<R: CRing>(r: &R, rows: usize, cols: usize) -> Mat<R::E> {
    Mat::from_fn(rows, cols, |_, _| r.zero())
}

/// The elementary matrix with `v` at (i, j) added to the identity.
pub fn elementary<R: CRing>(r: &R, n: usize, i: usize, j: usize, v: R::E) -> Mat<R::E> {
    let mut m = identity(r, n);
    let cur = m.get(i, j).clone();
    m.set(i, j, r.add(&cur, &v));
    m
}

pub fn add<R: CRing>(r: &R, x: &Mat<R::E>, y: &Mat<R::E>) -> Mat<R::E> {
    debug_assert_eq!((x.rows, x.cols), (y.rows, y.cols));
    Mat { rows: x.rows, cols: x.cols, a: x.a.iter().zip(&y.a).map(|(u, v)| r.add(u, v)).collect() }
}

pub fn sub<R: CRing>(r: &R, x: &Mat<R::E>, y: &Mat<R::E>) -> Mat<R::E> {
    debug_assert_eq!((x.rows, x.cols), (y.rows, y.cols));
    Mat { rows: x.rows, cols: x.cols, a: x.a.iter().zip(&y.a).map(|(u, v)| r.sub(u, v)).collect() }
}

pub fn scale<R: CRing>(r: &R, c: &R::E, x: &Mat<R::E>) -> Mat<R::E> {
    x.map(|v| r.mul(c, v))
}

pub fn mul<R: CRing>(r: &R, x: &Mat<R::E>, y: &Mat<R::E>) -> Mat<R::E> {
    debug_assert_eq!(x.cols, y.rows);
    let mut out = Vec::with_capacity(x.rows * y.cols);
    for i in 0..x.rows {
        for j in 0..y.cols {
            let mut acc = r.zero();
            for k in 0..x.cols {
                let a = x.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                acc = r.add(&acc, &r.mul(a, y.get(k, j)));
            }
            out.push(acc);
        }
    }
    Mat { rows: x.rows, cols: y.cols, a: out }
}

pub fn is_identity<R: CRing>(r: &R, x: &Mat<R::E>) -> bool {
    x.is_square() && *x == identity(r, x.rows)
}

/// Gauss-Jordan inverse with unit pivots; over a local ring this finds the
/// inverse of every invertible matrix.
pub fn inverse<R: CRing>(r: &R, x: &Mat<R::E>) -> Option<Mat<R::E>> {
    if !x.is_square() {
        return None;
    }
    let n = x.rows;
    let mut a = x.clone();
    let mut b = identity(r, n);
    for col in 0..n {
        let (piv, pinv) = (col..n).find_map(|i| r.inv(a.get(i, col)).map(|v| (i, v)))?;
        if piv != col {
            for j in 0..n {
                a.a.swap(piv * n + j, col * n + j);
                b.a.swap(piv * n + j, col * n + j);
            }
        }
        for j in 0..n {
            a.a[col * n + j] = r.mul(&pinv, &a.a[col * n + j]);
            b.a[col * n + j] = r.mul(&pinv, &b.a[col * n + j]);
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a.get(i, col).clone();
            if r.is_zero(&f) {
                continue;
            }
            for j in 0..n {
                let (ta, tb) = (r.mul(&f, &a.a[col * n + j]), r.mul(&f, &b.a[col * n + j]));
                a.a[i * n + j] = r.sub(&a.a[i * n + j], &ta);
                b.a[i * n + j] = r.sub(&b.a[i * n + j], &tb);
            }
        }
    }
    Some(b)
}

pub fn det<R: CRing>(r: &R, x: &Mat<R::E>) -> R::E {
    // Laplace expansion; only used on small matrices
    let n = x.rows;
    if n == 0 {
        return r.one();
    }
    if n == 1 {
        return x.a[0].clone();
    }
    let mut acc = r.zero();
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let minor = det(r, &x.submatrix(&rows, &cols));
        let t = r.mul(x.get(0, j), &minor);
        acc = if j % 2 == 0 { r.add(&acc, &t) } else { r.sub(&acc, &t) };
    }
    acc
}
