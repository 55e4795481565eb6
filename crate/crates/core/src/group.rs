//! The display datum (GL_h, mu) with weights in {0, 1}, its parabolic
//! decomposition, and the Frobenius-type homomorphisms built from it.
//!
//! Conventions: the adjoint weight of entry (i, j) is m_i - m_j. P_mu is the
//! locus where every weight -1 entry (m_i = 0, m_j = 1) vanishes, and the
//! unipotent U_{mu^-1} is 1 plus the weight -1 block.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::{factorial, vp_factorial, CRing};
use crate::error::{Error, Result};
use crate::mat::{self, Mat};
use crate::pd_witt::PdWitt;
use crate::ring::Elem;
use crate::witt::{Witt, WittVec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datum {
    pub h: usize,
    pub weights: Vec<i64>,
}

impl Datum {
    /// Normalises the weights so that the smallest is 0; amplitude must be <= 1.
    pub fn new(weights: &[i64]) -> Result<Datum> {
        let lo = *weights.iter().min().ok_or_else(|| Error::InvalidSpec("empty weight vector".into()))?;
        let hi = *weights.iter().max().unwrap();
        if hi - lo > 1 {
            return Err(Error::InvalidSpec("weight amplitude exceeds 1".into()));
        }
        Ok(Datum { h: weights.len(), weights: weights.iter().map(|m| m - lo).collect() })
    }

    /// mu_{h,d}: d weights 0 followed by h - d weights 1.
    pub fn mu(h: usize, d: usize) -> Datum {
        Datum { h, weights: (0..h).map(|i| i64::from(i >= d)).collect() }
    }

    pub fn validate(&self) -> Result<Datum> {
        if self.weights.len() != self.h {
            return Err(Error::ShapeMismatch("weight count differs from h".into()));
        }
        Datum::new(&self.weights)
    }

    /// m_i - m_j.
    pub fn weight(&self, i: usize, j: usize) -> i64 {
        self.weights[i] - self.weights[j]
    }

    pub fn zero_indices(&self) -> Vec<usize> {
        (0..self.h).filter(|&i| self.weights[i] == 0).collect()
    }

    pub fn one_indices(&self) -> Vec<usize> {
        (0..self.h).filter(|&i| self.weights[i] == 1).collect()
    }

    /// Positions of weight -1.
    pub fn negative_positions(&self) -> Vec<(usize, usize)> {
        let ones = self.one_indices();
        self.zero_indices().into_iter().flat_map(|i| ones.iter().map(move |&j| (i, j))).collect()
    }

    /// Positions of weight +1.
    pub fn positive_positions(&self) -> Vec<(usize, usize)> {
        let zeros = self.zero_indices();
        self.one_indices().into_iter().flat_map(|i| zeros.iter().map(move |&j| (i, j))).collect()
    }
}

fn check_square<E>(datum: &Datum, g: &Mat<E>) -> Result<()> {
    if g.rows != datum.h || g.cols != datum.h {
        return Err(Error::ShapeMismatch(format!("expected {0}x{0} matrix", datum.h)));
    }
    Ok(())
}

/// g lies in the preimage of P_mu modulo an ideal given by its membership test.
pub fn in_parabolic<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>, member: impl Fn(&R::E) -> bool) -> Result<bool> {
    check_square(datum, g)?;
    if mat::inverse(r, g).is_none() {
        return Err(Error::NotInvertible);
    }
    Ok(datum.negative_positions().iter().all(|&(i, j)| member(g.get(i, j))))
}

/// g = g0 (1 + X) with g0 in P_mu and X supported on the weight -1 block;
/// X = A^-1 B for the weight 0 block A of the zero-weight rows.
pub fn factor<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>) -> Result<(Mat<R::E>, Mat<R::E>)> {
    check_square(datum, g)?;
    let (zeros, ones) = (datum.zero_indices(), datum.one_indices());
    let a = g.submatrix(&zeros, &zeros);
    let b = g.submatrix(&zeros, &ones);
    let ainv = mat::inverse(r, &a).ok_or(Error::BlockNotInvertible)?;
    let xb = mat::mul(r, &ainv, &b);
    let mut x = mat::zero(r, datum.h, datum.h);
    for (bi, &i) in zeros.iter().enumerate() {
        for (bj, &j) in ones.iter().enumerate() {
            x.set(i, j, xb.get(bi, bj).clone());
        }
    }
    // (1 + X)^-1 = 1 - X since X^2 has weight -2
    let one = mat::identity(r, datum.h);
    let g0 = mat::mul(r, g, &mat::sub(r, &one, &x));
    debug_assert!(datum.negative_positions().iter().all(|&(i, j)| r.is_zero(g0.get(i, j))));
    Ok((g0, x))
}

/// g0 (1 + X).
pub fn compose<R: CRing>(r: &R, g0: &Mat<R::E>, x: &Mat<R::E>) -> Mat<R::E> {
    mat::add(r, g0, &mat::mul(r, g0, x))
}

fn require_parabolic<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>) -> Result<()> {
    check_square(datum, g)?;
    if datum.negative_positions().iter().any(|&(i, j)| !r.is_zero(g.get(i, j))) {
        return Err(Error::NotInParabolic);
    }
    Ok(())
}

/// The monoid action of z on P_mu: entries of weight m >= 0 scaled by z^m.
pub fn int_mu<R: CRing>(r: &R, datum: &Datum, z: &R::E, g: &Mat<R::E>) -> Result<Mat<R::E>> {
    require_parabolic(r, datum, g)?;
    g.map_indexed(|i, j, v| Ok(if datum.weight(i, j) == 1 { r.mul(z, v) } else { v.clone() }))
}

// Entry (i, j) times p^(k (m_i - m_j)); negative powers divide exactly.
fn mu_scale<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>, k: i64) -> Result<Mat<R::E>> {
    let p = r.from_i64(r.prime() as i64);
    g.map_indexed(|i, j, v| {
        let e = k * datum.weight(i, j);
        match e.cmp(&0) {
            std::cmp::Ordering::Equal => Ok(v.clone()),
            std::cmp::Ordering::Greater => Ok(r.mul(&r.pow(&p, e as u64), v)),
            std::cmp::Ordering::Less => r.div_p_pow(v, (-e) as u32),
        }
    })
}

/// mu(1/p) g mu(p): weight +1 entries divided by p, weight -1 entries times p.
pub fn conj_mu_p<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>) -> Result<Mat<R::E>> {
    check_square(datum, g)?;
    mu_scale(r, datum, g, -1)
}

/// sigma(mu(p) g mu(1/p)) on a frame: sigma entrywise, then weight -1
/// entries divided by p and weight +1 entries multiplied by p.
pub fn hat_phi<R: CRing>(r: &R, datum: &Datum, g: &Mat<R::E>, sigma: &dyn Fn(&R::E) -> R::E) -> Result<Mat<R::E>> {
    check_square(datum, g)?;
    let sg = g.map(sigma);
    mu_scale(r, datum, &sg, 1).map_err(|e| match e {
        Error::InexactDivision => Error::NotInGamma,
        e => e,
    })
}

/// exp(D) = sum D^n / n! for D supported in strictly positive weights of
/// the integer grading `weights`, with every division by n! checked to be
/// exact p-adically on a cover of the base ring.
pub fn graded_exp<R: CRing>(r: &R, weights: &[i64], d: &Mat<R::E>) -> Result<Mat<R::E>> {
    let h = weights.len();
    if d.rows != h || d.cols != h {
        return Err(Error::ShapeMismatch("D must match the grading".into()));
    }
    for i in 0..h {
        for j in 0..h {
            if weights[i] - weights[j] < 1 && !r.is_zero(d.get(i, j)) {
                return Err(Error::ShapeMismatch(format!("entry ({i},{j}) is not of positive weight")));
            }
        }
    }
    let p = r.prime();
    let spread = (weights.iter().max().unwrap() - weights.iter().min().unwrap()).max(0) as u64;
    let extra = vp_factorial(spread, p);
    let cover = r.cover(extra).ok_or(Error::PrecisionExhausted)?;
    let dc = d.map(|v| r.lift_into(&cover, v));
    let mut acc = mat::identity(&cover, h);
    let mut pow = mat::identity(&cover, h);
    for n in 1..=spread {
        pow = mat::mul(&cover, &pow, &dc);
        let v = vp_factorial(n, p);
        let unit = factorial(n) / BigInt::from(p).pow(v);
        let uinv = cover.inv(&cover.from_bigint(&unit)).ok_or(Error::PDivisibilityFailure(n as usize))?;
        let term = pow.try_map(|x| {
            let q = if v == 0 { x.clone() } else { cover.div_p_pow(x, v)? };
            Ok(cover.mul(&q, &uinv))
        });
        let term = term.map_err(|e| match e {
            Error::InexactDivision | Error::PrecisionExhausted => Error::PDivisibilityFailure(n as usize),
            e => e,
        })?;
        acc = mat::add(&cover, &acc, &term);
    }
    Ok(acc.map(|x| r.reduce_from(&cover, x)))
}

/// Phi_mu: H_mu(W_M(R)) -> G(W_{M-1}(R)), h = h0 (1 + X) goes to
/// F(int_mu(p) h0) (1 + V^-1 X).
pub fn phi_mu<R: CRing>(w: &Witt<R>, datum: &Datum, h: &Mat<WittVec<R::E>>) -> Result<Mat<WittVec<R::E>>> {
    check_square(datum, h)?;
    let len = witt_len(h)?;
    if len < 2 {
        return Err(Error::LengthUnderflow);
    }
    if datum.negative_positions().iter().any(|&(i, j)| !w.in_i(h.get(i, j))) {
        return Err(Error::NotInHmu);
    }
    let wr = w.ring(len);
    let (h0, x) = factor(&wr, datum, h).map_err(|e| match e {
        Error::BlockNotInvertible => Error::NotInHmu,
        e => e,
    })?;
    let vx = x.try_map(|v| w.v_inverse(v))?;
    finish(w, datum, &h0, &vx)
}

/// Psi_mu for the pd-ideal a: like Phi_mu, with the weight -1 factor first
/// projected to I(R) along the section of a.
pub fn psi_mu(pw: &PdWitt, datum: &Datum, h: &Mat<WittVec<Elem>>) -> Result<Mat<WittVec<Elem>>> {
    check_square(datum, h)?;
    let w = pw.witt();
    let len = witt_len(h)?;
    if len < 2 {
        return Err(Error::LengthUnderflow);
    }
    let ideal = pw.pd().ideal();
    if datum.negative_positions().iter().any(|&(i, j)| !ideal.contains(&h.get(i, j).0[0])) {
        return Err(Error::NotInGamma);
    }
    let wr = w.ring(len);
    let (h0, x) = factor(&wr, datum, h).map_err(|e| match e {
        Error::BlockNotInvertible => Error::NotInGamma,
        e => e,
    })?;
    let vx = x.try_map(|v| w.v_inverse(&pw.project_pos_rel(v)?))?;
    finish(w, datum, &h0, &vx)
}

fn finish<R: CRing>(
    w: &Witt<R>,
    datum: &Datum,
    h0: &Mat<WittVec<R::E>>,
    vx: &Mat<WittVec<R::E>>,
) -> Result<Mat<WittVec<R::E>>> {
    let len = h0.a[0].len();
    let wr = w.ring(len);
    let p = wr.from_i64(w.p() as i64);
    let scaled = int_mu(&wr, datum, &p, h0)?;
    let f = scaled.try_map(|v| w.frobenius(v))?;
    let short = w.ring(len - 1);
    Ok(mat::mul(&short, &f, &mat::add(&short, &mat::identity(&short, datum.h), vx)))
}

/// The Lie analogue: V^-1 on weight -1 entries, p^m F on weight m >= 0.
pub fn phi_lie<R: CRing>(w: &Witt<R>, datum: &Datum, x: &Mat<WittVec<R::E>>) -> Result<Mat<WittVec<R::E>>> {
    check_square(datum, x)?;
    let len = witt_len(x)?;
    if len < 2 {
        return Err(Error::LengthUnderflow);
    }
    let short = w.ring(len - 1);
    let p = short.from_i64(w.p() as i64);
    x.map_indexed(|i, j, v| match datum.weight(i, j) {
        -1 => w.v_inverse(v).map_err(|_| Error::ShapeMismatch(format!("weight -1 entry ({i},{j}) is not in I"))),
        m => Ok(short.mul(&short.pow(&p, m as u64), &w.frobenius(v)?)),
    })
}

fn witt_len<E>(m: &Mat<WittVec<E>>) -> Result<usize> {
    let len = m.a.first().map_or(0, |v| v.len());
    if m.a.iter().any(|v| v.len() != len) {
        return Err(Error::ShapeMismatch("entries of different Witt lengths".into()));
    }
    Ok(len)
}

/// Entrywise Teichmüller lift of a matrix.
pub fn teichmuller_mat<R: CRing>(w: &Witt<R>, g: &Mat<R::E>, len: usize) -> Mat<WittVec<R::E>> {
    g.map(|a| w.teichmuller(a, len))
}

/// Entrywise truncation.
pub fn truncate_mat<E: Clone>(g: &Mat<WittVec<E>>, len: usize) -> Mat<WittVec<E>> {
    g.map(|v| WittVec(v.0[..len.min(v.len())].to_vec()))
}

/// Entrywise zeroth component.
pub fn w0_mat<E: Clone>(g: &Mat<WittVec<E>>) -> Mat<E> {
    g.map(|v| v.0[0].clone())
}
