//! Frames (A, a, sigma) over a torsion-free base modelled at capped p-adic
//! precision, the Cartier diagonal, banal windows, frame change and the
//! constructive descent of a display over W(A) to an F-sigma fixed one.
//!
//! Precision: the base is carried in a working ring of precision N + guard.
//! Dwork inversion at index i divides by p^i, so component i of a Witt
//! vector produced here is exact modulo p^(N + guard - i); every public
//! assertion is made modulo p^N, which requires Witt lengths <= guard.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::CRing;
use crate::displays::{self, WMat};
use crate::error::{Error, Result};
use crate::group::{self, Datum};
use crate::ideal::Ideal;
use crate::mat::{self, Mat};
use crate::pd::{PdIdeal, ValidationReport};
use crate::pd_witt::PdWitt;
use crate::ring::{Elem, Ring, RingSpec, GALOIS_GEN};
use crate::witt::{Witt, WittVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FramePd {
    #[default]
    Canonical,
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    /// Presentation of A; its N is the contract precision.
    pub base: RingSpec,
    /// Generators of a as monomial-to-integer maps; empty means pA.
    #[serde(default)]
    pub ideal: Vec<BTreeMap<String, i64>>,
    #[serde(default)]
    pub pd: FramePd,
    /// Images of the Galois generator and variables under sigma; omitted
    /// generators take the default Frobenius lift.
    #[serde(default)]
    pub sigma: BTreeMap<String, BTreeMap<String, i64>>,
    /// Extra p-adic digits carried internally.
    #[serde(default)]
    pub guard: Option<u32>,
}

impl FrameSpec {
    pub fn zp(p: u64, n: u32) -> Self {
        FrameSpec { base: RingSpec::zmod(p, n), ideal: vec![], pd: FramePd::Canonical, sigma: BTreeMap::new(), guard: None }
    }
}

#[derive(Clone, Debug)]
pub struct Frame {
    spec: FrameSpec,
    precision: u32,
    guard: u32,
    ring: Ring,
    contract: Ring,
    sigma: Vec<Elem>,
    ideal: Ideal,
    ideal_gens: Vec<Elem>,
    witt: Witt<Ring>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameReport {
    /// Basis monomials b with sigma(b) != b^p mod p.
    pub frobenius_failures: Vec<String>,
    /// Generators g of a with sigma(g) not in pA.
    pub inclusion_failures: Vec<String>,
    pub pd: ValidationReport,
    pub valid: bool,
}

fn terms_elem(r: &Ring, terms: &BTreeMap<String, i64>) -> Result<Elem> {
    let big: Vec<(String, BigInt)> = terms.iter().map(|(k, v)| (k.clone(), BigInt::from(*v))).collect();
    r.elem_from_terms(big.iter().map(|(k, v)| (k.as_str(), v)))
}

impl Frame {
    pub fn new(spec: FrameSpec) -> Result<Frame> {
        let precision = spec.base.n;
        let guard = spec.guard.unwrap_or(precision);
        let contract = Ring::new(spec.base.clone())?;
        let ring = contract.with_precision(precision + guard)?;
        let gen_img = match spec.sigma.get(GALOIS_GEN) {
            Some(t) => terms_elem(&ring, t)?,
            None => ring.galois_frobenius_root().clone(),
        };
        let var_imgs = spec
            .base
            .vars
            .iter()
            .map(|v| match spec.sigma.get(v) {
                Some(t) => terms_elem(&ring, t),
                None => Ok(ring.pow(&ring.var(v)?, ring.p())),
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = spec.sigma.keys().find(|k| k.as_str() != GALOIS_GEN && !spec.base.vars.contains(k)) {
            return Err(Error::InvalidSpec(format!("sigma image for unknown generator {k}")));
        }
        let sigma = ring.hom_basis_images(&gen_img, &var_imgs)?;
        let ideal_gens = if spec.ideal.is_empty() {
            vec![ring.from_u64(ring.p())]
        } else {
            spec.ideal.iter().map(|t| terms_elem(&ring, t)).collect::<Result<_>>()?
        };
        let ideal = Ideal::new(&ring, &ideal_gens)?;
        let witt = Witt::new(ring.clone());
        Ok(Frame { spec, precision, guard, ring, contract, sigma, ideal, ideal_gens, witt })
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    /// The working ring A / p^(N + guard).
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    /// The contract ring A / p^N.
    pub fn contract_ring(&self) -> &Ring {
        &self.contract
    }
    pub fn witt(&self) -> &Witt<Ring> {
        &self.witt
    }
    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn sigma(&self, a: &Elem) -> Elem {
        self.ring.apply_basis_map(&self.sigma, a)
    }

    /// Reduction to the contract precision.
    pub fn contract(&self, a: &Elem) -> Elem {
        self.contract.reduce(&self.ring, a)
    }

    pub fn contract_witt(&self, x: &WittVec<Elem>) -> WittVec<Elem> {
        WittVec(x.0.iter().map(|c| self.contract(c)).collect())
    }

    pub fn contract_mat(&self, m: &WMat) -> WMat {
        m.map(|v| self.contract_witt(v))
    }

    fn pd_on(&self, r: &Ring) -> Result<PdIdeal> {
        let gens: Vec<Elem> = self.ideal_gens.iter().map(|g| r.reduce(&self.ring, g)).collect();
        let ideal = Ideal::new(r, &gens)?;
        match self.spec.pd {
            FramePd::Canonical => PdIdeal::canonical(ideal),
            FramePd::Trivial => Ok(PdIdeal::trivial_unchecked(ideal)),
        }
    }

    /// The pd context on a in the working ring.
    pub fn pd(&self) -> Result<PdIdeal> {
        self.pd_on(&self.ring)
    }

    /// Frobenius congruence on the basis, sigma(a) ⊆ pA on generators, and
    /// the pd axioms at contract precision.
    pub fn validate(&self, n_max: u64, seed: u64) -> Result<FrameReport> {
        let r = &self.ring;
        let p = r.p();
        let labels = r.basis_labels();
        let frobenius_failures: Vec<String> = (0..r.dim())
            .filter(|&b| !r.in_p_multiple(&r.sub(&self.sigma[b], &r.pow(&r.basis(b), p))))
            .map(|b| labels[b].clone())
            .collect();
        let inclusion_failures: Vec<String> =
            self.ideal_gens.iter().filter(|g| !r.in_p_multiple(&self.sigma(g))).map(|g| r.format(g)).collect();
        let pd = match self.pd_on(&self.contract) {
            Ok(pd) => pd.validate(n_max, seed)?,
            Err(e) => ValidationReport::failed(e.to_string()),
        };
        let valid = frobenius_failures.is_empty() && inclusion_failures.is_empty() && pd.is_valid();
        Ok(FrameReport { frobenius_failures, inclusion_failures, pd, valid })
    }

    fn check_length(&self, len: usize) -> Result<()> {
        if len as u32 > self.guard {
            return Err(Error::PrecisionExhausted);
        }
        Ok(())
    }

    /// kappa_sigma(a) in W_len(A): the Witt vector with ghost vector
    /// (a, sigma(a), ..., sigma^(len-1)(a)).
    pub fn cartier_diagonal(&self, a: &Elem, len: usize) -> Result<WittVec<Elem>> {
        self.check_length(len)?;
        let mut g = Vec::with_capacity(len);
        let mut cur = a.clone();
        for _ in 0..len {
            g.push(cur.clone());
            cur = self.sigma(&cur);
        }
        self.witt.from_ghost(&g, &|x| self.sigma(x))
    }

    /// W(sigma): sigma applied to every component.
    pub fn tau(&self, x: &WittVec<Elem>) -> WittVec<Elem> {
        WittVec(x.0.iter().map(|c| self.sigma(c)).collect())
    }

    pub fn tau_mat(&self, m: &WMat) -> WMat {
        m.map(|v| self.tau(v))
    }

    pub fn sigma_mat(&self, m: &Mat<Elem>) -> Mat<Elem> {
        m.map(|a| self.sigma(a))
    }

    /// Entrywise Cartier diagonal of a window matrix.
    pub fn frame_change(&self, u: &Mat<Elem>, len: usize) -> Result<WMat> {
        u.try_map(|a| self.cartier_diagonal(a, len))
    }

    /// F(X) = tau(X) at length len - 1, compared at contract precision.
    pub fn is_f_sigma_fixed(&self, x: &WMat) -> Result<bool> {
        let len = x.a.first().map_or(0, |v| v.len());
        if len < 2 {
            return Err(Error::LengthUnderflow);
        }
        let f = x.try_map(|v| self.witt.frobenius(v))?;
        let t = group::truncate_mat(&self.tau_mat(x), len - 1);
        Ok(self.contract_mat(&f) == self.contract_mat(&t))
    }

    /// sigma(mu(p) k mu(1/p)); NotInGamma if a weight -1 entry of sigma(k) is not in pA.
    pub fn hat_phi(&self, datum: &Datum, k: &Mat<Elem>) -> Result<Mat<Elem>> {
        group::hat_phi(&self.ring, datum, k, &|x| self.sigma(x))
    }

    /// k^-1 U hatPhi(k) for k in Gamma (weight -1 entries in a).
    pub fn window_conjugate(&self, datum: &Datum, u: &Mat<Elem>, k: &Mat<Elem>) -> Result<Mat<Elem>> {
        if datum.negative_positions().iter().any(|&(i, j)| !self.ideal.contains(k.get(i, j))) {
            return Err(Error::NotInGamma);
        }
        let kinv = mat::inverse(&self.ring, k).ok_or(Error::NotInvertible)?;
        Ok(mat::mul(&self.ring, &mat::mul(&self.ring, &kinv, u), &self.hat_phi(datum, k)?))
    }

    pub fn window_nilpotent(&self, datum: &Datum, u: &Mat<Elem>) -> Result<bool> {
        displays::adjoint_nilpotent(&self.ring, datum, u)
    }

    /// Descends U over W_L(A) to U' = h^-1 U Phi_mu(h) of length L - 1 with
    /// F(U') = tau(U'), where h in G(I(A)) has ghost coordinates
    /// h_i = k_(i-1) sigma(h_(i-1)) for the deformation k in G(W(pA)) with
    /// tau(U) = k^-1 F(U) Psi(k).
    pub fn descend_to_fixed(&self, datum: &Datum, u: &WMat) -> Result<Descent> {
        let len = u.a.first().map_or(0, |v| v.len());
        if len < 2 {
            return Err(Error::LengthUnderflow);
        }
        self.check_length(len)?;
        let r = &self.ring;
        if !displays::adjoint_nilpotent_witt(r, datum, u)? {
            return Err(Error::NotAdjointNilpotent);
        }
        let w = &self.witt;
        let fu = u.try_map(|v| w.frobenius(v))?;
        let tu = group::truncate_mat(&self.tau_mat(u), len - 1);
        let pw = PdWitt::with_witt(PdIdeal::canonical_p(r), w.clone());
        let sol = displays::deform_solve(&pw, datum, &fu, &tu)?;
        let k = sol.h;
        let k_ghosts: Vec<Mat<Elem>> =
            (0..len - 1).map(|j| k.try_map(|v| w.ghost(v, j))).collect::<Result<_>>()?;
        let mut h_ghosts = vec![mat::identity(r, datum.h)];
        for kj in &k_ghosts {
            let prev = self.sigma_mat(h_ghosts.last().unwrap());
            h_ghosts.push(mat::mul(r, kj, &prev));
        }
        let h = Mat::from_fn(datum.h, datum.h, |i, j| h_ghosts.iter().map(|g| g.get(i, j).clone()).collect::<Vec<_>>())
            .try_map(|g| w.from_ghost(g, &|x| self.sigma(x)))?;
        let phi = group::phi_mu(w, datum, &h)?;
        let hinv = mat::inverse(&w.ring(len), &h).ok_or(Error::NotInvertible)?;
        let short = w.ring(len - 1);
        let u_prime = mat::mul(&short, &mat::mul(&short, &group::truncate_mat(&hinv, len - 1), &group::truncate_mat(u, len - 1)), &phi);
        let certificate = len < 3 || self.is_f_sigma_fixed(&u_prime)?;
        if !certificate {
            return Err(Error::CertificateFailure("F(U') differs from tau(U')".into()));
        }
        Ok(Descent { k, h, h_ghosts, k_ghosts, u_prime, iterations: sol.iterations, precision: self.precision, length: len - 1 })
    }

    /// a = p^e A gives A/a = A/p^e; other ideals have no quotient in the menu.
    fn quotient_exponent(&self) -> Result<u32> {
        (1..=self.precision)
            .find(|&e| self.ideal == Ideal::p_power(&self.ring, e))
            .ok_or_else(|| Error::InvalidSpec("window reduction needs a = p^e A".into()))
    }

    /// The display kappa(U) mod W(a) over A/a, of length len.
    pub fn window_to_display(&self, u: &Mat<Elem>, len: usize) -> Result<(Ring, WMat)> {
        let e = self.quotient_exponent()?;
        let q = self.ring.with_precision(e)?;
        let k = self.frame_change(u, len)?;
        let d = k.map(|v| WittVec(v.0.iter().map(|c| q.reduce(&self.ring, c)).collect()));
        Ok((q, d))
    }

    /// A window whose display is isomorphic to D: D is lifted componentwise,
    /// padded by one zero component, descended, and read off at w_0.
    pub fn display_to_window(&self, datum: &Datum, d: &WMat) -> Result<Mat<Elem>> {
        self.quotient_exponent()?;
        let lift = d.map(|v| {
            let mut c: Vec<Elem> = v.0.iter().map(|x| Elem(x.0.clone())).collect();
            c.push(self.ring.zero());
            WittVec(c)
        });
        let desc = self.descend_to_fixed(datum, &lift)?;
        Ok(group::w0_mat(&desc.u_prime))
    }
}

#[derive(Clone, Debug)]
pub struct Descent {
    pub k: WMat,
    pub h: WMat,
    pub k_ghosts: Vec<Mat<Elem>>,
    pub h_ghosts: Vec<Mat<Elem>>,
    pub u_prime: WMat,
    pub iterations: usize,
    pub precision: u32,
    pub length: usize,
}
