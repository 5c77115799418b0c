//! Exact arithmetic in cyclotomic integer rings `Z[ζ_N]` and the rigid
//! motions of the plane built from them.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("mixed cyclotomic orders {0} and {1}")]
    MixedOrder(u32, u32),
    #[error("cyclotomic order must be positive")]
    ZeroOrder,
    #[error("coefficient overflow")]
    Overflow,
}

/// Reduction data for one ring.
#[derive(Debug)]
pub struct CycloRing {
    pub order: u32,
    pub degree: usize,
    /// Φ_N, low degree first, monic.
    pub modulus: Vec<i64>,
    zeta_pows: Vec<Vec<i64>>,
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let mut q = vec![0i64; num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = r[i + dn] / den[dn];
        q[i] = c;
        for (j, d) in den.iter().enumerate() {
            r[i + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for the proper divisors d
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn reduce_raw(raw: &mut Vec<i64>, modulus: &[i64]) {
    let deg = modulus.len() - 1;
    for i in (deg..raw.len()).rev() {
        let c = raw[i];
        if c != 0 {
            for j in 0..deg {
                raw[i - deg + j] = checked(raw[i - deg + j].checked_sub(c.checked_mul(modulus[j]).expect("cyclotomic overflow")));
            }
            raw[i] = 0;
        }
    }
    raw.truncate(deg);
    raw.resize(deg, 0);
}

fn checked(x: Option<i64>) -> i64 {
    x.expect("cyclotomic coefficient overflow")
}

impl CycloRing {
    fn build(order: u32) -> Self {
        let modulus = cyclotomic_poly(order);
        let degree = modulus.len() - 1;
        let zeta_pows = (0..order as usize)
            .map(|k| {
                let mut raw = vec![0i64; k + 1];
                raw[k] = 1;
                reduce_raw(&mut raw, &modulus);
                raw
            })
            .collect();
        CycloRing { order, degree, modulus, zeta_pows }
    }

    pub fn get(order: u32) -> &'static CycloRing {
        assert!(order > 0, "cyclotomic order must be positive");
        static RINGS: OnceLock<Mutex<HashMap<u32, &'static CycloRing>>> = OnceLock::new();
        let mut map = RINGS.get_or_init(Default::default).lock().unwrap();
        map.entry(order).or_insert_with(|| Box::leak(Box::new(CycloRing::build(order))))
    }

    pub fn zeta_pow(&self, k: i64) -> &[i64] {
        &self.zeta_pows[k.rem_euclid(self.order as i64) as usize]
    }
}

/// Element of `Z[ζ_N]` in the power basis `1, ζ, ..., ζ^{φ(N)-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<i64>,
}

pub type PlanePoint = CycNum;

impl CycNum {
    pub fn zero(order: u32) -> Self {
        let r = CycloRing::get(order);
        CycNum { order, coeffs: vec![0; r.degree] }
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(order, 1)
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = v;
        z
    }

    /// `ζ^k`
    pub fn zeta(order: u32, k: i64) -> Self {
        let r = CycloRing::get(order);
        CycNum { order, coeffs: r.zeta_pow(k).to_vec() }
    }

    /// From coefficients of `Σ c_k ζ^k` of any length; reduced mod Φ_N.
    pub fn from_raw(order: u32, raw: &[i64]) -> Result<Self, CycloError> {
        if order == 0 {
            return Err(CycloError::ZeroOrder);
        }
        let r = CycloRing::get(order);
        let mut acc = vec![0i64; r.degree];
        for (k, &c) in raw.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (a, z) in acc.iter_mut().zip(r.zeta_pow(k as i64)) {
                *a = a.checked_add(c.checked_mul(*z).ok_or(CycloError::Overflow)?).ok_or(CycloError::Overflow)?;
            }
        }
        Ok(CycNum { order, coeffs: acc })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn ring(&self) -> &'static CycloRing {
        CycloRing::get(self.order)
    }

    fn same_order(&self, o: &CycNum) -> Result<(), CycloError> {
        if self.order != o.order {
            Err(CycloError::MixedOrder(self.order, o.order))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, o: &CycNum) -> Result<CycNum, CycloError> {
        self.same_order(o)?;
        Ok(self.zip(o, |a, b| a.checked_add(b)))
    }

    pub fn checked_sub(&self, o: &CycNum) -> Result<CycNum, CycloError> {
        self.same_order(o)?;
        Ok(self.zip(o, |a, b| a.checked_sub(b)))
    }

    fn zip(&self, o: &CycNum, f: impl Fn(i64, i64) -> Option<i64>) -> CycNum {
        CycNum { order: self.order, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| checked(f(a, b))).collect() }
    }

    pub fn checked_mul(&self, o: &CycNum) -> Result<CycNum, CycloError> {
        self.same_order(o)?;
        let r = self.ring();
        let mut raw = vec![0i64; 2 * r.degree];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                if b != 0 {
                    raw[i + j] = raw[i + j]
                        .checked_add(a.checked_mul(b).ok_or(CycloError::Overflow)?)
                        .ok_or(CycloError::Overflow)?;
                }
            }
        }
        reduce_raw(&mut raw, &r.modulus);
        Ok(CycNum { order: self.order, coeffs: raw })
    }

    /// `ζ^k · self`
    pub fn mul_zeta(&self, k: i64) -> CycNum {
        let r = self.ring();
        let mut out = vec![0i64; r.degree];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, z) in out.iter_mut().zip(r.zeta_pow(i as i64 + k)) {
                *o = checked(o.checked_add(checked(c.checked_mul(*z))));
            }
        }
        CycNum { order: self.order, coeffs: out }
    }

    pub fn scale(&self, k: i64) -> CycNum {
        CycNum { order: self.order, coeffs: self.coeffs.iter().map(|&c| checked(c.checked_mul(k))).collect() }
    }

    /// Exact division by a rational integer, if it divides every coefficient.
    pub fn div_exact(&self, k: i64) -> Option<CycNum> {
        if k == 0 || self.coeffs.iter().any(|c| c % k != 0) {
            return None;
        }
        Some(CycNum { order: self.order, coeffs: self.coeffs.iter().map(|c| c / k).collect() })
    }

    /// Complex conjugate, `ζ -> ζ^{-1}`.
    pub fn conj(&self) -> CycNum {
        let r = self.ring();
        let mut out = vec![0i64; r.degree];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, z) in out.iter_mut().zip(r.zeta_pow(-(i as i64))) {
                *o += c * z;
            }
        }
        CycNum { order: self.order, coeffs: out }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Numerical embedding with `ζ = exp(2πi/N)`; for display only.
    pub fn real_embed(&self) -> (f64, f64) {
        let n = self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(x, y), (k, &c)| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n;
            (x + c as f64 * a.cos(), y + c as f64 * a.sin())
        })
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.coeffs, self.order)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match k {
                0 => format!("{c}"),
                1 => format!("{c}z"),
                _ => format!("{c}z^{k}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, o: &CycNum) -> CycNum {
        self.checked_add(o).expect("cyclotomic add")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, o: &CycNum) -> CycNum {
        self.checked_sub(o).expect("cyclotomic sub")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, o: &CycNum) -> CycNum {
        self.checked_mul(o).expect("cyclotomic mul")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        self.scale(-1)
    }
}

/// `x ↦ ζ^rot · x + trans`
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RigidMotion {
    pub rot: u32,
    pub trans: CycNum,
}

impl RigidMotion {
    pub fn identity(order: u32) -> Self {
        RigidMotion { rot: 0, trans: CycNum::zero(order) }
    }

    pub fn new(rot: i64, trans: CycNum) -> Self {
        let n = trans.order() as i64;
        RigidMotion { rot: rot.rem_euclid(n) as u32, trans }
    }

    pub fn rotation(order: u32, rot: i64) -> Self {
        Self::new(rot, CycNum::zero(order))
    }

    pub fn translation(t: CycNum) -> Self {
        RigidMotion { rot: 0, trans: t }
    }

    pub fn order(&self) -> u32 {
        self.trans.order()
    }

    pub fn checked_apply(&self, p: &CycNum) -> Result<CycNum, CycloError> {
        p.mul_zeta(self.rot as i64).checked_add(&self.trans)
    }

    pub fn apply(&self, p: &CycNum) -> CycNum {
        self.checked_apply(p).expect("motion applied to point of another ring")
    }

    /// `self ∘ other`
    pub fn checked_compose(&self, other: &RigidMotion) -> Result<RigidMotion, CycloError> {
        let t = self.checked_apply(&other.trans)?;
        Ok(RigidMotion::new(self.rot as i64 + other.rot as i64, t))
    }

    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        self.checked_compose(other).expect("composition across rings")
    }

    pub fn inverse(&self) -> RigidMotion {
        let r = -(self.rot as i64);
        RigidMotion::new(r, -&self.trans.mul_zeta(r))
    }

    pub fn is_identity(&self) -> bool {
        self.rot == 0 && self.trans.is_zero()
    }
}
