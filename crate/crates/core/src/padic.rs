//! Fixed-precision p-adic scalars.
//!
//! A [`PadicScalar`] stores `residue * p^(-denom_exp)` where the residue is
//! known modulo `p^prec`. The absolute precision of the value is therefore
//! `prec - denom_exp`. Values are kept normalized: a positive `denom_exp`
//! implies a residue prime to `p`.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_PRECISION: u32 = 40;

/// A valuation in `(1/e)Z ∪ {+∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational64),
    Infinite,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Rational64::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Valuation::Finite(v) if v.is_zero())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Shared parameters of a p-adic computation: the prime and the precision
/// cap, with a table of powers of `p`.
#[derive(Debug)]
pub struct PadicCtx {
    p: u32,
    cap: u32,
    powers: Vec<BigInt>,
}

impl PadicCtx {
    pub fn new(p: u64, cap: u32) -> Result<Arc<PadicCtx>> {
        if p == 2 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidPrime(p));
        }
        if cap == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        let p32 = p as u32;
        let mut powers = Vec::with_capacity(2 * cap as usize + 2);
        let mut acc = BigInt::one();
        for _ in 0..(2 * cap + 2) {
            powers.push(acc.clone());
            acc *= p32;
        }
        Ok(Arc::new(PadicCtx { p: p32, cap, powers }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn pow(&self, k: u32) -> BigInt {
        match self.powers.get(k as usize) {
            Some(x) => x.clone(),
            None => num_traits::pow(BigInt::from(self.p), k as usize),
        }
    }

    pub(crate) fn pow_ref(&self, k: u32) -> std::borrow::Cow<'_, BigInt> {
        match self.powers.get(k as usize) {
            Some(x) => std::borrow::Cow::Borrowed(x),
            None => std::borrow::Cow::Owned(num_traits::pow(BigInt::from(self.p), k as usize)),
        }
    }

    /// `p`-adic valuation of a nonzero integer, or `None` for zero.
    pub fn vp(&self, n: &BigInt) -> Option<u32> {
        if n.is_zero() {
            return None;
        }
        let p = BigInt::from(self.p);
        let mut m = n.clone();
        let mut v = 0;
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                return Some(v);
            }
            m = q;
            v += 1;
        }
    }

    pub fn reduce(&self, n: &BigInt, prec: u32) -> BigInt {
        n.mod_floor(&self.pow_ref(prec))
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

#[derive(Clone)]
pub struct PadicScalar {
    ctx: Arc<PadicCtx>,
    residue: BigInt,
    prec: u32,
    denom_exp: u32,
}

impl PadicScalar {
    fn normalized(ctx: Arc<PadicCtx>, residue: BigInt, prec: u32, denom_exp: u32) -> Self {
        let mut s = PadicScalar { residue: ctx.reduce(&residue, prec), ctx, prec, denom_exp };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.denom_exp == 0 {
            return;
        }
        if self.residue.is_zero() {
            // zero known to absolute precision prec - denom_exp
            self.prec = self.prec.saturating_sub(self.denom_exp);
            self.denom_exp = 0;
            return;
        }
        let p = BigInt::from(self.ctx.p);
        while self.denom_exp > 0 && self.prec > 0 {
            let (q, r) = self.residue.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            self.residue = q;
            self.prec -= 1;
            self.denom_exp -= 1;
        }
    }

    /// `residue / p^denom_exp` with `residue` known modulo `p^prec`.
    pub fn with_precision(ctx: &Arc<PadicCtx>, residue: BigInt, prec: u32, denom_exp: u32) -> Self {
        PadicScalar::normalized(ctx.clone(), residue, prec, denom_exp)
    }

    pub fn from_int(ctx: &Arc<PadicCtx>, n: impl Into<BigInt>) -> Self {
        let cap = ctx.cap;
        PadicScalar::normalized(ctx.clone(), n.into(), cap, 0)
    }

    /// `num / den` at full precision. Fails for a zero denominator.
    pub fn from_ratio(ctx: &Arc<PadicCtx>, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::NotInvertible);
        }
        let k = ctx.vp(&den).unwrap_or(0);
        let unit = den / ctx.pow(k);
        let m = ctx.pow(ctx.cap);
        let inv = mod_inverse(&unit.mod_floor(&m), &m).ok_or(Error::NotInvertible)?;
        Ok(PadicScalar::normalized(ctx.clone(), num * inv, ctx.cap, k))
    }

    pub fn zero(ctx: &Arc<PadicCtx>) -> Self {
        PadicScalar::from_int(ctx, 0)
    }

    pub fn one(ctx: &Arc<PadicCtx>) -> Self {
        PadicScalar::from_int(ctx, 1)
    }

    pub fn ctx(&self) -> &Arc<PadicCtx> {
        &self.ctx
    }

    pub fn prime(&self) -> u32 {
        self.ctx.p
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    /// The value is known modulo `p^absolute_precision()`.
    pub fn absolute_precision(&self) -> i64 {
        self.prec as i64 - self.denom_exp as i64
    }

    pub fn is_exhausted(&self) -> bool {
        self.prec == 0
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn valuation(&self) -> Valuation {
        match self.ctx.vp(&self.residue) {
            Some(v) => Valuation::int(v as i64 - self.denom_exp as i64),
            None => Valuation::Infinite,
        }
    }

    /// Integer valuation, `None` when zero at the tracked precision.
    pub fn ival(&self) -> Option<i64> {
        self.ctx.vp(&self.residue).map(|v| v as i64 - self.denom_exp as i64)
    }

    /// Content valuation of the residue, counting zero as `prec`.
    fn residue_val(&self) -> u32 {
        self.ctx.vp(&self.residue).unwrap_or(self.prec)
    }

    /// Symmetric representative of the residue, in `(-p^N/2, p^N/2]`.
    pub fn balanced_residue(&self) -> BigInt {
        let m = self.ctx.pow(self.prec);
        let r = self.residue.clone();
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    /// The value as a rational integer when it is integral and the balanced
    /// residue is small compared with the modulus.
    pub fn to_small_int(&self) -> Option<i64> {
        if self.denom_exp != 0 || self.prec < 2 {
            return None;
        }
        let b = self.balanced_residue();
        let bound = self.ctx.pow(self.prec / 2);
        if b.abs() < bound {
            b.to_i64()
        } else {
            None
        }
    }

    /// Short human-readable form: a small fraction when one is recognizable,
    /// otherwise the balanced residue.
    pub fn short_string(&self) -> String {
        for d in 1..=1000i64 {
            if d % self.ctx.p as i64 == 0 {
                continue;
            }
            let scaled = self.mul_ref(&PadicScalar::from_int(&self.ctx, d));
            if let Some(n) = scaled.to_small_int() {
                return if d == 1 { n.to_string() } else { format!("{n}/{d}") };
            }
            let pe = self.ctx.pow(self.denom_exp);
            let lifted = scaled.mul_ref(&PadicScalar::from_int(&self.ctx, pe.clone()));
            if let (Some(n), true) = (lifted.to_small_int(), self.denom_exp > 0) {
                return format!("{n}/{}", &pe * d);
            }
        }
        format!("{self}")
    }

    pub fn checked_inv(&self) -> Result<Self> {
        let k = match self.ctx.vp(&self.residue) {
            Some(k) => k,
            None => return Err(Error::NotInvertible),
        };
        let rel = self.prec - k;
        let m = self.ctx.pow(rel);
        let unit = &self.residue / self.ctx.pow(k);
        let uinv = mod_inverse(&unit, &m).ok_or(Error::NotInvertible)?;
        let (res, prec, e) = if self.denom_exp >= k {
            let shift = self.denom_exp - k;
            (uinv * self.ctx.pow(shift), rel + shift, 0)
        } else {
            (uinv, rel, k - self.denom_exp)
        };
        let prec = min(prec, self.ctx.cap + e);
        Ok(PadicScalar::normalized(self.ctx.clone(), res, prec, e))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = PadicScalar::one(&self.ctx);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            k >>= 1;
        }
        acc
    }

    /// Difference is zero at the tracked precision.
    pub fn same_value(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    /// Square root of a unit by Newton iteration, when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.denom_exp != 0 || self.ctx.vp(&self.residue) != Some(0) {
            return None;
        }
        let p = self.ctx.p as u64;
        let r0 = (&self.residue % BigInt::from(p)).to_u64()?;
        let x0 = (0..p).find(|x| (x * x) % p == r0)?;
        let mut x = PadicScalar::from_int(&self.ctx, x0);
        let half = PadicScalar::from_ratio(&self.ctx, 1, 2).ok()?;
        for _ in 0..(2 * self.ctx.cap.max(1).ilog2() + 4) {
            let xi = x.checked_inv().ok()?;
            x = (x.clone() + self.mul_ref(&xi)) * half.clone();
        }
        let x = PadicScalar::normalized(self.ctx.clone(), x.residue, self.prec, 0);
        if x.mul_ref(&x).same_value(self) {
            Some(x)
        } else {
            None
        }
    }

    fn combine_add(&self, rhs: &Self, negate_rhs: bool) -> Self {
        debug_assert_eq!(self.ctx.p, rhs.ctx.p);
        let e = max(self.denom_exp, rhs.denom_exp);
        let s1 = e - self.denom_exp;
        let s2 = e - rhs.denom_exp;
        let prec = min(self.prec + s1, rhs.prec + s2);
        let a = &self.residue * self.ctx.pow_ref(s1).as_ref();
        let b = &rhs.residue * self.ctx.pow_ref(s2).as_ref();
        let r = if negate_rhs { a - b } else { a + b };
        PadicScalar::normalized(self.ctx.clone(), r, prec, e)
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.balanced_residue();
        if self.denom_exp == 0 {
            write!(f, "{} + O({}^{})", r, self.ctx.p, self.prec)
        } else {
            write!(f, "{}/{}^{} + O({}^{})", r, self.ctx.p, self.denom_exp, self.ctx.p, self.absolute_precision())
        }
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.same_value(other)
    }
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: Self) -> Self {
        self.combine_add(&rhs, false)
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: Self) -> Self {
        self.combine_add(&rhs, true)
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> Self {
        let r = -self.residue;
        PadicScalar::normalized(self.ctx, r, self.prec, self.denom_exp)
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Scalar for PadicScalar {
    type Weight = i64;

    fn zero_like(&self) -> Self {
        PadicScalar::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        PadicScalar::one(&self.ctx)
    }
    fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }
    fn try_inv(&self) -> Result<Self> {
        self.checked_inv()
    }
    fn pivot_weight(&self) -> Option<i64> {
        self.ival()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.combine_add(rhs, false)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.combine_add(rhs, true)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let v1 = self.residue_val();
        let v2 = rhs.residue_val();
        let e = self.denom_exp + rhs.denom_exp;
        let prec = min(min(self.prec + v2, rhs.prec + v1), self.ctx.cap + e);
        let r = &self.residue * &rhs.residue;
        PadicScalar::normalized(self.ctx.clone(), r, prec, e)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        PadicScalar::from_int(&self.ctx, n)
    }
}

/// Teichmüller representative of `u mod p`: the unique `(p-1)`-st root of
/// unity congruent to `u`, found as the fixed point of `x ↦ x^p`.
pub fn teichmuller(ctx: &Arc<PadicCtx>, u: i64) -> Result<PadicScalar> {
    let p = ctx.p as i64;
    if u.rem_euclid(p) == 0 {
        return Err(Error::InvalidArgument(format!("teichmuller: {u} is not a unit mod {p}")));
    }
    let m = ctx.pow(ctx.cap);
    let mut x = BigInt::from(u).mod_floor(&m);
    loop {
        let y = x.modpow(&BigInt::from(p), &m);
        if y == x {
            break;
        }
        x = y;
    }
    Ok(PadicScalar::from_int(ctx, x))
}

/// Multiplicative order of `q` modulo `m`, by brute force.
pub fn mult_order(q: i64, m: u64) -> Option<u64> {
    let m_i = m as i64;
    let q = q.rem_euclid(m_i);
    if m == 1 {
        return Some(1);
    }
    if num_integer::gcd(q, m_i) != 1 {
        return None;
    }
    let mut acc = q;
    let mut k = 1;
    while acc != 1 {
        acc = ((acc as i128 * q as i128) % m_i as i128) as i64;
        k += 1;
    }
    Some(k)
}
