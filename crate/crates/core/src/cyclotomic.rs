//! Arithmetic in `Q_p(ζ_{p^m})` and in the exact field `Q(ζ_{p^m})`.
//!
//! Elements are polynomials of degree `< φ(p^m)` in `ζ`, reduced modulo the
//! cyclotomic polynomial `Φ_{p^m}(X) = Σ_{i<p} X^{i p^{m-1}}`. The reduction
//! is integral, so the same routines serve the exact rational field
//! ([`Cyclotomic`]) and the p-adic lattice representation ([`CycElem`]).

use std::cmp::min;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::{PadicCtx, PadicScalar, Valuation};
use crate::scalar::Scalar;

/// `φ(p^m)`; level 0 is the base field.
pub fn cyclotomic_degree(p: u32, level: u32) -> usize {
    if level == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(level - 1)
    }
}

/// Order of `ζ` at this level, `p^m`.
pub fn root_order(p: u32, level: u32) -> u64 {
    (p as u64).pow(level)
}

/// Reduce a polynomial in `ζ_{p^m}` to the canonical power basis.
pub fn reduce_mod_cyclotomic<S>(p: u32, level: u32, coeffs: Vec<S>) -> Vec<S>
where
    S: Clone + Zero + Sub<Output = S>,
{
    let deg = cyclotomic_degree(p, level);
    if level == 0 {
        let mut total = S::zero();
        for c in coeffs {
            total = total + c;
        }
        return vec![total];
    }
    let n = root_order(p, level) as usize;
    let step = n / p as usize;
    let mut folded = vec![S::zero(); n];
    for (k, c) in coeffs.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let idx = k % n;
        folded[idx] = folded[idx].clone() + c;
    }
    // X^{(p-1) p^{m-1}} = -Σ_{i<p-1} X^{i p^{m-1}}
    for d in deg..n {
        let c = std::mem::replace(&mut folded[d], S::zero());
        if c.is_zero() {
            continue;
        }
        for i in 0..(p as usize - 1) {
            let t = d - deg + i * step;
            folded[t] = folded[t].clone() - c.clone();
        }
    }
    folded.truncate(deg);
    folded
}

/// Product of two reduced polynomials, reduced again.
pub fn mul_mod_cyclotomic<S>(p: u32, level: u32, a: &[S], b: &[S]) -> Vec<S>
where
    S: Clone + Zero + Sub<Output = S> + Mul<Output = S>,
{
    let mut prod = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] = prod[i + j].clone() + x.clone() * y.clone();
        }
    }
    reduce_mod_cyclotomic(p, level, prod)
}

/// Re-index coordinates of level `from` into level `to >= from`.
fn embed_coeffs<S: Clone + Zero>(p: u32, from: u32, to: u32, coeffs: &[S]) -> Vec<S> {
    if from == to {
        return coeffs.to_vec();
    }
    let mut out = vec![S::zero(); cyclotomic_degree(p, to)];
    if from == 0 {
        out[0] = coeffs[0].clone();
        return out;
    }
    let stride = (p as usize).pow(to - from);
    for (i, c) in coeffs.iter().enumerate() {
        out[i * stride] = c.clone();
    }
    out
}

/// An element of `R[ζ_{p^m}]` for a coefficient ring `R` from `num-traits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic<S> {
    p: u32,
    level: u32,
    coeffs: Vec<S>,
}

impl<S> Cyclotomic<S>
where
    S: Clone + Zero + One + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    pub fn new(p: u32, level: u32, coeffs: Vec<S>) -> Self {
        Cyclotomic { p, level, coeffs: reduce_mod_cyclotomic(p, level, coeffs) }
    }

    pub fn constant(p: u32, level: u32, c: S) -> Self {
        Cyclotomic::new(p, level, vec![c])
    }

    /// `ζ_{p^level}^k`.
    pub fn zeta_pow(p: u32, level: u32, k: u64) -> Self {
        let n = root_order(p, level);
        let k = (k % n) as usize;
        let mut c = vec![S::zero(); k + 1];
        c[k] = S::one();
        Cyclotomic::new(p, level, c)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn embed(&self, level: u32) -> Self {
        assert!(level >= self.level);
        Cyclotomic { p: self.p, level, coeffs: embed_coeffs(self.p, self.level, level, &self.coeffs) }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        assert_eq!(a.p, b.p, "prime mismatch");
        let l = a.level.max(b.level);
        (a.embed(l), b.embed(l))
    }

    pub fn is_zero_elem(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Galois conjugate `ζ ↦ ζ^a`.
    pub fn conjugate(&self, a: u64) -> Self {
        let n = root_order(self.p, self.level);
        let mut out = vec![S::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = ((i as u64 * a) % n) as usize;
            out[k] = out[k].clone() + c.clone();
        }
        Cyclotomic::new(self.p, self.level, out)
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Cyclotomic::constant(self.p, self.level, S::one());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.clone() * base.clone();
            }
            base = base.clone() * base.clone();
            k >>= 1;
        }
        acc
    }
}

impl<S> Add for Cyclotomic<S>
where
    S: Clone + Zero + One + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = Cyclotomic::aligned(&self, &rhs);
        let coeffs = a.coeffs.into_iter().zip(b.coeffs).map(|(x, y)| x + y).collect();
        Cyclotomic { p: a.p, level: a.level, coeffs }
    }
}

impl<S> Sub for Cyclotomic<S>
where
    S: Clone + Zero + One + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = Cyclotomic::aligned(&self, &rhs);
        let coeffs = a.coeffs.into_iter().zip(b.coeffs).map(|(x, y)| x - y).collect();
        Cyclotomic { p: a.p, level: a.level, coeffs }
    }
}

impl<S> Neg for Cyclotomic<S>
where
    S: Clone + Zero + One + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic { p: self.p, level: self.level, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<S> Mul for Cyclotomic<S>
where
    S: Clone + Zero + One + Sub<Output = S> + Mul<Output = S> + Neg<Output = S>,
{
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = Cyclotomic::aligned(&self, &rhs);
        let coeffs = mul_mod_cyclotomic(a.p, a.level, &a.coeffs, &b.coeffs);
        Cyclotomic { p: a.p, level: a.level, coeffs }
    }
}

/// Multiplication-by-`a` matrix on the power basis: column `j` holds the
/// coordinates of `a ζ^j`.
fn multiplication_matrix<S, T>(p: u32, level: u32, a: &[S], lift: impl Fn(&S) -> T) -> Matrix<T>
where
    S: Clone + Zero + Sub<Output = S> + Mul<Output = S>,
    T: Scalar,
{
    let deg = cyclotomic_degree(p, level);
    let mut columns = Vec::with_capacity(deg);
    for j in 0..deg {
        let mut shifted = vec![S::zero(); j];
        shifted.extend(a.iter().cloned());
        columns.push(reduce_mod_cyclotomic(p, level, shifted));
    }
    Matrix::from_fn(deg, deg, |i, j| lift(&columns[j][i]))
}

impl Scalar for Cyclotomic<BigRational> {
    type Weight = u8;

    fn zero_like(&self) -> Self {
        Cyclotomic::constant(self.p, self.level, BigRational::zero())
    }
    fn one_like(&self) -> Self {
        Cyclotomic::constant(self.p, self.level, BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.is_zero_elem()
    }
    fn try_inv(&self) -> Result<Self> {
        if self.is_zero_elem() {
            return Err(Error::NotInvertible);
        }
        let m = multiplication_matrix(self.p, self.level, &self.coeffs, |c| c.clone());
        let deg = m.rows();
        let rhs = Matrix::from_fn(deg, 1, |i, _| if i == 0 { BigRational::one() } else { BigRational::zero() });
        let x = m.solve(&rhs)?;
        Ok(Cyclotomic { p: self.p, level: self.level, coeffs: (0..deg).map(|i| x.get(i, 0).clone()).collect() })
    }
    fn pivot_weight(&self) -> Option<u8> {
        if self.is_zero_elem() {
            None
        } else {
            Some(0)
        }
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Cyclotomic::constant(self.p, self.level, BigRational::from_integer(n.into()))
    }
}

/// An element of `Q_p(ζ_{p^m})` stored as `p^{-denom_exp} Σ r_i ζ^i` with
/// every `r_i` known modulo `p^prec`.
#[derive(Clone)]
pub struct CycElem {
    ctx: Arc<PadicCtx>,
    level: u32,
    num: Vec<BigInt>,
    prec: u32,
    denom_exp: u32,
}

impl CycElem {
    fn build(ctx: Arc<PadicCtx>, level: u32, num: Vec<BigInt>, prec: u32, denom_exp: u32) -> Self {
        let m = ctx.pow(prec);
        let num = num.into_iter().map(|r| r.mod_floor(&m)).collect();
        let mut e = CycElem { ctx, level, num, prec, denom_exp };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.denom_exp == 0 {
            return;
        }
        if self.num.iter().all(|r| r.is_zero()) {
            self.prec = self.prec.saturating_sub(self.denom_exp);
            self.denom_exp = 0;
            return;
        }
        let p = BigInt::from(self.ctx.p());
        while self.denom_exp > 0 && self.prec > 0 && self.num.iter().all(|r| r.is_multiple_of(&p)) {
            for r in self.num.iter_mut() {
                *r = &*r / &p;
            }
            self.prec -= 1;
            self.denom_exp -= 1;
        }
    }

    pub fn zero(ctx: &Arc<PadicCtx>, level: u32) -> Self {
        let deg = cyclotomic_degree(ctx.p(), level);
        CycElem { ctx: ctx.clone(), level, num: vec![BigInt::zero(); deg], prec: ctx.cap(), denom_exp: 0 }
    }

    pub fn one(ctx: &Arc<PadicCtx>, level: u32) -> Self {
        CycElem::from_int(ctx, level, 1)
    }

    pub fn from_int(ctx: &Arc<PadicCtx>, level: u32, n: i64) -> Self {
        CycElem::from_scalar(&PadicScalar::from_int(ctx, n), level)
    }

    pub fn from_scalar(s: &PadicScalar, level: u32) -> Self {
        let ctx = s.ctx().clone();
        let deg = cyclotomic_degree(ctx.p(), level);
        let mut num = vec![BigInt::zero(); deg];
        num[0] = s.residue().clone();
        CycElem { ctx, level, num, prec: s.precision(), denom_exp: s.denom_exp() }
    }

    /// `coeff · ζ_{p^level}^k`.
    pub fn monomial(coeff: &PadicScalar, level: u32, k: u64) -> Self {
        let ctx = coeff.ctx().clone();
        let p = ctx.p();
        let n = root_order(p, level);
        let k = (k % n) as usize;
        let mut poly = vec![BigInt::zero(); k + 1];
        poly[k] = coeff.residue().clone();
        let num = reduce_mod_cyclotomic(p, level, poly);
        CycElem::build(ctx, level, num, coeff.precision(), coeff.denom_exp())
    }

    /// `ζ_{p^m}` as an element of level `m`.
    pub fn zeta(ctx: &Arc<PadicCtx>, m: u32) -> Self {
        CycElem::monomial(&PadicScalar::one(ctx), m, 1)
    }

    /// Assemble from power-basis coordinates.
    pub fn from_coords(ctx: &Arc<PadicCtx>, level: u32, coords: &[PadicScalar]) -> Self {
        assert_eq!(coords.len(), cyclotomic_degree(ctx.p(), level));
        let e = coords.iter().map(|c| c.denom_exp()).max().unwrap_or(0);
        let abs = coords.iter().map(|c| c.absolute_precision()).min().unwrap_or(ctx.cap() as i64);
        let prec = (abs + e as i64).max(0) as u32;
        let num = coords.iter().map(|c| c.residue() * ctx.pow(e - c.denom_exp())).collect();
        CycElem::build(ctx.clone(), level, num, prec, e)
    }

    pub fn from_rational_cyc(ctx: &Arc<PadicCtx>, x: &RatCyc) -> Result<Self> {
        let coords: Result<Vec<_>> =
            x.coeffs().iter().map(|c| PadicScalar::from_ratio(ctx, c.numer().clone(), c.denom().clone())).collect();
        Ok(CycElem::from_coords(ctx, x.level(), &coords?))
    }

    pub fn ctx(&self) -> &Arc<PadicCtx> {
        &self.ctx
    }

    pub fn prime(&self) -> u32 {
        self.ctx.p()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.num.len()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn absolute_precision(&self) -> i64 {
        self.prec as i64 - self.denom_exp as i64
    }

    pub fn is_exhausted(&self) -> bool {
        self.prec == 0
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        PadicScalar::with_precision(&self.ctx, self.num[i].clone(), self.prec, self.denom_exp)
    }

    pub fn coords(&self) -> Vec<PadicScalar> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|r| r.is_zero())
    }

    /// The element lies in `Q_p` (all higher coordinates vanish).
    pub fn as_scalar(&self) -> Option<PadicScalar> {
        if self.num.iter().skip(1).all(|r| r.is_zero()) {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    pub fn embed(&self, level: u32) -> Self {
        assert!(level >= self.level, "cannot embed level {} into {}", self.level, level);
        CycElem {
            ctx: self.ctx.clone(),
            level,
            num: embed_coeffs(self.ctx.p(), self.level, level, &self.num),
            prec: self.prec,
            denom_exp: self.denom_exp,
        }
    }

    fn aligned(&self, other: &Self) -> (std::borrow::Cow<'_, Self>, Self) {
        assert_eq!(self.ctx.p(), other.ctx.p(), "prime mismatch");
        if self.level == other.level {
            (std::borrow::Cow::Borrowed(self), other.clone())
        } else if self.level > other.level {
            (std::borrow::Cow::Borrowed(self), other.embed(self.level))
        } else {
            (std::borrow::Cow::Owned(self.embed(other.level)), other.clone())
        }
    }

    fn content(&self) -> u32 {
        self.num.iter().filter_map(|r| self.ctx.vp(r)).min().unwrap_or(self.prec)
    }

    fn combine_add(&self, rhs: &Self, negate: bool) -> Self {
        let (a, b) = self.aligned(rhs);
        let e = a.denom_exp.max(b.denom_exp);
        let s1 = e - a.denom_exp;
        let s2 = e - b.denom_exp;
        let prec = min(a.prec + s1, b.prec + s2);
        let f1 = self.ctx.pow(s1);
        let f2 = self.ctx.pow(s2);
        let num = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| {
                let x = if s1 == 0 { x.clone() } else { x * &f1 };
                let y = if s2 == 0 { y.clone() } else { y * &f2 };
                if negate {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        CycElem::build(self.ctx.clone(), a.level, num, prec, e)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        let (a, b) = self.aligned(rhs);
        let c1 = a.content();
        let c2 = b.content();
        let e = a.denom_exp + b.denom_exp;
        let prec = min(min(a.prec + c2, b.prec + c1), self.ctx.cap() + e);
        let num = mul_mod_cyclotomic(self.ctx.p(), a.level, &a.num, &b.num);
        CycElem::build(self.ctx.clone(), a.level, num, prec, e)
    }

    fn check(self) -> Result<Self> {
        if self.prec == 0 {
            Err(Error::PrecisionExhausted("cyclotomic arithmetic result has no surviving digits".into()))
        } else {
            Ok(self)
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.combine_add(rhs, false).check()
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.combine_add(rhs, true).check()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.mul_impl(rhs).check()
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        self.mul_impl(&CycElem::from_scalar(s, self.level))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = CycElem::one(&self.ctx, self.level);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            base = base.mul_impl(&base);
            k >>= 1;
        }
        acc
    }

    /// Galois conjugate `ζ ↦ ζ^a` for `a` prime to `p`.
    pub fn conjugate(&self, a: u64) -> Self {
        let p = self.ctx.p();
        let n = root_order(p, self.level);
        let mut poly = vec![BigInt::zero(); n as usize];
        for (i, c) in self.num.iter().enumerate() {
            let k = ((i as u64 * a) % n) as usize;
            poly[k] += c;
        }
        let num = reduce_mod_cyclotomic(p, self.level, poly);
        CycElem::build(self.ctx.clone(), self.level, num, self.prec, self.denom_exp)
    }

    fn integral_matrix(&self, num: &[BigInt], prec: u32) -> Matrix<PadicScalar> {
        let ctx = self.ctx.clone();
        multiplication_matrix(ctx.p(), self.level, num, |r| PadicScalar::with_precision(&ctx, r.clone(), prec, 0))
    }

    /// Multiplicative inverse by solving `a x = 1` on the power basis.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let c = self.content();
        let pc = self.ctx.pow(c);
        let unit_part: Vec<BigInt> = self.num.iter().map(|r| r / &pc).collect();
        let m = self.integral_matrix(&unit_part, self.prec - c);
        let deg = m.rows();
        let rhs = Matrix::from_fn(deg, 1, |i, _| PadicScalar::from_int(&self.ctx, (i == 0) as i64));
        let x = m.solve(&rhs)?;
        let coords: Vec<PadicScalar> = (0..deg).map(|i| x.get(i, 0).clone()).collect();
        let base = CycElem::from_coords(&self.ctx, self.level, &coords);
        // multiply by p^{denom_exp - c}
        let shift = self.denom_exp as i64 - c as i64;
        let scaled = if shift >= 0 {
            let f = self.ctx.pow(shift as u32);
            let prec = min(base.prec + shift as u32, self.ctx.cap() + base.denom_exp);
            CycElem::build(
                self.ctx.clone(),
                self.level,
                base.num.iter().map(|r| r * &f).collect(),
                prec,
                base.denom_exp,
            )
        } else {
            let e = base.denom_exp + (-shift) as u32;
            CycElem::build(self.ctx.clone(), self.level, base.num.clone(), base.prec, e)
        };
        scaled.check()
    }

    /// Valuation normalized by `v(p) = 1`, computed from the p-adic
    /// valuation of the resultant `Res(a, Φ_{p^m}) = ±N(a)`.
    pub fn valuation(&self) -> Result<Valuation> {
        if self.is_zero() {
            return Ok(Valuation::Infinite);
        }
        let c = self.content();
        let pc = self.ctx.pow(c);
        let unit_part: Vec<BigInt> = self.num.iter().map(|r| r / &pc).collect();
        let m = self.integral_matrix(&unit_part, self.prec - c);
        let det = m.det()?;
        let v = det.ival().ok_or_else(|| {
            Error::PrecisionExhausted(format!(
                "resultant valuation not below the precision budget of {} digits",
                self.prec - c
            ))
        })?;
        let deg = self.num.len() as i64;
        Ok(Valuation::Finite(Rational64::new(v, deg) + Rational64::from_integer(c as i64 - self.denom_exp as i64)))
    }

    /// Valuation from the expansion in the uniformizer `π = ζ - 1`: the terms
    /// `c_i π^i` have pairwise distinct valuations `v(c_i) + i/φ`.
    pub fn pi_adic_valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let mut c = self.num.clone();
        let n = c.len();
        // Taylor shift a(X) -> a(1 + Y)
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = c[j + 1].clone();
                c[j] += t;
            }
        }
        let deg = n as i64;
        let mut best: Option<Rational64> = None;
        for (i, ci) in c.iter().enumerate() {
            let ci = ci.mod_floor(&self.ctx.pow(self.prec));
            if let Some(v) = self.ctx.vp(&ci) {
                let val = Rational64::new(v as i64 * deg + i as i64, deg);
                if best.is_none_or(|b| val < b) {
                    best = Some(val);
                }
            }
        }
        match best {
            Some(b) => Valuation::Finite(b - Rational64::from_integer(self.denom_exp as i64)),
            None => Valuation::Infinite,
        }
    }

    pub fn same_value(&self, other: &Self) -> bool {
        self.combine_add(other, true).is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.same_value(&CycElem::one(&self.ctx, self.level))
    }

    /// Drop precision to at most `abs` absolute digits.
    pub fn truncate(&self, abs: i64) -> Self {
        if abs >= self.absolute_precision() {
            return self.clone();
        }
        let prec = (abs + self.denom_exp as i64).max(0) as u32;
        CycElem::build(self.ctx.clone(), self.level, self.num.clone(), prec, self.denom_exp)
    }
}

impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.ctx.pow(self.prec);
        let half = &m / 2;
        let terms: Vec<String> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| {
                let b = if r > &half { r - &m } else { r.clone() };
                match i {
                    0 => format!("{b}"),
                    1 => format!("{b}*z"),
                    _ => format!("{b}*z^{i}"),
                }
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let p = self.ctx.p();
        if self.denom_exp == 0 {
            write!(f, "{body} + O({p}^{})", self.prec)
        } else {
            write!(f, "({body})/{p}^{} + O({p}^{})", self.denom_exp, self.absolute_precision())
        }
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElem[p={}, level={}]({self})", self.ctx.p(), self.level)
    }
}

impl PartialEq for CycElem {
    fn eq(&self, other: &Self) -> bool {
        self.same_value(other)
    }
}

impl Add for CycElem {
    type Output = CycElem;
    fn add(self, rhs: Self) -> Self {
        self.combine_add(&rhs, false)
    }
}

impl Sub for CycElem {
    type Output = CycElem;
    fn sub(self, rhs: Self) -> Self {
        self.combine_add(&rhs, true)
    }
}

impl Neg for CycElem {
    type Output = CycElem;
    fn neg(self) -> Self {
        let num = self.num.iter().map(|r| -r).collect();
        CycElem::build(self.ctx, self.level, num, self.prec, self.denom_exp)
    }
}

impl Mul for CycElem {
    type Output = CycElem;
    fn mul(self, rhs: Self) -> Self {
        self.mul_impl(&rhs)
    }
}

impl Scalar for CycElem {
    type Weight = Rational64;

    fn zero_like(&self) -> Self {
        CycElem::zero(&self.ctx, self.level)
    }
    fn one_like(&self) -> Self {
        CycElem::one(&self.ctx, self.level)
    }
    fn is_zero(&self) -> bool {
        CycElem::is_zero(self)
    }
    fn try_inv(&self) -> Result<Self> {
        self.inv()
    }
    fn pivot_weight(&self) -> Option<Rational64> {
        match self.pi_adic_valuation() {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.combine_add(rhs, false)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.combine_add(rhs, true)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul_impl(rhs)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        CycElem::from_int(&self.ctx, self.level, n)
    }
}

/// Exact elements of `Q(ζ_{p^m})`.
pub type RatCyc = Cyclotomic<BigRational>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicCtx;

    fn ctx(p: u64) -> Arc<PadicCtx> {
        PadicCtx::new(p, 40).unwrap()
    }

    #[test]
    fn reduction_by_phi3() {
        let c = ctx(3);
        let z = CycElem::zeta(&c, 1);
        let z2 = z.clone() * z.clone();
        let expected = -CycElem::one(&c, 1) - z.clone();
        assert_eq!(z2, expected);
    }

    #[test]
    fn cyclotomic_unit_product() {
        let c = ctx(3);
        let one = CycElem::one(&c, 1);
        let z = CycElem::zeta(&c, 1);
        let a = one.clone() + z.clone();
        let b = one.clone() + z.pow(2);
        assert!((a * b).is_one());
    }

    #[test]
    fn inverse_of_zeta() {
        let c = ctx(3);
        let z = CycElem::zeta(&c, 1);
        assert_eq!(z.inv().unwrap(), z.pow(2));
    }

    #[test]
    fn inverse_of_zeta_minus_one() {
        let c = ctx(3);
        let pi = CycElem::zeta(&c, 1) - CycElem::one(&c, 1);
        let inv = pi.inv().unwrap();
        assert_eq!(inv.valuation().unwrap(), Valuation::Finite(Rational64::new(-1, 2)));
        assert!((inv * pi).is_one());
    }

    #[test]
    fn valuations() {
        let c = ctx(3);
        assert_eq!(CycElem::from_int(&c, 1, 3).valuation().unwrap(), Valuation::int(1));
        let pi = CycElem::zeta(&c, 1) - CycElem::one(&c, 1);
        assert_eq!(pi.valuation().unwrap(), Valuation::Finite(Rational64::new(1, 2)));
        let pi9 = CycElem::zeta(&c, 2) - CycElem::one(&c, 2);
        assert_eq!(pi9.valuation().unwrap(), Valuation::Finite(Rational64::new(1, 6)));
        assert_eq!(pi9.pi_adic_valuation(), Valuation::Finite(Rational64::new(1, 6)));
        assert_eq!(CycElem::zero(&c, 2).valuation().unwrap(), Valuation::Infinite);
    }

    #[test]
    fn embedding_is_compatible() {
        let c = ctx(5);
        let z1 = CycElem::zeta(&c, 1);
        let z2 = CycElem::zeta(&c, 2);
        assert_eq!(z1.embed(2), z2.pow(5));
    }

    #[test]
    fn rational_field_inverse() {
        let z = RatCyc::zeta_pow(5, 1, 1);
        let one = RatCyc::constant(5, 1, BigRational::one());
        let x = z.clone() - one.clone();
        let inv = x.try_inv().unwrap();
        assert_eq!(inv * x, one);
    }
}
