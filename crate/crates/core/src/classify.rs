//! Classification of the primes dividing the Kummer base and assembly of
//! the exceptional term as a list of local summands.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::charelem::{ErrorClass, LocalErrorData};
use crate::error::{Error, Result};
use crate::euler::{p2_frobenius_matrix, FormData, TwistConvention};
use crate::group::decomposition_data;
use crate::linalg::Matrix;
use crate::padic::{mult_order, PadicCtx, PadicScalar};
use crate::scalar::Scalar;

/// Largest `J` tried in the fixed-point test `det(X^{f p^J} - I)`.
pub const P2_MAX_J: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeEvidence {
    pub q: u64,
    pub class: Option<ErrorClass>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeClassification {
    pub a: i64,
    pub p: u64,
    pub level: u32,
    #[serde(rename = "P0")]
    pub p0: Vec<u64>,
    #[serde(rename = "P1")]
    pub p1: Vec<u64>,
    #[serde(rename = "P2")]
    pub p2: Vec<u64>,
    pub evidence: Vec<PrimeEvidence>,
    pub override_warning: Option<String>,
}

impl PrimeClassification {
    pub fn class_of(&self, q: u64) -> Option<ErrorClass> {
        if self.p1.contains(&q) {
            Some(ErrorClass::P1)
        } else if self.p2.contains(&q) {
            Some(ErrorClass::P2)
        } else {
            None
        }
    }

    /// Copy with `P1 = P2 = ∅`.
    pub fn emptied(&self) -> Self {
        PrimeClassification { p1: Vec::new(), p2: Vec::new(), ..self.clone() }
    }
}

/// Prime factors of `|n|` in increasing order.
pub fn prime_factors(n: i64) -> Vec<(u64, u32)> {
    let mut n = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn check_kummer_base(a: i64, p: u64) -> Result<Vec<u64>> {
    if a.unsigned_abs() < 2 {
        return Err(Error::BadKummerBase(a, "|a| must be at least 2".into()));
    }
    let factors = prime_factors(a);
    if factors.iter().any(|(q, _)| *q == p) {
        return Err(Error::BadKummerBase(a, format!("divisible by p = {p}")));
    }
    if let Some((q, e)) = factors.iter().find(|(_, e)| *e as u64 >= p) {
        return Err(Error::BadKummerBase(a, format!("{q}^{e} is divisible by a {p}-th power")));
    }
    Ok(factors.into_iter().map(|(q, _)| q).collect())
}

/// `v_p(det(X^{f p^J} - I)) > 0` for some `J <= P2_MAX_J`.
pub fn p2_fixed_point_test(x: &Matrix<PadicScalar>, f: u64, p: u64) -> Result<Option<(u32, i64)>> {
    let one = x.get(0, 0).one_like();
    for j in 0..=P2_MAX_J {
        let power = x.pow(f * p.pow(j));
        let d = power.sub(&Matrix::identity_like(x.rows(), &one)).det()?;
        let v = d.ival().ok_or_else(|| {
            Error::PrecisionExhausted(format!("det(X^{{{}}} - I) vanishes at the working precision", f * p.pow(j)))
        })?;
        if v > 0 {
            return Ok(Some((j, v)));
        }
    }
    Ok(None)
}

pub fn classify_primes(
    f: &FormData,
    a: i64,
    p: u64,
    level: u32,
    ctx: &Arc<PadicCtx>,
    convention: TwistConvention,
) -> Result<PrimeClassification> {
    let p0 = check_kummer_base(a, p)?;
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut evidence = Vec::new();
    let pn = p.pow(level);
    for &q in &p0 {
        if f.is_special(q) {
            let delta = f.delta(q)?;
            let order = mult_order(q as i64, p).expect("q is prime to p");
            let hit = delta == 1 || order.is_multiple_of(2);
            let reason = if delta == 1 {
                "special, delta = +1".to_string()
            } else if hit {
                format!("special, delta = -1, order of q mod p is {order} (even)")
            } else {
                format!("special, delta = -1, order of q mod p is {order} (odd)")
            };
            if hit {
                p1.push(q);
            }
            evidence.push(PrimeEvidence { q, class: hit.then_some(ErrorClass::P1), reason });
        } else {
            let x = p2_frobenius_matrix(f, q, ctx, convention)?;
            let order = mult_order(q as i64, pn).expect("q is prime to p");
            let reason;
            let class = match p2_fixed_point_test(&x, order, p)? {
                Some((j, v)) => {
                    reason = format!("good, v(det(X^{} - I)) = {v}", order * p.pow(j));
                    p2.push(q);
                    Some(ErrorClass::P2)
                }
                None => {
                    reason = format!("good, det(X^(f p^J) - I) is a unit for f = {order}, J <= {P2_MAX_J}");
                    None
                }
            };
            evidence.push(PrimeEvidence { q, class, reason });
        }
    }
    let mut cls = PrimeClassification { a, p, level, p0, p1, p2, evidence, override_warning: None };
    if let Some(ov) = &f.classification_override {
        for &q in ov.p1.iter().chain(&ov.p2) {
            if !cls.p0.contains(&q) {
                return Err(Error::SchemaViolation(format!("override lists {q}, which does not divide a = {a}")));
            }
        }
        if let Some(q) = ov.p1.iter().find(|q| !f.is_special(**q)) {
            return Err(Error::SchemaViolation(format!("override puts {q} in P1 but it does not divide the level")));
        }
        if let Some(q) = ov.p2.iter().find(|q| f.is_special(**q)) {
            return Err(Error::SchemaViolation(format!("override puts {q} in P2 but it divides the level")));
        }
        let mut o1 = ov.p1.clone();
        let mut o2 = ov.p2.clone();
        o1.sort_unstable();
        o1.dedup();
        o2.sort_unstable();
        o2.dedup();
        if o1 != cls.p1 || o2 != cls.p2 {
            cls.override_warning = Some(format!(
                "classification override P1 = {o1:?}, P2 = {o2:?} differs from computed P1 = {:?}, P2 = {:?}",
                cls.p1, cls.p2
            ));
        }
        cls.p1 = o1;
        cls.p2 = o2;
    }
    Ok(cls)
}

#[derive(Clone, Debug)]
pub struct ErrorSummand {
    pub q: u64,
    pub class: ErrorClass,
    pub data: LocalErrorData,
}

/// One induced summand per prime of `P1 ∪ P2`.
#[derive(Clone, Debug, Default)]
pub struct ErrorTermClass {
    pub summands: Vec<ErrorSummand>,
}

impl ErrorTermClass {
    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn with_frobenius_shift(&self, c: i64) -> Self {
        let summands =
            self.summands.iter().map(|s| ErrorSummand { data: s.data.with_frobenius_shift(c), ..s.clone() }).collect();
        ErrorTermClass { summands }
    }
}

pub fn assemble_error_term(
    cls: &PrimeClassification,
    f: &FormData,
    ctx: &Arc<PadicCtx>,
    level: u32,
    convention: TwistConvention,
) -> Result<ErrorTermClass> {
    let mut summands = Vec::new();
    for &q in &cls.p0 {
        let Some(class) = cls.class_of(q) else { continue };
        let dd = decomposition_data(q, cls.p, level)?;
        let data = match class {
            ErrorClass::P1 => LocalErrorData::p1(ctx, &dd, f.delta(q)?)?,
            ErrorClass::P2 => LocalErrorData::p2(&dd, p2_frobenius_matrix(f, q, ctx, convention)?)?,
        };
        summands.push(ErrorSummand { q, class, data });
    }
    Ok(ErrorTermClass { summands })
}

/// Discriminant of `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6`.
pub fn discriminant(curve: &[i64; 5]) -> BigInt {
    let [a1, a2, a3, a4, a6] = curve.map(BigInt::from);
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
}

/// `a_q = q + 1 - #E(F_q)` by exhaustive enumeration.
pub fn count_points_weight2(curve: &[i64; 5], q: u64) -> Result<i64> {
    if !crate::padic::is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    if q > 100_000 {
        return Err(Error::InvalidArgument(format!("{q} is too large for point counting")));
    }
    if (discriminant(curve) % BigInt::from(q)) == BigInt::from(0) {
        return Err(Error::BadReduction(q));
    }
    let qi = q as i128;
    let [a1, a2, a3, a4, a6] = curve.map(|c| (c as i128).rem_euclid(qi));
    let mut count: i64 = 1;
    for x in 0..qi {
        let rhs = (((x + a2) * x % qi + a4) * x % qi + a6) % qi;
        for y in 0..qi {
            let lhs = (y * y + a1 * x * y + a3 * y) % qi;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    Ok(q as i64 + 1 - count)
}
