//! Local data of the modular form and the analytic side of the identity:
//! Euler factors at primes dividing the Kummer base and their ratios
//! between `η` and its contragredient.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::group::decomposition_data;
use crate::linalg::Matrix;
use crate::padic::{is_prime, PadicCtx, PadicScalar};
use crate::reps::ArtinRep;
use crate::scalar::Scalar;

/// Explicit classification supplied with the form data.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationOverride {
    pub p1: Vec<u64>,
    pub p2: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormData {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    pub coefficients: BTreeMap<u64, i64>,
    /// `δ_q` for the primes dividing the level.
    pub special: BTreeMap<u64, i8>,
    pub classification_override: Option<ClassificationOverride>,
}

fn is_squarefree(n: u64) -> bool {
    let mut n = n;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return false;
            }
        }
        d += 1;
    }
    true
}

impl FormData {
    /// Validates weight, level and the special-prime data. Missing `δ_q` for
    /// `q | N` is derived from `a_q = δ_q q^{k/2-1}` when `a_q` is present.
    pub fn new(
        label: impl Into<String>,
        weight: u32,
        level: u64,
        coefficients: BTreeMap<u64, i64>,
        special: BTreeMap<u64, i8>,
        classification_override: Option<ClassificationOverride>,
    ) -> Result<Self> {
        if weight < 2 || !weight.is_multiple_of(2) {
            return Err(Error::SchemaViolation(format!("weight {weight} must be even and at least 2")));
        }
        if level == 0 || !is_squarefree(level) {
            return Err(Error::SchemaViolation(format!("level {level} must be a square-free positive integer")));
        }
        for q in coefficients.keys().chain(special.keys()) {
            if !is_prime(*q) {
                return Err(Error::SchemaViolation(format!("coefficient index {q} is not prime")));
            }
        }
        let mut special = special;
        for (q, d) in &special {
            if !level.is_multiple_of(*q) {
                return Err(Error::SchemaViolation(format!("special prime {q} does not divide the level {level}")));
            }
            if *d != 1 && *d != -1 {
                return Err(Error::SchemaViolation(format!("delta at {q} must be +1 or -1")));
            }
        }
        let half = weight / 2 - 1;
        for (q, a) in &coefficients {
            if !level.is_multiple_of(*q) {
                continue;
            }
            let scale = (*q as i128).pow(half);
            let derived = if *a as i128 == scale {
                1
            } else if *a as i128 == -scale {
                -1
            } else {
                return Err(Error::InconsistentSpecialData {
                    q: *q,
                    a_q: *a,
                    delta: special.get(q).copied().unwrap_or(0),
                });
            };
            match special.get(q) {
                Some(d) if *d != derived => {
                    return Err(Error::InconsistentSpecialData { q: *q, a_q: *a, delta: *d });
                }
                Some(_) => {}
                None => {
                    special.insert(*q, derived);
                }
            }
        }
        Ok(FormData { label: label.into(), weight, level, coefficients, special, classification_override })
    }

    pub fn a_q(&self, q: u64) -> Result<i64> {
        self.coefficients.get(&q).copied().ok_or(Error::MissingCoefficient(q))
    }

    pub fn delta(&self, q: u64) -> Result<i8> {
        self.special.get(&q).copied().ok_or(Error::MissingCoefficient(q))
    }

    pub fn is_special(&self, q: u64) -> bool {
        self.level.is_multiple_of(q)
    }
}

/// Normalization of the rank-two Frobenius matrix at good primes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistConvention {
    /// Characteristic polynomial `Y² - a_q q^{-k/2} Y + q^{-1}`.
    #[default]
    PaperDisplay,
    /// The literal alternative reading, with roots scaled by a further `q^{-1}`:
    /// `Y² - a_q q^{-k/2-1} Y + q^{-3}`.
    PaperText,
}

impl fmt::Display for TwistConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwistConvention::PaperDisplay => write!(f, "paper-display"),
            TwistConvention::PaperText => write!(f, "paper-text"),
        }
    }
}

impl FromStr for TwistConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-display" => Ok(TwistConvention::PaperDisplay),
            "paper-text" => Ok(TwistConvention::PaperText),
            _ => Err(Error::InvalidArgument(format!("unknown twist convention {s}"))),
        }
    }
}

/// `(s, t) = (a_q q^{1-k/2}, q)`, the sum and product of the twisted roots.
pub fn twisted_frobenius_data(f: &FormData, q: u64, ctx: &Arc<PadicCtx>) -> Result<(PadicScalar, PadicScalar)> {
    if f.is_special(q) {
        return Err(Error::InvalidArgument(format!("{q} divides the level")));
    }
    if q == ctx.p() as u64 {
        return Err(Error::UnsupportedPrime(q));
    }
    let a = f.a_q(q)?;
    let scale = (q as i128).pow(f.weight / 2 - 1);
    let s = PadicScalar::from_ratio(ctx, a, num_bigint::BigInt::from(scale))?;
    Ok((s, PadicScalar::from_int(ctx, q as i64)))
}

/// Frobenius matrix of the rank-two module at a good prime, as the
/// companion matrix of its characteristic polynomial.
pub fn p2_frobenius_matrix(
    f: &FormData,
    q: u64,
    ctx: &Arc<PadicCtx>,
    convention: TwistConvention,
) -> Result<Matrix<PadicScalar>> {
    let (s, _) = twisted_frobenius_data(f, q, ctx)?;
    let qq = PadicScalar::from_int(ctx, q as i64);
    let q_inv = qq.checked_inv()?;
    let (trace, det) = match convention {
        TwistConvention::PaperDisplay => (s.mul_ref(&q_inv), q_inv.clone()),
        TwistConvention::PaperText => (s.mul_ref(&q_inv).mul_ref(&q_inv), q_inv.pow(3)),
    };
    let zero = PadicScalar::zero(ctx);
    let one = PadicScalar::one(ctx);
    Ok(Matrix::from_rows(vec![vec![zero, -det], vec![one, trace]]))
}

#[derive(Clone, Debug)]
pub struct EulerFactorValue {
    pub value: CycElem,
    pub degree: u32,
}

/// `P_q(f, η, q^{-k/2})`, with `ψ(F_q)` the value at the geometric
/// Frobenius `F_q = Frob_q^{-1}`.
pub fn euler_factor(f: &FormData, eta: &ArtinRep, q: u64) -> Result<EulerFactorValue> {
    let rc = eta.context();
    let ctx = rc.padic();
    if q == rc.prime() as u64 {
        return Err(Error::UnsupportedPrime(q));
    }
    let dd = decomposition_data(q, rc.prime() as u64, rc.level())?;
    let one = CycElem::one(ctx, eta.level());
    if eta.inertia_invariants_dim(&dd)? == 0 {
        return Ok(EulerFactorValue { value: one, degree: 0 });
    }
    if !eta.is_one_dimensional() {
        return Err(Error::InvalidArgument(format!("{} has inertia invariants at {q}", eta.label())));
    }
    let y = eta.contragredient().psi_at(q);
    let q_inv = PadicScalar::from_int(ctx, q as i64).checked_inv()?;
    let yq = y.scale(&q_inv);
    if f.is_special(q) {
        let delta = PadicScalar::from_int(ctx, f.delta(q)? as i64);
        return Ok(EulerFactorValue { value: one.sub_ref(&yq.scale(&delta)), degree: 1 });
    }
    let (s, t) = twisted_frobenius_data(f, q, ctx)?;
    let value = one.sub_ref(&yq.scale(&s)).add_ref(&yq.mul_ref(&yq).scale(&t));
    Ok(EulerFactorValue { value, degree: 2 })
}

/// `Π_q P_q(f, η) / P_q(f, η*)`.
pub fn euler_ratio_product(f: &FormData, eta: &ArtinRep, primes: &[u64]) -> Result<CycElem> {
    let dual = eta.contragredient();
    let mut acc = CycElem::one(eta.context().padic(), eta.level());
    for &q in primes {
        let num = euler_factor(f, eta, q)?.value;
        let den = euler_factor(f, &dual, q)?.value;
        if den.is_zero() {
            return Err(Error::DivisionByIndeterminate(q));
        }
        acc = acc.checked_mul(&num)?.checked_mul(&den.inv()?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Valuation;
    use crate::reps::RepContext;

    pub(crate) fn form_11a() -> FormData {
        let coeffs = [(2, -2), (3, -1), (5, 1), (7, -2), (11, 1)].into_iter().collect();
        let special = [(11, 1)].into_iter().collect();
        FormData::new("11a1", 2, 11, coeffs, special, None).unwrap()
    }

    #[test]
    fn schema_checks() {
        let e = FormData::new("x", 3, 11, BTreeMap::new(), BTreeMap::new(), None);
        assert!(matches!(e, Err(Error::SchemaViolation(_))));
        let e = FormData::new("x", 2, 12, BTreeMap::new(), BTreeMap::new(), None);
        assert!(matches!(e, Err(Error::SchemaViolation(_))));
        let coeffs = [(11, 1)].into_iter().collect();
        let special = [(11, -1)].into_iter().collect();
        let e = FormData::new("x", 2, 11, coeffs, special, None);
        assert!(matches!(e, Err(Error::InconsistentSpecialData { .. })));
    }

    #[test]
    fn weight_four_twist() {
        let ctx = PadicCtx::new(5, 20).unwrap();
        let f = FormData::new("w4", 4, 1, [(7, 3)].into_iter().collect(), BTreeMap::new(), None).unwrap();
        let (s, t) = twisted_frobenius_data(&f, 7, &ctx).unwrap();
        assert_eq!(s, PadicScalar::from_ratio(&ctx, 3, 7).unwrap());
        assert_eq!(t, PadicScalar::from_int(&ctx, 7));
    }

    #[test]
    fn special_trivial_factor() {
        let ctx = PadicCtx::new(5, 40).unwrap();
        let rc = RepContext::new(&ctx, 1).unwrap();
        let e = euler_factor(&form_11a(), &rc.trivial(), 11).unwrap();
        assert_eq!(e.degree, 1);
        assert_eq!(e.value.valuation().unwrap(), Valuation::int(1));
        let expected = PadicScalar::from_ratio(&ctx, 10, 11).unwrap();
        assert_eq!(e.value, CycElem::from_scalar(&expected, 1));
    }

    #[test]
    fn theta_factors_are_one() {
        let ctx = PadicCtx::new(5, 40).unwrap();
        let rc = RepContext::new(&ctx, 1).unwrap();
        let th = rc.theta(1, 0, 0).unwrap();
        let e = euler_factor(&form_11a(), &th, 11).unwrap();
        assert_eq!(e.degree, 0);
        assert!(e.value.is_one());
        assert!(euler_ratio_product(&form_11a(), &th, &[2, 11]).unwrap().is_one());
    }
}
