//! Characteristic elements of the local modules at primes dividing the
//! Kummer base, and their evaluation at Artin representations.
//!
//! For a Frobenius matrix `X` of rank `r` the module `N` is annihilated by
//! `Frob - X` and its submodule `M` by `Frob - S_q X` with
//! `S_q = 1 + h + ... + h^{q-1}`. Evaluating at `η` means taking
//! `det(η(Frob) ⊗ I_r - η(G) ⊗ X)` with `G` equal to `1` or `S_q`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::group::{geometric_sum, DecompData, GroupAlgElem};
use crate::linalg::{deflate_at_one, poly_eval, Matrix};
use crate::padic::{PadicCtx, PadicScalar, Valuation};
use crate::reps::ArtinRep;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModuleKind {
    N,
    M,
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleKind::N => write!(f, "N"),
            ModuleKind::M => write!(f, "M"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalModuleSpec {
    pub dd: DecompData,
    pub frob_matrix: Matrix<PadicScalar>,
    pub kind: ModuleKind,
}

impl LocalModuleSpec {
    pub fn new(dd: DecompData, frob_matrix: Matrix<PadicScalar>, kind: ModuleKind) -> Result<Self> {
        if !frob_matrix.is_square() || frob_matrix.rows() == 0 {
            return Err(Error::InvalidArgument("Frobenius matrix must be square and nonempty".into()));
        }
        if frob_matrix.det()?.is_zero() {
            return Err(Error::InvalidArgument("Frobenius matrix is not invertible".into()));
        }
        Ok(LocalModuleSpec { dd, frob_matrix, kind })
    }

    pub fn rank_one(dd: DecompData, x: PadicScalar, kind: ModuleKind) -> Result<Self> {
        LocalModuleSpec::new(dd, Matrix::from_rows(vec![vec![x]]), kind)
    }

    pub fn rank(&self) -> usize {
        self.frob_matrix.rows()
    }

    pub fn with_kind(&self, kind: ModuleKind) -> Self {
        LocalModuleSpec { kind, ..self.clone() }
    }
}

/// `frob_part ⊗ I_r - x_part ⊗ X`.
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub frob_part: GroupAlgElem,
    pub x_part: GroupAlgElem,
    pub x: Matrix<PadicScalar>,
}

pub fn annihilator(spec: &LocalModuleSpec) -> Annihilator {
    let frob_part = GroupAlgElem::basis(spec.dd.frob);
    let x_part = match spec.kind {
        ModuleKind::N => GroupAlgElem::basis(spec.dd.group.identity()),
        ModuleKind::M => geometric_sum(&spec.dd),
    };
    Annihilator { frob_part, x_part, x: spec.frob_matrix.clone() }
}

impl Annihilator {
    fn lift(level: u32) -> impl Fn(&PadicScalar) -> CycElem {
        move |s| CycElem::from_scalar(s, level)
    }

    /// `η(Frob) ⊗ I_r` and `η(G) ⊗ X`.
    fn blocks(&self, eta: &ArtinRep) -> Result<(Matrix<CycElem>, Matrix<CycElem>)> {
        let level = eta.level();
        let ctx = eta.context().padic();
        let id = Matrix::identity_like(self.x.rows(), &PadicScalar::one(ctx));
        let a = eta.apply_to_algebra_elem(&self.frob_part)?.kron_with(&id, Annihilator::lift(level));
        let b = eta.apply_to_algebra_elem(&self.x_part)?.kron_with(&self.x, Annihilator::lift(level));
        Ok((a, b))
    }

    pub fn evaluate_matrix(&self, eta: &ArtinRep) -> Result<Matrix<CycElem>> {
        let (a, b) = self.blocks(eta)?;
        Ok(a.sub(&b))
    }

    /// `det(t A - B)` as `det(A)` and the monic polynomial `det(t - A^{-1} B)`.
    fn pencil(&self, eta: &ArtinRep) -> Result<(CycElem, Vec<CycElem>)> {
        let level = eta.level();
        let ctx = eta.context().padic();
        let id = Matrix::identity_like(self.x.rows(), &PadicScalar::one(ctx));
        let frob_inv = GroupAlgElem::basis(self.frob_part.terms().next().expect("frobenius term").0.inverse());
        let a_inv = eta.apply_to_algebra_elem(&frob_inv)?.kron_with(&id, Annihilator::lift(level));
        let (a, b) = self.blocks(eta)?;
        let det_a = a.det()?;
        let poly = a_inv.mul(&b).charpoly()?;
        Ok((det_a, poly))
    }
}

#[derive(Clone, Debug)]
pub enum EvalValue {
    Finite(CycElem),
    Indeterminate,
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: EvalValue,
    /// `None` when the value is indeterminate.
    pub valuation: Option<Valuation>,
    pub cancelled_factors: Vec<String>,
}

impl EvalResult {
    pub fn finite(value: CycElem, cancelled_factors: Vec<String>) -> Result<Self> {
        let valuation = Some(value.valuation()?);
        Ok(EvalResult { value: EvalValue::Finite(value), valuation, cancelled_factors })
    }

    pub fn indeterminate(cancelled_factors: Vec<String>) -> Self {
        EvalResult { value: EvalValue::Indeterminate, valuation: None, cancelled_factors }
    }

    pub fn value(&self) -> Option<&CycElem> {
        match &self.value {
            EvalValue::Finite(v) => Some(v),
            EvalValue::Indeterminate => None,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self.value, EvalValue::Indeterminate)
    }
}

fn evaluate_det(spec: &LocalModuleSpec, eta: &ArtinRep) -> Result<CycElem> {
    if spec.dd.level() != eta.level() {
        return Err(Error::LevelMismatch(spec.dd.level(), eta.level()));
    }
    annihilator(spec).evaluate_matrix(eta)?.det()
}

/// `η` applied to the characteristic element of the module.
pub fn evaluate(spec: &LocalModuleSpec, eta: &ArtinRep) -> Result<EvalResult> {
    let d = evaluate_det(spec, eta)?;
    if d.is_zero() {
        Ok(EvalResult::indeterminate(Vec::new()))
    } else {
        EvalResult::finite(d, Vec::new())
    }
}

/// The closed forms `ψ(Frob) - x` and `ψ(Frob) - q x` for a character and a
/// rank-one module.
pub fn lemma_closed_form(kind: ModuleKind, psi_frob: &CycElem, q: u64, x: &PadicScalar) -> CycElem {
    let c = match kind {
        ModuleKind::N => x.clone(),
        ModuleKind::M => x.mul_ref(&PadicScalar::from_int(x.ctx(), q as i64)),
    };
    psi_frob.sub_ref(&CycElem::from_scalar(&c, psi_frob.level()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ErrorClass {
    P1,
    P2,
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorClass::P1 => write!(f, "P1"),
            ErrorClass::P2 => write!(f, "P2"),
        }
    }
}

/// The local module data of one summand: `N`-specs whose ratio against the
/// matching `M`-specs gives the local evaluation.
#[derive(Clone, Debug)]
pub struct LocalErrorData {
    pub class: ErrorClass,
    pub specs: Vec<LocalModuleSpec>,
}

impl LocalErrorData {
    /// Rank-one pieces `x = δ` and `x = δ/q`.
    pub fn p1(ctx: &Arc<PadicCtx>, dd: &DecompData, delta: i8) -> Result<Self> {
        let d = PadicScalar::from_int(ctx, delta as i64);
        let dq = PadicScalar::from_ratio(ctx, delta as i64, dd.q as i64)?;
        Ok(LocalErrorData {
            class: ErrorClass::P1,
            specs: vec![
                LocalModuleSpec::rank_one(dd.clone(), d, ModuleKind::N)?,
                LocalModuleSpec::rank_one(dd.clone(), dq, ModuleKind::N)?,
            ],
        })
    }

    pub fn p2(dd: &DecompData, x: Matrix<PadicScalar>) -> Result<Self> {
        Ok(LocalErrorData { class: ErrorClass::P2, specs: vec![LocalModuleSpec::new(dd.clone(), x, ModuleKind::N)?] })
    }

    pub fn q(&self) -> u64 {
        self.specs[0].dd.q
    }

    pub fn with_frobenius_shift(&self, c: i64) -> Self {
        let specs =
            self.specs.iter().map(|s| LocalModuleSpec { dd: s.dd.with_frobenius_shift(c), ..s.clone() }).collect();
        LocalErrorData { class: self.class, specs }
    }
}

struct Factor {
    spec: LocalModuleSpec,
    label: String,
    value: Option<CycElem>,
}

fn cancel_equal(num: &mut Vec<Factor>, den: &mut Vec<Factor>, log: &mut Vec<String>) {
    let mut i = 0;
    while i < num.len() {
        let hit = num[i].value.as_ref().and_then(|v| {
            if v.is_zero() {
                return None;
            }
            den.iter().position(|d| d.value.as_ref().is_some_and(|w| w.same_value(v)))
        });
        if let Some(j) = hit {
            let d = den.remove(j);
            let n = num.remove(i);
            log.push(format!("{} against {} (equal values)", n.label, d.label));
        } else {
            i += 1;
        }
    }
}

/// Ratio `Π evaluate(N_i) / Π evaluate(M_i)` for one summand of the error
/// term, with removable singularities cancelled.
pub fn local_error_eval(data: &LocalErrorData, eta: &ArtinRep) -> Result<EvalResult> {
    let mut log = Vec::new();
    let mut num: Vec<Factor> = Vec::new();
    let mut den: Vec<Factor> = Vec::new();
    for s in &data.specs {
        if s.dd.level() != eta.level() {
            return Err(Error::LevelMismatch(s.dd.level(), eta.level()));
        }
        let sn = s.with_kind(ModuleKind::N);
        let sm = s.with_kind(ModuleKind::M);
        num.push(Factor { label: format!("N[{}]", describe(&sn)), spec: sn, value: None });
        den.push(Factor { label: format!("M[{}]", describe(&sm)), spec: sm, value: None });
    }

    // Linear factors ψ(F) - c held symbolically.
    if eta.is_one_dimensional() {
        let mut i = 0;
        while i < num.len() {
            let hit = constant_term(&num[i].spec)
                .and_then(|c| den.iter().position(|d| constant_term(&d.spec).is_some_and(|e| e.same_value(&c))));
            if let Some(j) = hit {
                let c = constant_term(&num[i].spec).expect("rank one");
                log.push(format!("(psi(F) - {}) common to {} and {}", c.short_string(), num[i].label, den[j].label));
                num.remove(i);
                den.remove(j);
            } else {
                i += 1;
            }
        }
    }

    for f in num.iter_mut().chain(den.iter_mut()) {
        f.value = Some(evaluate_det(&f.spec, eta)?);
    }
    cancel_equal(&mut num, &mut den, &mut log);

    let zeros = |fs: &[Factor]| fs.iter().filter(|f| f.value.as_ref().is_some_and(|v| v.is_zero())).count();
    if zeros(&num) + zeros(&den) > 0 {
        let mut order_num = 0;
        let mut order_den = 0;
        for (fs, order) in [(&mut num, &mut order_num), (&mut den, &mut order_den)] {
            for f in fs.iter_mut() {
                if !f.value.as_ref().is_some_and(|v| v.is_zero()) {
                    continue;
                }
                let (det_a, mut poly) = annihilator(&f.spec).pencil(eta)?;
                let one = det_a.one_like();
                let mut k = 0;
                while !poly.is_empty() && poly_eval(&poly, &one).is_zero() {
                    poly = deflate_at_one(&poly);
                    k += 1;
                }
                if poly.is_empty() {
                    return Err(Error::PrecisionExhausted(format!(
                        "pencil polynomial of {} vanishes identically",
                        f.label
                    )));
                }
                *order += k;
                log.push(format!("{} regularized: (t - 1)^{k} removed from det(t Frob - G X)", f.label));
                f.value = Some(det_a.mul_ref(&poly_eval(&poly, &one)));
            }
        }
        if order_num != order_den {
            log.push(format!("zero of order {order_num} over zero of order {order_den}"));
            return Ok(EvalResult::indeterminate(log));
        }
        cancel_equal(&mut num, &mut den, &mut log);
    }

    let ctx = eta.context().padic();
    let mut value = CycElem::one(ctx, eta.level());
    for f in &num {
        value = value.checked_mul(f.value.as_ref().expect("evaluated"))?;
    }
    for f in &den {
        value = value.checked_mul(&f.value.as_ref().expect("evaluated").inv()?)?;
    }
    EvalResult::finite(value, log)
}

/// The constant `c` of a rank-one factor `ψ(F) - c`.
fn constant_term(spec: &LocalModuleSpec) -> Option<PadicScalar> {
    if spec.rank() != 1 {
        return None;
    }
    let x = spec.frob_matrix.get(0, 0).clone();
    Some(match spec.kind {
        ModuleKind::N => x,
        ModuleKind::M => x.mul_ref(&PadicScalar::from_int(x.ctx(), spec.dd.q as i64)),
    })
}

fn describe(spec: &LocalModuleSpec) -> String {
    if spec.rank() == 1 {
        format!("q={}, x={}", spec.dd.q, spec.frob_matrix.get(0, 0).short_string())
    } else {
        format!("q={}, rank {}", spec.dd.q, spec.rank())
    }
}

/// Orbits of multiplication by `q` on `(Z/p^n)^×`.
pub fn frobenius_orbits(p: u32, level: u32, q: u64) -> Vec<Vec<u64>> {
    let m = (p as u64).pow(level);
    let mut seen = vec![false; m as usize];
    let mut orbits = Vec::new();
    for c in 1..m {
        if c % p as u64 == 0 || seen[c as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = c;
        while !seen[x as usize] {
            seen[x as usize] = true;
            orbit.push(x);
            x = x * (q % m) % m;
        }
        orbits.push(orbit);
    }
    orbits
}

/// `Π_{c ∈ O} (ζ^{qc} - 1)/(ζ^c - 1)` for `ζ = ζ_{p^n}`.
pub fn cycle_product(ctx: &Arc<PadicCtx>, level: u32, q: u64, orbit: &[u64]) -> Result<CycElem> {
    let m = (ctx.p() as u64).pow(level);
    let one = CycElem::one(ctx, level);
    let zeta = CycElem::zeta(ctx, level);
    let mut num = one.clone();
    let mut den = one.clone();
    for &c in orbit {
        num = num.checked_mul(&zeta.pow(q % m * c % m).sub_ref(&one))?;
        den = den.checked_mul(&zeta.pow(c).sub_ref(&one))?;
    }
    num.checked_mul(&den.inv()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::decomposition_data;
    use crate::reps::RepContext;
    use num_rational::Rational64;

    #[test]
    fn rank_one_trivial_character() {
        let ctx = PadicCtx::new(5, 40).unwrap();
        let rc = RepContext::new(&ctx, 1).unwrap();
        let dd = decomposition_data(2, 5, 1).unwrap();
        let n = LocalModuleSpec::rank_one(dd.clone(), PadicScalar::from_int(&ctx, 2), ModuleKind::N).unwrap();
        let r = evaluate(&n, &rc.trivial()).unwrap();
        assert!(r.value().unwrap().same_value(&CycElem::from_int(&ctx, 1, -1)));
        let m = LocalModuleSpec::rank_one(dd, PadicScalar::from_int(&ctx, 3), ModuleKind::M).unwrap();
        let r = evaluate(&m, &rc.trivial()).unwrap();
        assert!(r.value().unwrap().same_value(&CycElem::from_int(&ctx, 1, -5)));
        assert_eq!(r.valuation, Some(Valuation::int(1)));
    }

    #[test]
    fn theta_two_by_two() {
        let ctx = PadicCtx::new(3, 40).unwrap();
        let rc = RepContext::new(&ctx, 1).unwrap();
        let dd = decomposition_data(2, 3, 1).unwrap();
        let th = rc.theta(1, 0, 0).unwrap();
        let x = PadicScalar::from_int(&ctx, 2);
        for kind in [ModuleKind::N, ModuleKind::M] {
            let s = LocalModuleSpec::rank_one(dd.clone(), x.clone(), kind).unwrap();
            let v = evaluate(&s, &th).unwrap();
            assert!(v.value().unwrap().same_value(&CycElem::from_int(&ctx, 1, 3)), "{kind}");
        }
    }

    #[test]
    fn hand_cycle_product() {
        let ctx = PadicCtx::new(3, 40).unwrap();
        assert_eq!(frobenius_orbits(3, 1, 2), vec![vec![1, 2]]);
        assert!(cycle_product(&ctx, 1, 2, &[1, 2]).unwrap().is_one());
    }

    #[test]
    fn p1_degenerate_character_cancels() {
        // q = 11 is 1 mod 5, so every character takes the value 1 = δ at Frobenius.
        let ctx = PadicCtx::new(5, 40).unwrap();
        let rc = RepContext::new(&ctx, 1).unwrap();
        let dd = decomposition_data(11, 5, 1).unwrap();
        let data = LocalErrorData::p1(&ctx, &dd, 1).unwrap();
        let r = local_error_eval(&data, &rc.trivial()).unwrap();
        assert_eq!(r.valuation, Some(Valuation::Finite(Rational64::from_integer(0))));
        assert!(!r.cancelled_factors.is_empty());
        let th = local_error_eval(&data, &rc.theta(1, 0, 0).unwrap()).unwrap();
        assert!(th.value().unwrap().is_one());
    }
}
