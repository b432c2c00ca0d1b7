//! Irreducible Artin representations of `G_n`: the characters `ψ` of the
//! cyclotomic quotient and the induced representations `θ_m ψ`.
//!
//! A character is `ψ_{i,j}(u) = ω(u)^i ζ_{p^{n-1}}^{j e(u)}` where
//! `u = ω(u) (1+p)^{e(u)}`. For `m >= 1` the representation `θ_m ψ` acts on
//! a basis indexed by `u ∈ (Z/p^m)^×` through
//! `(v, c) e_u = ψ(v) ζ_{p^m}^{(vu)^{-1} c} e_{vu}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::group::{inv_mod, DecompData, FalseTateGroup, GroupAlgElem, GroupElem};
use crate::linalg::Matrix;
use crate::padic::{teichmuller, PadicCtx, PadicScalar};
use crate::scalar::Scalar;

/// Shared tables for all representations of one `G_n`.
pub struct RepContext {
    ctx: Arc<PadicCtx>,
    group: FalseTateGroup,
    /// `ω(r)` for `r = 0..p` (index 0 unused).
    omega: Vec<PadicScalar>,
    /// `e(u)` for units `u mod p^n`.
    dlog: HashMap<u64, u64>,
}

impl fmt::Debug for RepContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepContext(p={}, n={})", self.group.prime(), self.group.level())
    }
}

impl RepContext {
    pub fn new(ctx: &Arc<PadicCtx>, level: u32) -> Result<Arc<Self>> {
        let p = ctx.p();
        let group = FalseTateGroup::new(p as u64, level)?;
        let m = group.modulus();
        let mut omega = vec![PadicScalar::zero(ctx)];
        for r in 1..p {
            omega.push(teichmuller(ctx, r as i64)?);
        }
        let omega_mod: Vec<u64> = omega
            .iter()
            .map(|w| {
                let r = w.residue() % num_bigint::BigInt::from(m);
                r.try_into().unwrap_or(0)
            })
            .collect();
        let mut log_one = HashMap::new();
        let mut x = 1u64;
        for e in 0..m / p as u64 {
            log_one.insert(x, e);
            x = x * (1 + p as u64) % m;
        }
        let mut dlog = HashMap::new();
        for u in group.units() {
            let w = omega_mod[(u % p as u64) as usize];
            let one_unit = (u as u128 * inv_mod(w, m) as u128 % m as u128) as u64;
            dlog.insert(u, log_one[&one_unit]);
        }
        Ok(Arc::new(RepContext { ctx: ctx.clone(), group, omega, dlog }))
    }

    pub fn padic(&self) -> &Arc<PadicCtx> {
        &self.ctx
    }

    pub fn group(&self) -> FalseTateGroup {
        self.group
    }

    pub fn level(&self) -> u32 {
        self.group.level()
    }

    pub fn prime(&self) -> u32 {
        self.group.prime()
    }

    fn wild_order(&self) -> u64 {
        self.group.modulus() / self.prime() as u64
    }

    /// Exponent `e(u)` with `u = ω(u) (1+p)^{e(u)}`.
    pub fn discrete_log(&self, u: u64) -> u64 {
        self.dlog[&(u % self.group.modulus())]
    }

    pub fn teichmuller(&self, u: u64) -> &PadicScalar {
        &self.omega[(u % self.prime() as u64) as usize]
    }

    /// `ζ_{p^n}^k` at the working level.
    pub fn zeta_pow(&self, k: u64) -> CycElem {
        CycElem::monomial(&PadicScalar::one(&self.ctx), self.level(), k)
    }

    fn psi_value(&self, tame: u32, wild: u64, u: u64) -> CycElem {
        let w = self.teichmuller(u).pow(tame as u64);
        let p = self.prime() as u64;
        let k = (p * wild % self.group.modulus()) * self.discrete_log(u) % self.group.modulus();
        CycElem::monomial(&w, self.level(), k)
    }

    fn rep(self: &Arc<Self>, label: RepLabel) -> ArtinRep {
        let psi_vals = self.group.units().into_iter().map(|u| (u, self.psi_value(label.tame, label.wild, u))).collect();
        ArtinRep { rc: self.clone(), label, psi_vals: Arc::new(psi_vals) }
    }

    fn check_psi(&self, tame: u32, wild: u64) -> Result<()> {
        if tame >= self.prime() - 1 || wild >= self.wild_order() {
            return Err(Error::InvalidArgument(format!(
                "character exponents ({tame}, {wild}) out of range for p = {}, n = {}",
                self.prime(),
                self.level()
            )));
        }
        Ok(())
    }

    pub fn psi(self: &Arc<Self>, tame: u32, wild: u64) -> Result<ArtinRep> {
        self.check_psi(tame, wild)?;
        Ok(self.rep(RepLabel { tame, wild, theta_level: 0, dual: false }))
    }

    pub fn theta(self: &Arc<Self>, m: u32, tame: u32, wild: u64) -> Result<ArtinRep> {
        self.check_psi(tame, wild)?;
        if m == 0 || m > self.level() {
            return Err(Error::InvalidArgument(format!("theta level {m} outside 1..={}", self.level())));
        }
        Ok(self.rep(RepLabel { tame, wild, theta_level: m, dual: false }))
    }

    pub fn trivial(self: &Arc<Self>) -> ArtinRep {
        self.rep(RepLabel { tame: 0, wild: 0, theta_level: 0, dual: false })
    }
}

/// `theta_level = 0` marks a one-dimensional character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RepLabel {
    pub tame: u32,
    pub wild: u64,
    pub theta_level: u32,
    pub dual: bool,
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let psi = format!("psi({},{})", self.tame, self.wild);
        match self.theta_level {
            0 => write!(f, "{psi}"),
            m if self.dual => write!(f, "(theta_{m}*{psi})^*"),
            m => write!(f, "theta_{m}*{psi}"),
        }
    }
}

#[derive(Clone)]
pub struct ArtinRep {
    rc: Arc<RepContext>,
    label: RepLabel,
    psi_vals: Arc<HashMap<u64, CycElem>>,
}

impl fmt::Debug for ArtinRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArtinRep({} on G_{} at p = {})", self.label, self.rc.level(), self.rc.prime())
    }
}

impl ArtinRep {
    pub fn label(&self) -> RepLabel {
        self.label
    }

    pub fn context(&self) -> &Arc<RepContext> {
        &self.rc
    }

    pub fn level(&self) -> u32 {
        self.rc.level()
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.label.theta_level == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.label.theta_level == 0 && self.label.tame == 0 && self.label.wild == 0
    }

    /// Basis of `θ_m`: the units modulo `p^m`.
    pub fn basis(&self) -> Vec<u64> {
        let m = self.label.theta_level;
        if m == 0 {
            return vec![1];
        }
        let p = self.rc.prime() as u64;
        (1..p.pow(m)).filter(|u| u % p != 0).collect()
    }

    pub fn dimension(&self) -> usize {
        match self.label.theta_level {
            0 => 1,
            m => (self.rc.prime() as usize - 1) * (self.rc.prime() as usize).pow(m - 1),
        }
    }

    /// Value of the underlying character `ψ` at a unit.
    pub fn psi_at(&self, u: u64) -> CycElem {
        self.psi_vals[&(u % self.rc.group.modulus())].clone()
    }

    fn check_level(&self, g: &GroupElem) -> Result<()> {
        if g.level() != self.level() || g.prime() != self.rc.prime() {
            return Err(Error::LevelMismatch(g.level(), self.level()));
        }
        Ok(())
    }

    /// `ρ(g)` as a monomial matrix: column `j` has the single entry
    /// `scalars[j]` in row `targets[j]`.
    fn monomial_action(&self, g: &GroupElem) -> (Vec<usize>, Vec<CycElem>) {
        let m = self.label.theta_level;
        if m == 0 {
            return (vec![0], vec![self.psi_at(g.u())]);
        }
        if self.label.dual {
            let (t, s) = self.undual().monomial_action(&g.inverse());
            let mut targets = vec![0; t.len()];
            let mut scalars = vec![CycElem::zero(self.rc.padic(), self.level()); t.len()];
            for (col, (row, x)) in t.into_iter().zip(s).enumerate() {
                targets[row] = col;
                scalars[row] = x;
            }
            return (targets, scalars);
        }
        let p = self.rc.prime() as u64;
        let pm = p.pow(m);
        let n = self.level();
        let shift = p.pow(n - m);
        let basis = self.basis();
        let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, u)| (*u, i)).collect();
        let psi = self.psi_at(g.u());
        let mut targets = Vec::with_capacity(basis.len());
        let mut scalars = Vec::with_capacity(basis.len());
        for u in &basis {
            let vu = g.u() % pm * u % pm;
            let k = inv_mod(vu, pm) * (g.b() % pm) % pm;
            targets.push(index[&vu]);
            scalars.push(psi.mul_ref(&self.rc.zeta_pow(k * shift)));
        }
        (targets, scalars)
    }

    fn undual(&self) -> ArtinRep {
        let mut r = self.clone();
        r.label.dual = false;
        r
    }

    pub fn matrix_of(&self, g: &GroupElem) -> Result<Matrix<CycElem>> {
        self.check_level(g)?;
        let (targets, scalars) = self.monomial_action(g);
        let d = targets.len();
        let zero = CycElem::zero(self.rc.padic(), self.level());
        let mut out = Matrix::from_fn(d, d, |_, _| zero.clone());
        for (col, (row, x)) in targets.into_iter().zip(scalars).enumerate() {
            out.set(row, col, x);
        }
        Ok(out)
    }

    /// Trace of `ρ(g)`; nonzero only when `g` fixes every basis vector.
    pub fn character(&self, g: &GroupElem) -> Result<CycElem> {
        self.check_level(g)?;
        if self.label.dual {
            return self.undual().character(&g.inverse());
        }
        let m = self.label.theta_level;
        if m == 0 {
            return Ok(self.psi_at(g.u()));
        }
        let p = self.rc.prime() as u64;
        let pm = p.pow(m);
        if g.u() % pm != 1 {
            return Ok(CycElem::zero(self.rc.padic(), self.level()));
        }
        let shift = p.pow(self.level() - m);
        let mut sum = CycElem::zero(self.rc.padic(), self.level());
        for u in self.basis() {
            let k = inv_mod(u, pm) * (g.b() % pm) % pm;
            sum = sum.add_ref(&self.rc.zeta_pow(k * shift));
        }
        Ok(sum.mul_ref(&self.psi_at(g.u())))
    }

    /// `Σ_g c_g ρ(g)`.
    pub fn apply_to_algebra_elem(&self, x: &GroupAlgElem) -> Result<Matrix<CycElem>> {
        if x.level() != self.level() {
            return Err(Error::LevelMismatch(x.level(), self.level()));
        }
        let d = self.dimension();
        let zero = CycElem::zero(self.rc.padic(), self.level());
        let mut out = Matrix::from_fn(d, d, |_, _| zero.clone());
        for (g, c) in x.terms() {
            let (targets, scalars) = self.monomial_action(g);
            let c = CycElem::from_int(self.rc.padic(), self.level(), *c);
            for (col, (row, s)) in targets.into_iter().zip(scalars).enumerate() {
                let v = out.get(row, col).add_ref(&s.mul_ref(&c));
                out.set(row, col, v);
            }
        }
        Ok(out)
    }

    /// The contragredient `g ↦ ρ(g^{-1})^T`.
    pub fn contragredient(&self) -> ArtinRep {
        if self.is_one_dimensional() {
            let p = self.rc.prime();
            let w = self.rc.wild_order();
            let tame = (p - 1 - self.label.tame) % (p - 1);
            let wild = (w - self.label.wild) % w;
            return self.rc.rep(RepLabel { tame, wild, theta_level: 0, dual: false });
        }
        let mut r = self.clone();
        r.label.dual = !r.label.dual;
        r
    }

    /// Dimension of the fixed space of the inertia generator at `q`.
    pub fn inertia_invariants_dim(&self, dd: &DecompData) -> Result<usize> {
        let m = self.matrix_of(&dd.inertia_gen)?;
        let one = CycElem::one(self.rc.padic(), self.level());
        let shifted = m.sub(&Matrix::identity_like(self.dimension(), &one));
        Ok(self.dimension() - shifted.rank()?)
    }

    /// Multiplicities of the eigenvalues `+1` and `-1` of complex conjugation
    /// `(-1, 0)`.
    pub fn complex_conjugation_signs(&self) -> Result<(usize, usize)> {
        let c = self.rc.group.element(-1, 0)?;
        let tr = self.character(&c)?;
        let t = tr
            .as_scalar()
            .and_then(|s| s.to_small_int())
            .ok_or_else(|| Error::PrecisionExhausted("trace of complex conjugation is not an integer".into()))?;
        let d = self.dimension() as i64;
        Ok((((d + t) / 2) as usize, ((d - t) / 2) as usize))
    }

    /// The same representation viewed on `G_{n+1}` through the quotient map.
    pub fn inflate(&self, next: &Arc<RepContext>) -> Result<ArtinRep> {
        if next.level() != self.level() + 1 || next.prime() != self.rc.prime() {
            return Err(Error::LevelMismatch(self.level(), next.level()));
        }
        let label = RepLabel { wild: self.label.wild * self.rc.prime() as u64, ..self.label };
        Ok(next.rep(label))
    }
}

/// All irreducible representations of `G_n`, one per isomorphism class.
pub fn enumerate_irreps(rc: &Arc<RepContext>) -> Result<Vec<ArtinRep>> {
    let p = rc.prime();
    let elements = rc.group().elements();
    let mut out = Vec::new();
    for tame in 0..p - 1 {
        for wild in 0..rc.wild_order() {
            out.push(rc.psi(tame, wild)?);
        }
    }
    for m in 1..=rc.level() {
        let mut kept: Vec<Vec<CycElem>> = Vec::new();
        for tame in 0..p - 1 {
            for wild in 0..rc.wild_order() {
                let rep = rc.theta(m, tame, wild)?;
                let chars: Vec<CycElem> = elements.iter().map(|g| rep.character(g)).collect::<Result<_>>()?;
                let duplicate = kept.iter().any(|c| c.iter().zip(&chars).all(|(a, b)| a.same_value(b)));
                if !duplicate {
                    kept.push(chars);
                    out.push(rep);
                }
            }
        }
    }
    let found: u64 = out.iter().map(|r| (r.dimension() as u64).pow(2)).sum();
    let expected = rc.group().order();
    if found != expected {
        return Err(Error::CompletenessFailure { found, expected });
    }
    Ok(out)
}

/// `Σ_g χ_1(g) χ_2(g^{-1})`.
pub fn character_pairing(a: &ArtinRep, b: &ArtinRep) -> Result<CycElem> {
    let mut sum = CycElem::zero(a.rc.padic(), a.level());
    for g in a.rc.group().elements() {
        let x = a.character(&g)?;
        if x.is_zero() {
            continue;
        }
        let y = b.character(&g.inverse())?;
        if y.is_zero() {
            continue;
        }
        sum = sum.add_ref(&x.mul_ref(&y));
    }
    Ok(sum)
}
