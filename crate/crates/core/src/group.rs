//! The finite-level false Tate group `G_n = (Z/p^n)^× ⋉ Z/p^n` and its
//! integral group algebra.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::padic::{is_prime, mult_order};

fn modulus(p: u32, level: u32) -> u64 {
    (p as u64).pow(level)
}

/// Inverse of a unit `u` modulo `m`.
pub(crate) fn inv_mod(u: u64, m: u64) -> u64 {
    let g = (u as i64).extended_gcd(&(m as i64));
    debug_assert_eq!(g.gcd, 1, "{u} is not a unit mod {m}");
    g.x.rem_euclid(m as i64) as u64
}

/// `(u, b)` with `(u1, b1)(u2, b2) = (u1 u2, b1 + u1 b2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    p: u32,
    level: u32,
    u: u64,
    b: u64,
}

impl GroupElem {
    pub fn new(p: u32, level: u32, u: i64, b: i64) -> Result<Self> {
        let m = modulus(p, level) as i64;
        let u = u.rem_euclid(m);
        if u.gcd(&(p as i64)) != 1 {
            return Err(Error::InvalidArgument(format!("{u} is not a unit mod {p}")));
        }
        Ok(GroupElem { p, level, u: u as u64, b: b.rem_euclid(m) as u64 })
    }

    pub fn identity(p: u32, level: u32) -> Self {
        GroupElem { p, level, u: 1, b: 0 }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.level)
    }

    pub fn compose(&self, other: &GroupElem) -> Result<GroupElem> {
        if self.level != other.level || self.p != other.p {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let m = self.modulus() as u128;
        let u = (self.u as u128 * other.u as u128 % m) as u64;
        let b = ((self.b as u128 + self.u as u128 * other.b as u128) % m) as u64;
        Ok(GroupElem { p: self.p, level: self.level, u, b })
    }

    /// Composition of elements known to share a level.
    pub fn mul(&self, other: &GroupElem) -> GroupElem {
        self.compose(other).expect("group elements of different levels")
    }

    pub fn inverse(&self) -> GroupElem {
        let m = self.modulus();
        let ui = inv_mod(self.u, m);
        let b = (m - (ui as u128 * self.b as u128 % m as u128) as u64) % m;
        GroupElem { p: self.p, level: self.level, u: ui, b }
    }

    pub fn pow(&self, mut k: u64) -> GroupElem {
        let mut acc = GroupElem::identity(self.p, self.level);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Image in `(Z/p^n)^×`.
    pub fn cyclotomic_character(&self) -> u64 {
        self.u
    }

    /// Image under the quotient map `G_n → G_m` for `m <= n`.
    pub fn project(&self, level: u32) -> GroupElem {
        assert!(level <= self.level);
        let m = modulus(self.p, level);
        GroupElem { p: self.p, level, u: self.u % m, b: self.b % m }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.b)
    }
}

/// The group `G_n` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FalseTateGroup {
    p: u32,
    level: u32,
}

impl FalseTateGroup {
    pub fn new(p: u64, level: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidPrime(p));
        }
        if level == 0 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        Ok(FalseTateGroup { p: p as u32, level })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        modulus(self.p, self.level)
    }

    /// `|G_n| = p^n φ(p^n)`.
    pub fn order(&self) -> u64 {
        let m = self.modulus();
        m * (m - m / self.p as u64)
    }

    pub fn units(&self) -> Vec<u64> {
        let p = self.p as u64;
        (1..self.modulus()).filter(|u| u % p != 0).collect()
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        let m = self.modulus();
        let mut out = Vec::with_capacity(self.order() as usize);
        for u in self.units() {
            for b in 0..m {
                out.push(GroupElem { p: self.p, level: self.level, u, b });
            }
        }
        out
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem::identity(self.p, self.level)
    }

    pub fn element(&self, u: i64, b: i64) -> Result<GroupElem> {
        GroupElem::new(self.p, self.level, u, b)
    }

    /// The inertia generator `h = (1, 1)`.
    pub fn inertia_generator(&self) -> GroupElem {
        GroupElem { p: self.p, level: self.level, u: 1, b: 1 % self.modulus() }
    }
}

/// Decomposition data at a prime `q ≠ p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompData {
    pub q: u64,
    pub group: FalseTateGroup,
    pub frob: GroupElem,
    pub inertia_gen: GroupElem,
    /// Multiplicative order of `q` in `(Z/p^n)^×`.
    pub residue_order: u64,
}

impl DecompData {
    /// Same data with the Frobenius representative replaced by `(q, c)`.
    pub fn with_frobenius_shift(&self, c: i64) -> DecompData {
        let mut out = self.clone();
        out.frob = GroupElem::new(self.group.p, self.group.level, self.q as i64, c).expect("q is a unit");
        out
    }

    pub fn prime(&self) -> u32 {
        self.group.p
    }

    pub fn level(&self) -> u32 {
        self.group.level
    }
}

pub fn decomposition_data(q: u64, p: u64, level: u32) -> Result<DecompData> {
    let group = FalseTateGroup::new(p, level)?;
    if q == p {
        return Err(Error::QEqualsP(q));
    }
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    let m = group.modulus();
    let frob = GroupElem::new(group.p, level, (q % m) as i64, 0)?;
    let residue_order = mult_order((q % m) as i64, m).expect("q is a unit mod p^n");
    Ok(DecompData { q, group, frob, inertia_gen: group.inertia_generator(), residue_order })
}

/// Finite `Z`-linear combination of group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgElem {
    group: FalseTateGroup,
    terms: BTreeMap<GroupElem, i64>,
}

impl GroupAlgElem {
    pub fn zero(group: FalseTateGroup) -> Self {
        GroupAlgElem { group, terms: BTreeMap::new() }
    }

    pub fn basis(g: GroupElem) -> Self {
        let group = FalseTateGroup { p: g.p, level: g.level };
        let mut terms = BTreeMap::new();
        terms.insert(g, 1);
        GroupAlgElem { group, terms }
    }

    pub fn group(&self) -> FalseTateGroup {
        self.group
    }

    pub fn level(&self) -> u32 {
        self.group.level
    }

    pub fn add_term(&mut self, g: GroupElem, c: i64) {
        let e = self.terms.entry(g).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn coefficient(&self, g: &GroupElem) -> i64 {
        self.terms.get(g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElem, &i64)> {
        self.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &GroupAlgElem) -> Result<GroupAlgElem> {
        if self.group != other.group {
            return Err(Error::LevelMismatch(self.level(), other.level()));
        }
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(*g, *c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> GroupAlgElem {
        let mut out = GroupAlgElem::zero(self.group);
        for (g, x) in &self.terms {
            out.add_term(*g, x * c);
        }
        out
    }

    /// Convolution product.
    pub fn mul(&self, other: &GroupAlgElem) -> Result<GroupAlgElem> {
        if self.group != other.group {
            return Err(Error::LevelMismatch(self.level(), other.level()));
        }
        let mut out = GroupAlgElem::zero(self.group);
        for (g, x) in &self.terms {
            for (h, y) in &other.terms {
                out.add_term(g.mul(h), x * y);
            }
        }
        Ok(out)
    }

    /// Image under a one-dimensional character with integer values.
    pub fn augment(&self, chi: impl Fn(&GroupElem) -> i64) -> i64 {
        self.terms.iter().map(|(g, c)| c * chi(g)).sum()
    }
}

/// `S_q = 1 + h + ... + h^{q-1}`.
pub fn geometric_sum(dd: &DecompData) -> GroupAlgElem {
    let mut out = GroupAlgElem::zero(dd.group);
    let mut g = dd.group.identity();
    for _ in 0..dd.q {
        out.add_term(g, 1);
        g = g.mul(&dd.inertia_gen);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_compositions() {
        let g = FalseTateGroup::new(3, 1).unwrap();
        let a = g.element(2, 1).unwrap();
        let b = g.element(2, 2).unwrap();
        assert_eq!(a.mul(&b), g.element(1, 2).unwrap());
        let frob = g.element(2, 0).unwrap();
        let h = g.inertia_generator();
        assert_eq!(frob.mul(&h).mul(&frob.inverse()), h.pow(2));
    }

    #[test]
    fn group_axioms_order_six() {
        let g = FalseTateGroup::new(3, 1).unwrap();
        let els = g.elements();
        assert_eq!(els.len(), 6);
        for x in &els {
            assert_eq!(x.mul(&x.inverse()), g.identity());
            assert_eq!(g.identity().mul(x), *x);
            for y in &els {
                for z in &els {
                    assert_eq!(x.mul(y).mul(z), x.mul(&y.mul(z)));
                }
            }
        }
    }

    #[test]
    fn level_mismatch() {
        let a = GroupElem::identity(3, 1);
        let b = GroupElem::identity(3, 2);
        assert_eq!(a.compose(&b), Err(Error::LevelMismatch(1, 2)));
    }

    #[test]
    fn decomposition_examples() {
        let dd = decomposition_data(2, 3, 1).unwrap();
        assert_eq!(dd.frob, GroupElem::new(3, 1, 2, 0).unwrap());
        assert_eq!(dd.residue_order, 2);
        assert_eq!(decomposition_data(11, 5, 1).unwrap().residue_order, 1);
        assert_eq!(decomposition_data(2, 3, 2).unwrap().residue_order, 6);
        assert_eq!(decomposition_data(3, 3, 1), Err(Error::QEqualsP(3)));
    }

    #[test]
    fn geometric_sum_collapses() {
        let dd = decomposition_data(11, 5, 1).unwrap();
        let s = geometric_sum(&dd);
        assert_eq!(s.support_len(), 5);
        let g = dd.group;
        assert_eq!(s.coefficient(&g.element(1, 0).unwrap()), 3);
        for b in 1..5 {
            assert_eq!(s.coefficient(&g.element(1, b).unwrap()), 2);
        }
        assert_eq!(s.augment(|_| 1), 11);
    }
}
