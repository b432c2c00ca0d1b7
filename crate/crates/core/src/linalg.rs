//! Dense matrices over any [`Scalar`].
//!
//! Elimination uses full pivoting on [`Scalar::pivot_weight`], which for
//! p-adic types is the valuation; this keeps the multipliers integral and the
//! precision loss minimal.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn identity_like(n: usize, proto: &S) -> Self {
        let zero = proto.zero_like();
        let one = proto.one_like();
        Matrix::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn scalar_like(n: usize, value: &S) -> Self {
        let zero = value.zero_like();
        Matrix::from_fn(n, n, |i, j| if i == j { value.clone() } else { zero.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let zero = self.data.first().or(rhs.data.first()).expect("empty matrix product").zero_like();
        let mut out = vec![zero; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out[idx] = out[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        Matrix { rows: self.rows, cols: rhs.cols, data: out }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add_ref(rhs.get(i, j)))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub_ref(rhs.get(i, j)))
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul_ref(s))
    }

    /// Kronecker product `self ⊗ rhs`, with `rhs` entries lifted into `S`.
    pub fn kron_with<T: Scalar>(&self, rhs: &Matrix<T>, lift: impl Fn(&T) -> S) -> Self {
        let lifted = rhs.map_to(&lift);
        Matrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            let (i1, i2) = (i / rhs.rows, i % rhs.rows);
            let (j1, j2) = (j / rhs.cols, j % rhs.cols);
            let a = self.get(i1, j1);
            if a.is_zero() {
                a.zero_like()
            } else {
                a.mul_ref(&lifted[i2 * rhs.cols + j2])
            }
        })
    }

    fn map_to<T>(&self, f: impl Fn(&S) -> T) -> Vec<T> {
        self.data.iter().map(f).collect()
    }

    pub fn trace(&self) -> S {
        assert!(self.is_square());
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rows {
            acc = acc.add_ref(self.get(i, i));
        }
        acc
    }

    pub fn pow(&self, mut k: u64) -> Self {
        assert!(self.is_square());
        let mut acc = Matrix::identity_like(self.rows, self.get(0, 0));
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn best_pivot(&self, from: usize, cols: std::ops::Range<usize>) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, S::Weight)> = None;
        for i in from..self.rows {
            for j in cols.clone() {
                if let Some(w) = self.get(i, j).pivot_weight() {
                    let better = match &best {
                        None => true,
                        Some((_, _, bw)) => w < *bw,
                    };
                    if better {
                        best = Some((i, j, w));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Eliminate below `(k, k)` using rows and the given column range.
    fn eliminate_below(&mut self, k: usize, col_end: usize) -> Result<()> {
        let inv = self.get(k, k).try_inv()?;
        for i in (k + 1)..self.rows {
            let a = self.get(i, k);
            if a.is_zero() {
                continue;
            }
            let factor = a.mul_ref(&inv);
            for j in (k + 1)..col_end {
                let b = self.get(k, j);
                if b.is_zero() {
                    continue;
                }
                let v = self.get(i, j).sub_ref(&factor.mul_ref(b));
                self.set(i, j, v);
            }
            let z = self.get(i, k).zero_like();
            self.set(i, k, z);
        }
        Ok(())
    }

    /// Determinant by fully pivoted elimination. A block that is zero at the
    /// tracked precision yields a zero result carrying that precision.
    pub fn det(&self) -> Result<S> {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Err(Error::InvalidArgument("determinant of an empty matrix".into()));
        }
        let mut a = self.clone();
        let mut acc = a.get(0, 0).one_like();
        let mut negate = false;
        for k in 0..n {
            let Some((pi, pj)) = a.best_pivot(k, k..n) else {
                return Ok(acc.mul_ref(a.get(k, k)));
            };
            if pi != k {
                a.swap_rows(pi, k);
                negate = !negate;
            }
            if pj != k {
                a.swap_cols(pj, k);
                negate = !negate;
            }
            acc = acc.mul_ref(a.get(k, k));
            if k + 1 < n {
                a.eliminate_below(k, n)?;
            }
        }
        Ok(if negate { -acc } else { acc })
    }

    pub fn rank(&self) -> Result<usize> {
        let mut a = self.clone();
        let n = a.cols;
        let mut rank = 0;
        for k in 0..a.rows.min(n) {
            let Some((pi, pj)) = a.best_pivot(k, k..n) else {
                break;
            };
            a.swap_rows(pi, k);
            a.swap_cols(pj, k);
            a.eliminate_below(k, n)?;
            rank += 1;
        }
        Ok(rank)
    }

    /// Solve `self * X = rhs` for a square nonsingular `self`.
    pub fn solve(&self, rhs: &Matrix<S>) -> Result<Matrix<S>> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let m = rhs.cols;
        let mut a =
            Matrix::from_fn(n, n + m, |i, j| if j < n { self.get(i, j).clone() } else { rhs.get(i, j - n).clone() });
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pi, pj) = a.best_pivot(k, k..n).ok_or(Error::NotInvertible)?;
            a.swap_rows(pi, k);
            a.swap_cols(pj, k);
            perm.swap(pj, k);
            a.eliminate_below(k, n + m)?;
        }
        let zero = a.get(0, 0).zero_like();
        let mut x = vec![zero; n * m];
        for c in 0..m {
            for k in (0..n).rev() {
                let mut acc = a.get(k, n + c).clone();
                for j in (k + 1)..n {
                    let coef = a.get(k, j);
                    if coef.is_zero() {
                        continue;
                    }
                    acc = acc.sub_ref(&coef.mul_ref(&x[j * m + c]));
                }
                x[k * m + c] = acc.mul_ref(&a.get(k, k).try_inv()?);
            }
        }
        // undo the column permutation: unknown k of the permuted system is perm[k]
        let mut out = x.clone();
        for k in 0..n {
            for c in 0..m {
                out[perm[k] * m + c] = x[k * m + c].clone();
            }
        }
        Ok(Matrix { rows: n, cols: m, data: out })
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        let id = Matrix::identity_like(self.rows, self.get(0, 0));
        self.solve(&id)
    }

    /// Characteristic polynomial `det(t I - self)`, coefficients from the
    /// constant term up, via reduction to Hessenberg form.
    pub fn charpoly(&self) -> Result<Vec<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let proto = a.get(0, 0).clone();
        for m in 1..n.saturating_sub(1) {
            let mut best: Option<(usize, S::Weight)> = None;
            for i in m..n {
                if let Some(w) = a.get(i, m - 1).pivot_weight() {
                    if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
                        best = Some((i, w));
                    }
                }
            }
            let Some((i, _)) = best else { continue };
            a.swap_rows(i, m);
            a.swap_cols(i, m);
            let inv = a.get(m, m - 1).try_inv()?;
            for i in (m + 1)..n {
                if a.get(i, m - 1).is_zero() {
                    continue;
                }
                let u = a.get(i, m - 1).mul_ref(&inv);
                for j in (m - 1)..n {
                    let v = a.get(i, j).sub_ref(&u.mul_ref(a.get(m, j)));
                    a.set(i, j, v);
                }
                for j in 0..n {
                    let v = a.get(j, m).add_ref(&u.mul_ref(a.get(j, i)));
                    a.set(j, m, v);
                }
            }
        }
        let zero = proto.zero_like();
        let one = proto.one_like();
        let mut polys: Vec<Vec<S>> = vec![vec![one.clone()]];
        for m in 1..=n {
            let prev = &polys[m - 1];
            // (t - h_mm) * p_{m-1}
            let mut next = vec![zero.clone(); m + 1];
            for (k, c) in prev.iter().enumerate() {
                next[k + 1] = next[k + 1].add_ref(c);
                next[k] = next[k].sub_ref(&a.get(m - 1, m - 1).mul_ref(c));
            }
            let mut t = one.clone();
            for i in (1..m).rev() {
                t = t.mul_ref(a.get(i, i - 1));
                let coef = a.get(i - 1, m - 1).mul_ref(&t);
                if coef.is_zero() {
                    continue;
                }
                for (k, c) in polys[i - 1].iter().enumerate() {
                    next[k] = next[k].sub_ref(&coef.mul_ref(c));
                }
            }
            polys.push(next);
        }
        Ok(polys.pop().unwrap())
    }
}

/// Evaluate a polynomial (constant term first) at `x`.
pub fn poly_eval<S: Scalar>(coeffs: &[S], x: &S) -> S {
    let mut acc = x.zero_like();
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(x).add_ref(c);
    }
    acc
}

/// Divide by `(t - 1)` with synthetic division; the remainder is dropped.
pub fn deflate_at_one<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let n = coeffs.len() - 1;
    let mut out = vec![coeffs[n].clone(); n];
    for k in (1..n).rev() {
        out[k - 1] = coeffs[k].add_ref(&out[k]);
    }
    out
}
