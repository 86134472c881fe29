//! Dense 2x2 complex matrices.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;

use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Cx<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m: [[Cx<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { m: [[z; 2]; 2] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        out.m[0][0] = Complex::new(T::one(), T::zero());
        out.m[1][1] = Complex::new(T::one(), T::zero());
        out
    }

    pub fn det(&self) -> Cx<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Cx<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn transpose(&self) -> Self {
        Self::new([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn adjoint(&self) -> Self {
        let t = self.transpose();
        let mut out = t;
        out.m.iter_mut().flatten().for_each(|z| *z = z.conj());
        out
    }

    /// Squared singular values `(σ1², σ2²)` with `σ1 >= σ2`.
    ///
    /// The larger one comes from the trace/determinant quadratic; the smaller
    /// one is recovered as `|det|² / σ1²`, which stays accurate when the
    /// matrix is nearly rank one.
    pub fn singular_values_sq(&self) -> (T, T) {
        let fro = self.frobenius_sq();
        if fro == T::zero() {
            return (T::zero(), T::zero());
        }
        let det_sq = self.det().norm_sqr();
        let two = T::lit(2.0);
        let disc = (fro * fro - T::lit(4.0) * det_sq).max(T::zero()).sqrt();
        let s1 = (fro + disc) / two;
        (s1, det_sq / s1)
    }
}

impl<T> Index<(usize, usize)> for Mat2<T> {
    type Output = Cx<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.m[r][c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.m[r][c]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Mat2<T>) -> Mat2<T> {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        out
    }
}
