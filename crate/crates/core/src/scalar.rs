//! Scalar abstraction shared by every numeric module.
//!
//! All physics is written against [`Real`], implemented for `f32` and `f64`.
//! Phases of the form `k * d` reach tens of thousands of radians at the
//! default geometry, so they are reduced modulo 2π with the product carried
//! in extended precision (fused multiply-add plus a split 2π constant).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Low-order part of 2π: `TAU() + tau_lo()` carries 2π to about twice
    /// the working precision.
    fn tau_lo() -> Self;

    /// Converts an `f64` literal. Panics only on non-representable input,
    /// which cannot happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }
}

impl Real for f32 {
    #[inline]
    fn tau_lo() -> Self {
        -1.748_455_6e-7
    }
}

impl Real for f64 {
    #[inline]
    fn tau_lo() -> Self {
        2.449_293_598_294_706_4e-16
    }
}

/// Complex scalar over a [`Real`].
pub type Cx<T> = Complex<T>;

/// Exact sum `a + b = s + e` (Knuth two-sum).
#[inline]
pub fn two_sum<T: Real>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `k * d` reduced into roughly `[-π, π]`.
///
/// The product is split into `hi + lo` exactly and the multiple of 2π is
/// removed against a two-part constant, so the result stays accurate to a
/// few ulps of π even when `k * d` is ~1e5 rad.
#[inline]
pub fn reduced_phase<T: Real>(k: T, d: T) -> T {
    let hi = k * d;
    let lo = k.mul_add(d, -hi);
    reduce_split(hi, lo)
}

/// `k * (a + b)` reduced like [`reduced_phase`], without rounding `a + b`.
#[inline]
pub fn reduced_phase_of_sum<T: Real>(k: T, a: T, b: T) -> T {
    let (s, e) = two_sum(a, b);
    let hi = k * s;
    let lo = k.mul_add(s, -hi) + k * e;
    reduce_split(hi, lo)
}

#[inline]
fn reduce_split<T: Real>(hi: T, lo: T) -> T {
    let q = (hi / T::TAU()).round();
    let r = (-q).mul_add(T::TAU(), hi);
    let r = (-q).mul_add(T::tau_lo(), r);
    r + lo
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let mut r = theta - T::TAU() * (theta / T::TAU()).round();
    if r <= -pi {
        r += T::TAU();
    } else if r > pi {
        r -= T::TAU();
    }
    r
}

/// `exp(-j * phase)`.
#[inline]
pub fn cis_neg<T: Real>(phase: T) -> Cx<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, -s)
}

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both vanish.
pub fn rel_diff<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    let scale = a.norm().max(b.norm());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).norm() / scale
    }
}
