//! Capacity, gain decomposition, numeric DoF and the distance-sum bounds
//! behind the power scaling laws.

use num_complex::Complex;

use crate::channel::BranchCoefficients;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::scalar::{reduced_phase, Real};
use crate::tuner::deployed_channel;
use crate::units::{dbm_to_watt, LinkBudget};

/// Split of the effective channel gain into its Frobenius (array) and
/// determinant (multiplexing) parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport<T> {
    pub g_array: T,
    pub g_mux: T,
    pub g_total: T,
    pub capacity_bits: T,
}

/// `log2 det(I + (P_T / 2 N_0) H H^H)`, evaluated through the singular values
/// of `H` so rank-deficient channels stay accurate at very high SNR.
pub fn capacity<T: Real>(h: &Mat2<T>, budget: &LinkBudget<T>) -> T {
    let s = budget.snr_per_port();
    let (s1, s2) = h.singular_values_sq();
    ((s * s1).ln_1p() + (s * s2).ln_1p()) / T::LN_2()
}

/// `log2(1 + s ||H||_F² + s² |det H|²)` with `s = P_T / 2 N_0`.
pub fn capacity_expanded<T: Real>(h: &Mat2<T>, budget: &LinkBudget<T>) -> T {
    let s = budget.snr_per_port();
    (s * h.frobenius_sq() + s * s * h.det().norm_sqr()).ln_1p() / T::LN_2()
}

pub fn gain_decomposition<T: Real>(h: &Mat2<T>, budget: &LinkBudget<T>) -> GainReport<T> {
    let s = budget.snr_per_port();
    let g_array = h.frobenius_sq();
    let g_mux = s * h.det().norm_sqr();
    GainReport {
        g_array,
        g_mux,
        g_total: g_array + g_mux,
        capacity_bits: capacity(h, budget),
    }
}

/// Array and multiplexing gain of a center-fed channel with all splitting
/// ratios at 1/2, written out from the branch gains (cross terms included).
pub fn equal_split_gains<T: Real>(
    branches: &BranchCoefficients<T>,
    budget: &LinkBudget<T>,
    cfg: &SystemConfig<T>,
) -> GainReport<T> {
    let a = branches;
    let phase = reduced_phase(cfg.wave.k_g, cfg.l_in);
    let two = T::lit(2.0);
    let power = a.ff.norm_sqr() + a.fb.norm_sqr() + a.bf.norm_sqr() + a.bb.norm_sqr();
    let cross = (a.ff * a.bf.conj() + a.fb * a.bb.conj()).re;
    let g_array = power + two * cross * phase.cos();
    let g_mux = budget.p_t_watt / (T::lit(4.0) * budget.n0_watt)
        * (T::one() - (two * phase).cos())
        * a.cross_determinant().norm_sqr();
    let s = budget.snr_per_port();
    let g_total = g_array + g_mux;
    GainReport {
        g_array,
        g_mux,
        g_total,
        capacity_bits: (s * g_total).ln_1p() / T::LN_2(),
    }
}

/// Gains at a quarter-wave port spacing, `l_in = (λ_g / 4)(1 + 2k)`, where
/// the cross terms vanish.
pub fn simplified_gains_quarterwave<T: Real>(
    branches: &BranchCoefficients<T>,
    budget: &LinkBudget<T>,
    cfg: &SystemConfig<T>,
) -> Result<GainReport<T>> {
    let c = reduced_phase(cfg.wave.k_g, cfg.l_in).cos();
    if c.abs() > T::lit(1e-9) {
        return Err(Error::Precondition(format!(
            "port spacing {} m is not an odd multiple of a quarter guided wavelength (cos(k_g l_in) = {c})",
            cfg.l_in
        )));
    }
    let a = branches;
    let s = budget.snr_per_port();
    let g_array = a.ff.norm_sqr() + a.fb.norm_sqr() + a.bf.norm_sqr() + a.bb.norm_sqr();
    let g_mux = s * a.cross_determinant().norm_sqr();
    let g_total = g_array + g_mux;
    Ok(GainReport {
        g_array,
        g_mux,
        g_total,
        capacity_bits: (s * g_total).ln_1p() / T::LN_2(),
    })
}

/// High-SNR capacity slope fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoFEstimate<T> {
    pub slope: T,
    pub fit_range_dbm: (T, T),
    /// RMS residual of the linear fit (bits).
    pub residual: T,
}

/// Default DoF fit grid: 80 to 100 dBm in 5 dB steps.
pub fn default_dof_grid<T: Real>() -> Vec<T> {
    (0..5).map(|i| T::lit(80.0 + 5.0 * i as f64)).collect()
}

/// Fits capacity against `log2(P_T / N_0)` for a fixed channel.
pub fn fit_dof<T: Real>(h: &Mat2<T>, n0_dbm: T, p_grid: &[T]) -> Result<DoFEstimate<T>> {
    if p_grid.len() < 2 {
        return Err(Error::invalid("p_grid", "needs at least two transmit powers"));
    }
    let n0 = dbm_to_watt(n0_dbm);
    let mut pts = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let budget = LinkBudget::new(dbm_to_watt(p), n0)?;
        let x = (budget.p_t_watt / n0).log2();
        pts.push((x, capacity(h, &budget)));
    }
    let n = T::from_usize(pts.len()).expect("count fits scalar");
    let mean_x = pts.iter().map(|p| p.0).sum::<T>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if !(sxx > T::zero()) {
        return Err(Error::invalid("p_grid", "transmit powers must not all coincide"));
    }
    let sxy: T = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: T = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let lo = p_grid.iter().copied().fold(T::infinity(), T::min);
    let hi = p_grid.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(DoFEstimate {
        slope,
        fit_range_dbm: (lo, hi),
        residual: (rss / n).sqrt(),
    })
}

/// Deploys `cfg` and fits its high-SNR capacity slope over `p_grid` (dBm).
pub fn estimate_dof<T: Real>(cfg: &SystemConfig<T>, p_grid: &[T]) -> Result<DoFEstimate<T>> {
    let channel = deployed_channel(cfg)?;
    fit_dof(&channel.h, cfg.n0_dbm, p_grid)
}

/// Distance sum `S_n = sum_{m=1}^{n} (y² + m² l_pa²)^{-1/2}` with its
/// integral sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingBounds<T> {
    pub s_n: T,
    pub lower: T,
    pub upper: T,
    pub n: usize,
}

impl<T: Real> ScalingBounds<T> {
    pub fn holds(&self) -> bool {
        self.lower <= self.s_n && self.s_n <= self.upper
    }
}

fn check_geometry<T: Real>(n: usize, y: T, l_pa: T) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if !(y > T::zero() && y.is_finite()) {
        return Err(Error::invalid("y", format!("must be positive, got {y}")));
    }
    if !(l_pa > T::zero() && l_pa.is_finite()) {
        return Err(Error::invalid("l_pa", format!("must be positive, got {l_pa}")));
    }
    Ok(())
}

fn kernel<T: Real>(m: usize, y: T, l_pa: T) -> T {
    T::one() / y.hypot(T::from_usize(m).expect("index fits scalar") * l_pa)
}

pub fn summation_s_n<T: Real>(n: usize, y: T, l_pa: T) -> Result<T> {
    check_geometry(n, y, l_pa)?;
    Ok((1..=n).map(|m| kernel(m, y, l_pa)).sum())
}

fn lower_bound<T: Real>(n: usize, y: T, l_pa: T) -> T {
    let a = T::from_usize(n + 1).expect("count fits scalar") * l_pa;
    ((a + y.hypot(a)) / (l_pa + y.hypot(l_pa))).ln() / l_pa
}

fn upper_bound<T: Real>(n: usize, y: T, l_pa: T) -> T {
    let a = T::from_usize(n).expect("count fits scalar") * l_pa;
    ((a + y.hypot(a)) / y).ln() / l_pa
}

/// `S_n` with its closed-form lower (`∫_1^{n+1}`) and upper (`∫_0^n`) bounds.
pub fn integral_bounds<T: Real>(n: usize, y: T, l_pa: T) -> Result<ScalingBounds<T>> {
    Ok(ScalingBounds {
        s_n: summation_s_n(n, y, l_pa)?,
        lower: lower_bound(n, y, l_pa),
        upper: upper_bound(n, y, l_pa),
        n,
    })
}

/// [`integral_bounds`] for every `n` in `1..=n_max`, accumulating the sum once.
pub fn integral_bounds_series<T: Real>(n_max: usize, y: T, l_pa: T) -> Result<Vec<ScalingBounds<T>>> {
    check_geometry(n_max, y, l_pa)?;
    let mut s = T::zero();
    Ok((1..=n_max)
        .map(|n| {
            s += kernel(n, y, l_pa);
            ScalingBounds {
                s_n: s,
                lower: lower_bound(n, y, l_pa),
                upper: upper_bound(n, y, l_pa),
                n,
            }
        })
        .collect())
}

/// Dominant-term gains of a phase-aligned center-fed system:
/// `(η²/n)(S_f² + S_b²)` and `(P_T / 2N_0)(η⁴/n²) S_f² S_b²`.
pub fn asymptotic_gain_targets<T: Real>(
    n: usize,
    budget: &LinkBudget<T>,
    y_f: T,
    y_b: T,
    l_pa: T,
    eta: T,
) -> Result<(T, T)> {
    let s_f = summation_s_n(n, y_f, l_pa)?;
    let s_b = summation_s_n(n, y_b, l_pa)?;
    Ok(dominant_gains(n, budget, eta, s_f, s_b))
}

fn dominant_gains<T: Real>(n: usize, budget: &LinkBudget<T>, eta: T, s_f: T, s_b: T) -> (T, T) {
    let n_t = T::from_usize(n).expect("count fits scalar");
    let e2 = eta * eta / n_t;
    let array = e2 * (s_f * s_f + s_b * s_b);
    let mux = budget.snr_per_port() * e2 * e2 * s_f * s_f * s_b * s_b;
    (array, mux)
}

/// Gain-axis images of the distance-sum bounds: the dominant-term gains with
/// `S_n` replaced by its lower and upper bound on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEnvelope<T> {
    pub array_lower: T,
    pub array_upper: T,
    pub mux_lower: T,
    pub mux_upper: T,
}

pub fn gain_envelope<T: Real>(cfg: &SystemConfig<T>, n: usize) -> Result<GainEnvelope<T>> {
    let f = integral_bounds(n, cfg.y_f, cfg.l_pa)?;
    let b = integral_bounds(n, cfg.y_b, cfg.l_pa)?;
    let (array_lower, mux_lower) = dominant_gains(n, &cfg.budget, cfg.wave.eta, f.lower, b.lower);
    let (array_upper, mux_upper) = dominant_gains(n, &cfg.budget, cfg.wave.eta, f.upper, b.upper);
    Ok(GainEnvelope {
        array_lower,
        array_upper,
        mux_lower,
        mux_upper,
    })
}

/// `|det H| / ||H||_F²`, a scale-free rank-deficiency measure.
pub fn relative_determinant<T: Real>(h: &Mat2<T>) -> T {
    let fro = h.frobenius_sq();
    if fro == T::zero() {
        T::zero()
    } else {
        h.det().norm() / fro
    }
}

/// Multiplies `H` by a unit phasor.
pub fn rotate<T: Real>(h: &Mat2<T>, phi: T) -> Mat2<T> {
    let (s, c) = phi.sin_cos();
    h.scale(Complex::new(c, s))
}
