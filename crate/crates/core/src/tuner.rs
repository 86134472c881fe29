//! Phase-alignment fine-tuning of antenna positions.
//!
//! Each antenna is nudged within `±delta_max` so that its total phase
//! (in-waveguide plus free-space) towards the aligned user matches the phase
//! of the untuned first antenna modulo 2π. The total phase is strictly
//! monotone in the offset, so every wrap branch that falls inside the window
//! has exactly one root, found by bisection.

use rayon::prelude::*;

use crate::channel::{
    build_layout, effective_channel, end_fed_guided_distance, grid_position, horizontal_offset, EffectiveChannel,
    PinchLayout,
};
use crate::config::{Architecture, Deployment, Side, SystemConfig};
use crate::error::{Error, Result};
use crate::scalar::{wrap_phase, Real};
use crate::units::WaveConstants;

/// Offsets chosen for one antenna group and the phase error they leave.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult<T> {
    pub offsets: Vec<T>,
    /// `wrap(theta_n - target_phase)` in `(-π, π]`.
    pub residuals: Vec<T>,
    /// Total phase of the reference (untuned first) antenna.
    pub target_phase: T,
}

impl<T: Real> AlignmentResult<T> {
    pub fn max_abs_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.abs()))
    }
}

/// `k_g * x + k0 * sqrt(y² + x²)`.
pub fn total_phase<T: Real>(x: T, y: T, wave: &WaveConstants<T>) -> T {
    wave.k_g * x + wave.k0 * y.hypot(x)
}

/// Phase of one antenna relative to the reference antenna, as a function of
/// its axial position.
struct RelativePhase<'a, T> {
    cfg: &'a SystemConfig<T>,
    side: Side,
    user: Side,
    /// +1 when the in-waveguide path grows with `x`, -1 when it shrinks.
    guided_sign: T,
    x_ref: T,
    h_ref: T,
    r_ref: T,
}

impl<'a, T: Real> RelativePhase<'a, T> {
    fn new(cfg: &'a SystemConfig<T>, side: Side, user: Side, guided_sign: T) -> Self {
        let x_ref = grid_position(cfg.l_pa, 0);
        let h_ref = horizontal_offset(cfg, side, user, x_ref);
        Self {
            cfg,
            side,
            user,
            guided_sign,
            x_ref,
            h_ref,
            r_ref: cfg.user_y(user).hypot(h_ref),
        }
    }

    /// `theta(x) - theta(x_ref)`, evaluated without forming the two large
    /// absolute phases: `r - r_ref = (h - h_ref)(h + h_ref) / (r + r_ref)`.
    fn eval(&self, x: T) -> T {
        let h = horizontal_offset(self.cfg, self.side, self.user, x);
        let r = self.cfg.user_y(self.user).hypot(h);
        let dx = x - self.x_ref;
        let wave = &self.cfg.wave;
        dx * (self.guided_sign * wave.k_g + wave.k0 * (h + self.h_ref) / (r + self.r_ref))
    }
}

/// Solves one antenna: the smallest `|offset|` in `[-delta_max, delta_max]`
/// putting its relative phase on a multiple of 2π, or the window endpoint
/// with the smallest wrapped error when no multiple is reachable.
fn align_one<T: Real>(phase: &RelativePhase<'_, T>, x0: T, delta_max: T) -> (T, T) {
    let f = |d: T| phase.eval(x0 + d);
    if delta_max == T::zero() {
        return (T::zero(), wrap_phase(f(T::zero())));
    }
    let (lo_d, hi_d) = (-delta_max, delta_max);
    let (f_lo, f_hi) = (f(lo_d), f(hi_d));
    let (min_f, max_f) = (f_lo.min(f_hi), f_lo.max(f_hi));
    let k_first = (min_f / T::TAU()).ceil().to_i64().expect("phase fits i64");
    let k_last = (max_f / T::TAU()).floor().to_i64().expect("phase fits i64");

    let mut best: Option<T> = None;
    for k in k_first..=k_last {
        let k_t = T::from_i64(k).expect("k fits scalar");
        let target = T::TAU() * k_t + T::tau_lo() * k_t;
        let g = |d: T| f(d) - target;
        let d = bisect(g, lo_d, hi_d);
        if best.is_none_or(|b| d.abs() < b.abs()) {
            best = Some(d);
        }
    }
    let d = best.unwrap_or_else(|| {
        if wrap_phase(f_lo).abs() <= wrap_phase(f_hi).abs() {
            lo_d
        } else {
            hi_d
        }
    });
    (d, wrap_phase(f(d)))
}

/// Bisection of a monotone `g` on `[lo, hi]` known to bracket a root, run
/// until the bracket cannot shrink further.
fn bisect<T: Real>(g: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == T::zero() {
        return lo;
    }
    if g_hi == T::zero() {
        return hi;
    }
    let rising = g_hi > g_lo;
    for _ in 0..256 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == T::zero() {
            return mid;
        }
        if (g_mid < T::zero()) == rising {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    if g_lo.abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

fn align_group<T: Real>(
    cfg: &SystemConfig<T>,
    side: Side,
    user: Side,
    delta_max: T,
    guided_sign: T,
    guided_distance: impl Fn(T) -> T,
) -> Result<AlignmentResult<T>> {
    if !(delta_max.is_finite() && delta_max >= T::zero()) {
        return Err(Error::invalid(
            "delta_max_m",
            format!("must be non-negative, got {delta_max}"),
        ));
    }
    let phase = RelativePhase::new(cfg, side, user, guided_sign);
    let solved: Vec<(T, T)> = (0..cfg.n_per_side)
        .into_par_iter()
        .map(|n| align_one(&phase, grid_position(cfg.l_pa, n), delta_max))
        .collect();
    let (offsets, residuals) = solved.into_iter().unzip();
    let target_phase = cfg.wave.k_g * guided_distance(phase.x_ref) + cfg.wave.k0 * phase.r_ref;
    Ok(AlignmentResult {
        offsets,
        residuals,
        target_phase,
    })
}

/// Aligns the center-fed antennas on `side` at `user`.
pub fn align_side<T: Real>(cfg: &SystemConfig<T>, side: Side, user: Side, delta_max: T) -> Result<AlignmentResult<T>> {
    align_group(cfg, side, user, delta_max, T::one(), |x| x)
}

/// Aligns the end-fed forward antennas at the forward user and the backward
/// antennas at the backward user, using the end-fed in-waveguide distances.
/// Returns `(forward, backward)`.
pub fn align_end_fed<T: Real>(cfg: &SystemConfig<T>, delta_max: T) -> Result<(AlignmentResult<T>, AlignmentResult<T>)> {
    let fwd = align_group(cfg, Side::Forward, Side::Forward, delta_max, T::one(), |x| {
        end_fed_guided_distance(cfg, Side::Forward, x)
    })?;
    let bwd = align_group(cfg, Side::Backward, Side::Backward, delta_max, -T::one(), |x| {
        end_fed_guided_distance(cfg, Side::Backward, x)
    })?;
    Ok((fwd, bwd))
}

/// Layout for the configured deployment: the nominal grid, or the grid with
/// each side phase-aligned at its own user.
pub fn deploy<T: Real>(cfg: &SystemConfig<T>) -> Result<PinchLayout<T>> {
    match cfg.deployment {
        Deployment::Uniform => build_layout(cfg, None),
        Deployment::Tuned => {
            let (fwd, bwd) = match cfg.architecture {
                Architecture::Center => (
                    align_side(cfg, Side::Forward, Side::Forward, cfg.delta_max)?,
                    align_side(cfg, Side::Backward, Side::Backward, cfg.delta_max)?,
                ),
                Architecture::End => align_end_fed(cfg, cfg.delta_max)?,
            };
            build_layout(cfg, Some((&fwd.offsets, &bwd.offsets)))
        }
    }
}

/// Deploys the antennas and evaluates the effective channel.
pub fn deployed_channel<T: Real>(cfg: &SystemConfig<T>) -> Result<EffectiveChannel<T>> {
    effective_channel(cfg, &deploy(cfg)?)
}
