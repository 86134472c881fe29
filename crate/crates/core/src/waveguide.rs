//! In-waveguide signal model: T-junction power splitting, per-antenna
//! coupling and through-propagation.
//!
//! The step-by-step chain ([`propagate_chain`]) and the closed form
//! ([`radiated_closed_form`]) are two routes to the same radiated signal and
//! are tested against each other.

use crate::error::{Error, Result};
use crate::scalar::{cis_neg, reduced_phase, Cx, Real};

/// Power splitting ratios of the two center T-junctions.
///
/// `ff`/`fb` are the fractions the forward input port sends forward and
/// backward; `bf`/`bb` likewise for the backward input port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitterSetting<T> {
    pub ff: T,
    pub fb: T,
    pub bf: T,
    pub bb: T,
}

impl<T: Real> SplitterSetting<T> {
    pub fn new(ff: T, fb: T, bf: T, bb: T) -> Result<Self> {
        let s = Self { ff, fb, bf, bb };
        s.validate()?;
        Ok(s)
    }

    /// All four ratios equal to 1/2.
    pub fn equal() -> Self {
        let h = T::lit(0.5);
        Self {
            ff: h,
            fb: h,
            bf: h,
            bb: h,
        }
    }

    /// No cross-feeding: each port drives only its own direction.
    pub fn parallel() -> Self {
        Self {
            ff: T::one(),
            fb: T::zero(),
            bf: T::zero(),
            bb: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("beta_ff", self.ff),
            ("beta_fb", self.fb),
            ("beta_bf", self.bf),
            ("beta_bb", self.bb),
        ] {
            if !(v.is_finite() && v >= T::zero() && v <= T::one()) {
                return Err(Error::invalid(key, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.ff + self.fb > T::one() {
            return Err(Error::EnergyConservation(format!(
                "beta_ff + beta_fb = {} exceeds 1",
                self.ff + self.fb
            )));
        }
        if self.bf + self.bb > T::one() {
            return Err(Error::EnergyConservation(format!(
                "beta_bf + beta_bb = {} exceeds 1",
                self.bf + self.bb
            )));
        }
        Ok(())
    }
}

/// Splits an input amplitude into its forward and backward parts.
pub fn split_input<T: Real>(x_in: Cx<T>, beta_fwd: T, beta_bwd: T) -> Result<(Cx<T>, Cx<T>)> {
    if !(beta_fwd >= T::zero() && beta_bwd >= T::zero()) {
        return Err(Error::EnergyConservation(format!(
            "splitting ratios must be non-negative, got ({beta_fwd}, {beta_bwd})"
        )));
    }
    if beta_fwd + beta_bwd > T::one() {
        return Err(Error::EnergyConservation(format!(
            "beta_fwd + beta_bwd = {} exceeds 1",
            beta_fwd + beta_bwd
        )));
    }
    Ok((x_in * beta_fwd.sqrt(), x_in * beta_bwd.sqrt()))
}

/// Per-antenna radiation power ratios `delta` and the cumulative
/// coefficients `xi[n] = delta[n] * prod_{m<n} (1 - delta[m])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationProfile<T> {
    delta: Vec<T>,
    xi: Vec<T>,
}

impl<T: Real> RadiationProfile<T> {
    /// Builds a profile from radiation ratios. Out-of-range ratios are an
    /// error, never clamped.
    pub fn from_deltas(delta: Vec<T>) -> Result<Self> {
        let mut xi = Vec::with_capacity(delta.len());
        let mut remaining = T::one();
        for (n, &d) in delta.iter().enumerate() {
            if !(d.is_finite() && d >= T::zero() && d <= T::one()) {
                return Err(Error::invalid(
                    format!("delta[{n}]"),
                    format!("radiation ratio must lie in [0, 1], got {d}"),
                ));
            }
            xi.push(d * remaining);
            remaining *= T::one() - d;
        }
        Ok(Self { delta, xi })
    }

    pub fn delta(&self) -> &[T] {
        &self.delta
    }

    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }
}

/// Profile radiating the same fraction `target_xi` of the input power at each
/// of `n` antennas.
pub fn uniform_radiation_profile<T: Real>(n: usize, target_xi: T) -> Result<RadiationProfile<T>> {
    if n == 0 {
        return Err(Error::InfeasibleProfile("at least one antenna is required".into()));
    }
    let n_t = T::from_usize(n).expect("count fits scalar");
    if !(target_xi > T::zero()) {
        return Err(Error::InfeasibleProfile(format!(
            "target must be positive, got {target_xi}"
        )));
    }
    // Exact 1/n is the common case; compare with a one-ulp allowance.
    if target_xi * n_t > T::one() + T::epsilon() * n_t {
        return Err(Error::InfeasibleProfile(format!("target {target_xi} exceeds 1/{n}")));
    }
    let delta = (0..n)
        .map(|m| {
            let m_t = T::from_usize(m).expect("index fits scalar");
            let remaining = T::one() - m_t * target_xi;
            (target_xi / remaining).min(T::one())
        })
        .collect();
    RadiationProfile::from_deltas(delta)
}

/// Guided signal bookkeeping at one antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationStep<T> {
    pub incident: Cx<T>,
    pub radiated: Cx<T>,
    pub through: Cx<T>,
    /// Spacing to the next antenna (m); zero after the last one.
    pub distance_to_next: T,
}

/// Propagates `x_start` (the amplitude just after the junction) down the
/// waveguide. `spacings[0]` is the junction-to-first-antenna distance and
/// `spacings[n]` the distance from antenna `n - 1` to antenna `n`.
pub fn propagate_chain<T: Real>(
    x_start: Cx<T>,
    profile: &RadiationProfile<T>,
    spacings: &[T],
    k_g: T,
) -> Result<Vec<PropagationStep<T>>> {
    if spacings.len() != profile.len() {
        return Err(Error::invalid(
            "spacings",
            format!("expected {} spacings, got {}", profile.len(), spacings.len()),
        ));
    }
    if let Some((n, d)) = spacings
        .iter()
        .enumerate()
        .find(|(_, d)| !(d.is_finite() && **d >= T::zero()))
    {
        return Err(Error::invalid(
            format!("spacings[{n}]"),
            format!("must be finite and >= 0, got {d}"),
        ));
    }
    let mut steps = Vec::with_capacity(spacings.len());
    let mut carried = x_start;
    for (n, (&delta, &d)) in profile.delta().iter().zip(spacings).enumerate() {
        let incident = carried * cis_neg(reduced_phase(k_g, d));
        let radiated = incident * delta.sqrt();
        let through = incident * (T::one() - delta).sqrt();
        steps.push(PropagationStep {
            incident,
            radiated,
            through,
            distance_to_next: spacings.get(n + 1).copied().unwrap_or_else(T::zero),
        });
        carried = through;
    }
    Ok(steps)
}

/// Closed-form radiated signal at antenna `index`:
/// `sqrt(beta * xi[index]) * exp(-j k_g D) * x_in`, with `D` the total
/// in-waveguide distance from the input port.
pub fn radiated_closed_form<T: Real>(
    x_in: Cx<T>,
    beta: T,
    profile: &RadiationProfile<T>,
    cumulative_distance: T,
    index: usize,
    k_g: T,
) -> Result<Cx<T>> {
    let xi = *profile
        .xi()
        .get(index)
        .ok_or_else(|| Error::invalid("index", format!("{index} out of range for {} antennas", profile.len())))?;
    Ok(x_in * (beta * xi).sqrt() * cis_neg(reduced_phase(k_g, cumulative_distance)))
}
