//! Geometry, branch coefficients and the 2x2 effective channel from the two
//! input ports to the two users.
//!
//! Coordinates: the forward input port sits at axial 0 and the backward one
//! at `-l_in`. Forward antenna `n` is at `+x_n`, backward antenna `n` at
//! `-l_in - x_n`. The forward user is at `(0, y_f)`, the backward user at
//! `(-l_in, y_b)`. End-fed systems keep the same physical antennas and users
//! and feed the whole chain from behind the outermost backward antenna.

use num_complex::Complex;

use crate::config::{Architecture, Side, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::scalar::{cis_neg, reduced_phase, reduced_phase_of_sum, Cx, Real};
use crate::waveguide::{uniform_radiation_profile, RadiationProfile, SplitterSetting};

/// How input power is distributed over the antennas.
#[derive(Debug, Clone, PartialEq)]
pub enum Radiation<T> {
    /// Center feed: one profile per direction, each starting at its junction.
    Split {
        forward: RadiationProfile<T>,
        backward: RadiationProfile<T>,
    },
    /// End feed: a single profile over all `2N` antennas in traversal order
    /// (backward antennas outermost first, then forward antennas outward).
    Chain(RadiationProfile<T>),
}

impl<T: Real> Radiation<T> {
    /// Amplitude weight `sqrt(xi)` of antenna `n` (0-based) on `side`.
    pub fn amplitude(&self, side: Side, n: usize) -> T {
        match self {
            Radiation::Split { forward, backward } => match side {
                Side::Forward => forward.xi()[n].sqrt(),
                Side::Backward => backward.xi()[n].sqrt(),
            },
            Radiation::Chain(chain) => {
                let per_side = chain.len() / 2;
                let idx = match side {
                    Side::Backward => per_side - 1 - n,
                    Side::Forward => per_side + n,
                };
                chain.xi()[idx].sqrt()
            }
        }
    }

    fn architecture(&self) -> Architecture {
        match self {
            Radiation::Split { .. } => Architecture::Center,
            Radiation::Chain(_) => Architecture::End,
        }
    }
}

/// Antenna positions along the waveguide, per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchLayout<T> {
    positions: [Vec<T>; 2],
    offsets: [Vec<T>; 2],
    pub radiation: Radiation<T>,
}

impl<T: Real> PinchLayout<T> {
    /// Axial distance `n * l_pa + offset` of each antenna from its side's
    /// input port.
    pub fn positions(&self, side: Side) -> &[T] {
        &self.positions[side.index()]
    }

    pub fn offsets(&self, side: Side) -> &[T] {
        &self.offsets[side.index()]
    }

    pub fn n_per_side(&self) -> usize {
        self.positions[0].len()
    }

    pub fn architecture(&self) -> Architecture {
        self.radiation.architecture()
    }
}

/// Nominal grid position of the `n`-th antenna (0-based).
pub(crate) fn grid_position<T: Real>(l_pa: T, n: usize) -> T {
    T::from_usize(n + 1).expect("index fits scalar") * l_pa
}

/// Lays out `cfg.n_per_side` antennas per direction with optional
/// fine-tuning offsets `(forward, backward)`.
pub fn build_layout<T: Real>(cfg: &SystemConfig<T>, offsets: Option<(&[T], &[T])>) -> Result<PinchLayout<T>> {
    let n = cfg.n_per_side;
    let zeros = vec![T::zero(); n];
    let (off_f, off_b) = offsets.unwrap_or((&zeros, &zeros));
    let mut positions: [Vec<T>; 2] = Default::default();
    for (side, off) in [(Side::Forward, off_f), (Side::Backward, off_b)] {
        if off.len() != n {
            return Err(Error::invalid(
                "offsets",
                format!("{side:?} side needs {n} offsets, got {}", off.len()),
            ));
        }
        if let Some((i, d)) = off.iter().enumerate().find(|(_, d)| !(d.abs() <= cfg.delta_max)) {
            return Err(Error::invalid(
                "delta_max_m",
                format!("{side:?} offset {i} = {d} exceeds the tuning bound {}", cfg.delta_max),
            ));
        }
        positions[side.index()] = off
            .iter()
            .enumerate()
            .map(|(i, d)| grid_position(cfg.l_pa, i) + *d)
            .collect();
    }
    let n_t = T::from_usize(n).expect("count fits scalar");
    let radiation = match cfg.architecture {
        Architecture::Center => Radiation::Split {
            forward: uniform_radiation_profile(n, T::one() / n_t)?,
            backward: uniform_radiation_profile(n, T::one() / n_t)?,
        },
        Architecture::End => Radiation::Chain(uniform_radiation_profile(2 * n, T::one() / (n_t + n_t))?),
    };
    Ok(PinchLayout {
        positions,
        offsets: [off_f.to_vec(), off_b.to_vec()],
        radiation,
    })
}

/// Distances used by the channel model.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryView<T> {
    /// `r[side][user][n]`: antenna `n` on `side` to `user` (m).
    pub r: [[Vec<T>; 2]; 2],
    /// `wg[side][n]`: in-waveguide distance from the feeding reference to
    /// antenna `n` on `side` (m).
    pub wg: [Vec<T>; 2],
}

impl<T: Real> GeometryView<T> {
    pub fn r(&self, side: Side, user: Side) -> &[T] {
        &self.r[side.index()][user.index()]
    }

    pub fn wg(&self, side: Side) -> &[T] {
        &self.wg[side.index()]
    }
}

/// Horizontal offset between an antenna at axial distance `x` on `side` and
/// `user`.
pub(crate) fn horizontal_offset<T: Real>(cfg: &SystemConfig<T>, side: Side, user: Side, x: T) -> T {
    if side == user {
        x
    } else {
        cfg.l_in + x
    }
}

/// End-fed reference point: behind the outermost backward antenna by the
/// full tuning range, so every in-waveguide distance is non-negative.
pub(crate) fn end_fed_guided_distance<T: Real>(cfg: &SystemConfig<T>, side: Side, x: T) -> T {
    let n_t = T::from_usize(cfg.n_per_side).expect("count fits scalar");
    let back_reach = n_t * cfg.l_pa + cfg.delta_max;
    match side {
        Side::Forward => x + cfg.l_in + back_reach,
        Side::Backward => back_reach - x,
    }
}

/// Euclidean and in-waveguide distances for every antenna.
pub fn user_distances<T: Real>(cfg: &SystemConfig<T>, layout: &PinchLayout<T>) -> GeometryView<T> {
    let mut r: [[Vec<T>; 2]; 2] = Default::default();
    let mut wg: [Vec<T>; 2] = Default::default();
    for side in Side::BOTH {
        let xs = layout.positions(side);
        for user in Side::BOTH {
            let y = cfg.user_y(user);
            r[side.index()][user.index()] = xs
                .iter()
                .map(|&x| y.hypot(horizontal_offset(cfg, side, user, x)))
                .collect();
        }
        wg[side.index()] = match layout.architecture() {
            Architecture::Center => xs.to_vec(),
            Architecture::End => xs.iter().map(|&x| end_fed_guided_distance(cfg, side, x)).collect(),
        };
    }
    GeometryView { r, wg }
}

/// Branch gains `A^{side, user}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients<T> {
    pub ff: Cx<T>,
    pub fb: Cx<T>,
    pub bf: Cx<T>,
    pub bb: Cx<T>,
}

impl<T: Real> BranchCoefficients<T> {
    pub fn get(&self, side: Side, user: Side) -> Cx<T> {
        match (side, user) {
            (Side::Forward, Side::Forward) => self.ff,
            (Side::Forward, Side::Backward) => self.fb,
            (Side::Backward, Side::Forward) => self.bf,
            (Side::Backward, Side::Backward) => self.bb,
        }
    }

    /// `A^FF A^BB - A^FB A^BF`.
    pub fn cross_determinant(&self) -> Cx<T> {
        self.ff * self.bb - self.fb * self.bf
    }
}

fn branch_from_geometry<T: Real>(
    cfg: &SystemConfig<T>,
    layout: &PinchLayout<T>,
    geo: &GeometryView<T>,
    side: Side,
    user: Side,
) -> Cx<T> {
    let wave = &cfg.wave;
    let r = geo.r(side, user);
    geo.wg(side)
        .iter()
        .zip(r)
        .enumerate()
        .map(|(n, (&wg, &r))| {
            let phase = reduced_phase(wave.k_g, wg) + reduced_phase(wave.k0, r);
            cis_neg(phase) * (layout.radiation.amplitude(side, n) * wave.eta / r)
        })
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
}

/// `A = sum_n sqrt(xi_n) exp(-j k_g wg_n) eta exp(-j k0 r_n) / r_n` for the
/// antennas on `from_side` towards `to_user`.
pub fn branch_coefficient<T: Real>(
    cfg: &SystemConfig<T>,
    layout: &PinchLayout<T>,
    from_side: Side,
    to_user: Side,
) -> Cx<T> {
    let geo = user_distances(cfg, layout);
    branch_from_geometry(cfg, layout, &geo, from_side, to_user)
}

pub fn branch_coefficients<T: Real>(cfg: &SystemConfig<T>, layout: &PinchLayout<T>) -> BranchCoefficients<T> {
    let geo = user_distances(cfg, layout);
    let a = |s, u| branch_from_geometry(cfg, layout, &geo, s, u);
    BranchCoefficients {
        ff: a(Side::Forward, Side::Forward),
        fb: a(Side::Forward, Side::Backward),
        bf: a(Side::Backward, Side::Forward),
        bb: a(Side::Backward, Side::Backward),
    }
}

/// Input-port-to-user channel. `h[(port, user)]`, index 0 = forward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel<T> {
    pub h: Mat2<T>,
    pub branches: BranchCoefficients<T>,
    pub architecture: Architecture,
}

/// Center-fed effective channel assembled from the branch gains.
pub fn effective_channel_center<T: Real>(
    cfg: &SystemConfig<T>,
    layout: &PinchLayout<T>,
    beta: &SplitterSetting<T>,
) -> Result<EffectiveChannel<T>> {
    beta.validate()?;
    if layout.architecture() != Architecture::Center {
        return Err(Error::ArchitectureMismatch {
            expected: "center",
            found: "end",
        });
    }
    let a = branch_coefficients(cfg, layout);
    let e = cis_neg(reduced_phase(cfg.wave.k_g, cfg.l_in));
    let (ff, fb, bf, bb) = (beta.ff.sqrt(), beta.fb.sqrt(), beta.bf.sqrt(), beta.bb.sqrt());
    let h = Mat2::new([
        [a.ff * ff + a.bf * e * fb, a.fb * ff + a.bb * e * fb],
        [a.ff * e * bf + a.bf * bb, a.fb * e * bf + a.bb * bb],
    ]);
    Ok(EffectiveChannel {
        h,
        branches: a,
        architecture: Architecture::Center,
    })
}

/// End-fed effective channel. Both input ports drive the full chain, so the
/// backward port's row is the forward row delayed by `l_in`.
pub fn effective_channel_end<T: Real>(cfg: &SystemConfig<T>, layout: &PinchLayout<T>) -> Result<EffectiveChannel<T>> {
    if layout.architecture() != Architecture::End {
        return Err(Error::ArchitectureMismatch {
            expected: "end",
            found: "center",
        });
    }
    let a = branch_coefficients(cfg, layout);
    let row = [a.ff + a.bf, a.fb + a.bb];
    let e = cis_neg(reduced_phase(cfg.wave.k_g, cfg.l_in));
    let h = Mat2::new([row, [row[0] * e, row[1] * e]]);
    Ok(EffectiveChannel {
        h,
        branches: a,
        architecture: Architecture::End,
    })
}

/// Effective channel for the configured architecture.
pub fn effective_channel<T: Real>(cfg: &SystemConfig<T>, layout: &PinchLayout<T>) -> Result<EffectiveChannel<T>> {
    match cfg.architecture {
        Architecture::Center => effective_channel_center(cfg, layout, &cfg.beta),
        Architecture::End => effective_channel_end(cfg, layout),
    }
}

/// Splits the center-fed determinant into its branch factor
/// `A^FF A^BB - A^FB A^BF` and its splitter factor
/// `sqrt(b_ff b_bb) - sqrt(b_fb b_bf) exp(-2j k_g l_in)`.
pub fn determinant_factors<T: Real>(
    channel: &EffectiveChannel<T>,
    beta: &SplitterSetting<T>,
    cfg: &SystemConfig<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    if channel.architecture != Architecture::Center {
        return Err(Error::ArchitectureMismatch {
            expected: "center",
            found: "end",
        });
    }
    let f1 = channel.branches.cross_determinant();
    let e2 = cis_neg(reduced_phase(cfg.wave.k_g, cfg.l_in + cfg.l_in));
    let f2 = Complex::new((beta.ff * beta.bb).sqrt(), T::zero()) - e2 * (beta.fb * beta.bf).sqrt();
    Ok((f1, f2))
}

/// Center-fed channel computed as the explicit product of the in-waveguide
/// matrix (2 x 2N), the radiation matrix (2N x 2N diagonal) and the wireless
/// matrix (2N x 2). Independent of the branch-gain factorization.
pub fn cascade_center<T: Real>(cfg: &SystemConfig<T>, layout: &PinchLayout<T>, beta: &SplitterSetting<T>) -> Mat2<T> {
    let n = layout.n_per_side();
    let k_g = cfg.wave.k_g;
    let zero = Complex::new(T::zero(), T::zero());
    // Antenna columns: forward antennas first, then backward ones.
    let antennas: Vec<(Side, usize)> = Side::BOTH.iter().flat_map(|&s| (0..n).map(move |i| (s, i))).collect();
    let ratio = |port: Side, dir: Side| match (port, dir) {
        (Side::Forward, Side::Forward) => beta.ff,
        (Side::Forward, Side::Backward) => beta.fb,
        (Side::Backward, Side::Forward) => beta.bf,
        (Side::Backward, Side::Backward) => beta.bb,
    };
    let guided: Vec<Vec<Cx<T>>> = Side::BOTH
        .iter()
        .map(|&port| {
            antennas
                .iter()
                .map(|&(side, i)| {
                    let x = layout.positions(side)[i];
                    let phase = if side == port {
                        reduced_phase(k_g, x)
                    } else {
                        reduced_phase_of_sum(k_g, cfg.l_in, x)
                    };
                    cis_neg(phase) * ratio(port, side).sqrt()
                })
                .collect()
        })
        .collect();
    let sigma: Vec<T> = antennas
        .iter()
        .map(|&(side, i)| layout.radiation.amplitude(side, i))
        .collect();
    let wireless: Vec<[Cx<T>; 2]> = antennas
        .iter()
        .map(|&(side, i)| {
            let x = layout.positions(side)[i];
            Side::BOTH.map(|user| {
                let r = cfg.user_y(user).hypot(horizontal_offset(cfg, side, user, x));
                cis_neg(reduced_phase(cfg.wave.k0, r)) * (cfg.wave.eta / r)
            })
        })
        .collect();
    let mut h = Mat2::zero();
    for (row, g) in h.m.iter_mut().zip(&guided) {
        for (user, entry) in row.iter_mut().enumerate() {
            *entry = g
                .iter()
                .zip(&sigma)
                .zip(&wireless)
                .fold(zero, |acc, ((g, s), w)| acc + *g * *s * w[user]);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigBuilder;
    use crate::scalar::rel_diff;

    fn cfg(n: usize) -> SystemConfig<f64> {
        ConfigBuilder {
            n_per_side: Some(n),
            ..Default::default()
        }
        .build()
        .unwrap()
    }

    #[test]
    fn uniform_grid_and_shift() {
        let c = cfg(3);
        let l = build_layout(&c, None).unwrap();
        assert_eq!(l.positions(Side::Forward), &[1.0, 2.0, 3.0]);
        assert_eq!(l.positions(Side::Backward), &[1.0, 2.0, 3.0]);
        let off = [0.01; 3];
        let l = build_layout(&c, Some((&off, &off))).unwrap();
        assert_eq!(l.positions(Side::Forward), &[1.01, 2.01, 3.01]);
    }

    #[test]
    fn offset_beyond_bound_is_rejected() {
        let c = cfg(3);
        let bad = [0.0, 0.02, 0.0];
        let ok = [0.0; 3];
        let err = build_layout(&c, Some((&ok, &bad))).unwrap_err();
        assert!(err.to_string().contains("delta_max_m"));
        assert!(build_layout(&c, Some((&ok[..2], &ok))).is_err());
    }

    #[test]
    fn distances_follow_port_geometry() {
        let c = cfg(3);
        let l = build_layout(&c, None).unwrap();
        let g = user_distances(&c, &l);
        assert!((g.r(Side::Forward, Side::Forward)[2] - 1234f64.sqrt()).abs() < 1e-12);
        assert!((g.r(Side::Forward, Side::Forward)[2] - 35.1283).abs() < 1e-4);
        let l_in = 9.5597e-3;
        let expect = (40f64.powi(2) + (l_in + 2.0f64).powi(2)).sqrt();
        assert!((g.r(Side::Forward, Side::Backward)[1] - expect).abs() < 1e-6);
        assert!((expect - 40.0504).abs() < 1e-4);
        for side in Side::BOTH {
            assert!(g.r(side, side).iter().all(|&r| r >= c.user_y(side)));
        }
    }

    #[test]
    fn antenna_below_user_is_at_vertical_distance() {
        let c = cfg(1);
        assert_eq!(
            c.y_f.hypot(horizontal_offset(&c, Side::Forward, Side::Forward, 0.0)),
            35.0
        );
    }

    #[test]
    fn single_antenna_branch_magnitude() {
        let c = cfg(1);
        let l = build_layout(&c, None).unwrap();
        let a = branch_coefficient(&c, &l, Side::Forward, Side::Forward);
        let expect = c.wave.eta / (35f64.powi(2) + 1.0).sqrt();
        assert!((a.norm() - expect).abs() < 1e-15 * expect);
        assert!((a.norm() - 2.4333e-5).abs() < 1e-4 * 2.4333e-5);
    }

    #[test]
    fn zero_path_gain_zeroes_branches() {
        let mut c = cfg(4);
        c.wave.eta = 0.0;
        let l = build_layout(&c, None).unwrap();
        let a = branch_coefficients(&c, &l);
        assert_eq!(a.ff.norm() + a.fb.norm() + a.bf.norm() + a.bb.norm(), 0.0);
    }

    #[test]
    fn branch_magnitude_obeys_triangle_bound() {
        let c = cfg(12);
        let l = build_layout(&c, None).unwrap();
        let g = user_distances(&c, &l);
        let a = branch_coefficients(&c, &l);
        for side in Side::BOTH {
            for user in Side::BOTH {
                let bound = c.wave.eta / 12f64.sqrt() * g.r(side, user).iter().map(|r| 1.0 / r).sum::<f64>();
                assert!(a.get(side, user).norm() <= bound * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn parallel_feed_passes_branches_through() {
        let c = cfg(6);
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_center(&c, &l, &SplitterSetting::parallel()).unwrap();
        let a = ch.branches;
        assert_eq!(ch.h[(0, 0)], a.ff);
        assert_eq!(ch.h[(0, 1)], a.fb);
        assert_eq!(ch.h[(1, 0)], a.bf);
        assert_eq!(ch.h[(1, 1)], a.bb);
    }

    #[test]
    fn closed_splitters_give_zero_channel() {
        let c = cfg(6);
        let l = build_layout(&c, None).unwrap();
        let beta = SplitterSetting::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let ch = effective_channel_center(&c, &l, &beta).unwrap();
        assert_eq!(ch.h.frobenius_sq(), 0.0);
    }

    #[test]
    fn co_located_symmetric_ports_are_singular() {
        let c = ConfigBuilder {
            n_per_side: Some(5),
            y_b_m: Some(35.0),
            l_in_m: Some(0.0),
            ..Default::default()
        }
        .build::<f64>()
        .unwrap();
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_center(&c, &l, &SplitterSetting::equal()).unwrap();
        assert!(ch.h.det().norm() <= 1e-14 * ch.h.frobenius_sq());
    }

    #[test]
    fn splitter_factor_examples() {
        let c = cfg(4);
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_center(&c, &l, &SplitterSetting::equal()).unwrap();
        let (_, f2) = determinant_factors(&ch, &SplitterSetting::equal(), &c).unwrap();
        assert!((f2 - Complex::new(1.0, 0.0)).norm() < 1e-12);
        let uni = SplitterSetting::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let (_, f2) = determinant_factors(&ch, &uni, &c).unwrap();
        assert!(f2.norm() < 1e-15);
        let (_, f2) = determinant_factors(&ch, &SplitterSetting::parallel(), &c).unwrap();
        assert_eq!(f2, Complex::new(1.0, 0.0));
    }

    #[test]
    fn determinant_factors_reject_end_fed() {
        let c = cfg(4).with_architecture(Architecture::End);
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_end(&c, &l).unwrap();
        assert!(matches!(
            determinant_factors(&ch, &c.beta, &c),
            Err(Error::ArchitectureMismatch { .. })
        ));
        assert!(effective_channel_center(&c, &l, &c.beta).is_err());
    }

    #[test]
    fn end_fed_rows_are_proportional() {
        let c = cfg(7).with_architecture(Architecture::End);
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_end(&c, &l).unwrap();
        assert!(ch.h.det().norm() <= 1e-12 * ch.h.frobenius_sq());
        let e = cis_neg(reduced_phase(c.wave.k_g, c.l_in));
        assert!(rel_diff(ch.h[(1, 0)], ch.h[(0, 0)] * e) < 1e-15);
    }

    #[test]
    fn end_fed_single_antenna_pair_weights() {
        let c = cfg(1).with_architecture(Architecture::End);
        let l = build_layout(&c, None).unwrap();
        for side in Side::BOTH {
            assert!((l.radiation.amplitude(side, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn end_fed_co_located_ports_have_identical_rows() {
        let c = ConfigBuilder {
            l_in_m: Some(0.0),
            architecture: Some(Architecture::End),
            ..Default::default()
        }
        .build::<f64>()
        .unwrap();
        let l = build_layout(&c, None).unwrap();
        let ch = effective_channel_end(&c, &l).unwrap();
        assert_eq!(ch.h.m[0], ch.h.m[1]);
    }

    #[test]
    fn end_fed_guided_distances_follow_traversal() {
        let c = cfg(3).with_architecture(Architecture::End);
        let l = build_layout(&c, None).unwrap();
        let g = user_distances(&c, &l);
        let b = g.wg(Side::Backward);
        let f = g.wg(Side::Forward);
        assert!(b[2] < b[1] && b[1] < b[0] && b[0] < f[0] && f[0] < f[1]);
        assert!((f[0] - b[0] - (2.0 + c.l_in)).abs() < 1e-12);
        assert!(b.iter().chain(f).all(|&d| d >= 0.0));
    }
}
