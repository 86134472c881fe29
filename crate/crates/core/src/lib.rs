//! Simulation of center-fed pinching-antenna systems (C-PASS).
//!
//! One dielectric waveguide is fed in the middle by two input ports; the
//! forward and backward antenna groups each radiate towards their own user.
//! The crate builds the resulting 2×2 effective channel, phase-aligns the
//! antenna positions, and evaluates capacity, array/multiplexing gains and
//! their scaling with the antenna count. An end-fed baseline is modelled
//! alongside for comparison.
//!
//! The numerical core is generic over the scalar type ([`scalar::Real`],
//! implemented for `f32` and `f64`). The aliases below fix it to `f64`,
//! which is what the sweeps and the `cpass` binary use.
//!
//! ```
//! use cpass::{tuner, metrics, SystemConfig};
//!
//! let cfg = SystemConfig::default();
//! let h = tuner::deployed_channel(&cfg).unwrap().h;
//! let g = metrics::gain_decomposition(&h, &cfg.budget);
//! assert!(g.g_mux > 0.0);
//! ```

// `!(a < b)` is used deliberately so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod tuner;
pub mod units;
pub mod waveguide;

pub use config::{Architecture, Deployment, Side};
pub use error::{Error, Result};
pub use metrics::GainReport;

pub type SystemConfig = config::SystemConfig<f64>;
pub type SplitterSetting = waveguide::SplitterSetting<f64>;
pub type RadiationProfile = waveguide::RadiationProfile<f64>;
pub type PinchLayout = channel::PinchLayout<f64>;
pub type EffectiveChannel = channel::EffectiveChannel<f64>;
pub type Mat2 = linalg::Mat2<f64>;

pub type SystemConfigF32 = config::SystemConfig<f32>;
pub type EffectiveChannelF32 = channel::EffectiveChannel<f32>;
pub type Mat2F32 = linalg::Mat2<f32>;
