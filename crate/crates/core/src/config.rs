//! Scenario configuration and its flat key-value file format.
//!
//! Every key is optional; missing keys take the reference scenario values
//! (28 GHz carrier, users at 35 m and 40 m, 1 m antenna spacing, input ports
//! 1.25 guided wavelengths apart, 30 dBm transmit and -80 dBm noise power,
//! ±1 cm tuning range).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units::{derive_wave_constants, EtaModel, LinkBudget, WaveConstants};
use crate::waveguide::SplitterSetting;

/// Feeding architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    /// Two input ports at the waveguide center, splitting both ways.
    Center,
    /// Both input ports at one terminal, driving the whole chain.
    End,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Center => "center",
            Architecture::End => "end",
        }
    }
}

/// Antenna placement scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deployment {
    /// Antennas on the nominal `n * l_pa` grid.
    Uniform,
    /// Grid positions fine-tuned for phase alignment.
    Tuned,
}

impl Deployment {
    pub fn as_str(self) -> &'static str {
        match self {
            Deployment::Uniform => "uniform",
            Deployment::Tuned => "tuned",
        }
    }
}

/// The two propagation directions, which double as labels for the input
/// ports and the users (`F` = forward, `B` = backward).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Forward,
    Backward,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Forward, Side::Backward];

    pub fn index(self) -> usize {
        match self {
            Side::Forward => 0,
            Side::Backward => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Forward => Side::Backward,
            Side::Backward => Side::Forward,
        }
    }
}

/// Full scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    pub wave: WaveConstants<T>,
    pub eta_model: EtaModel,
    pub p_t_dbm: T,
    pub n0_dbm: T,
    pub budget: LinkBudget<T>,
    /// Antennas per direction; the system holds `2 * n_per_side`.
    pub n_per_side: usize,
    pub l_pa: T,
    pub l_in: T,
    pub y_f: T,
    pub y_b: T,
    pub beta: SplitterSetting<T>,
    pub delta_max: T,
    pub architecture: Architecture,
    pub deployment: Deployment,
}

pub const DEFAULT_F_C_HZ: f64 = 28e9;
pub const DEFAULT_N_EFF: f64 = 1.4;
pub const DEFAULT_N_PER_SIDE: usize = 8;
pub const DEFAULT_L_PA_M: f64 = 1.0;
pub const DEFAULT_L_IN_FACTOR: f64 = 1.25;
pub const DEFAULT_Y_F_M: f64 = 35.0;
pub const DEFAULT_Y_B_M: f64 = 40.0;
pub const DEFAULT_P_T_DBM: f64 = 30.0;
pub const DEFAULT_N0_DBM: f64 = -80.0;
pub const DEFAULT_DELTA_MAX_M: f64 = 0.01;

/// Every key the config file accepts.
pub const CONFIG_KEYS: &[&str] = &[
    "f_c_hz",
    "n_eff",
    "eta_model",
    "n_per_side",
    "l_pa_m",
    "l_in_factor",
    "l_in_m",
    "y_f_m",
    "y_b_m",
    "p_t_dbm",
    "n0_dbm",
    "delta_max_m",
    "beta_ff",
    "beta_fb",
    "beta_bf",
    "beta_bb",
    "architecture",
    "deployment",
];

impl<T: Real> Default for SystemConfig<T> {
    fn default() -> Self {
        ConfigBuilder::default().build().expect("reference scenario is valid")
    }
}

impl<T: Real> SystemConfig<T> {
    pub fn with_architecture(mut self, architecture: Architecture) -> Self {
        self.architecture = architecture;
        self
    }

    pub fn with_deployment(mut self, deployment: Deployment) -> Self {
        self.deployment = deployment;
        self
    }

    pub fn with_n_per_side(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n_per_side", "must be >= 1"));
        }
        self.n_per_side = n;
        Ok(self)
    }

    pub fn with_p_t_dbm(mut self, p_t_dbm: T) -> Result<Self> {
        self.budget = LinkBudget::from_dbm(p_t_dbm, self.n0_dbm)?;
        self.p_t_dbm = p_t_dbm;
        Ok(self)
    }

    /// Vertical distance of the user on `side`.
    pub fn user_y(&self, side: Side) -> T {
        match side {
            Side::Forward => self.y_f,
            Side::Backward => self.y_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_side == 0 {
            return Err(Error::invalid("n_per_side", "must be >= 1"));
        }
        positive("l_pa_m", self.l_pa)?;
        non_negative("l_in_m", self.l_in)?;
        positive("y_f_m", self.y_f)?;
        positive("y_b_m", self.y_b)?;
        non_negative("delta_max_m", self.delta_max)?;
        if self.delta_max * T::lit(2.0) >= self.l_pa {
            return Err(Error::invalid(
                "delta_max_m",
                format!(
                    "must be below l_pa_m / 2 = {} to keep antennas ordered",
                    self.l_pa / T::lit(2.0)
                ),
            ));
        }
        self.beta.validate()
    }

    /// Serializes every field as the key-value format read by
    /// [`parse_config`]. Parsing the output reproduces `self` exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("f_c_hz", float(self.wave.f_c));
        kv("n_eff", float(self.wave.n_eff));
        kv("eta_model", quoted(self.eta_model.as_str()));
        kv("n_per_side", self.n_per_side.to_string());
        kv("l_pa_m", float(self.l_pa));
        kv("l_in_m", float(self.l_in));
        kv("y_f_m", float(self.y_f));
        kv("y_b_m", float(self.y_b));
        kv("p_t_dbm", float(self.p_t_dbm));
        kv("n0_dbm", float(self.n0_dbm));
        kv("delta_max_m", float(self.delta_max));
        kv("beta_ff", float(self.beta.ff));
        kv("beta_fb", float(self.beta.fb));
        kv("beta_bf", float(self.beta.bf));
        kv("beta_bb", float(self.beta.bb));
        kv("architecture", quoted(self.architecture.as_str()));
        kv("deployment", quoted(self.deployment.as_str()));
        s
    }
}

fn float<T: Real>(v: T) -> String {
    // `{:?}` prints the shortest representation that round-trips.
    let s = format!("{:?}", v.as_f64());
    if s.contains(['.', 'e', 'E']) || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

fn positive<T: Real>(key: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(key, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative<T: Real>(key: &str, v: T) -> Result<()> {
    if v.is_finite() && v >= T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(key, format!("must be non-negative and finite, got {v}")))
    }
}

/// Raw key values before defaults and validation.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    pub f_c_hz: Option<f64>,
    pub n_eff: Option<f64>,
    pub eta_model: Option<EtaModel>,
    pub n_per_side: Option<usize>,
    pub l_pa_m: Option<f64>,
    pub l_in_factor: Option<f64>,
    pub l_in_m: Option<f64>,
    pub y_f_m: Option<f64>,
    pub y_b_m: Option<f64>,
    pub p_t_dbm: Option<f64>,
    pub n0_dbm: Option<f64>,
    pub delta_max_m: Option<f64>,
    pub beta_ff: Option<f64>,
    pub beta_fb: Option<f64>,
    pub beta_bf: Option<f64>,
    pub beta_bb: Option<f64>,
    pub architecture: Option<Architecture>,
    pub deployment: Option<Deployment>,
}

impl ConfigBuilder {
    pub fn build<T: Real>(&self) -> Result<SystemConfig<T>> {
        let wave = derive_wave_constants(
            T::lit(self.f_c_hz.unwrap_or(DEFAULT_F_C_HZ)),
            T::lit(self.n_eff.unwrap_or(DEFAULT_N_EFF)),
            self.eta_model.unwrap_or_default(),
        )?;
        let l_in = match (self.l_in_m, self.l_in_factor) {
            (Some(m), _) => T::lit(m),
            (None, factor) => {
                let factor = factor.unwrap_or(DEFAULT_L_IN_FACTOR);
                if !(factor.is_finite() && factor >= 0.0) {
                    return Err(Error::invalid(
                        "l_in_factor",
                        format!("must be non-negative, got {factor}"),
                    ));
                }
                T::lit(factor) * wave.lambda_g
            }
        };
        let half = 0.5;
        let beta = SplitterSetting {
            ff: T::lit(self.beta_ff.unwrap_or(half)),
            fb: T::lit(self.beta_fb.unwrap_or(half)),
            bf: T::lit(self.beta_bf.unwrap_or(half)),
            bb: T::lit(self.beta_bb.unwrap_or(half)),
        };
        let p_t_dbm = T::lit(self.p_t_dbm.unwrap_or(DEFAULT_P_T_DBM));
        let n0_dbm = T::lit(self.n0_dbm.unwrap_or(DEFAULT_N0_DBM));
        for (key, v) in [("p_t_dbm", p_t_dbm), ("n0_dbm", n0_dbm)] {
            if !v.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        let cfg = SystemConfig {
            wave,
            eta_model: self.eta_model.unwrap_or_default(),
            p_t_dbm,
            n0_dbm,
            budget: LinkBudget::from_dbm(p_t_dbm, n0_dbm)?,
            n_per_side: self.n_per_side.unwrap_or(DEFAULT_N_PER_SIDE),
            l_pa: T::lit(self.l_pa_m.unwrap_or(DEFAULT_L_PA_M)),
            l_in,
            y_f: T::lit(self.y_f_m.unwrap_or(DEFAULT_Y_F_M)),
            y_b: T::lit(self.y_b_m.unwrap_or(DEFAULT_Y_B_M)),
            beta,
            delta_max: T::lit(self.delta_max_m.unwrap_or(DEFAULT_DELTA_MAX_M)),
            architecture: self.architecture.unwrap_or(Architecture::Center),
            deployment: self.deployment.unwrap_or(Deployment::Tuned),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses the key-value text. `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            path: origin.to_string(),
            message: e.message().to_string(),
        })?;
        let mut b = ConfigBuilder::default();
        for (key, value) in &table {
            match key.as_str() {
                "f_c_hz" => b.f_c_hz = Some(number(key, value)?),
                "n_eff" => b.n_eff = Some(number(key, value)?),
                "eta_model" => {
                    b.eta_model = Some(match text_value(key, value)? {
                        "friis" => EtaModel::Friis,
                        "unit" => EtaModel::Unit,
                        other => return Err(Error::invalid(key, format!("expected friis|unit, got {other:?}"))),
                    })
                }
                "n_per_side" => {
                    let n = value
                        .as_integer()
                        .ok_or_else(|| Error::invalid(key, "expected an integer"))?;
                    if n < 1 {
                        return Err(Error::invalid(key, format!("must be >= 1, got {n}")));
                    }
                    b.n_per_side = Some(n as usize);
                }
                "l_pa_m" => b.l_pa_m = Some(number(key, value)?),
                "l_in_factor" => b.l_in_factor = Some(number(key, value)?),
                "l_in_m" => b.l_in_m = Some(number(key, value)?),
                "y_f_m" => b.y_f_m = Some(number(key, value)?),
                "y_b_m" => b.y_b_m = Some(number(key, value)?),
                "p_t_dbm" => b.p_t_dbm = Some(number(key, value)?),
                "n0_dbm" => b.n0_dbm = Some(number(key, value)?),
                "delta_max_m" => b.delta_max_m = Some(number(key, value)?),
                "beta_ff" => b.beta_ff = Some(number(key, value)?),
                "beta_fb" => b.beta_fb = Some(number(key, value)?),
                "beta_bf" => b.beta_bf = Some(number(key, value)?),
                "beta_bb" => b.beta_bb = Some(number(key, value)?),
                "architecture" => {
                    b.architecture = Some(match text_value(key, value)? {
                        "center" => Architecture::Center,
                        "end" => Architecture::End,
                        other => return Err(Error::invalid(key, format!("expected center|end, got {other:?}"))),
                    })
                }
                "deployment" => {
                    b.deployment = Some(match text_value(key, value)? {
                        "uniform" => Deployment::Uniform,
                        "tuned" => Deployment::Tuned,
                        other => return Err(Error::invalid(key, format!("expected uniform|tuned, got {other:?}"))),
                    })
                }
                other => return Err(Error::invalid(other, "unknown key")),
            }
        }
        Ok(b)
    }
}

fn number(key: &str, value: &toml::Value) -> Result<f64> {
    match value {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::invalid(key, format!("expected a number, got {value}"))),
    }
}

fn text_value<'a>(key: &str, value: &'a toml::Value) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| Error::invalid(key, format!("expected a string, got {value}")))
}

/// Parses and validates configuration text.
pub fn parse_config<T: Real>(text: &str, origin: &str) -> Result<SystemConfig<T>> {
    ConfigBuilder::parse(text, origin)?.build()
}

/// Reads, parses and validates a config file.
pub fn load_config<T: Real>(path: impl AsRef<Path>) -> Result<SystemConfig<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}
