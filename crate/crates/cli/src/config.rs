//! Run configuration: command-line flags layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use radpair_core::{Complex64, InitialState, IntegratorConfig, ModelKind, RateParams, SpinBasis};
use serde::Deserialize;

use crate::error::CliError;

/// Amplitudes given on the command line or in a config file are accepted
/// when `|alpha|^2 + |beta|^2` is this close to one, then rescaled. Typed
/// values such as `0.70710678` are off by a few parts in 1e9.
pub const AMPLITUDE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    St,
    Pst,
}

impl From<BasisArg> for SpinBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::St => SpinBasis::St,
            BasisArg::Pst => SpinBasis::Pst,
        }
    }
}

/// A complex amplitude, written `re` or `re,im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub Complex64);

impl std::str::FromStr for Amplitude {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |part: &str| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{part}' as a number"))
        };
        let mut parts = s.split(',');
        let re = parse(parts.next().unwrap_or(""))?;
        let im = match parts.next() {
            Some(p) => parse(p)?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(format!("expected 're' or 're,im', got '{s}'"));
        }
        Ok(Amplitude(Complex64::new(re, im)))
    }
}

impl<'de> Deserialize<'de> for Amplitude {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Real(re) => Ok(Amplitude(Complex64::new(re, 0.0))),
            Raw::Pair([re, im]) => Ok(Amplitude(Complex64::new(re, im))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

/// Contents of a JSON config file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub basis: Option<BasisArg>,
    pub alpha: Option<Amplitude>,
    pub beta: Option<Amplitude>,
    pub ks: Option<f64>,
    pub t_end: Option<f64>,
    pub step: Option<f64>,
    pub stride: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Flags shared by `simulate`, `compare` and `decompose`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags take precedence over its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Basis: st (radical pair only) or pst (with product level)
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Singlet amplitude, "re" or "re,im"
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<Amplitude>,
    /// Triplet amplitude, "re" or "re,im"
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<Amplitude>,
    /// Singlet recombination rate k_S
    #[arg(long)]
    pub ks: Option<f64>,
    /// End time (absolute units)
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Integration step (default 1e-3 / k_S)
    #[arg(long)]
    pub step: Option<f64>,
    /// Record every Nth step
    #[arg(long)]
    pub stride: Option<usize>,
    /// Output file (stdout when omitted or "-")
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write k_S * t instead of t
    #[arg(long)]
    pub dimensionless: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub basis: SpinBasis,
    pub state: InitialState,
    pub params: RateParams,
    pub integrator: IntegratorConfig,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub dimensionless: bool,
}

impl RunConfig {
    pub fn k_s(&self) -> f64 {
        self.params.k_s()
    }
}

pub const DEFAULT_T_END: f64 = 5.0;

/// Resolves flags over the config file over defaults and validates the result.
pub fn resolve(args: &RunArgs, model_flag: Option<&str>) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let model = match model_flag.map(str::to_string).or(file.model.clone()) {
        Some(m) => parse_model(&m).map_err(|e| CliError::Config(format!("model: {e}")))?,
        None => ModelKind::QuantumMeasurement,
    };
    let basis: SpinBasis = args.basis.or(file.basis).unwrap_or(BasisArg::Pst).into();
    if !model.supports(basis) {
        return Err(CliError::Config(format!(
            "model/basis: model {model} cannot run in the {basis} basis"
        )));
    }

    let default_amp = Amplitude(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let alpha = args.alpha.or(file.alpha).unwrap_or(default_amp).0;
    let beta = args.beta.or(file.beta).unwrap_or(default_amp).0;
    let state = InitialState::with_tolerance(alpha, beta, AMPLITUDE_NORM_TOL).map_err(|e| {
        CliError::Config(format!(
            "alpha/beta: {e}; normalization requires |alpha|^2 + |beta|^2 = 1"
        ))
    })?;

    let k_s = args.ks.or(file.ks).unwrap_or(1.0);
    let params = RateParams::new(k_s).map_err(|e| CliError::Config(format!("ks: {e}")))?;

    let t_end = args.t_end.or(file.t_end).unwrap_or(DEFAULT_T_END);
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::Config(format!(
            "t_end: must be positive, got {t_end}"
        )));
    }
    let default_step = IntegratorConfig::for_rate(k_s, t_end).step;
    let step = args.step.or(file.step).unwrap_or(default_step);
    let stride = args.stride.or(file.stride).unwrap_or(1);
    let integrator = IntegratorConfig::new(step, t_end).with_stride(stride);
    integrator
        .validate()
        .map_err(|e| CliError::Config(format!("integrator: {e}")))?;

    let output = args
        .output
        .clone()
        .or(file.output)
        .filter(|p| p.as_os_str() != "-");

    Ok(RunConfig {
        model,
        basis,
        state,
        params,
        integrator,
        output,
        format: args.format.or(file.format).unwrap_or(Format::Csv),
        dimensionless: args.dimensionless,
    })
}
