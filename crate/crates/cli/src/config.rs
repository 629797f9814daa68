//! Experiment configuration: a TOML file, then command-line overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use mindet_core::phasespace::check_wigner_grids;
use mindet_core::scenario::CANONICAL_ALPHAS;
use mindet_core::spectral::output_grid;
use mindet_core::wavepacket::{Phases, WindowFamily, WindowSpec};
use mindet_core::{BasisSettings, Numerics, Scenario, SuperpositionSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<mindet_core::Error> for ConfigError {
    fn from(e: mindet_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

/// An α written as a number or as an expression in `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaInput {
    Value(f64),
    Expr(String),
}

impl AlphaInput {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            AlphaInput::Value(v) => Ok(*v),
            AlphaInput::Expr(s) => parse_angle(s),
        }
    }
}

/// Parses `0.5`, `pi`, `-pi/4`, `3pi/4`, `2*pi/3`, `π/2`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.trim().to_lowercase().replace('π', "pi").split_whitespace().collect();
    let bad = || ConfigError(format!("cannot parse angle '{text}' (examples: 0.5, pi/4, -3pi/4)"));
    let Some((coef, rest)) = s.split_once("pi") else {
        return s.parse::<f64>().map_err(|_| bad()).and_then(finite(text));
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    finite(text)(coef * PI / den)
}

fn finite(text: &str) -> impl Fn(f64) -> Result<f64> + '_ {
    move |v| {
        if v.is_finite() {
            Ok(v)
        } else {
            invalid(format!("angle '{text}' is not finite"))
        }
    }
}

pub fn parse_angle_list(text: &str) -> Result<Vec<f64>> {
    let out = text.split(',').map(parse_angle).collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return invalid("empty alpha list");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// `αₙ = n α` for every α of the sweep.
    Linear,
    /// One fixed phase per lobe from `phases`; the sweep has a single entry.
    Explicit,
}

/// Output thinning; only affects what is written, never what is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub wigner_x_stride: usize,
    pub wigner_p_stride: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            wigner_x_stride: 16,
            wigner_p_stride: 8,
        }
    }
}

/// The file format. Every field is optional; defaults are the canonical scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub window: String,
    pub a: f64,
    #[serde(rename = "L")]
    pub shift: f64,
    #[serde(rename = "N")]
    pub lobes: usize,
    pub phase_mode: PhaseMode,
    pub phases: Vec<AlphaInput>,
    pub alphas: Vec<AlphaInput>,
    pub hbar: f64,
    pub n_max: usize,
    pub charfun_n_max: usize,
    /// Log-normal perturbation strengths.
    pub betas: Vec<f64>,
    pub numerics: Numerics,
    pub basis: BasisSettings,
    pub output: OutputSettings,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let s = Scenario::canonical();
        Self {
            window: s.window.family.name().into(),
            a: s.window.extent,
            shift: s.shift,
            lobes: s.lobes,
            phase_mode: PhaseMode::Linear,
            phases: Vec::new(),
            alphas: CANONICAL_ALPHAS.iter().map(|&a| AlphaInput::Value(a)).collect(),
            hbar: s.hbar,
            n_max: s.n_max,
            charfun_n_max: s.charfun_n_max,
            betas: vec![-1.0, 0.0, 1.0],
            numerics: s.numerics,
            basis: s.basis,
            output: OutputSettings::default(),
            out: None,
        }
    }
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alphas: Option<Vec<f64>>,
    pub window: Option<String>,
    pub a: Option<f64>,
    pub shift: Option<f64>,
    pub lobes: Option<usize>,
    pub hbar: Option<f64>,
    pub n_max: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.alphas {
            self.alphas = v.iter().map(|&a| AlphaInput::Value(a)).collect();
        }
        if let Some(v) = &o.window {
            self.window = v.clone();
        }
        if let Some(v) = o.a {
            self.a = v;
        }
        if let Some(v) = o.shift {
            self.shift = v;
        }
        if let Some(v) = o.lobes {
            self.lobes = v;
        }
        if let Some(v) = o.hbar {
            self.hbar = v;
        }
        if let Some(v) = o.n_max {
            self.n_max = v;
        }
    }

    /// Checks every constraint the experiments rely on and fixes all values.
    pub fn resolve(&self) -> Result<Resolved> {
        let family = WindowFamily::from_name(&self.window).ok_or_else(|| {
            let names: Vec<&str> = WindowFamily::ALL.iter().map(|f| f.name()).collect();
            ConfigError(format!("unknown window '{}'; choose one of {}", self.window, names.join(", ")))
        })?;
        if !(self.a > 0.0) || !self.a.is_finite() {
            return invalid(format!("window extent a must be positive, got {}", self.a));
        }
        if !(self.shift > self.a) {
            return invalid(format!(
                "lobes overlap: L = {} must exceed the window extent a = {}",
                self.shift, self.a
            ));
        }
        let alphas = self.alphas.iter().map(AlphaInput::resolve).collect::<Result<Vec<_>>>()?;
        let phases = match self.phase_mode {
            PhaseMode::Linear => {
                if !self.phases.is_empty() {
                    return invalid("phases are only used with phase_mode = \"explicit\"");
                }
                None
            }
            PhaseMode::Explicit => {
                let p = self.phases.iter().map(AlphaInput::resolve).collect::<Result<Vec<_>>>()?;
                if p.len() != self.lobes {
                    return invalid(format!("{} explicit phases given for N = {} lobes", p.len(), self.lobes));
                }
                Some(p)
            }
        };
        for &b in &self.betas {
            if !(b.abs() <= 1.0) {
                return invalid(format!("log-normal beta must satisfy |beta| <= 1, got {b}"));
            }
        }
        if self.output.wigner_x_stride == 0 || self.output.wigner_p_stride == 0 {
            return invalid("output strides must be at least 1");
        }
        let scenario = Scenario {
            window: WindowSpec::new(family, self.a)?,
            shift: self.shift,
            lobes: self.lobes,
            alphas,
            hbar: self.hbar,
            n_max: self.n_max,
            charfun_n_max: self.charfun_n_max,
            numerics: self.numerics,
            basis: self.basis,
        };
        scenario.validate()?;
        let x_grid = scenario.x_grid()?;
        let p_grid = output_grid(&x_grid, scenario.hbar, &scenario.momentum_options())?;
        let wigner_ok = check_wigner_grids(&x_grid, &p_grid, scenario.hbar, scenario.numerics.oversample);
        let resolved = Resolved {
            scenario,
            phases,
            betas: self.betas.clone(),
            output: self.output,
            wigner_grid_error: wigner_ok.err().map(|e| e.to_string()),
        };
        Ok(resolved)
    }
}

/// A validated configuration; what gets hashed and echoed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub phases: Option<Vec<f64>>,
    pub betas: Vec<f64>,
    pub output: OutputSettings,
    /// Why the x and p grids cannot feed a Wigner transform, if they cannot.
    #[serde(skip)]
    pub wigner_grid_error: Option<String>,
}

impl Resolved {
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON echo.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `(label, spec)` per sweep entry: one per α, or the single explicit set.
    pub fn sweep(&self) -> Result<Vec<(String, SuperpositionSpec)>> {
        let s = &self.scenario;
        match &self.phases {
            None => s
                .alphas
                .iter()
                .map(|&a| Ok((alpha_label(a), s.spec(a)?)))
                .collect(),
            Some(p) => Ok(vec![(
                "explicit".into(),
                SuperpositionSpec::new(s.window, s.shift, s.lobes, Phases::Explicit { phases: p.clone() })?,
            )]),
        }
    }

    /// Rejects explicit phases and other lobe counts for experiments that
    /// need a two-lobe α sweep.
    pub fn require_two_lobe_sweep(&self, experiment: &str) -> Result<()> {
        if self.phases.is_some() {
            return invalid(format!("{experiment} sweeps alpha; phase_mode must be \"linear\""));
        }
        if self.scenario.lobes != 2 {
            return invalid(format!("{experiment} needs N = 2, got N = {}", self.scenario.lobes));
        }
        Ok(())
    }

    pub fn require_linear(&self, experiment: &str) -> Result<()> {
        if self.phases.is_some() {
            return invalid(format!("{experiment} sweeps alpha; phase_mode must be \"linear\""));
        }
        Ok(())
    }

    pub fn require_wigner_grids(&self) -> Result<()> {
        match &self.wigner_grid_error {
            None => Ok(()),
            Some(e) => invalid(format!("{e}; adjust numerics.x_step or numerics.fringe_samples")),
        }
    }
}

/// Column-name form of an angle, six decimals: `0.785398`.
pub fn alpha_label(a: f64) -> String {
    let s = format!("{a:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}
