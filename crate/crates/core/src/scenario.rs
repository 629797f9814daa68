//! The canonical scenario and the grid settings every experiment derives from.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::spectral::TransformOptions;
use crate::wavepacket::{Phases, SuperpositionSpec, WindowFamily, WindowSpec};

/// Discretization settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Position grid step.
    pub x_step: f64,
    /// Empty space kept on both sides of the support.
    pub x_margin: f64,
    /// Momentum grids span `±p_extent`.
    pub p_extent: f64,
    /// Minimum samples per fringe period `2πħ/L`.
    pub fringe_samples: usize,
    /// Spectral upsampling factor of the Wigner lag grid.
    pub oversample: usize,
    /// θ step of characteristic-function grids, in units of `x_step / ħ`.
    pub theta_step_factor: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            x_step: 1.0 / 512.0,
            x_margin: 0.5,
            p_extent: 64.0 * PI,
            fringe_samples: 16,
            oversample: 2,
            theta_step_factor: 4.0,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.x_step > 0.0) {
            return bad("x_step must be positive");
        }
        if !(self.x_margin >= 0.0) {
            return bad("x_margin must be nonnegative");
        }
        if !(self.p_extent > 0.0) {
            return bad("p_extent must be positive");
        }
        if self.fringe_samples < 2 {
            return bad("fringe_samples must be at least 2");
        }
        if self.oversample < 1 {
            return bad("oversample must be at least 1");
        }
        if !(self.theta_step_factor > 0.0) {
            return bad("theta_step_factor must be positive");
        }
        Ok(())
    }

    /// Position grid covering `[lo, hi]` plus the margin, with 0 on the grid.
    pub fn x_grid(&self, lo: f64, hi: f64) -> Result<Grid1D> {
        Grid1D::covering(lo, hi, self.x_step, self.x_margin)
    }

    /// Largest momentum step resolving the fringe of a shift `L`.
    pub fn max_p_step(&self, shift: f64, hbar: f64) -> f64 {
        2.0 * PI * hbar / (self.fringe_samples as f64 * shift)
    }

    /// Momentum grid `±p_extent` fine enough for the fringe of `shift`.
    pub fn momentum_options(&self, shift: f64, hbar: f64) -> TransformOptions {
        TransformOptions::band(self.p_extent, self.max_p_step(shift, hbar))
    }

    /// Same resolution, uncropped: the whole band `±πħ/dx`.
    pub fn full_band_options(&self, shift: f64, hbar: f64) -> TransformOptions {
        TransformOptions {
            half_extent: None,
            ..self.momentum_options(shift, hbar)
        }
    }

    pub fn theta_step(&self, hbar: f64) -> f64 {
        self.theta_step_factor * self.x_step / hbar
    }

    /// Symmetric θ grid reaching at least `radius`.
    pub fn theta_grid(&self, radius: f64, hbar: f64) -> Result<Grid1D> {
        let step = self.theta_step(hbar);
        Grid1D::symmetric(radius + 16.0 * step, step)
    }
}

/// Oscillator eigenbasis settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisSettings {
    pub size: usize,
    /// `σ` of the Hermite functions; `ω = ħ/σ²`.
    pub length_scale: f64,
    /// Oscillator center; `None` puts it at the middle of the superposition.
    pub center: Option<f64>,
}

impl Default for BasisSettings {
    fn default() -> Self {
        Self {
            size: 128,
            length_scale: 0.15,
            center: None,
        }
    }
}

/// A superposition family together with its α sweep and numerics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub window: WindowSpec,
    pub shift: f64,
    pub lobes: usize,
    pub alphas: Vec<f64>,
    pub hbar: f64,
    pub n_max: usize,
    pub charfun_n_max: usize,
    pub numerics: Numerics,
    pub basis: BasisSettings,
}

pub const CANONICAL_ALPHAS: [f64; 4] = [0.0, PI / 4.0, PI / 2.0, PI];

impl Scenario {
    /// Smooth bump, a = 1, L = 2, ħ = 1, two lobes, α ∈ {0, π/4, π/2, π}.
    pub fn canonical() -> Self {
        Self {
            window: WindowSpec::new(WindowFamily::SmoothBump, 1.0).expect("canonical window"),
            shift: 2.0,
            lobes: 2,
            alphas: CANONICAL_ALPHAS.to_vec(),
            hbar: 1.0,
            n_max: 6,
            charfun_n_max: 4,
            numerics: Numerics::default(),
            basis: BasisSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.numerics.validate()?;
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.alphas.is_empty() {
            return Err(Error::InvalidParameter("at least one alpha is required".into()));
        }
        if self.n_max > 12 {
            return Err(Error::InvalidParameter(format!("n_max {} exceeds 12", self.n_max)));
        }
        if self.charfun_n_max > 4 {
            return Err(Error::InvalidParameter(format!(
                "characteristic-function n_max {} exceeds 4",
                self.charfun_n_max
            )));
        }
        if self.basis.size < 2 || !(self.basis.length_scale > 0.0) {
            return Err(Error::InvalidParameter("basis needs size >= 2 and a positive length scale".into()));
        }
        self.spec(self.alphas[0]).map(|_| ())
    }

    /// Linear-phase superposition with phase step `alpha`.
    pub fn spec(&self, alpha: f64) -> Result<SuperpositionSpec> {
        SuperpositionSpec::new(self.window, self.shift, self.lobes, Phases::Linear { alpha })
    }

    pub fn span(&self) -> f64 {
        (self.lobes - 1) as f64 * self.shift + self.window.extent
    }

    pub fn x_grid(&self) -> Result<Grid1D> {
        self.numerics.x_grid(0.0, self.span())
    }

    pub fn momentum_options(&self) -> TransformOptions {
        self.numerics.momentum_options(self.shift, self.hbar)
    }

    pub fn full_band_options(&self) -> TransformOptions {
        self.numerics.full_band_options(self.shift, self.hbar)
    }

    /// θ grid covering the support of the superposition's characteristic function.
    pub fn theta_grid(&self) -> Result<Grid1D> {
        self.numerics.theta_grid(self.span() / self.hbar, self.hbar)
    }

    pub fn basis_center(&self) -> f64 {
        self.basis.center.unwrap_or(self.span() / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_grids() {
        let s = Scenario::canonical();
        s.validate().unwrap();
        let g = s.x_grid().unwrap();
        assert_eq!(g.step(), 1.0 / 512.0);
        for x in [0.0, 1.0, 2.0, 3.0] {
            assert!(g.index_of(x).is_some());
        }
        let opts = s.momentum_options();
        assert_eq!(opts.fft_len(g.count(), g.step(), 1.0), 16384);
        assert_eq!(s.theta_grid().unwrap().step(), 1.0 / 128.0);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let mut s = Scenario::canonical();
        s.shift = 0.5;
        assert!(s.validate().is_err());
        let mut s = Scenario::canonical();
        s.hbar = 0.0;
        assert!(s.validate().is_err());
        let mut s = Scenario::canonical();
        s.charfun_n_max = 5;
        assert!(s.validate().is_err());
    }
}
