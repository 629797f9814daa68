//! Position ↔ momentum transforms and characteristic functions.
//!
//! The transforms realize the continuum kernel
//! `φ(p) = (2πħ)^{-1/2} ∫ ψ(x) e^{-ipx/ħ} dx` on uniform grids: an FFT of
//! length `n` maps input step `dx` to output step `dp = 2πħ / (n dx)`, and the
//! grid origins enter through explicit phase factors before and after the FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlannerScalar};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{AxisKind, Distribution1D, Grid1D, SampledWave, Warning};
use crate::wavepacket::{
    build_superposition, build_window, Phases, SuperpositionSpec, WindowSpec,
    WINDOW_QUAD_INTERVALS,
};

/// Amplitude a transformed wave must stay below on its outer 5% of points.
pub const DECAY_THRESHOLD: f64 = 1e-6;

/// Below this `|sin(x/2)|` the Dirichlet kernel takes its limit value `N²`.
pub const DIRICHLET_SINGULAR: f64 = 1e-8;

pub(crate) fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FftPlannerScalar::new().plan_fft(len, direction)
}

/// Where the transformed samples land.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformOptions {
    /// Output grid is centered here (the point at FFT index `n/2`).
    pub center: f64,
    /// Crop the output to `|q - center| <= half_extent`.
    pub half_extent: Option<f64>,
    /// Zero-pad the input until the output step is at most this.
    pub max_step: Option<f64>,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            center: 0.0,
            half_extent: None,
            max_step: None,
        }
    }
}

impl TransformOptions {
    pub fn centered_at(center: f64) -> Self {
        Self {
            center,
            ..Self::default()
        }
    }

    /// Options whose output is `grid` itself when the input has `grid.count()`
    /// points with the reciprocal step.
    pub fn onto(grid: &Grid1D) -> Self {
        Self::centered_at(grid.origin() + (grid.count() / 2) as f64 * grid.step())
    }

    /// Output cropped to `±half_extent` around 0 with at most `max_step` spacing.
    pub fn band(half_extent: f64, max_step: f64) -> Self {
        Self {
            center: 0.0,
            half_extent: Some(half_extent),
            max_step: Some(max_step),
        }
    }

    /// FFT length for an input of `count` points with step `step`.
    pub fn fft_len(&self, count: usize, step: f64, hbar: f64) -> usize {
        match self.max_step {
            Some(max) => {
                let needed = (2.0 * PI * hbar / (max * step) - 1e-9).ceil() as usize;
                needed.max(count).next_power_of_two()
            }
            None => count,
        }
    }
}

/// Sign of the exponent in the kernel `e^{± i q s / ħ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Forward,
    Inverse,
}

/// Continuum transform of `values` sampled on `input`, full FFT band.
fn continuum_transform(
    values: &[Complex64],
    input: &Grid1D,
    hbar: f64,
    n: usize,
    center: f64,
    kernel: Kernel,
) -> (Grid1D, Vec<Complex64>) {
    let (sign, direction) = match kernel {
        Kernel::Forward => (-1.0, FftDirection::Forward),
        Kernel::Inverse => (1.0, FftDirection::Inverse),
    };
    let step_in = input.step();
    let step_out = 2.0 * PI * hbar / (n as f64 * step_in);
    let q0 = center - (n / 2) as f64 * step_out;
    let s0 = input.origin();

    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, (b, v)) in buf.iter_mut().zip(values).enumerate() {
        let s_rel = i as f64 * step_in;
        *b = v * Complex64::from_polar(1.0, sign * q0 * s_rel / hbar);
    }
    plan(n, direction).process(&mut buf);

    let scale = step_in / (2.0 * PI * hbar).sqrt();
    for (k, b) in buf.iter_mut().enumerate() {
        let q = q0 + k as f64 * step_out;
        *b *= Complex64::from_polar(scale, sign * q * s0 / hbar);
    }
    let grid = Grid1D::new(q0, step_out, n).expect("fft grid");
    (grid, buf)
}

fn crop_range(grid: &Grid1D, center: f64, half: Option<f64>) -> (usize, usize) {
    let Some(half) = half else {
        return (0, grid.count() - 1);
    };
    let tol = 1e-9 * grid.step();
    let lo = (0..grid.count())
        .find(|&k| grid.point(k) >= center - half - tol)
        .unwrap_or(0);
    let hi = (0..grid.count())
        .rev()
        .find(|&k| grid.point(k) <= center + half + tol)
        .unwrap_or(grid.count() - 1);
    (lo, hi)
}

fn crop(grid: Grid1D, values: Vec<Complex64>, center: f64, half: Option<f64>) -> Result<(Grid1D, Vec<Complex64>)> {
    if half.is_none() {
        return Ok((grid, values));
    }
    let (lo, hi) = crop_range(&grid, center, half);
    let cropped = Grid1D::new(grid.point(lo), grid.step(), hi - lo + 1)?;
    Ok((cropped, values[lo..=hi].to_vec()))
}

/// The grid a transform of a wave sampled on `input` lands on.
pub fn output_grid(input: &Grid1D, hbar: f64, opts: &TransformOptions) -> Result<Grid1D> {
    let n = opts.fft_len(input.count(), input.step(), hbar);
    let step = 2.0 * PI * hbar / (n as f64 * input.step());
    let full = Grid1D::new(opts.center - (n / 2) as f64 * step, step, n)?;
    let (lo, hi) = crop_range(&full, opts.center, opts.half_extent);
    Grid1D::new(full.point(lo), step, hi - lo + 1)
}

/// Warning if the wave has not decayed on its outer 5% of points.
pub fn decay_check(values: &[Complex64]) -> Option<Warning> {
    let edge = ((values.len() as f64) * 0.05).ceil().max(1.0) as usize;
    let edge_max = values[..edge]
        .iter()
        .chain(&values[values.len() - edge..])
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    (edge_max >= DECAY_THRESHOLD).then_some(Warning::GridTooSmall {
        edge_max,
        threshold: DECAY_THRESHOLD,
    })
}

fn transform(w: &SampledWave, opts: &TransformOptions, kernel: Kernel) -> Result<SampledWave> {
    let expected = match kernel {
        Kernel::Forward => AxisKind::Position,
        Kernel::Inverse => AxisKind::Momentum,
    };
    if w.axis() != expected {
        return Err(Error::WrongAxis {
            expected: expected.name(),
            found: w.axis().name(),
        });
    }
    let g = w.grid();
    let n = opts.fft_len(g.count(), g.step(), w.hbar());
    let (grid, values) = continuum_transform(w.values(), g, w.hbar(), n, opts.center, kernel);
    let (grid, values) = crop(grid, values, opts.center, opts.half_extent)?;
    let warning = decay_check(&values);
    Ok(SampledWave::new(grid, values, w.hbar(), expected.dual())?.with_warnings(warning))
}

/// `φ(p) = (2πħ)^{-1/2} ∫ ψ(x) e^{-ipx/ħ} dx` on an `n`-point grid centered at 0.
pub fn to_momentum(w: &SampledWave) -> Result<SampledWave> {
    transform(w, &TransformOptions::default(), Kernel::Forward)
}

pub fn to_momentum_with(w: &SampledWave, opts: &TransformOptions) -> Result<SampledWave> {
    transform(w, opts, Kernel::Forward)
}

/// `ψ(x) = (2πħ)^{-1/2} ∫ φ(p) e^{ipx/ħ} dp`.
pub fn to_position(w: &SampledWave) -> Result<SampledWave> {
    transform(w, &TransformOptions::default(), Kernel::Inverse)
}

pub fn to_position_with(w: &SampledWave, opts: &TransformOptions) -> Result<SampledWave> {
    transform(w, opts, Kernel::Inverse)
}

/// `dᵏψ/dsᵏ` by FFT differentiation on the wave's own grid (periodic extension).
pub fn spectral_derivative(w: &SampledWave, order: u32) -> Vec<Complex64> {
    let n = w.grid().count();
    let mut buf = w.values().to_vec();
    if order == 0 {
        return buf;
    }
    plan(n, FftDirection::Forward).process(&mut buf);
    let base = 2.0 * PI / (n as f64 * w.grid().step());
    for (j, b) in buf.iter_mut().enumerate() {
        if n.is_multiple_of(2) && j == n / 2 {
            *b = Complex64::new(0.0, 0.0);
            continue;
        }
        let freq = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        *b *= Complex64::new(0.0, base * freq).powu(order);
    }
    plan(n, FftDirection::Inverse).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|b| *b *= inv);
    buf
}

/// `(sin(N x/2) / sin(x/2))²`, with the limit `N²` at the removable singularities.
pub fn dirichlet_kernel(n: usize, x: f64) -> f64 {
    let s = (x / 2.0).sin();
    if s.abs() < DIRICHLET_SINGULAR {
        return (n * n) as f64;
    }
    ((n as f64 * x / 2.0).sin() / s).powi(2)
}

/// P(p) of a superposition, computed twice.
#[derive(Debug, Clone)]
pub struct MomentumDistribution {
    /// `|F(p)|²` times the lobe interference factor.
    pub closed_form: Distribution1D,
    /// `|to_momentum(ψ)|²` of the sampled superposition.
    pub pipeline: Distribution1D,
    /// Transform `F(p)` of a single window at the origin.
    pub window_spectrum: SampledWave,
    /// `max |closed - pipeline| / max closed`.
    pub discrepancy: f64,
    pub warnings: Vec<Warning>,
}

impl MomentumDistribution {
    pub fn density(&self) -> &Distribution1D {
        &self.closed_form
    }

    pub fn window_density(&self) -> Distribution1D {
        self.window_spectrum.density()
    }
}

/// Lobe interference factor multiplying `|F(p)|²`.
pub fn interference_factor(spec: &SuperpositionSpec, p: f64, hbar: f64) -> f64 {
    let n = spec.lobes;
    let phase = p * spec.shift / hbar;
    match (&spec.phases, n) {
        (Phases::Linear { alpha }, 2) => 1.0 + (phase - alpha).cos(),
        (Phases::Linear { alpha }, _) => dirichlet_kernel(n, alpha - phase) / n as f64,
        (Phases::Explicit { .. }, _) => {
            let s: Complex64 = (0..n)
                .map(|k| Complex64::from_polar(1.0, spec.phase(k) - k as f64 * phase))
                .sum();
            s.norm_sqr() / n as f64
        }
    }
}

pub fn momentum_distribution(
    spec: &SuperpositionSpec,
    x_grid: &Grid1D,
    hbar: f64,
    opts: &TransformOptions,
) -> Result<MomentumDistribution> {
    let window = build_window(&spec.window, x_grid, hbar)?;
    let f = to_momentum_with(&window, opts)?;
    let psi = build_superposition(spec, x_grid, hbar)?.wave;
    let phi = to_momentum_with(&psi, opts)?;

    let p_grid = *f.grid();
    let closed: Vec<f64> = p_grid
        .points()
        .zip(f.values())
        .map(|(p, v)| v.norm_sqr() * interference_factor(spec, p, hbar))
        .collect();
    let pipeline: Vec<f64> = phi.values().iter().map(|v| v.norm_sqr()).collect();
    let peak = closed.iter().cloned().fold(0.0, f64::max);
    let discrepancy = closed
        .iter()
        .zip(&pipeline)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / peak;

    let mut warnings: Vec<Warning> = phi.warnings().to_vec();
    warnings.dedup();
    Ok(MomentumDistribution {
        closed_form: Distribution1D::new(p_grid, closed)?,
        pipeline: Distribution1D::new(p_grid, pipeline)?,
        window_spectrum: f,
        discrepancy,
        warnings,
    })
}

/// `M(θ) = ∫ e^{iθp} P(p) dp` sampled on a θ grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharFunction {
    pub grid: Grid1D,
    #[serde(serialize_with = "serialize_complex")]
    pub values: Vec<Complex64>,
    /// `M` vanishes for `|θ|` beyond this; `None` when unbounded.
    pub support_radius: Option<f64>,
}

fn serialize_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&[c.re, c.im])?;
    }
    seq.end()
}

impl CharFunction {
    pub fn at_zero(&self) -> Option<Complex64> {
        self.grid.index_of(0.0).map(|i| self.values[i])
    }

    /// Sample at a grid point.
    pub fn value_at(&self, theta: f64) -> Option<Complex64> {
        self.grid.index_of(theta).map(|i| self.values[i])
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |M(-θ) - conj M(θ)|` over θ whose mirror is also on the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, theta) in self.grid.points().enumerate() {
            if let Some(j) = self.grid.index_of(-theta) {
                worst = worst.max((self.values[j] - self.values[i].conj()).norm());
            }
        }
        worst
    }

    /// `max |M₁ - M₂|` on a shared grid.
    pub fn max_difference(&self, other: &CharFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Pointwise difference `self - other`; support becomes unbounded-safe max.
    pub fn minus(&self, other: &CharFunction) -> Result<CharFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(CharFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            support_radius: match (self.support_radius, other.support_radius) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            },
        })
    }
}

/// `∫ e^{iθp} P(p) dp` by trapezoid quadrature for every θ of the grid.
pub fn char_function_of_distribution(d: &Distribution1D, theta_grid: &Grid1D) -> CharFunction {
    let g = d.grid();
    let n = g.count();
    let step = g.step();
    let weights: Vec<f64> = d
        .density()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i == 0 || i == n - 1 { 0.5 * v } else { v } * step)
        .collect();
    let values = (0..theta_grid.count())
        .into_par_iter()
        .map(|t| {
            let theta = theta_grid.point(t);
            // e^{iθ(p₀ + i dp)} by recurrence on the unit circle, re-anchored
            // every 256 points to keep the rounding drift below 1e-13.
            let rot = Complex64::from_polar(1.0, theta * step);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut e = Complex64::new(0.0, 0.0);
            for (i, w) in weights.iter().enumerate() {
                if i % 256 == 0 {
                    e = Complex64::from_polar(1.0, theta * g.point(i));
                } else {
                    e *= rot;
                }
                acc += e * w;
            }
            acc
        })
        .collect();
    CharFunction {
        grid: *theta_grid,
        values,
        support_radius: None,
    }
}

/// `M_F(θ) = ∫ f(x) f*(x - θħ) dx` for a normalized analytic window.
#[derive(Debug, Clone, Copy)]
pub struct WindowAutocorrelation {
    window: WindowSpec,
    hbar: f64,
    norm2: f64,
}

impl WindowAutocorrelation {
    pub fn new(window: &WindowSpec, hbar: f64) -> Self {
        Self {
            window: *window,
            hbar,
            norm2: window.normalization().powi(2),
        }
    }

    pub fn support_radius(&self) -> f64 {
        self.window.extent / self.hbar
    }

    /// Midpoint rule over the overlap `[max(0, s), min(a, a + s)]`, `s = θħ`.
    /// Exactly zero once the shifted copy no longer overlaps.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let a = self.window.extent;
        let s = theta * self.hbar;
        if s.abs() >= a {
            return Complex64::new(0.0, 0.0);
        }
        let lo = s.max(0.0);
        let hi = a.min(a + s);
        let intervals = ((WINDOW_QUAD_INTERVALS as f64) * (hi - lo) / a).ceil().max(1.0) as usize;
        let h = (hi - lo) / intervals as f64;
        let sum: Complex64 = (0..intervals)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                self.window.shape(x, self.hbar) * self.window.shape(x - s, self.hbar).conj()
            })
            .sum();
        sum * (h * self.norm2)
    }
}

pub fn char_function_window(window: &WindowSpec, theta_grid: &Grid1D, hbar: f64) -> CharFunction {
    let ac = WindowAutocorrelation::new(window, hbar);
    let values = theta_grid
        .points()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|t| ac.eval(t))
        .collect();
    CharFunction {
        grid: *theta_grid,
        values,
        support_radius: Some(ac.support_radius()),
    }
}

/// `M(θ) = (1/N) Σ_{n,k} e^{i(αₙ - αₖ)} M_F(θ - (n - k)L/ħ)`.
pub fn char_function_two_lobe(spec: &SuperpositionSpec, theta_grid: &Grid1D, hbar: f64) -> CharFunction {
    let ac = WindowAutocorrelation::new(&spec.window, hbar);
    let n = spec.lobes;
    // Group the N² terms by lag d = n - k.
    let lags: Vec<(i64, Complex64)> = (-(n as i64 - 1)..n as i64)
        .map(|d| {
            let c: Complex64 = (0..n as i64)
                .filter_map(|k| {
                    let m = k + d;
                    (0..n as i64)
                        .contains(&m)
                        .then(|| Complex64::from_polar(1.0, spec.phase(m as usize) - spec.phase(k as usize)))
                })
                .sum();
            (d, c / n as f64)
        })
        .collect();
    let values = theta_grid
        .points()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|t| {
            lags.iter()
                .map(|&(d, c)| c * ac.eval(t - d as f64 * spec.shift / hbar))
                .sum()
        })
        .collect();
    CharFunction {
        grid: *theta_grid,
        values,
        support_radius: Some(spec.span() / hbar),
    }
}
