//! Uniform 1-D grids, sampled complex waves and nonnegative densities.
//!
//! Every continuous integral in the crate is discretized on a [`Grid1D`]. Waves
//! carry their ħ and whether they live on the position or the momentum axis, so
//! the transforms in [`crate::spectral`] can refuse mismatched inputs.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when deciding whether a coordinate sits on a grid point, in
/// units of the grid step.
const SNAP_TOL: f64 = 1e-9;

/// A uniform grid `origin + i * step`, `0 <= i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    origin: f64,
    step: f64,
    count: usize,
}

impl Grid1D {
    pub fn new(origin: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count must be >= 2, got {count}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { origin, step, count })
    }

    /// Grid `-k*step ..= k*step` with `k = floor(half_extent / step)`.
    pub fn symmetric(half_extent: f64, step: f64) -> Result<Self> {
        if !(half_extent > 0.0) {
            return Err(Error::InvalidGrid("half extent must be positive".into()));
        }
        let k = (half_extent / step + SNAP_TOL).floor() as usize;
        Self::new(-(k as f64) * step, step, 2 * k + 1)
    }

    /// Smallest grid whose points are integer multiples of `step` and that
    /// covers `[lo - margin, hi + margin]`.
    pub fn covering(lo: f64, hi: f64, step: f64, margin: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidGrid(format!("empty interval [{lo}, {hi}]")));
        }
        let first = ((lo - margin) / step - SNAP_TOL).floor() as i64;
        let last = ((hi + margin) / step + SNAP_TOL).ceil() as i64;
        Self::new(first as f64 * step, step, (last - first + 1) as usize)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn last(&self) -> f64 {
        self.point(self.count - 1)
    }

    /// Distance between the first and last grid point.
    pub fn extent(&self) -> f64 {
        (self.count - 1) as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Fractional index of `x`; integral when `x` is a grid point.
    pub fn position_of(&self, x: f64) -> f64 {
        (x - self.origin) / self.step
    }

    /// Index of the grid point at `x`, if `x` lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let pos = self.position_of(x);
        let rounded = pos.round();
        if (pos - rounded).abs() <= SNAP_TOL * pos.abs().max(1.0)
            && rounded >= 0.0
            && (rounded as usize) < self.count
        {
            Some(rounded as usize)
        } else {
            None
        }
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let pos = self.position_of(x).round();
        pos.clamp(0.0, (self.count - 1) as f64) as usize
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let tol = SNAP_TOL * self.step;
        self.origin <= lo + tol && self.last() >= hi - tol
    }

    /// Linear interpolation of grid samples; zero outside the grid.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.count);
        let pos = self.position_of(x);
        if pos < 0.0 || pos > (self.count - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(self.count - 2);
        let t = pos - i as f64;
        values[i] * (1.0 - t) + values[i + 1] * t
    }
}

impl fmt::Display for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] step {} ({} points)",
            self.origin,
            self.last(),
            self.step,
            self.count
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Position,
    Momentum,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Position => "position",
            AxisKind::Momentum => "momentum",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            AxisKind::Position => AxisKind::Momentum,
            AxisKind::Momentum => AxisKind::Position,
        }
    }
}

/// Non-fatal diagnostics attached to computed results.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The transformed wave has not decayed on the outer 5% of its grid.
    GridTooSmall { edge_max: f64, threshold: f64 },
    /// A basis expansion captured less of the norm than required.
    TruncationInsufficient { captured: f64, required: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::GridTooSmall { edge_max, threshold } => write!(
                f,
                "momentum grid truncates tail: edge amplitude {edge_max:e} >= {threshold:e}"
            ),
            Warning::TruncationInsufficient { captured, required } => write!(
                f,
                "truncation insufficient: captured norm {captured} < {required}"
            ),
        }
    }
}

/// Complex amplitudes on a uniform grid: ψ(x) or φ(p).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWave {
    grid: Grid1D,
    values: Vec<Complex64>,
    hbar: f64,
    axis: AxisKind,
    warnings: Vec<Warning>,
}

impl SampledWave {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, hbar: f64, axis: AxisKind) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.count()
            )));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteIntegrand { index });
        }
        Ok(Self {
            grid,
            values,
            hbar,
            axis,
            warnings: Vec::new(),
        })
    }

    /// Samples `f` on every grid point.
    pub fn from_fn(
        grid: Grid1D,
        hbar: f64,
        axis: AxisKind,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values, hbar, axis)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn axis(&self) -> AxisKind {
        self.axis
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn with_warning(mut self, warning: Warning) -> Self {
        self.warnings.push(warning);
        self
    }

    pub(crate) fn with_warnings(mut self, warnings: impl IntoIterator<Item = Warning>) -> Self {
        self.warnings.extend(warnings);
        self
    }

    /// Σ |ψᵢ|² · step.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero wave".into()));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(self)
    }

    /// Same grid and ħ, new amplitudes.
    pub fn map_values(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, &v)| f(x, v))
            .collect();
        Self {
            grid: self.grid,
            values,
            hbar: self.hbar,
            axis: self.axis,
            warnings: self.warnings.clone(),
        }
    }

    /// |ψ|² as a density on the same grid.
    pub fn density(&self) -> Distribution1D {
        Distribution1D {
            grid: self.grid,
            density: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub(crate) fn same_layout(&self, other: &SampledWave) -> bool {
        self.grid == other.grid && self.hbar == other.hbar && self.axis == other.axis
    }
}

/// Nonnegative real density on a uniform grid: P(x), P(p), P_LN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution1D {
    grid: Grid1D,
    density: Vec<f64>,
}

impl Distribution1D {
    pub fn new(grid: Grid1D, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.count() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {} points",
                density.len(),
                grid.count()
            )));
        }
        if let Some(i) = density.iter().position(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "sample {i} is {} (must be finite and >= 0)",
                density[i]
            )));
        }
        Ok(Self { grid, density })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let density = grid.points().map(f).collect();
        Self::new(grid, density)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.density, self.grid.step())
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= 1e-8
    }

    pub fn normalized(mut self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::InvalidDensity("zero total mass".into()));
        }
        self.density.iter_mut().for_each(|d| *d /= m);
        Ok(self)
    }

    /// Restriction to the grid points with `|x - center| <= half_width`.
    pub fn restricted(&self, center: f64, half_width: f64) -> Result<Self> {
        let lo = self.grid.nearest_index(center - half_width);
        let hi = self.grid.nearest_index(center + half_width);
        let grid = Grid1D::new(self.grid.point(lo), self.grid.step(), hi - lo + 1)?;
        Self::new(grid, self.density[lo..=hi].to_vec())
    }

    /// ∫ |P − Q| dx on a shared grid.
    pub fn l1_distance(&self, other: &Distribution1D) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let diff: Vec<f64> = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| (a - b).abs())
            .collect();
        Ok(trapezoid(&diff, self.grid.step()))
    }
}

/// Composite trapezoid rule with half weight on the two end points.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) * step
        }
    }
}

/// ∫ w(x) P(x) dx by the composite trapezoid rule, `weight` sampled on `d.grid`.
pub fn quadrature(d: &Distribution1D, weight: &[f64]) -> Result<f64> {
    if weight.len() != d.grid.count() {
        return Err(Error::GridMismatch);
    }
    if let Some(index) = weight.iter().position(|w| !w.is_finite()) {
        return Err(Error::NonFiniteIntegrand { index });
    }
    let n = weight.len();
    let mut acc = 0.0;
    for (i, (w, rho)) in weight.iter().zip(&d.density).enumerate() {
        let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += end * w * rho;
    }
    Ok(acc * d.grid.step())
}

/// [`quadrature`] with the weight given as a function of the grid coordinate.
pub fn quadrature_fn(d: &Distribution1D, weight: impl Fn(f64) -> f64) -> Result<f64> {
    let w: Vec<f64> = d.grid.points().map(weight).collect();
    quadrature(d, &w)
}

/// ⟨a, b⟩ = Σ conj(aᵢ) bᵢ · step.
pub fn inner_product(a: &SampledWave, b: &SampledWave) -> Result<Complex64> {
    if !a.same_layout(b) {
        return Err(Error::GridMismatch);
    }
    let s: Complex64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(s * a.grid.step())
}
