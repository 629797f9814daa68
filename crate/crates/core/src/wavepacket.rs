//! Finite-extent windows and their non-overlapping superpositions.
//!
//! A window `f` lives on `[0, a]` and is exactly zero elsewhere. Superpositions
//! place copies of it at `n * L`, `n = 0..N`, each carrying a constant phase
//! `e^{iαₙ}`, and divide by `√N`. Lobe boundaries are snapped to grid points so
//! that distinct lobes never share a nonzero sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{AxisKind, Grid1D, SampledWave};

/// Amplitudes below this are treated as outside the support.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Intervals used by the high-resolution quadrature of analytic windows.
pub(crate) const WINDOW_QUAD_INTERVALS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowFamily {
    /// `exp(-a² / (x (a - x)))`: C^∞ with every derivative vanishing at both ends.
    SmoothBump,
    /// Indicator of `[0, a)`.
    Rectangle,
    /// `1 - cos(2πx/a)`.
    RaisedCosine,
    /// Gaussian of width `a/4` centered at `a/2`, shifted down to vanish at the ends.
    TruncatedGaussian,
}

impl WindowFamily {
    pub const ALL: [WindowFamily; 4] = [
        WindowFamily::SmoothBump,
        WindowFamily::Rectangle,
        WindowFamily::RaisedCosine,
        WindowFamily::TruncatedGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowFamily::SmoothBump => "smooth_bump",
            WindowFamily::Rectangle => "rectangle",
            WindowFamily::RaisedCosine => "raised_cosine",
            WindowFamily::TruncatedGaussian => "truncated_gaussian",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name || f.name().replace('_', "-") == name)
    }

    pub fn smoothness(self) -> SmoothnessClass {
        match self {
            WindowFamily::SmoothBump => SmoothnessClass::Infinite,
            WindowFamily::RaisedCosine => SmoothnessClass::C1,
            WindowFamily::TruncatedGaussian => SmoothnessClass::C0,
            WindowFamily::Rectangle => SmoothnessClass::Discontinuous,
        }
    }
}

/// How many derivatives of the window are continuous across its endpoints.
/// A delta in the N-th derivative gives |F(p)|² ~ 1/p^{2N}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClass {
    Discontinuous,
    C0,
    C1,
    Infinite,
}

impl SmoothnessClass {
    /// Exponent `2N` of the |F(p)|² power-law tail, `None` for C^∞.
    pub fn tail_exponent(self) -> Option<u32> {
        match self {
            SmoothnessClass::Discontinuous => Some(2),
            SmoothnessClass::C0 => Some(4),
            SmoothnessClass::C1 => Some(6),
            SmoothnessClass::Infinite => None,
        }
    }
}

/// Phase `S(x)` carried inside each lobe, in window-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InternalPhase {
    #[default]
    None,
    /// `S(x) = k x`: a momentum kick.
    Linear { momentum: f64 },
    /// `S(x) = c x²`.
    Chirp { rate: f64 },
}

impl InternalPhase {
    pub fn action(&self, x: f64) -> f64 {
        match *self {
            InternalPhase::None => 0.0,
            InternalPhase::Linear { momentum } => momentum * x,
            InternalPhase::Chirp { rate } => rate * x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub family: WindowFamily,
    pub extent: f64,
    #[serde(default)]
    pub phase: InternalPhase,
}

impl WindowSpec {
    pub fn new(family: WindowFamily, extent: f64) -> Result<Self> {
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "window extent must be positive, got {extent}"
            )));
        }
        Ok(Self {
            family,
            extent,
            phase: InternalPhase::None,
        })
    }

    pub fn with_phase(mut self, phase: InternalPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn smoothness(&self) -> SmoothnessClass {
        self.family.smoothness()
    }

    /// Unnormalized real envelope for a window of extent `a`, local coordinate `x`.
    pub(crate) fn envelope_with_extent(family: WindowFamily, a: f64, x: f64) -> f64 {
        match family {
            WindowFamily::SmoothBump => {
                if x <= 0.0 || x >= a {
                    0.0
                } else {
                    (-a * a / (x * (a - x))).exp()
                }
            }
            WindowFamily::Rectangle => {
                if (0.0..a).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            WindowFamily::RaisedCosine => {
                if x <= 0.0 || x >= a {
                    0.0
                } else {
                    1.0 - (2.0 * PI * x / a).cos()
                }
            }
            WindowFamily::TruncatedGaussian => {
                if x <= 0.0 || x >= a {
                    0.0
                } else {
                    let sigma = a / 4.0;
                    let g = |t: f64| (-(t - a / 2.0).powi(2) / (2.0 * sigma * sigma)).exp();
                    g(x) - g(0.0)
                }
            }
        }
    }

    pub fn envelope(&self, x: f64) -> f64 {
        Self::envelope_with_extent(self.family, self.extent, x)
    }

    /// Unnormalized complex window `envelope(x) e^{iS(x)/ħ}`.
    pub fn shape(&self, x: f64, hbar: f64) -> Complex64 {
        let r = self.envelope(x);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(r, self.phase.action(x) / hbar)
    }

    /// `C` such that `∫₀ᵃ |C f|² dx = 1`, by a high-resolution midpoint rule
    /// (exact for the rectangle).
    pub fn normalization(&self) -> f64 {
        let h = self.extent / WINDOW_QUAD_INTERVALS as f64;
        let n2: f64 = (0..WINDOW_QUAD_INTERVALS)
            .map(|i| self.envelope((i as f64 + 0.5) * h).powi(2))
            .sum::<f64>()
            * h;
        1.0 / n2.sqrt()
    }

    /// Normalized analytic window value at local coordinate `x`.
    pub fn value(&self, x: f64, hbar: f64) -> Complex64 {
        self.shape(x, hbar) * self.normalization()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Phases {
    /// `αₙ = n α`; for two lobes this is the single relative phase α.
    Linear { alpha: f64 },
    /// One phase per lobe.
    Explicit { phases: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionSpec {
    pub window: WindowSpec,
    pub shift: f64,
    pub lobes: usize,
    pub phases: Phases,
}

impl SuperpositionSpec {
    pub fn new(window: WindowSpec, shift: f64, lobes: usize, phases: Phases) -> Result<Self> {
        if lobes < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 lobes, got {lobes}")));
        }
        if !(shift > window.extent) {
            return Err(Error::LobesOverlap {
                shift,
                extent: window.extent,
            });
        }
        if let Phases::Explicit { phases } = &phases {
            if phases.len() != lobes {
                return Err(Error::InvalidParameter(format!(
                    "{} explicit phases for {lobes} lobes",
                    phases.len()
                )));
            }
        }
        Ok(Self {
            window,
            shift,
            lobes,
            phases,
        })
    }

    pub fn two_lobe(window: WindowSpec, shift: f64, alpha: f64) -> Result<Self> {
        Self::new(window, shift, 2, Phases::Linear { alpha })
    }

    pub fn linear(window: WindowSpec, shift: f64, lobes: usize, alpha: f64) -> Result<Self> {
        Self::new(window, shift, lobes, Phases::Linear { alpha })
    }

    /// Same recipe with a different linear phase step.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            phases: Phases::Linear { alpha },
            ..self.clone()
        }
    }

    pub fn phase(&self, n: usize) -> f64 {
        match &self.phases {
            Phases::Linear { alpha } => n as f64 * alpha,
            Phases::Explicit { phases } => phases[n],
        }
    }

    /// The linear phase step, if the phases are linear.
    pub fn alpha(&self) -> Option<f64> {
        match &self.phases {
            Phases::Linear { alpha } => Some(*alpha),
            Phases::Explicit { phases } if phases.len() == 2 => Some(phases[1] - phases[0]),
            Phases::Explicit { .. } => None,
        }
    }

    /// Right end of the last lobe, `(N - 1) L + a`.
    pub fn span(&self) -> f64 {
        (self.lobes - 1) as f64 * self.shift + self.window.extent
    }
}

/// A built superposition together with its individually normalized lobes
/// (without their phase factors).
#[derive(Debug, Clone)]
pub struct Superposition {
    pub wave: SampledWave,
    pub lobes: Vec<SampledWave>,
    pub phases: Vec<f64>,
    /// `maxᵢ |ψₙ(xᵢ) ψₘ(xᵢ)|` over all lobe pairs; zero by construction.
    pub max_overlap: f64,
}

struct Placement {
    start: usize,
    width: usize,
    stride: usize,
}

fn place(grid: &Grid1D, extent: f64, shift: f64, lobes: usize) -> Result<Placement> {
    let span = (lobes - 1) as f64 * shift + extent;
    if !grid.covers(0.0, span) {
        return Err(Error::SupportNotCovered {
            need_lo: 0.0,
            need_hi: span,
            have_lo: grid.origin(),
            have_hi: grid.last(),
        });
    }
    let start = grid.nearest_index(0.0);
    let width = (extent / grid.step()).round() as usize;
    let stride = (shift / grid.step()).round() as usize;
    if width == 0 {
        return Err(Error::InvalidGrid(format!(
            "step {} does not resolve extent {extent}",
            grid.step()
        )));
    }
    if stride <= width {
        return Err(Error::LobesOverlap { shift, extent });
    }
    if start + (lobes - 1) * stride + width >= grid.count() {
        return Err(Error::SupportNotCovered {
            need_lo: 0.0,
            need_hi: span,
            have_lo: grid.origin(),
            have_hi: grid.last(),
        });
    }
    Ok(Placement {
        start,
        width,
        stride,
    })
}

/// Window samples on `0..=width` grid steps, normalized on the grid.
fn window_samples(window: &WindowSpec, step: f64, width: usize, hbar: f64) -> Vec<Complex64> {
    // Snapped extent so the support ends exactly on a grid point.
    let a = width as f64 * step;
    let raw: Vec<Complex64> = (0..=width)
        .map(|j| {
            let x = j as f64 * step;
            let r = WindowSpec::envelope_with_extent(window.family, a, x);
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(r, window.phase.action(x) / hbar)
            }
        })
        .collect();
    let n2: f64 = raw.iter().map(|v| v.norm_sqr()).sum::<f64>() * step;
    let c = 1.0 / n2.sqrt();
    raw.into_iter().map(|v| v * c).collect()
}

fn build_lobes(
    spec: &SuperpositionSpec,
    grid: &Grid1D,
    hbar: f64,
    axis: AxisKind,
) -> Result<Superposition> {
    let placement = place(grid, spec.window.extent, spec.shift, spec.lobes)?;
    let samples = window_samples(&spec.window, grid.step(), placement.width, hbar);
    let zero = Complex64::new(0.0, 0.0);

    let mut lobes = Vec::with_capacity(spec.lobes);
    for n in 0..spec.lobes {
        let mut values = vec![zero; grid.count()];
        let offset = placement.start + n * placement.stride;
        values[offset..=offset + placement.width].copy_from_slice(&samples);
        lobes.push(SampledWave::new(*grid, values, hbar, axis)?);
    }

    let phases: Vec<f64> = (0..spec.lobes).map(|n| spec.phase(n)).collect();
    let scale = 1.0 / (spec.lobes as f64).sqrt();
    let mut values = vec![zero; grid.count()];
    for (lobe, &alpha) in lobes.iter().zip(&phases) {
        let factor = Complex64::from_polar(scale, alpha);
        for (v, l) in values.iter_mut().zip(lobe.values()) {
            *v += factor * l;
        }
    }

    let mut max_overlap: f64 = 0.0;
    for n in 0..lobes.len() {
        for m in n + 1..lobes.len() {
            for (a, b) in lobes[n].values().iter().zip(lobes[m].values()) {
                max_overlap = max_overlap.max((a * b).norm());
            }
        }
    }

    Ok(Superposition {
        wave: SampledWave::new(*grid, values, hbar, axis)?,
        lobes,
        phases,
        max_overlap,
    })
}

/// Samples a single normalized window on `grid`, starting at 0.
pub fn build_window(spec: &WindowSpec, grid: &Grid1D, hbar: f64) -> Result<SampledWave> {
    if !grid.covers(0.0, spec.extent) {
        return Err(Error::SupportNotCovered {
            need_lo: 0.0,
            need_hi: spec.extent,
            have_lo: grid.origin(),
            have_hi: grid.last(),
        });
    }
    let start = grid.nearest_index(0.0);
    let width = (spec.extent / grid.step()).round() as usize;
    if start + width >= grid.count() {
        return Err(Error::SupportNotCovered {
            need_lo: 0.0,
            need_hi: spec.extent,
            have_lo: grid.origin(),
            have_hi: grid.last(),
        });
    }
    let samples = window_samples(spec, grid.step(), width, hbar);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.count()];
    values[start..=start + width].copy_from_slice(&samples);
    SampledWave::new(*grid, values, hbar, AxisKind::Position)
}

/// `(1/√N) Σₙ e^{iαₙ} f(x - nL)` on a position grid.
pub fn build_superposition(
    spec: &SuperpositionSpec,
    grid: &Grid1D,
    hbar: f64,
) -> Result<Superposition> {
    build_lobes(spec, grid, hbar, AxisKind::Position)
}

/// The same construction in momentum space: `(1/√N) Σₙ e^{iαₙ} h(p - nL)`.
pub fn build_dual_superposition(
    spec: &SuperpositionSpec,
    grid: &Grid1D,
    hbar: f64,
) -> Result<Superposition> {
    build_lobes(spec, grid, hbar, AxisKind::Momentum)
}

/// Polar decomposition `ψ = R e^{iS/ħ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudePhase {
    pub amplitude: Vec<f64>,
    /// `S`, unwrapped independently on each connected region where `R > 0`;
    /// zero outside.
    pub phase: Vec<f64>,
}

pub fn amplitude_phase(w: &SampledWave) -> AmplitudePhase {
    let hbar = w.hbar();
    let amplitude: Vec<f64> = w.values().iter().map(|v| v.norm()).collect();
    let mut phase = vec![0.0; amplitude.len()];
    let mut prev: Option<f64> = None;
    for (i, v) in w.values().iter().enumerate() {
        if amplitude[i] < AMPLITUDE_FLOOR {
            prev = None;
            continue;
        }
        let raw = v.arg();
        let unwrapped = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p.rem_euclid(2.0 * PI);
                d = (d + PI).rem_euclid(2.0 * PI) - PI;
                p + d
            }
        };
        phase[i] = unwrapped * hbar;
        prev = Some(unwrapped);
    }
    AmplitudePhase { amplitude, phase }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner_product;

    fn grid() -> Grid1D {
        Grid1D::covering(0.0, 5.0, 1.0 / 512.0, 0.5).unwrap()
    }

    fn bump() -> WindowSpec {
        WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap()
    }

    #[test]
    fn rectangle_is_flat_and_normalized() {
        let spec = WindowSpec::new(WindowFamily::Rectangle, 1.0).unwrap();
        let w = build_window(&spec, &grid(), 1.0).unwrap();
        assert!(w.is_normalized());
        let g = w.grid();
        for (x, v) in g.points().zip(w.values()) {
            let expected = if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
            assert!((v.re - expected).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn smooth_bump_midpoint_value() {
        // Normalization constant from an independent Simpson rule on the envelope.
        let n = 20_000;
        let h = 1.0 / n as f64;
        let env = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { (-1.0 / (x * (1.0 - x))).exp() };
        let simpson: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * env(i as f64 * h).powi(2)
            })
            .sum::<f64>()
            * h
            / 3.0;
        let c = 1.0 / simpson.sqrt();
        let w = build_window(&bump(), &grid(), 1.0).unwrap();
        let mid = w.grid().index_of(0.5).unwrap();
        assert!((w.values()[mid].re - c * (-4.0f64).exp()).abs() < 1e-10);
        assert!((bump().value(0.5, 1.0).re - c * (-4.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn truncated_gaussian_is_c0() {
        let spec = WindowSpec::new(WindowFamily::TruncatedGaussian, 1.0).unwrap();
        assert_eq!(spec.smoothness(), SmoothnessClass::C0);
        assert_eq!(spec.envelope(0.0), 0.0);
        // One-sided slope at the left end is nonzero: a kink.
        let h = 1e-6;
        assert!(spec.envelope(h) / h > 0.1);
    }

    #[test]
    fn window_is_zero_outside_support() {
        for family in WindowFamily::ALL {
            let spec = WindowSpec::new(family, 1.0).unwrap();
            let w = build_window(&spec, &grid(), 1.0).unwrap();
            assert!(w.is_normalized(), "{family:?}");
            for (x, v) in w.grid().points().zip(w.values()) {
                if !(0.0..=1.0).contains(&x) {
                    assert_eq!(v.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn uncovered_support_is_an_error() {
        let small = Grid1D::new(0.0, 0.01, 50).unwrap();
        assert!(matches!(
            build_window(&bump(), &small, 1.0),
            Err(Error::SupportNotCovered { .. })
        ));
        let spec = SuperpositionSpec::two_lobe(bump(), 2.0, 0.0).unwrap();
        let g = Grid1D::new(0.0, 0.01, 200).unwrap();
        assert!(matches!(
            build_superposition(&spec, &g, 1.0),
            Err(Error::SupportNotCovered { .. })
        ));
    }

    #[test]
    fn overlapping_lobes_are_rejected() {
        assert!(matches!(
            SuperpositionSpec::two_lobe(bump(), 1.0, 0.0),
            Err(Error::LobesOverlap { .. })
        ));
        assert!(SuperpositionSpec::two_lobe(bump(), 0.5, 0.0).is_err());
    }

    #[test]
    fn two_lobe_rectangle_density() {
        let spec = WindowSpec::new(WindowFamily::Rectangle, 1.0).unwrap();
        let sup = SuperpositionSpec::two_lobe(spec, 2.0, 0.0).unwrap();
        let s = build_superposition(&sup, &grid(), 1.0).unwrap();
        for (x, v) in s.wave.grid().points().zip(s.wave.values()) {
            let inside = (0.0..1.0).contains(&x) || (2.0..3.0).contains(&x);
            let expected = if inside { 0.5 } else { 0.0 };
            assert!((v.norm_sqr() - expected).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn position_density_ignores_alpha() {
        let base = SuperpositionSpec::two_lobe(bump(), 2.0, 0.0).unwrap();
        let d0 = build_superposition(&base, &grid(), 1.0).unwrap().wave.density();
        for alpha in [0.3, PI / 2.0, PI, -2.0] {
            let d = build_superposition(&base.with_alpha(alpha), &grid(), 1.0)
                .unwrap()
                .wave
                .density();
            for (a, b) in d0.density().iter().zip(d.density()) {
                assert!((a - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn three_lobes_are_pairwise_orthogonal() {
        let spec = SuperpositionSpec::linear(bump(), 2.0, 3, 0.7).unwrap();
        let s = build_superposition(&spec, &grid(), 1.0).unwrap();
        assert_eq!(s.max_overlap, 0.0);
        assert!(s.wave.is_normalized());
        for n in 0..3 {
            for m in 0..3 {
                let ip = inner_product(&s.lobes[n], &s.lobes[m]).unwrap();
                if n == m {
                    assert!((ip.re - 1.0).abs() < 1e-10);
                } else {
                    assert_eq!(ip.norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn dual_superposition_lives_in_momentum() {
        let spec = WindowSpec::new(WindowFamily::Rectangle, 1.0).unwrap();
        let sup = SuperpositionSpec::two_lobe(spec, 2.0, 1.1).unwrap();
        let s = build_dual_superposition(&sup, &grid(), 1.0).unwrap();
        assert_eq!(s.wave.axis(), AxisKind::Momentum);
        for (p, v) in s.wave.grid().points().zip(s.wave.values()) {
            let inside = (0.0..1.0).contains(&p) || (2.0..3.0).contains(&p);
            assert!((v.norm_sqr() - if inside { 0.5 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn real_positive_wave_has_zero_phase() {
        let w = build_window(&bump(), &grid(), 1.0).unwrap();
        let ap = amplitude_phase(&w);
        assert!(ap.phase.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn linear_internal_phase_unwraps_to_a_line() {
        let k = 37.0;
        let spec = bump().with_phase(InternalPhase::Linear { momentum: k });
        let hbar = 0.7;
        let w = build_window(&spec, &grid(), hbar).unwrap();
        let ap = amplitude_phase(&w);
        let g = w.grid();
        let mid = g.index_of(0.5).unwrap();
        let s0 = ap.phase[mid] - k * g.point(mid);
        for i in g.index_of(0.0).unwrap()..g.index_of(1.0).unwrap() {
            if ap.amplitude[i] >= AMPLITUDE_FLOOR {
                assert!((ap.phase[i] - k * g.point(i) - s0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lobe_phase_difference_is_hbar_alpha() {
        let hbar = 1.3;
        let alpha = 2.2;
        let spec = SuperpositionSpec::two_lobe(bump(), 2.0, alpha).unwrap();
        let s = build_superposition(&spec, &grid(), hbar).unwrap();
        let ap = amplitude_phase(&s.wave);
        let g = s.wave.grid();
        let s1 = ap.phase[g.index_of(0.5).unwrap()];
        let s2 = ap.phase[g.index_of(2.5).unwrap()];
        let diff = ((s2 - s1) / hbar - alpha).rem_euclid(2.0 * PI);
        assert!(diff < 1e-12 || 2.0 * PI - diff < 1e-12);
    }

    #[test]
    fn smooth_bump_derivatives_vanish_at_the_ends() {
        // Central differences of increasing order evaluated next to each end.
        let h = 1e-3;
        let env = |x: f64| bump().envelope(x);
        let binom = |n: u64, k: u64| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        for k in 1..=5u64 {
            for x in [0.01, 0.99] {
                let d: f64 = (0..=k)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binom(k, j) * env(x + (k as f64 / 2.0 - j as f64) * h)
                    })
                    .sum::<f64>()
                    / h.powi(k as i32);
                assert!(d.abs() < 1e-10, "order {k} at {x}: {d}");
            }
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in WindowFamily::ALL {
            assert_eq!(WindowFamily::from_name(f.name()), Some(f));
        }
        assert_eq!(WindowFamily::from_name("smooth-bump"), Some(WindowFamily::SmoothBump));
        assert_eq!(WindowFamily::from_name("sinc"), None);
    }
}
