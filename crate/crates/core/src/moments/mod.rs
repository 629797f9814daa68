//! Moments by quadrature and from characteristic-function derivatives,
//! α-sensitivity reports and α-dependent expectation values.

pub mod criteria;
pub mod lognormal;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{quadrature, Distribution1D, Grid1D};
use crate::scenario::Numerics;
use crate::spectral::{to_momentum_with, CharFunction, WindowAutocorrelation};
use crate::wavepacket::{build_window, SuperpositionSpec, WindowSpec};

pub use criteria::{
    carleman_sum, carleman_sum_from_logs, krein_integral, CarlemanReport, CarlemanVerdict, KreinCase,
    KreinReport, KreinVerdict,
};
pub use lognormal::{lognormal_log_even_moments, lognormal_moments, LogNormalFamily};

/// Highest order accepted by [`moments_by_quadrature`].
pub const QUADRATURE_MAX_ORDER: usize = 12;
/// Highest order accepted by [`moments_by_charfun`].
pub const CHARFUN_MAX_ORDER: usize = 4;
/// Relative change between full-grid and inner-80% estimates flagged as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: usize,
    /// `⟨pⁿ⟩`.
    pub value: f64,
    /// `⟨|p|ⁿ⟩`, the scale used for relative comparisons.
    pub absolute: f64,
    /// `⟨pⁿ⟩` restricted to the central 80% of the grid.
    pub inner_value: f64,
    pub divergent: bool,
}

/// `⟨pⁿ⟩`, `n = 0..=n_max`, by trapezoid quadrature, each with a tail flag.
pub fn moments_by_quadrature(d: &Distribution1D, n_max: usize) -> Result<Vec<MomentEstimate>> {
    if n_max > QUADRATURE_MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "n_max {n_max} exceeds {QUADRATURE_MAX_ORDER}"
        )));
    }
    let g = d.grid();
    let center = g.origin() + 0.5 * g.extent();
    let inner = d.restricted(center, 0.4 * g.extent())?;
    (0..=n_max)
        .map(|n| {
            let value = quadrature(d, &g.points().map(|p| p.powi(n as i32)).collect::<Vec<_>>())?;
            let absolute =
                quadrature(d, &g.points().map(|p| p.abs().powi(n as i32)).collect::<Vec<_>>())?;
            let ig = inner.grid();
            let inner_value =
                quadrature(&inner, &ig.points().map(|p| p.powi(n as i32)).collect::<Vec<_>>())?;
            let scale = absolute.max(f64::MIN_POSITIVE);
            Ok(MomentEstimate {
                order: n,
                value,
                absolute,
                inner_value,
                divergent: (value - inner_value).abs() > DIVERGENCE_THRESHOLD * scale,
            })
        })
        .collect()
}

/// Moments of one density per α and how much they move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub orders: Vec<usize>,
    /// Moments under the first α.
    pub values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    /// `table[a][n]` = `⟨pⁿ⟩` under `alpha_values[a]`.
    pub table: Vec<Vec<f64>>,
    /// `max_{a,b} |⟨pⁿ⟩_a − ⟨pⁿ⟩_b| / ⟨|p|ⁿ⟩` per order.
    pub sensitivity: Vec<f64>,
    /// `max_{a,b} ∫|P_a − P_b|`.
    pub distribution_distance: f64,
    /// Order flagged divergent under any α.
    pub tail_flags: Vec<bool>,
}

impl MomentReport {
    pub fn build(alphas: &[f64], densities: &[Distribution1D], n_max: usize) -> Result<Self> {
        if alphas.len() != densities.len() || alphas.is_empty() {
            return Err(Error::InvalidParameter(
                "one density per alpha is required".into(),
            ));
        }
        let estimates = densities
            .par_iter()
            .map(|d| moments_by_quadrature(d, n_max))
            .collect::<Result<Vec<_>>>()?;
        let table: Vec<Vec<f64>> = estimates
            .iter()
            .map(|e| e.iter().map(|m| m.value).collect())
            .collect();
        let scale: Vec<f64> = (0..=n_max)
            .map(|n| {
                estimates
                    .iter()
                    .map(|e| e[n].absolute)
                    .fold(0.0, f64::max)
                    .max(f64::MIN_POSITIVE)
            })
            .collect();
        let mut sensitivity = vec![0.0f64; n_max + 1];
        let mut distance: f64 = 0.0;
        for a in 0..densities.len() {
            for b in a + 1..densities.len() {
                for n in 0..=n_max {
                    let rel = (table[a][n] - table[b][n]).abs() / scale[n];
                    sensitivity[n] = sensitivity[n].max(rel);
                }
                distance = distance.max(densities[a].l1_distance(&densities[b])?);
            }
        }
        let tail_flags = (0..=n_max)
            .map(|n| estimates.iter().any(|e| e[n].divergent))
            .collect();
        Ok(Self {
            orders: (0..=n_max).collect(),
            values: table[0].clone(),
            alpha_values: alphas.to_vec(),
            table,
            sensitivity,
            distribution_distance: distance,
            tail_flags,
        })
    }

    pub fn max_sensitivity(&self) -> f64 {
        self.sensitivity.iter().cloned().fold(0.0, f64::max)
    }

    /// Distribution moves by at least `distance_threshold` while no moment
    /// moves by more than `moment_tolerance`.
    pub fn is_indeterminacy_witness(&self, moment_tolerance: f64, distance_threshold: f64) -> bool {
        self.max_sensitivity() <= moment_tolerance && self.distribution_distance >= distance_threshold
    }
}

/// Central finite-difference weights for the `order`-th derivative at 0 on the
/// integer nodes `-half..=half` (Fornberg's recursion).
pub fn central_difference_weights(order: usize, half: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
    let n = nodes.len();
    let mut c = vec![vec![0.0f64; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharMoment {
    pub order: usize,
    pub value: f64,
    /// `|Im(i⁻ⁿ Mⁿ(0))|`, zero for a real density.
    pub imag_residue: f64,
}

/// `⟨pⁿ⟩ = i⁻ⁿ dⁿM/dθⁿ(0)`: a `(2n+1)`-point central stencil at steps `h` and
/// `2h` (`h` = grid step), combined by Richardson extrapolation.
pub fn moments_by_charfun(m: &CharFunction, n_max: usize) -> Result<Vec<CharMoment>> {
    if n_max > CHARFUN_MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "n_max {n_max} exceeds {CHARFUN_MAX_ORDER}"
        )));
    }
    let g = m.grid;
    let h = g.step();
    let available = (g.origin().abs()).min(g.last().abs());
    let Some(zero) = g.index_of(0.0) else {
        return Err(Error::ThetaGridTooSmall {
            needed: 0.0,
            available,
        });
    };
    let reach = 2 * n_max.max(1);
    if zero < reach || zero + reach >= g.count() {
        return Err(Error::ThetaGridTooSmall {
            needed: reach as f64 * h,
            available,
        });
    }
    let derivative = |order: usize, stride: usize| -> Complex64 {
        let half = order;
        let w = central_difference_weights(order, half);
        let hs = h * stride as f64;
        let s: Complex64 = w
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let idx = zero as i64 + (j as i64 - half as i64) * stride as i64;
                m.values[idx as usize] * c
            })
            .sum();
        s / hs.powi(order as i32)
    };
    Ok((0..=n_max)
        .map(|n| {
            let d = if n == 0 {
                m.values[zero]
            } else {
                let accuracy = if n % 2 == 1 { n + 1 } else { n + 2 };
                let r = 2f64.powi(accuracy as i32);
                (derivative(n, 1) * r - derivative(n, 2)) / (r - 1.0)
            };
            let v = d / Complex64::i().powu(n as u32);
            CharMoment {
                order: n,
                value: v.re,
                imag_residue: v.im.abs(),
            }
        })
        .collect())
}

/// `∫ pⁿ |F(p)|² cos(pL/ħ − α) dp` and the sine variant, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosineIdentity {
    pub cosine: Vec<f64>,
    pub sine: Vec<f64>,
    /// The shift does not separate the lobes, so the integrals need not vanish.
    pub overlapping: bool,
}

impl CosineIdentity {
    pub fn max_abs(&self) -> f64 {
        self.cosine
            .iter()
            .chain(&self.sine)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluated over the whole FFT band of the window's transform.
pub fn cosine_identity_check(
    window: &WindowSpec,
    shift: f64,
    alpha: f64,
    n_max: usize,
    hbar: f64,
    numerics: &Numerics,
) -> Result<CosineIdentity> {
    let x_grid = numerics.x_grid(0.0, window.extent)?;
    let f = to_momentum_with(
        &build_window(window, &x_grid, hbar)?,
        &numerics.full_band_options(shift, hbar),
    )?;
    let (cosine, sine) = cosine_integrals(&f.density(), shift, alpha, n_max, hbar)?;
    Ok(CosineIdentity {
        cosine,
        sine,
        overlapping: shift <= window.extent,
    })
}

/// `∫ pⁿ P(p) cos(pL/ħ − α) dp` and `∫ pⁿ P(p) sin(pL/ħ − α) dp` for any density.
pub fn cosine_integrals(
    d: &Distribution1D,
    shift: f64,
    alpha: f64,
    n_max: usize,
    hbar: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = *d.grid();
    let integrals = |trig: fn(f64) -> f64| -> Result<Vec<f64>> {
        (0..=n_max)
            .map(|n| {
                let w: Vec<f64> = g
                    .points()
                    .map(|p| p.powi(n as i32) * trig(p * shift / hbar - alpha))
                    .collect();
                quadrature(d, &w)
            })
            .collect()
    };
    Ok((integrals(f64::cos)?, integrals(f64::sin)?))
}

/// Test function `g(p)` with its transform `G(θ) = ∫ g(p) e^{−iθp} dp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GWeight {
    /// `g = δ(p)`, `G ≡ 1`.
    DeltaAtZero,
    /// `g = e^{−βp²}`, `G = √(π/β) e^{−θ²/(4β)}`.
    Gaussian { width_beta: f64 },
}

impl GWeight {
    pub fn gaussian(width_beta: f64) -> Result<Self> {
        if !(width_beta > 0.0) || !width_beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gaussian width must be positive, got {width_beta}"
            )));
        }
        Ok(GWeight::Gaussian { width_beta })
    }

    /// `g(p)`; `None` for the delta.
    pub fn weight(&self, p: f64) -> Option<f64> {
        match *self {
            GWeight::DeltaAtZero => None,
            GWeight::Gaussian { width_beta } => Some((-width_beta * p * p).exp()),
        }
    }

    pub fn transform(&self, theta: f64) -> f64 {
        match *self {
            GWeight::DeltaAtZero => 1.0,
            GWeight::Gaussian { width_beta } => {
                (PI / width_beta).sqrt() * (-theta * theta / (4.0 * width_beta)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaExpectation {
    pub alpha: f64,
    /// `⟨g(p)⟩` under `P(p; α)`.
    pub value: f64,
    /// Interference part `∫ g |F|² cos(pL/ħ − α) dp`.
    pub interference: f64,
}

/// `⟨g(p)⟩` for each α of a two-lobe superposition.
pub fn alpha_dependent_expectation(
    spec: &SuperpositionSpec,
    weight: &GWeight,
    alphas: &[f64],
    hbar: f64,
    numerics: &Numerics,
) -> Result<Vec<AlphaExpectation>> {
    if spec.lobes != 2 {
        return Err(Error::InvalidParameter(format!(
            "alpha-dependent expectations need two lobes, got {}",
            spec.lobes
        )));
    }
    let x_grid = numerics.x_grid(0.0, spec.span())?;
    let f = to_momentum_with(
        &build_window(&spec.window, &x_grid, hbar)?,
        &numerics.momentum_options(spec.shift, hbar),
    )?;
    let fd = f.density();
    let g = *fd.grid();
    match weight {
        GWeight::DeltaAtZero => {
            let i0 = g.index_of(0.0).ok_or_else(|| {
                Error::InvalidGrid("p = 0 is not on the momentum grid".into())
            })?;
            let f0 = fd.density()[i0];
            Ok(alphas
                .iter()
                .map(|&alpha| {
                    let interference = f0 * (-alpha).cos();
                    AlphaExpectation {
                        alpha,
                        value: f0 + interference,
                        interference,
                    }
                })
                .collect())
        }
        GWeight::Gaussian { .. } => alphas
            .iter()
            .map(|&alpha| {
                let gw: Vec<f64> = g.points().map(|p| weight.weight(p).unwrap_or(0.0)).collect();
                let cw: Vec<f64> = g
                    .points()
                    .zip(&gw)
                    .map(|(p, w)| w * (p * spec.shift / hbar - alpha).cos())
                    .collect();
                let base = quadrature(&fd, &gw)?;
                let interference = quadrature(&fd, &cw)?;
                Ok(AlphaExpectation {
                    alpha,
                    value: base + interference,
                    interference,
                })
            })
            .collect(),
    }
}

/// `⟨g(p)⟩ = (1/2π) ∫ G(θ) M(θ) dθ`, with `M` assembled from the window
/// autocorrelation; the integral runs over the compact support of `M`.
pub fn expectation_via_charfun(
    spec: &SuperpositionSpec,
    weight: &GWeight,
    hbar: f64,
    theta_step: f64,
) -> Result<f64> {
    let radius = spec.span() / hbar;
    let theta = Grid1D::symmetric(radius + theta_step, theta_step)?;
    let m = crate::spectral::char_function_two_lobe(spec, &theta, hbar);
    let integrand: Vec<f64> = theta
        .points()
        .zip(&m.values)
        .map(|(t, v)| weight.transform(t) * v.re)
        .collect();
    Ok(crate::grid::trapezoid(&integrand, theta.step()) / (2.0 * PI))
}

/// `M_F` of a window, exposed for derivative checks of the shifted terms.
pub fn window_char_value(window: &WindowSpec, theta: f64, hbar: f64) -> Complex64 {
    WindowAutocorrelation::new(window, hbar).eval(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{char_function_two_lobe, momentum_distribution};
    use crate::wavepacket::WindowFamily;

    fn gaussian_char(step: f64) -> CharFunction {
        let grid = Grid1D::symmetric(1.0, step).unwrap();
        CharFunction {
            grid,
            values: grid
                .points()
                .map(|t| Complex64::new((-t * t / 2.0).exp(), 0.0))
                .collect(),
            support_radius: None,
        }
    }

    #[test]
    fn fornberg_weights_match_textbook_stencils() {
        let w = central_difference_weights(1, 1);
        assert_eq!(w, vec![-0.5, 0.0, 0.5]);
        let w = central_difference_weights(2, 2);
        let expected = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let w = central_difference_weights(4, 4);
        assert!(w.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn gaussian_char_moments() {
        let m = moments_by_charfun(&gaussian_char(0.01), 4).unwrap();
        assert!((m[0].value - 1.0).abs() < 1e-12);
        assert!(m[1].value.abs() < 1e-10);
        assert!((m[2].value - 1.0).abs() < 1e-4);
        assert!((m[4].value - 3.0).abs() < 1e-4);
        assert!(m.iter().all(|c| c.imag_residue < 1e-6));
    }

    #[test]
    fn stencil_outside_grid_is_an_error() {
        let grid = Grid1D::symmetric(0.05, 0.01).unwrap();
        let m = CharFunction {
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.count()],
            support_radius: None,
        };
        let err = moments_by_charfun(&m, 4).unwrap_err();
        assert!(matches!(err, Error::ThetaGridTooSmall { .. }));
        assert!(err.to_string().contains("theta grid too small"));
    }

    #[test]
    fn gaussian_quadrature_moments() {
        let g = Grid1D::symmetric(14.0, 0.01).unwrap();
        let d = Distribution1D::from_fn(g, |x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt()).unwrap();
        let m = moments_by_quadrature(&d, 6).unwrap();
        for (n, exact) in [(0, 1.0), (2, 1.0), (4, 3.0), (6, 15.0)] {
            assert!((m[n].value - exact).abs() < 1e-8 * exact, "n = {n}");
            assert!(!m[n].divergent);
        }
        assert!(moments_by_quadrature(&d, 13).is_err());
    }

    #[test]
    fn heavy_tail_is_flagged() {
        // Cauchy density: second moment diverges.
        let g = Grid1D::symmetric(200.0, 0.01).unwrap();
        let d = Distribution1D::from_fn(g, |x| 1.0 / (PI * (1.0 + x * x))).unwrap();
        let m = moments_by_quadrature(&d, 2).unwrap();
        assert!(!m[0].divergent);
        assert!(m[2].divergent);
    }

    #[test]
    fn shifted_terms_have_zero_derivatives_at_origin() {
        let bump = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        let spec = SuperpositionSpec::two_lobe(bump, 2.0, 0.8).unwrap();
        let theta = Grid1D::symmetric(3.2, 1.0 / 128.0).unwrap();
        let full = char_function_two_lobe(&spec, &theta, 1.0);
        let single = crate::spectral::char_function_window(&bump, &theta, 1.0);
        let shifted = full.minus(&single).unwrap();
        for m in moments_by_charfun(&shifted, 4).unwrap() {
            assert_eq!(m.value, 0.0);
            assert_eq!(m.imag_residue, 0.0);
        }
    }

    #[test]
    fn gaussian_weight_limits() {
        let bump = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        let spec = SuperpositionSpec::two_lobe(bump, 2.0, 0.0).unwrap();
        let w = GWeight::gaussian(1e-7).unwrap();
        let e = alpha_dependent_expectation(&spec, &w, &[0.0, 1.0, PI], 1.0, &Numerics::default()).unwrap();
        for v in e {
            assert!((v.value - 1.0).abs() < 1e-3, "{v:?}");
        }
        assert!(GWeight::gaussian(0.0).is_err());
    }

    #[test]
    fn delta_weight_interference() {
        let bump = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        let spec = SuperpositionSpec::two_lobe(bump, 2.0, 0.0).unwrap();
        let num = Numerics::default();
        let e = alpha_dependent_expectation(&spec, &GWeight::DeltaAtZero, &[0.0, PI / 2.0], 1.0, &num).unwrap();
        let md = momentum_distribution(&spec, &num.x_grid(0.0, 3.0).unwrap(), 1.0, &num.momentum_options(2.0, 1.0)).unwrap();
        let i0 = md.closed_form.grid().index_of(0.0).unwrap();
        let f0 = md.window_spectrum.values()[i0].norm_sqr();
        assert!((e[0].interference - f0).abs() < 1e-14);
        assert!(e[1].interference.abs() < 1e-14);
        assert!((e[0].value - md.closed_form.density()[i0]).abs() < 1e-14);
    }

    #[test]
    fn expectation_routes_agree() {
        let bump = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        let num = Numerics::default();
        for alpha in [0.0, PI / 2.0, PI] {
            let spec = SuperpositionSpec::two_lobe(bump, 2.0, alpha).unwrap();
            let w = GWeight::gaussian(1.0).unwrap();
            let direct = alpha_dependent_expectation(&spec, &w, &[alpha], 1.0, &num).unwrap()[0].value;
            let dual = expectation_via_charfun(&spec, &w, 1.0, 1.0 / 256.0).unwrap();
            assert!((direct - dual).abs() < 1e-8, "{direct} vs {dual}");
        }
    }

    #[test]
    fn cosine_identity_vanishes_only_without_overlap() {
        let bump = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        let num = Numerics::default();
        let c = cosine_identity_check(&bump, 2.0, 0.0, 2, 1.0, &num).unwrap();
        assert!(!c.overlapping);
        assert!(c.max_abs() < 1e-8);
        let overlapping = cosine_identity_check(&bump, 0.5, 0.0, 2, 1.0, &num).unwrap();
        assert!(overlapping.overlapping);
        assert!(overlapping.cosine[0].abs() > 1e-3);
    }

    #[test]
    fn cosine_integrals_are_linear_in_the_density() {
        let g = Grid1D::symmetric(10.0, 0.01).unwrap();
        let d = Distribution1D::from_fn(g, |p| (-(p - 0.3).powi(2)).exp()).unwrap();
        let scaled = Distribution1D::from_fn(g, |p| 3.5 * (-(p - 0.3).powi(2)).exp()).unwrap();
        let (c1, s1) = cosine_integrals(&d, 0.7, 0.2, 4, 1.0).unwrap();
        let (c2, s2) = cosine_integrals(&scaled, 0.7, 0.2, 4, 1.0).unwrap();
        for (a, b) in c1.iter().chain(&s1).zip(c2.iter().chain(&s2)) {
            assert!((3.5 * a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn report_flags_rectangle_second_moment() {
        let rect = WindowSpec::new(WindowFamily::Rectangle, 1.0).unwrap();
        let num = Numerics::default();
        let x_grid = num.x_grid(0.0, 3.0).unwrap();
        let alphas = [0.0, PI];
        let densities: Vec<_> = alphas
            .iter()
            .map(|&a| {
                let spec = SuperpositionSpec::two_lobe(rect, 2.0, a).unwrap();
                momentum_distribution(&spec, &x_grid, 1.0, &num.momentum_options(2.0, 1.0))
                    .unwrap()
                    .closed_form
            })
            .collect();
        let report = MomentReport::build(&alphas, &densities, 2).unwrap();
        assert!(report.tail_flags[2]);
        assert!(!report.tail_flags[0]);
        assert!(report.distribution_distance > 0.5);
    }
}
