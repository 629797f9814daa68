//! Expansion of superpositions in the eigenbasis of a Hermitian operator.
//!
//! The probabilities `P(aₙ) = |cₙ|²` depend on α through the cross products
//! `cₙ⁽¹⁾* cₙ⁽²⁾`, while `⟨Aᵏ⟩` does not when `A` is polynomial in x and p.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{inner_product, AxisKind, Grid1D, SampledWave, Warning};
use crate::spectral::spectral_derivative;
use crate::wavepacket::{build_superposition, Superposition, SuperpositionSpec};

/// Largest allowed `|u_{Nb−1}|` on the two outermost grid points.
pub const EDGE_DECAY: f64 = 1e-8;
/// Required captured norm `Σ|cₙ|² / ‖ψ‖²`.
pub const CAPTURE_TOLERANCE: f64 = 1e-6;
pub const OPERATOR_MAX_POWER: usize = 4;
/// Extra room beyond the outermost turning point, in units of σ.
const TURNING_POINT_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    HarmonicOscillator,
    UserSupplied,
}

/// `H = p²/2 + ω²(x − x₀)²/2` with unit mass and `ω = ħ/σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillator {
    pub center: f64,
    pub length_scale: f64,
    pub hbar: f64,
}

impl Oscillator {
    pub fn omega(&self) -> f64 {
        self.hbar / (self.length_scale * self.length_scale)
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.hbar * self.omega() * (n as f64 + 0.5)
    }

    /// `Hψ` with the kinetic term from spectral differentiation.
    pub fn apply(&self, w: &SampledWave) -> Result<SampledWave> {
        if w.axis() != AxisKind::Position {
            return Err(Error::WrongAxis {
                expected: "position",
                found: w.axis().name(),
            });
        }
        let d2 = spectral_derivative(w, 2);
        let kinetic = -0.5 * w.hbar() * w.hbar();
        let k = 0.5 * self.omega() * self.omega();
        let values = w
            .grid()
            .points()
            .zip(w.values().iter().zip(&d2))
            .map(|(x, (v, d))| d * kinetic + v * (k * (x - self.center).powi(2)))
            .collect();
        SampledWave::new(*w.grid(), values, w.hbar(), AxisKind::Position)
    }

    /// `Hᵏψ`.
    pub fn apply_power(&self, w: &SampledWave, k: usize) -> Result<SampledWave> {
        let mut out = w.clone();
        for _ in 0..k {
            out = self.apply(&out)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub kind: BasisKind,
    pub eigenvalues: Vec<f64>,
    pub functions: Vec<SampledWave>,
    pub oscillator: Option<Oscillator>,
}

impl EigenBasis {
    /// Validates orthonormality to `10⁻⁶` on the shared grid.
    pub fn user_supplied(eigenvalues: Vec<f64>, functions: Vec<SampledWave>) -> Result<Self> {
        if eigenvalues.len() != functions.len() || functions.is_empty() {
            return Err(Error::InvalidParameter(
                "need one eigenvalue per eigenfunction".into(),
            ));
        }
        let basis = Self {
            kind: BasisKind::UserSupplied,
            eigenvalues,
            functions,
            oscillator: None,
        };
        let defect = basis.orthonormality_defect()?;
        if defect > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "eigenfunctions not orthonormal: defect {defect:e}"
            )));
        }
        Ok(basis)
    }

    pub fn size(&self) -> usize {
        self.functions.len()
    }

    pub fn grid(&self) -> &Grid1D {
        self.functions[0].grid()
    }

    pub fn hbar(&self) -> f64 {
        self.functions[0].hbar()
    }

    /// `max |⟨u_k, u_n⟩ − δ_kn|`.
    pub fn orthonormality_defect(&self) -> Result<f64> {
        let n = self.size();
        let rows: Result<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut worst: f64 = 0.0;
                for j in k..n {
                    let ip = inner_product(&self.functions[k], &self.functions[j])?;
                    let target = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((ip - target).norm());
                }
                Ok(worst)
            })
            .collect();
        Ok(rows?.into_iter().fold(0.0, f64::max))
    }
}

/// Grid with step `step` wide enough for an `nb`-function oscillator basis.
pub fn oscillator_grid(center: f64, length_scale: f64, nb: usize, step: f64) -> Result<Grid1D> {
    let reach = length_scale * ((2.0 * nb as f64 + 1.0).sqrt() + TURNING_POINT_MARGIN);
    Grid1D::covering(center - reach, center + reach, step, 0.0)
}

/// Hermite functions `u₀..u_{nb−1}` of width `length_scale` centered at
/// `center`, from the three-term recurrence, renormalized on `grid`.
pub fn oscillator_basis(
    grid: &Grid1D,
    nb: usize,
    hbar: f64,
    center: f64,
    length_scale: f64,
) -> Result<EigenBasis> {
    if nb < 1 || !(length_scale > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidParameter(
            "basis needs nb >= 1, positive length scale and hbar".into(),
        ));
    }
    let xi: Vec<f64> = grid.points().map(|x| (x - center) / length_scale).collect();
    let g0 = std::f64::consts::PI.powf(-0.25) / length_scale.sqrt();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nb);
    rows.push(xi.iter().map(|s| g0 * (-s * s / 2.0).exp()).collect());
    if nb > 1 {
        rows.push(xi.iter().zip(&rows[0]).map(|(s, u)| 2f64.sqrt() * s * u).collect());
    }
    for n in 1..nb.saturating_sub(1) {
        let a = (2.0 / (n + 1) as f64).sqrt();
        let b = (n as f64 / (n + 1) as f64).sqrt();
        let next = xi
            .iter()
            .zip(rows[n].iter().zip(&rows[n - 1]))
            .map(|(s, (u, v))| a * s * u - b * v)
            .collect();
        rows.push(next);
    }
    let last = &rows[nb - 1];
    let edge_amplitude = [last[0], last[1], last[last.len() - 2], last[last.len() - 1]]
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if edge_amplitude > EDGE_DECAY {
        return Err(Error::GridTooNarrowForBasis {
            basis_size: nb,
            edge_amplitude,
        });
    }
    let osc = Oscillator {
        center,
        length_scale,
        hbar,
    };
    let functions = rows
        .into_iter()
        .map(|r| {
            let values = r.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
            SampledWave::new(*grid, values, hbar, AxisKind::Position)?.normalized()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenBasis {
        kind: BasisKind::HarmonicOscillator,
        eigenvalues: (0..nb).map(|n| osc.eigenvalue(n)).collect(),
        functions,
        oscillator: Some(osc),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisExpansion {
    /// `cₙ = ⟨uₙ, ψ⟩`, as `[re, im]`.
    #[serde(serialize_with = "serialize_complex")]
    pub coefficients: Vec<Complex64>,
    /// Per-lobe `cₙ⁽ᵏ⁾` of a superposition, lobe-major.
    #[serde(serialize_with = "serialize_complex_rows")]
    pub lobe_coefficients: Vec<Vec<Complex64>>,
    /// Phases `αₖ` the lobe coefficients combine with.
    pub phases: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `Σ|cₙ|²`.
    pub captured_norm: f64,
    /// `‖ψ‖²` on the grid.
    pub wave_norm: f64,
    pub warnings: Vec<Warning>,
}

fn serialize_complex<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| [c.re, c.im]))
}

fn serialize_complex_rows<S: serde::Serializer>(
    v: &[Vec<Complex64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()))
}

fn coefficients(w: &SampledWave, basis: &EigenBasis) -> Result<Vec<Complex64>> {
    basis
        .functions
        .par_iter()
        .map(|u| inner_product(u, w))
        .collect()
}

impl BasisExpansion {
    fn from_coefficients(coefficients: Vec<Complex64>, wave_norm: f64) -> Self {
        let probabilities: Vec<f64> = coefficients.iter().map(|c| c.norm_sqr()).collect();
        let captured_norm = probabilities.iter().sum();
        let required = wave_norm * (1.0 - CAPTURE_TOLERANCE);
        let warnings = if captured_norm < required {
            vec![Warning::TruncationInsufficient {
                captured: captured_norm,
                required,
            }]
        } else {
            Vec::new()
        };
        Self {
            coefficients,
            lobe_coefficients: Vec::new(),
            phases: Vec::new(),
            probabilities,
            captured_norm,
            wave_norm,
            warnings,
        }
    }

    pub fn is_truncated(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// `max_n |cₙ − Σₖ e^{iαₖ} cₙ⁽ᵏ⁾ / √N|`; zero without lobe coefficients.
    pub fn reconstruction_defect(&self) -> f64 {
        if self.lobe_coefficients.is_empty() {
            return 0.0;
        }
        let scale = 1.0 / (self.lobe_coefficients.len() as f64).sqrt();
        (0..self.coefficients.len())
            .map(|n| {
                let sum: Complex64 = self
                    .lobe_coefficients
                    .iter()
                    .zip(&self.phases)
                    .map(|(c, a)| c[n] * Complex64::from_polar(1.0, *a))
                    .sum();
                (self.coefficients[n] - sum * scale).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_n |cₙ⁽¹⁾* cₙ⁽²⁾|` for the first two lobes.
    pub fn max_cross_product(&self) -> f64 {
        match self.lobe_coefficients.as_slice() {
            [a, b, ..] => a.iter().zip(b).map(|(x, y)| (x.conj() * y).norm()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }
}

pub fn expand(w: &SampledWave, basis: &EigenBasis) -> Result<BasisExpansion> {
    if w.grid() != basis.grid() || w.hbar() != basis.hbar() {
        return Err(Error::GridMismatch);
    }
    Ok(BasisExpansion::from_coefficients(coefficients(w, basis)?, w.norm_sqr()))
}

/// Expansion of the superposition together with its per-lobe coefficients.
pub fn expand_superposition(sup: &Superposition, basis: &EigenBasis) -> Result<BasisExpansion> {
    let mut out = expand(&sup.wave, basis)?;
    out.lobe_coefficients = sup
        .lobes
        .iter()
        .map(|l| coefficients(l, basis))
        .collect::<Result<_>>()?;
    out.phases = sup.phases.clone();
    Ok(out)
}

fn check_power(k_max: usize) -> Result<()> {
    if k_max > OPERATOR_MAX_POWER {
        return Err(Error::InvalidParameter(format!(
            "k_max {k_max} exceeds {OPERATOR_MAX_POWER}"
        )));
    }
    Ok(())
}

/// `⟨Aᵏ⟩ = Σₙ aₙᵏ P(aₙ)`, `k = 0..=k_max`.
pub fn operator_moments(expansion: &BasisExpansion, basis: &EigenBasis, k_max: usize) -> Result<Vec<f64>> {
    check_power(k_max)?;
    if expansion.probabilities.len() != basis.size() {
        return Err(Error::GridMismatch);
    }
    Ok((0..=k_max)
        .map(|k| {
            basis
                .eigenvalues
                .iter()
                .zip(&expansion.probabilities)
                .map(|(a, p)| a.powi(k as i32) * p)
                .sum()
        })
        .collect())
}

/// `∫ψ₂* Hᵏ ψ₁ dx` for `k = 0..=k_max`, H applied spectrally.
pub fn hamiltonian_cross_terms(
    psi1: &SampledWave,
    psi2: &SampledWave,
    osc: &Oscillator,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    check_power(k_max)?;
    let mut out = Vec::with_capacity(k_max + 1);
    let mut h = psi1.clone();
    for k in 0..=k_max {
        if k > 0 {
            h = osc.apply(&h)?;
        }
        out.push(inner_product(psi2, &h)?);
    }
    Ok(out)
}

/// Discrete distributions and operator moments across an α sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSweep {
    pub alphas: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// `P(aₙ; α)`, α-major.
    pub probabilities: Vec<Vec<f64>>,
    /// `⟨Hᵏ⟩(α)`, α-major, `k = 0..=k_max`.
    pub moments: Vec<Vec<f64>>,
    /// Per k: `(max_α − min_α) / max_α |⟨Hᵏ⟩|`.
    pub moment_spread: Vec<f64>,
    /// Largest total-variation distance `½ Σ|P(·;α) − P(·;α′)|` over pairs.
    pub tv_gap: f64,
    /// Largest `|P(aₙ; α) − P(aₙ; α′)|`.
    pub max_probability_gap: f64,
    pub min_captured_norm: f64,
    pub max_reconstruction_defect: f64,
    pub max_cross_product: f64,
    /// `|∫ψ₂* Hᵏ ψ₁ dx|` of the first two lobes.
    pub cross_terms: Vec<f64>,
    /// `cross_terms[k] / (‖Hᵏψ₁‖ ‖ψ₂‖)`, the leakage relative to the operand scale.
    pub cross_term_relative: Vec<f64>,
    pub warnings: Vec<Warning>,
}

/// Builds `spec.with_alpha(α)` on the basis grid for every α and expands it.
pub fn observable_sweep(
    spec: &SuperpositionSpec,
    alphas: &[f64],
    basis: &EigenBasis,
    k_max: usize,
) -> Result<ObservableSweep> {
    check_power(k_max)?;
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("at least one alpha is required".into()));
    }
    let grid = *basis.grid();
    let hbar = basis.hbar();
    let mut probabilities = Vec::new();
    let mut moments = Vec::new();
    let mut warnings = Vec::new();
    let mut min_captured = f64::INFINITY;
    let mut max_defect: f64 = 0.0;
    let mut max_cross: f64 = 0.0;
    let mut lobes = None;
    for &alpha in alphas {
        let sup = build_superposition(&spec.with_alpha(alpha), &grid, hbar)?;
        let e = expand_superposition(&sup, basis)?;
        min_captured = min_captured.min(e.captured_norm / e.wave_norm);
        max_defect = max_defect.max(e.reconstruction_defect());
        max_cross = max_cross.max(e.max_cross_product());
        for w in &e.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        moments.push(operator_moments(&e, basis, k_max)?);
        probabilities.push(e.probabilities);
        lobes.get_or_insert(sup.lobes);
    }
    let moment_spread = (0..=k_max)
        .map(|k| {
            let col: Vec<f64> = moments.iter().map(|m| m[k]).collect();
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let scale = col.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if scale > 0.0 {
                (hi - lo) / scale
            } else {
                0.0
            }
        })
        .collect();
    let mut tv_gap: f64 = 0.0;
    let mut max_probability_gap: f64 = 0.0;
    for i in 0..probabilities.len() {
        for j in i + 1..probabilities.len() {
            let diffs = probabilities[i].iter().zip(&probabilities[j]).map(|(a, b)| (a - b).abs());
            let (sum, max) = diffs.fold((0.0, 0.0f64), |(s, m), d| (s + d, m.max(d)));
            tv_gap = tv_gap.max(0.5 * sum);
            max_probability_gap = max_probability_gap.max(max);
        }
    }
    let lobes = lobes.expect("nonempty alphas");
    let (cross_terms, cross_term_relative) = match basis.oscillator {
        Some(osc) => {
            let terms: Vec<f64> = hamiltonian_cross_terms(&lobes[0], &lobes[1], &osc, k_max)?
                .iter()
                .map(|c| c.norm())
                .collect();
            let mut relative = Vec::with_capacity(terms.len());
            let mut h = lobes[0].clone();
            let norm2 = lobes[1].norm_sqr().sqrt();
            for (k, t) in terms.iter().enumerate() {
                if k > 0 {
                    h = osc.apply(&h)?;
                }
                relative.push(t / (h.norm_sqr().sqrt() * norm2));
            }
            (terms, relative)
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(ObservableSweep {
        alphas: alphas.to_vec(),
        eigenvalues: basis.eigenvalues.clone(),
        probabilities,
        moments,
        moment_spread,
        tv_gap,
        max_probability_gap,
        min_captured_norm: min_captured,
        max_reconstruction_defect: max_defect,
        max_cross_product: max_cross,
        cross_terms,
        cross_term_relative,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::{WindowFamily, WindowSpec};
    use std::f64::consts::PI;

    const HBAR: f64 = 1.0;
    const STEP: f64 = 1.0 / 512.0;

    fn canonical_basis(nb: usize) -> EigenBasis {
        let grid = oscillator_grid(1.5, 0.15, nb, STEP).unwrap();
        oscillator_basis(&grid, nb, HBAR, 1.5, 0.15).unwrap()
    }

    fn spec() -> SuperpositionSpec {
        let w = WindowSpec::new(WindowFamily::SmoothBump, 1.0).unwrap();
        SuperpositionSpec::two_lobe(w, 2.0, 0.0).unwrap()
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let b = canonical_basis(128);
        let ip = |i: usize, j: usize| inner_product(&b.functions[i], &b.functions[j]).unwrap();
        assert!((ip(0, 0).re - 1.0).abs() < 1e-12);
        assert!(ip(0, 2).norm() < 1e-8);
        assert!(b.orthonormality_defect().unwrap() < 1e-6);
    }

    #[test]
    fn ground_state_expansion() {
        let b = canonical_basis(64);
        let sigma: f64 = 0.15;
        let g = SampledWave::from_fn(*b.grid(), HBAR, AxisKind::Position, |x| {
            Complex64::new((-(x - 1.5).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .unwrap()
        .normalized()
        .unwrap();
        let e = expand(&g, &b).unwrap();
        assert!((e.coefficients[0].norm() - 1.0).abs() < 1e-8);
        assert!(e.coefficients[1..].iter().all(|c| c.norm() < 1e-8));
        assert!(!e.is_truncated());
    }

    #[test]
    fn eigenvalues_by_direct_quadrature() {
        let b = canonical_basis(128);
        let osc = b.oscillator.unwrap();
        assert!((osc.omega() - 1.0 / 0.0225).abs() < 1e-12);
        for n in [0, 1, 5, 40, 127] {
            let hu = osc.apply(&b.functions[n]).unwrap();
            let e = inner_product(&b.functions[n], &hu).unwrap();
            assert!((e.re - b.eigenvalues[n]).abs() < 1e-6, "n = {n}: {}", e.re);
            assert!(e.im.abs() < 1e-9);
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let grid = Grid1D::covering(-0.5, 3.5, STEP, 0.0).unwrap();
        match oscillator_basis(&grid, 128, HBAR, 1.5, 0.15) {
            Err(Error::GridTooNarrowForBasis { basis_size, .. }) => assert_eq!(basis_size, 128),
            other => panic!("expected narrow-grid error, got {other:?}"),
        }
    }

    #[test]
    fn superposition_expansion_invariants() {
        let b = canonical_basis(128);
        for alpha in [0.0, PI / 3.0, PI] {
            let sup = build_superposition(&spec().with_alpha(alpha), b.grid(), HBAR).unwrap();
            let e = expand_superposition(&sup, &b).unwrap();
            assert!((e.captured_norm - 1.0).abs() < 1e-6);
            assert!(!e.is_truncated());
            assert!(e.reconstruction_defect() < 1e-10);
            assert!(e.max_cross_product() > 1e-3);
            // ⟨ψ,ψ⟩ from coefficients equals the grid inner product.
            assert!((e.captured_norm - e.wave_norm).abs() < 1e-6);
        }
    }

    #[test]
    fn small_basis_flags_truncation() {
        let b = canonical_basis(8);
        let sup = build_superposition(&spec(), b.grid(), HBAR).unwrap();
        let e = expand_superposition(&sup, &b).unwrap();
        assert!(e.is_truncated());
    }

    #[test]
    fn alpha_sweep_witness() {
        let b = canonical_basis(128);
        let s = observable_sweep(&spec(), &[0.0, PI / 4.0, PI / 2.0, PI], &b, 4).unwrap();
        assert!(s.moments.iter().all(|m| (m[0] - 1.0).abs() < 1e-6));
        assert!(s.moment_spread.iter().all(|v| *v <= 1e-5), "{:?}", s.moment_spread);
        assert!(s.tv_gap > 1e-3);
        assert!(s.max_probability_gap > 1e-3);
        assert!(s.cross_terms[..4].iter().all(|c| *c <= 1e-8), "{:?}", s.cross_terms);
        // k = 4 sits at the double-precision floor of the spectral H⁴.
        assert!(s.cross_term_relative[4] < 1e-12, "{:?}", s.cross_term_relative);
    }

    #[test]
    fn operator_power_is_capped() {
        let b = canonical_basis(16);
        let sup = build_superposition(&spec(), b.grid(), HBAR).unwrap();
        let e = expand(&sup.wave, &b).unwrap();
        assert!(operator_moments(&e, &b, 5).is_err());
    }

    #[test]
    fn user_supplied_basis_requires_orthonormality() {
        let b = canonical_basis(4);
        let ok = EigenBasis::user_supplied(vec![0.0, 1.0], b.functions[..2].to_vec()).unwrap();
        assert_eq!(ok.kind, BasisKind::UserSupplied);
        let dup = vec![b.functions[0].clone(), b.functions[0].clone()];
        assert!(EigenBasis::user_supplied(vec![0.0, 1.0], dup).is_err());
    }
}
