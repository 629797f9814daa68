//! Wigner and cross-Wigner distributions, mixed moments, the current `j(x)`
//! and the group delay `τ(p)`.
//!
//! `W₁₂(x, p) = (1/πħ) ∫ ψ₁*(x − u) ψ₂(x + u) e^{−2iup/ħ} du` is evaluated per
//! x by an FFT over the lag `u`. The lag grid has step `h = dx / s` after
//! spectral upsampling by `s`, so the FFT length `M = πħ / (dp h)` ties the
//! momentum step to the position step.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{AxisKind, Grid1D, SampledWave};
use crate::spectral::{plan, spectral_derivative, to_momentum_with, to_position_with, TransformOptions};
use crate::wavepacket::{amplitude_phase, build_dual_superposition, SuperpositionSpec, AMPLITUDE_FLOOR};

/// Particle mass in the current `j = (ħ/m) Im(ψ* ψ')`.
pub const MASS: f64 = 1.0;

/// Highest `n + m` accepted for mixed moments.
pub const MIXED_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerOptions {
    /// Spectral upsampling factor of the lag grid.
    pub oversample: usize,
    /// Compare the position marginal with `|ψ|²` and fail on mismatch.
    pub check_marginals: bool,
    pub marginal_tolerance: f64,
}

impl Default for WignerOptions {
    fn default() -> Self {
        Self {
            oversample: 2,
            check_marginals: true,
            marginal_tolerance: 1e-4,
        }
    }
}

/// Real `W(x, p)` on `x_grid × p_grid`, x-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerGrid {
    pub x_grid: Grid1D,
    pub p_grid: Grid1D,
    pub values: Vec<f64>,
    pub hbar: f64,
    /// Largest imaginary part discarded when taking the real part.
    pub imag_residue: f64,
}

/// Complex `W₁₂(x, p)` on `x_grid × p_grid`, x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossWigner {
    pub x_grid: Grid1D,
    pub p_grid: Grid1D,
    pub values: Vec<Complex64>,
    pub hbar: f64,
}

fn weighted_sum<T>(x_grid: &Grid1D, p_grid: &Grid1D, values: &[T], n: usize, m: usize) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let np = p_grid.count();
    let pw: Vec<f64> = p_grid.points().map(|p| p.powi(m as i32)).collect();
    let mut total = T::default();
    for (i, x) in x_grid.points().enumerate() {
        let row = &values[i * np..(i + 1) * np];
        let mut acc = T::default();
        for (v, w) in row.iter().zip(&pw) {
            acc = acc + *v * *w;
        }
        total = total + acc * x.powi(n as i32);
    }
    total * (x_grid.step() * p_grid.step())
}

impl WignerGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p_grid.count() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let np = self.p_grid.count();
        &self.values[i * np..(i + 1) * np]
    }

    /// `∫ W dp` per x.
    pub fn position_marginal(&self) -> Vec<f64> {
        (0..self.x_grid.count())
            .map(|i| self.row(i).iter().sum::<f64>() * self.p_grid.step())
            .collect()
    }

    /// `∫ W dx` per p.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let np = self.p_grid.count();
        let mut out = vec![0.0; np];
        for i in 0..self.x_grid.count() {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o *= self.x_grid.step());
        out
    }

    pub fn mass(&self) -> f64 {
        self.mixed_moment(0, 0)
    }

    /// `∬ xⁿ pᵐ W dx dp`.
    pub fn mixed_moment(&self, n: usize, m: usize) -> f64 {
        weighted_sum(&self.x_grid, &self.p_grid, &self.values, n, m)
    }

    /// `∫∫ |x|ⁿ |p|ᵐ |W| dx dp`, the scale against which `⟨xⁿpᵐ⟩` is small.
    pub fn mixed_moment_scale(&self, n: usize, m: usize) -> f64 {
        let np = self.p_grid.count();
        let pw: Vec<f64> = self.p_grid.points().map(|p| p.abs().powi(m as i32)).collect();
        self.x_grid
            .points()
            .enumerate()
            .map(|(i, x)| {
                x.abs().powi(n as i32)
                    * self.values[i * np..(i + 1) * np]
                        .iter()
                        .zip(&pw)
                        .map(|(v, p)| v.abs() * p)
                        .sum::<f64>()
            })
            .sum::<f64>()
            * self.x_grid.step()
            * self.p_grid.step()
    }

    /// `∫ p W(x, p) dp` per x.
    pub fn local_mean_momentum(&self) -> Vec<f64> {
        let pw: Vec<f64> = self.p_grid.points().collect();
        (0..self.x_grid.count())
            .map(|i| self.row(i).iter().zip(&pw).map(|(v, p)| v * p).sum::<f64>() * self.p_grid.step())
            .collect()
    }

    /// `∫ x W(x, p) dx` per p.
    pub fn local_mean_position(&self) -> Vec<f64> {
        let np = self.p_grid.count();
        let mut out = vec![0.0; np];
        for (i, x) in self.x_grid.points().enumerate() {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += x * v;
            }
        }
        out.iter_mut().for_each(|o| *o *= self.x_grid.step());
        out
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

impl CrossWigner {
    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.p_grid.count() + j]
    }

    pub fn mixed_moment(&self, n: usize, m: usize) -> Complex64 {
        weighted_sum(&self.x_grid, &self.p_grid, &self.values, n, m)
    }

    /// `max |W₂₁ − conj W₁₂|` against the swapped pair.
    pub fn conjugate_defect(&self, swapped: &CrossWigner) -> Result<f64> {
        if self.x_grid != swapped.x_grid || self.p_grid != swapped.p_grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&swapped.values)
            .map(|(a, b)| (a.conj() - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Band-limited interpolation onto a grid `factor` times finer; sample
/// `factor·i` of the result equals input sample `i`.
pub fn upsample(values: &[Complex64], factor: usize) -> Vec<Complex64> {
    if factor == 1 {
        return values.to_vec();
    }
    let n = values.len();
    let nf = n * factor;
    let mut spec = values.to_vec();
    plan(n, FftDirection::Forward).process(&mut spec);
    let mut wide = vec![Complex64::new(0.0, 0.0); nf];
    let pos = (n - 1) / 2;
    wide[..=pos].copy_from_slice(&spec[..=pos]);
    for j in n - pos..n {
        wide[j + nf - n] = spec[j];
    }
    if n.is_multiple_of(2) {
        let nyq = spec[n / 2] * 0.5;
        wide[n / 2] = nyq;
        wide[nf - n / 2] = nyq;
    }
    plan(nf, FftDirection::Inverse).process(&mut wide);
    let scale = 1.0 / n as f64;
    wide.iter_mut().for_each(|v| *v *= scale);
    wide
}

struct LagLayout {
    fft_len: usize,
    bins: Vec<usize>,
}

/// Fails with [`Error::IncompatiblePGrid`] when `p_grid` cannot be reached by
/// the lag FFT of `x_grid`; no transform is run.
pub fn check_wigner_grids(x_grid: &Grid1D, p_grid: &Grid1D, hbar: f64, oversample: usize) -> Result<()> {
    lag_layout(x_grid, p_grid, hbar, oversample).map(|_| ())
}

fn lag_layout(x_grid: &Grid1D, p_grid: &Grid1D, hbar: f64, oversample: usize) -> Result<LagLayout> {
    let h = x_grid.step() / oversample as f64;
    let ratio = std::f64::consts::PI * hbar / (p_grid.step() * h);
    let m = ratio.round();
    if (ratio - m).abs() > 1e-6 * ratio {
        return Err(Error::IncompatiblePGrid(format!(
            "πħ/(dp·h) = {ratio} is not an integer (dp = {}, h = {h})",
            p_grid.step()
        )));
    }
    let fft_len = m as usize;
    let fine = x_grid.count() * oversample;
    if fft_len < fine {
        return Err(Error::IncompatiblePGrid(format!(
            "lag FFT length {fft_len} shorter than the {fine}-point lag grid; refine dp"
        )));
    }
    let mut bins = Vec::with_capacity(p_grid.count());
    for p in p_grid.points() {
        let k = p / p_grid.step();
        if (k - k.round()).abs() > 1e-6 {
            return Err(Error::IncompatiblePGrid(format!(
                "p = {p} is not a multiple of dp = {}",
                p_grid.step()
            )));
        }
        bins.push((k.round() as i64).rem_euclid(fft_len as i64) as usize);
    }
    Ok(LagLayout { fft_len, bins })
}

fn cross_field(
    a: &SampledWave,
    b: &SampledWave,
    p_grid: &Grid1D,
    oversample: usize,
) -> Result<Vec<Complex64>> {
    if a.grid() != b.grid() || a.hbar() != b.hbar() {
        return Err(Error::GridMismatch);
    }
    for w in [a, b] {
        if w.axis() != AxisKind::Position {
            return Err(Error::WrongAxis {
                expected: "position",
                found: w.axis().name(),
            });
        }
    }
    if oversample == 0 {
        return Err(Error::InvalidParameter("oversample must be at least 1".into()));
    }
    let hbar = a.hbar();
    let x_grid = *a.grid();
    let layout = lag_layout(&x_grid, p_grid, hbar, oversample)?;
    let fa = upsample(a.values(), oversample);
    let fb = if a.values() == b.values() {
        fa.clone()
    } else {
        upsample(b.values(), oversample)
    };
    let nf = fa.len();
    let m = layout.fft_len;
    let fft = plan(m, FftDirection::Forward);
    let h = x_grid.step() / oversample as f64;
    let scale = h / (std::f64::consts::PI * hbar);
    let zero = Complex64::new(0.0, 0.0);
    let np = p_grid.count();

    let rows: Vec<Vec<Complex64>> = (0..x_grid.count())
        .into_par_iter()
        .map_init(
            || (vec![zero; m], vec![zero; fft.get_inplace_scratch_len()]),
            |(buf, scratch), i| {
                let c = i * oversample;
                let reach = c.min(nf - 1 - c);
                buf.iter_mut().for_each(|v| *v = zero);
                let mut any = false;
                for k in 0..=reach {
                    let plus = fa[c - k].conj() * fb[c + k];
                    buf[k] = plus;
                    any |= plus != zero;
                    if k > 0 {
                        let minus = fa[c + k].conj() * fb[c - k];
                        buf[m - k] = minus;
                        any |= minus != zero;
                    }
                }
                if !any {
                    return vec![zero; np];
                }
                fft.process_with_scratch(buf, scratch);
                layout.bins.iter().map(|&bin| buf[bin] * scale).collect()
            },
        )
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn wigner(w: &SampledWave, p_grid: &Grid1D) -> Result<WignerGrid> {
    wigner_with(w, p_grid, &WignerOptions::default())
}

pub fn wigner_with(w: &SampledWave, p_grid: &Grid1D, opts: &WignerOptions) -> Result<WignerGrid> {
    let field = cross_field(w, w, p_grid, opts.oversample)?;
    let imag_residue = field.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let grid = WignerGrid {
        x_grid: *w.grid(),
        p_grid: *p_grid,
        values: field.into_iter().map(|v| v.re).collect(),
        hbar: w.hbar(),
        imag_residue,
    };
    if opts.check_marginals {
        let mismatch_map: Vec<f64> = grid
            .position_marginal()
            .iter()
            .zip(w.values())
            .map(|(m, v)| (m - v.norm_sqr()).abs())
            .collect();
        let max_mismatch = mismatch_map.iter().cloned().fold(0.0, f64::max);
        if max_mismatch > opts.marginal_tolerance {
            return Err(Error::Aliasing {
                max_mismatch,
                threshold: opts.marginal_tolerance,
                mismatch_map,
            });
        }
    }
    Ok(grid)
}

pub fn cross_wigner(w1: &SampledWave, w2: &SampledWave, p_grid: &Grid1D) -> Result<CrossWigner> {
    cross_wigner_with(w1, w2, p_grid, &WignerOptions::default())
}

pub fn cross_wigner_with(
    w1: &SampledWave,
    w2: &SampledWave,
    p_grid: &Grid1D,
    opts: &WignerOptions,
) -> Result<CrossWigner> {
    Ok(CrossWigner {
        x_grid: *w1.grid(),
        p_grid: *p_grid,
        values: cross_field(w1, w2, p_grid, opts.oversample)?,
        hbar: w1.hbar(),
    })
}

/// `W` of `(Σ e^{iαₙ} ψₙ)/√N` assembled from lobe Wigner and cross-Wigner
/// fields: `(1/N) Σ_{n,k} e^{i(αₖ − αₙ)} W_{nk}`, with `W_{nk}` the cross
/// Wigner of `(ψₙ, ψₖ)`.
pub fn assemble_wigner(
    lobes: &[SampledWave],
    phases: &[f64],
    p_grid: &Grid1D,
    opts: &WignerOptions,
) -> Result<Vec<f64>> {
    let n = lobes.len();
    let mut total: Vec<Complex64> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let field = cross_field(&lobes[a], &lobes[b], p_grid, opts.oversample)?;
            let c = Complex64::from_polar(1.0 / n as f64, phases[b] - phases[a]);
            if total.is_empty() {
                total = vec![Complex64::new(0.0, 0.0); field.len()];
            }
            for (t, f) in total.iter_mut().zip(field) {
                *t += c * f;
            }
        }
    }
    Ok(total.into_iter().map(|v| v.re).collect())
}

fn check_order(n: usize, m: usize) -> Result<()> {
    if n + m > MIXED_MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "n + m = {} exceeds {MIXED_MAX_ORDER}",
            n + m
        )));
    }
    Ok(())
}

/// `⟨xⁿ pᵐ⟩` by 2-D quadrature of the Wigner distribution.
pub fn mixed_moment(w: &SampledWave, n: usize, m: usize, p_grid: &Grid1D) -> Result<f64> {
    check_order(n, m)?;
    Ok(wigner(w, p_grid)?.mixed_moment(n, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossMoment {
    pub n: usize,
    pub m: usize,
    /// `∬ xⁿ pᵐ W₁₂ dx dp`, as `[re, im]`.
    pub quadrature: [f64; 2],
    /// Position-space derivative sum, as `[re, im]`.
    pub derivative_sum: [f64; 2],
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `⟨xⁿ pᵐ⟩₁₂ = (ħ/2i)ᵐ Σₖ C(m,k) (−1)ᵏ ∫ xⁿ (∂ᵏψ₁)* ∂^{m−k}ψ₂ dx`.
pub fn cross_mixed_moment_by_derivatives(
    w1: &SampledWave,
    w2: &SampledWave,
    n: usize,
    m: usize,
) -> Result<Complex64> {
    check_order(n, m)?;
    if w1.grid() != w2.grid() || w1.hbar() != w2.hbar() {
        return Err(Error::GridMismatch);
    }
    let g = w1.grid();
    let d1: Vec<Vec<Complex64>> = (0..=m).map(|k| spectral_derivative(w1, k as u32)).collect();
    let d2: Vec<Vec<Complex64>> = (0..=m).map(|k| spectral_derivative(w2, k as u32)).collect();
    let xn: Vec<f64> = g.points().map(|x| x.powi(n as i32)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let integral: Complex64 = d1[k]
            .iter()
            .zip(&d2[m - k])
            .zip(&xn)
            .map(|((a, b), x)| a.conj() * b * *x)
            .sum::<Complex64>()
            * g.step();
        sum += integral * (binomial(m, k) * sign);
    }
    let prefactor = Complex64::new(0.0, -w1.hbar() / 2.0).powu(m as u32);
    Ok(sum * prefactor)
}

/// `⟨xⁿ pᵐ⟩₁₂` both ways.
pub fn cross_mixed_moment(
    w1: &SampledWave,
    w2: &SampledWave,
    n: usize,
    m: usize,
    p_grid: &Grid1D,
) -> Result<CrossMoment> {
    check_order(n, m)?;
    let q = cross_wigner(w1, w2, p_grid)?.mixed_moment(n, m);
    let d = cross_mixed_moment_by_derivatives(w1, w2, n, m)?;
    Ok(CrossMoment {
        n,
        m,
        quadrature: [q.re, q.im],
        derivative_sum: [d.re, d.im],
    })
}

fn flux(values: &[Complex64], derivative: &[Complex64], hbar: f64) -> Vec<f64> {
    values
        .iter()
        .zip(derivative)
        .map(|(v, d)| {
            if v.norm() < AMPLITUDE_FLOOR {
                0.0
            } else {
                hbar * (v.conj() * d).im
            }
        })
        .collect()
}

/// `j(x) = (ħ/m) Im(ψ* dψ/dx)`, zero where `|ψ| < 10⁻¹²`.
pub fn current(w: &SampledWave) -> Result<Vec<f64>> {
    if w.axis() != AxisKind::Position {
        return Err(Error::WrongAxis {
            expected: "position",
            found: w.axis().name(),
        });
    }
    let d = spectral_derivative(w, 1);
    Ok(flux(w.values(), &d, w.hbar() / MASS))
}

/// Amplitude and phase-derivative decomposition `ψ = R e^{iS/ħ}` with
/// `R' = Re(ψ*ψ')/|ψ|` and `S' = ħ Im(ψ*ψ')/|ψ|²`.
struct Polar {
    r: Vec<f64>,
    dr: Vec<f64>,
    ds: Vec<f64>,
    unit: Vec<Complex64>,
}

fn polar(values: &[Complex64], derivative: &[Complex64], hbar: f64, scale: f64) -> Polar {
    let n = values.len();
    let mut out = Polar {
        r: vec![0.0; n],
        dr: vec![0.0; n],
        ds: vec![0.0; n],
        unit: vec![Complex64::new(0.0, 0.0); n],
    };
    for i in 0..n {
        let v = values[i];
        let a = v.norm();
        if a < AMPLITUDE_FLOOR {
            continue;
        }
        let q = v.conj() * derivative[i];
        out.r[i] = a * scale;
        out.dr[i] = q.re / a * scale;
        out.ds[i] = hbar * q.im / (a * a);
        out.unit[i] = v / a;
    }
    out
}

/// The current of `(ψ₁ + e^{iα}ψ₂)/√2` evaluated four ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentForms {
    /// `ħ Im(ψ*ψ')` of the superposition.
    pub bilinear: Vec<f64>,
    /// `R₁²S₁' + R₂²S₂' + R₁R₂(S₁'+S₂')cos Δ − ħ(R₁R₂' − R₁'R₂) sin Δ`.
    pub amplitude_phase: Vec<f64>,
    /// `½(S₁'+S₂')R² + ½(S₁'−S₂')(R₁²−R₂²) − ħ(R₁R₂' − R₁'R₂) sin Δ`.
    pub symmetric: Vec<f64>,
    /// The first form with the cross terms halved.
    pub halved_cross_terms: Vec<f64>,
}

/// `Rₖ` absorbs the `1/√2`, `Δ = S₁/ħ − S₂/ħ − α`.
pub fn current_forms(psi1: &SampledWave, psi2: &SampledWave, alpha: f64) -> Result<CurrentForms> {
    if psi1.grid() != psi2.grid() || psi1.hbar() != psi2.hbar() {
        return Err(Error::GridMismatch);
    }
    let hbar = psi1.hbar();
    let s = 1.0 / 2f64.sqrt();
    let d1 = spectral_derivative(psi1, 1);
    let d2 = spectral_derivative(psi2, 1);
    let a = polar(psi1.values(), &d1, hbar, s);
    let b = polar(psi2.values(), &d2, hbar, s);
    let rot = Complex64::from_polar(1.0, alpha);
    let psi: Vec<Complex64> = psi1
        .values()
        .iter()
        .zip(psi2.values())
        .map(|(x, y)| (x + rot * y) * s)
        .collect();
    let dpsi: Vec<Complex64> = d1.iter().zip(&d2).map(|(x, y)| (x + rot * y) * s).collect();
    let bilinear = flux(&psi, &dpsi, hbar / MASS);

    let n = psi.len();
    let mut forms = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        // e^{iΔ} = u₁ conj(u₂) e^{−iα}
        let e = a.unit[i] * b.unit[i].conj() * rot.conj();
        let (cos, sin) = (e.re, e.im);
        let (r1, r2) = (a.r[i], b.r[i]);
        let wronskian = r1 * b.dr[i] - a.dr[i] * r2;
        let own = r1 * r1 * a.ds[i] + r2 * r2 * b.ds[i];
        let cross = r1 * r2 * (a.ds[i] + b.ds[i]) * cos;
        forms.0[i] = own + cross - hbar * wronskian * sin;
        let r_sq = r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * cos;
        forms.1[i] = 0.5 * (a.ds[i] + b.ds[i]) * r_sq + 0.5 * (a.ds[i] - b.ds[i]) * (r1 * r1 - r2 * r2)
            - hbar * wronskian * sin;
        forms.2[i] = own + 0.5 * cross - 0.5 * hbar * wronskian * sin;
    }
    Ok(CurrentForms {
        bilinear,
        amplitude_phase: forms.0,
        symmetric: forms.1,
        halved_cross_terms: forms.2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupDelay {
    pub p_grid: Grid1D,
    pub momentum_density: Vec<f64>,
    /// `τ(p) = ħ Im(φ* dφ/dp)`.
    pub values: Vec<f64>,
}

/// `τ(p)`. Momentum waves are differentiated spectrally on their own grid;
/// position waves are transformed with `opts`, and `dφ/dp` is the transform
/// of `(−ix/ħ) ψ`.
pub fn group_delay(w: &SampledWave, opts: &TransformOptions) -> Result<GroupDelay> {
    let (phi, dphi) = match w.axis() {
        AxisKind::Momentum => {
            let d = spectral_derivative(w, 1);
            (w.clone(), d)
        }
        AxisKind::Position => {
            let hbar = w.hbar();
            let phi = to_momentum_with(w, opts)?;
            let weighted = w.map_values(|x, v| v * Complex64::new(0.0, -x / hbar));
            let dphi = to_momentum_with(&weighted, opts)?;
            (phi, dphi.values().to_vec())
        }
    };
    Ok(GroupDelay {
        p_grid: *phi.grid(),
        momentum_density: phi.values().iter().map(|v| v.norm_sqr()).collect(),
        values: flux(phi.values(), &dphi, phi.hbar()),
    })
}

/// `(2η₁' − L)|F|² cos²((pL/ħ − α)/2)` for a shifted two-lobe pair, with
/// `η₁'|F|²` the group delay of the single window.
pub fn group_delay_two_lobe_closed_form(
    spec: &SuperpositionSpec,
    x_grid: &Grid1D,
    hbar: f64,
    opts: &TransformOptions,
) -> Result<GroupDelay> {
    let alpha = match (spec.lobes, spec.alpha()) {
        (2, Some(a)) => a,
        _ => {
            return Err(Error::InvalidParameter(
                "closed-form group delay needs a two-lobe spec".into(),
            ))
        }
    };
    let window = crate::wavepacket::build_window(&spec.window, x_grid, hbar)?;
    let single = group_delay(&window, opts)?;
    let values = single
        .p_grid
        .points()
        .zip(single.values.iter().zip(&single.momentum_density))
        .map(|(p, (tau_f, f2))| {
            (2.0 * tau_f - spec.shift * f2) * ((p * spec.shift / hbar - alpha) / 2.0).cos().powi(2)
        })
        .collect();
    let momentum_density = single
        .p_grid
        .points()
        .zip(&single.momentum_density)
        .map(|(p, f2)| f2 * (1.0 + (p * spec.shift / hbar - alpha).cos()))
        .collect();
    Ok(GroupDelay {
        p_grid: single.p_grid,
        momentum_density,
        values,
    })
}

/// Position-side quantities of a superposition of disjoint momentum lobes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCurrent {
    pub x_grid: Grid1D,
    /// `|ψ(x)|²` of the inverse transform.
    pub density: Vec<f64>,
    /// `|H(x)|² [1 + cos(xL/ħ + α)]`, `H` the inverse transform of one lobe.
    pub density_closed_form: Vec<f64>,
    /// `|H(x)|² [1 + cos(xL/ħ − α)]`.
    pub density_reflected_phase: Vec<f64>,
    /// `ħ Im(ψ*ψ')`.
    pub current: Vec<f64>,
    /// `R²(S₁' + L/2)` for `φ₂(p) = φ₁(p − L)`.
    pub shifted_pair_form: Vec<f64>,
    /// `S₁ − R²L/2`.
    pub phase_minus_half_shift: Vec<f64>,
    /// Group delay of the momentum wave.
    pub group_delay: GroupDelay,
}

pub fn dual_current(
    spec: &SuperpositionSpec,
    p_grid: &Grid1D,
    hbar: f64,
    opts: &TransformOptions,
) -> Result<DualCurrent> {
    let sup = build_dual_superposition(spec, p_grid, hbar)?;
    let phi = &sup.wave;
    let dphi_source = phi.map_values(|p, v| v * Complex64::new(0.0, p / hbar));
    let psi = to_position_with(phi, opts)?;
    let dpsi = to_position_with(&dphi_source, opts)?;
    let current = flux(psi.values(), dpsi.values(), hbar / MASS);

    let h = &sup.lobes[0];
    let big_h = to_position_with(h, opts)?;
    let dh = to_position_with(&h.map_values(|p, v| v * Complex64::new(0.0, p / hbar)), opts)?;
    let s1 = amplitude_phase(&big_h).phase;
    let x_grid = *psi.grid();
    let alpha = spec.alpha().unwrap_or(0.0);

    let density: Vec<f64> = psi.values().iter().map(|v| v.norm_sqr()).collect();
    let mut closed = Vec::with_capacity(density.len());
    let mut reflected = Vec::with_capacity(density.len());
    let mut shifted = Vec::with_capacity(density.len());
    let mut minus_half = Vec::with_capacity(density.len());
    for (i, x) in x_grid.points().enumerate() {
        let hv = big_h.values()[i];
        let h2 = hv.norm_sqr();
        closed.push(h2 * (1.0 + (x * spec.shift / hbar + alpha).cos()));
        reflected.push(h2 * (1.0 + (x * spec.shift / hbar - alpha).cos()));
        let ds1 = if hv.norm() < AMPLITUDE_FLOOR {
            0.0
        } else {
            hbar * (hv.conj() * dh.values()[i]).im / h2
        };
        shifted.push(density[i] * (ds1 + spec.shift / 2.0));
        minus_half.push(s1[i] - density[i] * spec.shift / 2.0);
    }
    Ok(DualCurrent {
        x_grid,
        density,
        density_closed_form: closed,
        density_reflected_phase: reflected,
        current,
        shifted_pair_form: shifted,
        phase_minus_half_shift: minus_half,
        group_delay: group_delay(phi, opts)?,
    })
}
