//! Pass/fail checks that tie the numerics to the analytic identities.
//!
//! Each criterion runs a fixed set of computations on a [`Scenario`] and
//! reports every compared quantity with its threshold. Values that are worth
//! reporting but not gated go to `notes`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Distribution1D, Grid1D};
use crate::moments::{
    alpha_dependent_expectation, carleman_sum_from_logs, cosine_identity_check, expectation_via_charfun,
    krein_integral, lognormal_log_even_moments, lognormal_moments, moments_by_charfun, moments_by_quadrature,
    CarlemanVerdict, GWeight, KreinCase, KreinVerdict, LogNormalFamily, MomentReport,
};
use crate::phasespace::{
    cross_mixed_moment, current, dual_current, group_delay, group_delay_two_lobe_closed_form, wigner,
    MIXED_MAX_ORDER,
};
use crate::representations::{observable_sweep, oscillator_basis, oscillator_grid};
use crate::scenario::Scenario;
use crate::spectral::{
    char_function_of_distribution, char_function_two_lobe, dirichlet_kernel, momentum_distribution,
    output_grid, to_momentum_with, TransformOptions, WindowAutocorrelation,
};
use crate::wavepacket::{build_superposition, SuperpositionSpec, WindowFamily, WindowSpec};

pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self::new(name, observed, threshold, Bound::AtMost)
    }

    pub fn at_least(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self::new(name, observed, threshold, Bound::AtLeast)
    }

    pub fn above(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Self::new(name, observed, threshold, Bound::Above)
    }

    /// A boolean outcome, reported as 1 or 0 against 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, 1.0, Bound::AtLeast)
    }

    fn new(name: impl Into<String>, observed: f64, threshold: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::AtMost => observed <= threshold,
            Bound::AtLeast => observed >= threshold,
            Bound::Above => observed > threshold,
        };
        Self {
            name: name.into(),
            observed,
            threshold,
            bound,
            pass,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Above => ">",
        };
        let tag = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{tag} {}: {:.6e} {op} {:.1e}", self.name, self.observed, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Note {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
}

impl CriterionOutcome {
    fn new(id: u32, title: &str) -> Self {
        Self {
            id,
            title: title.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn note(&mut self, name: impl Into<String>, value: f64) {
        self.notes.push(Note {
            name: name.into(),
            value,
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `[PASS] 1 title` plus the first failing check, if any.
    pub fn summary_line(&self) -> String {
        let tag = if self.pass() { "PASS" } else { "FAIL" };
        let mut line = format!("[{tag}] criterion {:>2}: {}", self.id, self.title);
        if let Some(c) = self.checks.iter().find(|c| !c.pass) {
            line.push_str(&format!(" ({c})"));
        }
        line
    }
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "paradox core",
        2 => "cancellation identity",
        3 => "characteristic-function structure",
        4 => "alpha-dependent expectations",
        5 => "Wigner suite",
        6 => "N-lobe superpositions",
        7 => "eigenbasis representations",
        8 => "dual case",
        9 => "log-normal reference",
        10 => "divergence detection",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u32, s: &Scenario) -> Result<CriterionOutcome> {
    s.validate()?;
    match id {
        1 => paradox_core(s),
        2 => cancellation_identity(s),
        3 => char_function_structure(s),
        4 => alpha_expectations(s),
        5 => wigner_suite(s),
        6 => n_lobe(s),
        7 => representations(s),
        8 => dual_case(s),
        9 => lognormal_reference(s),
        10 => divergence_detection(s),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    }
}

pub fn run_all(s: &Scenario) -> Result<Vec<CriterionOutcome>> {
    CRITERIA.iter().map(|&id| run_criterion(id, s)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn alpha_index(alphas: &[f64], target: f64) -> Option<usize> {
    alphas.iter().position(|a| (a - target).abs() < 1e-12)
}

fn pipeline_densities(s: &Scenario, opts: &TransformOptions) -> Result<Vec<Distribution1D>> {
    let x_grid = s.x_grid()?;
    s.alphas
        .iter()
        .map(|&a| Ok(momentum_distribution(&s.spec(a)?, &x_grid, s.hbar, opts)?.pipeline))
        .collect()
}

fn paradox_core(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(1, title(1));
    let x_grid = s.x_grid()?;
    let densities: Vec<Vec<f64>> = s
        .alphas
        .iter()
        .map(|&a| Ok(build_superposition(&s.spec(a)?, &x_grid, s.hbar)?.wave.density().density().to_vec()))
        .collect::<Result<_>>()?;
    let pos_gap = densities.iter().map(|d| max_abs_diff(d, &densities[0])).fold(0.0, f64::max);
    out.check(Check::at_most("position density max |delta| across alpha", pos_gap, 1e-12));

    let momentum = pipeline_densities(s, &s.full_band_options())?;
    let (i0, ipi) = (alpha_index(&s.alphas, 0.0), alpha_index(&s.alphas, PI));
    match (i0, ipi) {
        (Some(a), Some(b)) => {
            let l1 = momentum[a].l1_distance(&momentum[b])?;
            out.check(Check::at_least("L1(P_0, P_pi)", l1, 0.5));
        }
        _ => out.check(Check::holds("alpha sweep contains 0 and pi", false)),
    }
    let report = MomentReport::build(&s.alphas, &momentum, s.n_max)?;
    out.check(Check::at_most(
        format!("momentum moment spread, n <= {}", s.n_max),
        report.max_sensitivity(),
        1e-6,
    ));
    out.note("max L1 over alpha pairs", report.distribution_distance);
    Ok(out)
}

fn cancellation_identity(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(2, title(2));
    let mut worst: f64 = 0.0;
    let mut worst_sine: f64 = 0.0;
    for &a in &s.alphas {
        let c = cosine_identity_check(&s.window, s.shift, a, s.n_max, s.hbar, &s.numerics)?;
        worst = worst.max(c.cosine.iter().map(|v| v.abs()).fold(0.0, f64::max));
        worst_sine = worst_sine.max(c.sine.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    out.check(Check::at_most(
        format!("max |int p^n |F|^2 cos(pL - alpha)|, n <= {}", s.n_max),
        worst,
        1e-6,
    ));
    out.note("max |sine variant|", worst_sine);
    let overlap_shift = s.window.extent / 2.0;
    let mut overlapping: f64 = 0.0;
    for &a in &s.alphas {
        let c = cosine_identity_check(&s.window, overlap_shift, a, s.n_max, s.hbar, &s.numerics)?;
        overlapping = overlapping.max(c.cosine.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    out.check(Check::above("overlapping lobes (L = a/2) max |integral|", overlapping, 1e-3));
    Ok(out)
}

fn char_function_structure(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(3, title(3));
    let theta = s.theta_grid()?;
    let mf = WindowAutocorrelation::new(&s.window, s.hbar);
    let radius = s.window.extent / s.hbar;
    let beyond = theta
        .points()
        .filter(|t| t.abs() >= radius)
        .map(|t| mf.eval(t).norm())
        .fold(0.0, f64::max);
    out.check(Check::at_most("max |M_F(theta)| for |theta| >= a/hbar", beyond, 0.0));

    let momentum = pipeline_densities(s, &s.full_band_options())?;
    let n = s.charfun_n_max;
    let mut direct_gap: f64 = 0.0;
    let mut moment_gap: f64 = 0.0;
    for (&a, p) in s.alphas.iter().zip(&momentum) {
        let assembled = char_function_two_lobe(&s.spec(a)?, &theta, s.hbar);
        let direct = char_function_of_distribution(p, &theta);
        direct_gap = direct_gap.max(assembled.max_difference(&direct)?);
        let by_charfun = moments_by_charfun(&assembled, n)?;
        let by_quad = moments_by_quadrature(p, n)?;
        for (c, q) in by_charfun.iter().zip(&by_quad) {
            moment_gap = moment_gap.max((c.value - q.value).abs() / q.absolute.max(f64::MIN_POSITIVE));
        }
    }
    out.check(Check::at_most("max |M_assembled - M_direct|", direct_gap, 1e-6));
    out.check(Check::at_most(
        format!("derivative vs quadrature moments, relative, n <= {n}"),
        moment_gap,
        1e-4,
    ));
    Ok(out)
}

fn two_lobe_alphas(s: &Scenario) -> Result<SuperpositionSpec> {
    if s.lobes != 2 {
        return Err(Error::InvalidParameter(format!(
            "criterion needs a two-lobe scenario, got {} lobes",
            s.lobes
        )));
    }
    s.spec(0.0)
}

fn alpha_expectations(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(4, title(4));
    let spec = two_lobe_alphas(s)?;
    let weight = GWeight::gaussian(1.0)?;
    let ends = [0.0, PI];
    let e = alpha_dependent_expectation(&spec, &weight, &ends, s.hbar, &s.numerics)?;
    let gap = (e[0].value - e[1].value).abs();
    out.check(Check::above("|<exp(-p^2)>_0 - <exp(-p^2)>_pi|", gap, 1e-3));
    out.note("<exp(-p^2)> at alpha = 0", e[0].value);
    out.note("<exp(-p^2)> at alpha = pi", e[1].value);
    let via_charfun = expectation_via_charfun(&spec, &weight, s.hbar, s.numerics.theta_step(s.hbar))?;
    out.note("alpha = 0 via characteristic function, |difference|", (via_charfun - e[0].value).abs());

    let x_grid = s.x_grid()?;
    let opts = s.momentum_options();
    let mut delta_gap: f64 = 0.0;
    for &a in &s.alphas {
        let md = momentum_distribution(&s.spec(a)?, &x_grid, s.hbar, &opts)?;
        let g = md.pipeline.grid();
        let i0 = g
            .index_of(0.0)
            .ok_or_else(|| Error::InvalidGrid("p = 0 is not on the momentum grid".into()))?;
        let f0 = md.window_spectrum.values()[i0].norm_sqr();
        let interference = md.pipeline.density()[i0] - f0;
        delta_gap = delta_gap.max((interference - f0 * a.cos()).abs());
    }
    out.check(Check::at_most("max |P(0; alpha) - |F(0)|^2 - |F(0)|^2 cos alpha|", delta_gap, 1e-6));
    Ok(out)
}

/// Mixed moments `⟨xⁿpᵐ⟩`, `n + m ≤ 4`, with their absolute scales.
fn mixed_table(w: &crate::phasespace::WignerGrid) -> Vec<(f64, f64)> {
    (0..=MIXED_MAX_ORDER)
        .flat_map(|n| (0..=MIXED_MAX_ORDER - n).map(move |m| (n, m)))
        .map(|(n, m)| (w.mixed_moment(n, m), w.mixed_moment_scale(n, m)))
        .collect()
}

fn wigner_suite(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(5, title(5));
    two_lobe_alphas(s)?;
    let x_grid = s.x_grid()?;
    let opts = s.momentum_options();
    let p_grid = output_grid(&x_grid, s.hbar, &opts)?;
    let (mut pos, mut mom, mut j_gap, mut tau_gap, mut tau_literal, mut closed_gap) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut tables = Vec::new();
    let mut min_w = f64::INFINITY;
    for &a in &s.alphas {
        let spec = s.spec(a)?;
        let psi = build_superposition(&spec, &x_grid, s.hbar)?.wave;
        let w = wigner(&psi, &p_grid)?;
        min_w = min_w.min(w.min());
        pos = pos.max(max_abs_diff(&w.position_marginal(), psi.density().density()));
        let phi = to_momentum_with(&psi, &opts)?;
        if phi.grid() != &p_grid {
            return Err(Error::GridMismatch);
        }
        mom = mom.max(max_abs_diff(&w.momentum_marginal(), phi.density().density()));
        j_gap = j_gap.max(max_abs_diff(&w.local_mean_momentum(), &current(&psi)?));
        let tau = group_delay(&psi, &opts)?;
        let x_mean = w.local_mean_position();
        let neg: Vec<f64> = x_mean.iter().map(|v| -v).collect();
        tau_gap = tau_gap.max(max_abs_diff(&neg, &tau.values));
        tau_literal = tau_literal.max(max_abs_diff(&x_mean, &tau.values));
        let closed = group_delay_two_lobe_closed_form(&spec, &x_grid, s.hbar, &opts)?;
        closed_gap = closed_gap.max(max_abs_diff(&closed.values, &tau.values));
        tables.push(mixed_table(&w));
    }
    out.check(Check::at_most("position marginal vs |psi|^2", pos, 1e-6));
    out.check(Check::at_most("momentum marginal vs |phi|^2", mom, 1e-6));
    out.check(Check::at_most("j(x) vs int p W dp", j_gap, 1e-6));
    out.check(Check::at_most("tau(p) vs -int x W dx", tau_gap, 1e-6));
    out.note("tau(p) vs +int x W dx (opposite sign)", tau_literal);
    out.note("min W", min_w);

    let sup = build_superposition(&s.spec(s.alphas[0])?, &x_grid, s.hbar)?;
    let (mut quad, mut deriv) = (0.0f64, 0.0f64);
    for n in 0..=MIXED_MAX_ORDER {
        for m in 0..=MIXED_MAX_ORDER - n {
            let c = cross_mixed_moment(&sup.lobes[0], &sup.lobes[1], n, m, &p_grid)?;
            quad = quad.max(Complex64::new(c.quadrature[0], c.quadrature[1]).norm());
            deriv = deriv.max(Complex64::new(c.derivative_sum[0], c.derivative_sum[1]).norm());
        }
    }
    out.check(Check::at_most("disjoint cross moments, 2-D quadrature", quad, 1e-8));
    out.check(Check::at_most("disjoint cross moments, derivative sum", deriv, 1e-8));

    let mut spread: f64 = 0.0;
    for k in 0..tables[0].len() {
        let scale = tables.iter().map(|t| t[k].1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for t in &tables {
            spread = spread.max((t[k].0 - tables[0][k].0).abs() / scale);
        }
    }
    out.check(Check::at_most("mixed moment spread across alpha, relative", spread, 1e-6));
    out.check(Check::at_most("group delay vs closed form", closed_gap, 1e-6));
    Ok(out)
}

fn n_lobe(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(6, title(6));
    let x_grid = s.numerics.x_grid(0.0, s.shift + s.window.extent)?;
    let mut pointwise: f64 = 0.0;
    for &a in &s.alphas {
        let spec = SuperpositionSpec::two_lobe(s.window, s.shift, a)?;
        let md = momentum_distribution(&spec, &x_grid, s.hbar, &s.momentum_options())?;
        for (p, f) in md.window_spectrum.grid().points().zip(md.window_spectrum.values()) {
            let f2 = f.norm_sqr();
            let dirichlet = f2 * dirichlet_kernel(2, a - p * s.shift / s.hbar) / 2.0;
            let two = f2 * (1.0 + (p * s.shift / s.hbar - a).cos());
            pointwise = pointwise.max((dirichlet - two).abs());
        }
    }
    out.check(Check::at_most("N = 2 Dirichlet form vs two-lobe form", pointwise, 1e-10));
    for n in [3usize, 5] {
        let mut discrepancy: f64 = 0.0;
        let mut densities = Vec::new();
        for &a in &s.alphas {
            let spec = SuperpositionSpec::linear(s.window, s.shift, n, a)?;
            let grid = s.numerics.x_grid(0.0, spec.span())?;
            let opts = s.full_band_options();
            let md = momentum_distribution(&spec, &grid, s.hbar, &opts)?;
            discrepancy = discrepancy.max(md.discrepancy);
            densities.push(md.pipeline);
        }
        out.check(Check::at_most(
            format!("N = {n} pipeline vs Dirichlet closed form, relative"),
            discrepancy,
            1e-6,
        ));
        let report = MomentReport::build(&s.alphas, &densities, 4)?;
        out.check(Check::at_most(
            format!("N = {n} moment spread, n <= 4"),
            report.max_sensitivity(),
            1e-6,
        ));
        out.note(format!("N = {n} max L1 over alpha pairs"), report.distribution_distance);
    }
    Ok(out)
}

fn representations(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(7, title(7));
    let spec = two_lobe_alphas(s)?;
    let b = &s.basis;
    let center = s.basis_center();
    let grid = oscillator_grid(center, b.length_scale, b.size, s.numerics.x_step)?;
    let basis = oscillator_basis(&grid, b.size, s.hbar, center, b.length_scale)?;
    let ends = observable_sweep(&spec, &[0.0, PI], &basis, 4)?;
    out.check(Check::above("TV(P(a_n; 0), P(a_n; pi))", ends.tv_gap, 1e-3));
    let sweep = observable_sweep(&spec, &s.alphas, &basis, 4)?;
    let spread = sweep.moment_spread.iter().cloned().fold(0.0, f64::max);
    out.check(Check::at_most("<H^k> spread across alpha, k <= 4", spread, 1e-5));
    out.note("captured norm", sweep.min_captured_norm);
    out.note("max |c_n - (c1 + e^{i alpha} c2)/sqrt 2|", sweep.max_reconstruction_defect);
    for (k, c) in sweep.cross_terms.iter().enumerate() {
        out.note(format!("|int psi2* H^{k} psi1|"), *c);
    }
    Ok(out)
}

fn dual_case(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(8, title(8));
    two_lobe_alphas(s)?;
    let p_grid = s.x_grid()?;
    let opts = s.full_band_options();
    let runs = s
        .alphas
        .iter()
        .map(|&a| dual_current(&s.spec(a)?, &p_grid, s.hbar, &opts))
        .collect::<Result<Vec<_>>>()?;
    let closed = runs
        .iter()
        .map(|d| max_abs_diff(&d.density, &d.density_closed_form))
        .fold(0.0, f64::max);
    out.check(Check::at_most("|psi(x)|^2 vs |H|^2 [1 + cos(xL/hbar + alpha)]", closed, 1e-6));
    let reflected = runs
        .iter()
        .map(|d| max_abs_diff(&d.density, &d.density_reflected_phase))
        .fold(0.0, f64::max);
    out.note("|psi(x)|^2 vs |H|^2 [1 + cos(xL/hbar - alpha)]", reflected);
    let shifted = runs
        .iter()
        .map(|d| max_abs_diff(&d.current, &d.shifted_pair_form))
        .fold(0.0, f64::max);
    out.note("j(x) vs R^2 (S1' + L/2)", shifted);
    let phase_minus = runs
        .iter()
        .map(|d| max_abs_diff(&d.current, &d.phase_minus_half_shift))
        .fold(0.0, f64::max);
    out.note("j(x) vs S1 - R^2 L/2", phase_minus);

    let densities = runs
        .iter()
        .map(|d| Distribution1D::new(d.x_grid, d.density.clone()))
        .collect::<Result<Vec<_>>>()?;
    let report = MomentReport::build(&s.alphas, &densities, s.n_max)?;
    out.check(Check::at_most(
        format!("position moment spread, n <= {}", s.n_max),
        report.max_sensitivity(),
        1e-6,
    ));
    let current_gap = match (alpha_index(&s.alphas, 0.0), alpha_index(&s.alphas, PI)) {
        (Some(a), Some(b)) => max_abs_diff(&runs[a].current, &runs[b].current),
        _ => 0.0,
    };
    out.check(Check::above("max |j(x; 0) - j(x; pi)|", current_gap, 1e-3));
    let delay = runs
        .iter()
        .map(|d| max_abs_diff(&d.group_delay.values, &runs[0].group_delay.values))
        .fold(0.0, f64::max);
    out.check(Check::at_most("dual group delay spread across alpha", delay, 1e-8));
    Ok(out)
}

fn lognormal_reference(_s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(9, title(9));
    let exact = lognormal_moments(4);
    for beta in [-1.0, 0.0, 1.0] {
        let fam = LogNormalFamily::new(beta)?;
        let rel = fam
            .moments(4)
            .iter()
            .zip(&exact)
            .map(|(m, e)| (m - e).abs() / e)
            .fold(0.0, f64::max);
        out.check(Check::at_most(format!("beta = {beta}: moments n <= 4, relative"), rel, 1e-3));
    }
    let krein = |step: f64| -> Result<_> {
        let g = Grid1D::symmetric(36.0, step)?;
        krein_integral(&LogNormalFamily::new(0.0)?.log_density_on(&g)?, KreinCase::Stieltjes)
    };
    let coarse = krein(1.0 / 64.0)?;
    let fine = krein(1.0 / 128.0)?;
    out.check(Check::holds(
        "Krein (Stieltjes) suggests indeterminate",
        coarse.verdict == KreinVerdict::SuggestsIndeterminate && coarse.value.is_finite(),
    ));
    out.check(Check::at_most(
        "Krein integral change under grid refinement, relative",
        (coarse.value - fine.value).abs() / coarse.value.abs(),
        1e-6,
    ));
    out.note("Krein integral", coarse.value);
    out.note("Krein outer-quarter fraction", coarse.outer_fraction);

    let ln = carleman_sum_from_logs(&lognormal_log_even_moments(40))?;
    let sums = &ln.partial_sums;
    let late = (sums[sums.len() - 1] - sums[sums.len() / 2 - 1]) / sums[sums.len() - 1];
    out.check(Check::holds(
        "log-normal Carleman verdict is not determinate",
        ln.verdict != CarlemanVerdict::SuggestsDeterminate,
    ));
    out.check(Check::at_most("log-normal Carleman partial-sum growth over second half", late, 1e-6));
    let gaussian: Vec<f64> = (1..=60)
        .map(|k| (1..=k).map(|j| ((2 * j - 1) as f64).ln()).sum())
        .collect();
    let g = carleman_sum_from_logs(&gaussian)?;
    out.check(Check::holds(
        "Gaussian Carleman sums diverge",
        g.verdict == CarlemanVerdict::SuggestsDeterminate,
    ));
    out.note("Gaussian Carleman tail ratio", g.tail_ratio);
    Ok(out)
}

fn second_moment(spec: &SuperpositionSpec, s: &Scenario, extent: f64) -> Result<(f64, bool)> {
    let x_grid = s.numerics.x_grid(0.0, spec.span())?;
    let opts = TransformOptions::band(extent, s.numerics.max_p_step(spec.shift, s.hbar));
    let md = momentum_distribution(spec, &x_grid, s.hbar, &opts)?;
    let m = moments_by_quadrature(&md.pipeline, 2)?;
    Ok((m[2].value, m[2].divergent))
}

fn divergence_detection(s: &Scenario) -> Result<CriterionOutcome> {
    let mut out = CriterionOutcome::new(10, title(10));
    let e = s.numerics.p_extent;
    let rect = SuperpositionSpec::new(
        WindowSpec::new(WindowFamily::Rectangle, s.window.extent)?,
        s.shift,
        s.lobes,
        crate::wavepacket::Phases::Linear { alpha: 0.0 },
    )?;
    let (r1, flag) = second_moment(&rect, s, e)?;
    let (r2, _) = second_moment(&rect, s, 2.0 * e)?;
    out.check(Check::above("rectangle <p^2> growth on doubling the p extent", r2 / r1 - 1.0, 0.5));
    out.check(Check::holds("rectangle <p^2> flagged divergent", flag));
    let bump = SuperpositionSpec::new(
        WindowSpec::new(WindowFamily::SmoothBump, s.window.extent)?,
        s.shift,
        s.lobes,
        crate::wavepacket::Phases::Linear { alpha: 0.0 },
    )?;
    let (b1, bump_flag) = second_moment(&bump, s, e)?;
    let (b2, _) = second_moment(&bump, s, 2.0 * e)?;
    out.check(Check::at_most("smooth bump <p^2> relative change", (b2 - b1).abs() / b1, 1e-6));
    out.note("smooth bump <p^2>", b1);
    out.note("smooth bump flagged divergent", if bump_flag { 1.0 } else { 0.0 });
    out.note("rectangle <p^2> at base extent", r1);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_bounds() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::above("a", 1.0, 1.0).pass);
        assert!(Check::at_least("a", 1.0, 1.0).pass);
        assert!(!Check::holds("a", false).pass);
        assert!(!Check::at_most("a", f64::NAN, 1.0).pass);
    }

    #[test]
    fn summary_line_names_the_first_failure() {
        let mut o = CriterionOutcome::new(2, title(2));
        o.check(Check::at_most("fine", 0.0, 1.0));
        o.check(Check::at_most("broken", 2.0, 1.0));
        let line = o.summary_line();
        assert!(line.starts_with("[FAIL] criterion  2"));
        assert!(line.contains("broken"));
    }

    #[test]
    fn unknown_criterion_is_an_error() {
        assert!(run_criterion(42, &Scenario::canonical()).is_err());
    }
}
