//! Named experiments: each turns a resolved configuration into tables and verdicts.

use std::f64::consts::PI;

use mindet_core::grid::{Distribution1D, Grid1D};
use mindet_core::moments::{
    alpha_dependent_expectation, carleman_sum_from_logs, cosine_identity_check, krein_integral,
    lognormal_log_even_moments, lognormal_moments, moments_by_charfun, moments_by_quadrature, CarlemanVerdict,
    KreinCase, KreinVerdict, LogNormalFamily,
};
use mindet_core::phasespace::{
    cross_mixed_moment, current, current_forms, dual_current, group_delay, group_delay_two_lobe_closed_form,
    wigner_with, MIXED_MAX_ORDER,
};
use mindet_core::representations::{observable_sweep, oscillator_basis, oscillator_grid};
use mindet_core::spectral::{
    char_function_of_distribution, char_function_two_lobe, dirichlet_kernel, momentum_distribution, output_grid,
    to_momentum_with, WindowAutocorrelation,
};
use mindet_core::verify::{run_criterion, Check, CRITERIA};
use mindet_core::wavepacket::build_superposition;
use mindet_core::{GWeight, MomentReport, WignerOptions};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{alpha_label, ConfigError, Resolved};
use crate::emit::{ResultBundle, Table};

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// |ψ(x)|² across the α sweep.
    PositionDensity,
    /// P(p; α) from the FFT pipeline, with its moments.
    MomentumDensity,
    /// Characteristic functions M(θ), assembled and direct.
    Charfun,
    /// Moments by quadrature and by θ-derivatives; the cosine cancellation integrals.
    Moments,
    /// ⟨g(p)⟩ for a Gaussian and a δ weight.
    AlphaExpectations,
    /// Probability current j(x).
    Current,
    /// Group delay τ(p) against its two-lobe closed form.
    GroupDelay,
    /// Wigner function, marginals and mixed moments.
    Wigner,
    /// N-lobe Dirichlet fringes.
    Multi,
    /// Oscillator eigenbasis distributions and ⟨Hᵏ⟩.
    Observable,
    /// Superposition built in momentum space.
    Dual,
    /// Log-normal family with sinusoidal perturbation.
    Lognormal,
    /// Carleman and Krein diagnostics.
    Criteria,
    /// All acceptance criteria on the configured scenario.
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PositionDensity => "position-density",
            Experiment::MomentumDensity => "momentum-density",
            Experiment::Charfun => "charfun",
            Experiment::Moments => "moments",
            Experiment::AlphaExpectations => "alpha-expectations",
            Experiment::Current => "current",
            Experiment::GroupDelay => "group-delay",
            Experiment::Wigner => "wigner",
            Experiment::Multi => "multi",
            Experiment::Observable => "observable",
            Experiment::Dual => "dual",
            Experiment::Lognormal => "lognormal",
            Experiment::Criteria => "criteria",
            Experiment::Verify => "verify",
        }
    }

    /// Rejects configurations this experiment cannot run, before any numerics.
    pub fn preflight(self, r: &Resolved) -> Result<()> {
        match self {
            Experiment::AlphaExpectations
            | Experiment::GroupDelay
            | Experiment::Observable
            | Experiment::Dual
            | Experiment::Verify => r.require_two_lobe_sweep(self.name())?,
            Experiment::Moments | Experiment::Multi => r.require_linear(self.name())?,
            _ => {}
        }
        if matches!(self, Experiment::Wigner | Experiment::Verify) {
            r.require_wigner_grids()?;
        }
        Ok(())
    }

    pub fn run(self, r: &Resolved) -> Result<ResultBundle> {
        self.preflight(r)?;
        let mut b = ResultBundle::new(self.name(), r.echo(), r.hash());
        match self {
            Experiment::PositionDensity => position_density(r, &mut b)?,
            Experiment::MomentumDensity => momentum_density(r, &mut b)?,
            Experiment::Charfun => charfun(r, &mut b)?,
            Experiment::Moments => moments(r, &mut b)?,
            Experiment::AlphaExpectations => alpha_expectations(r, &mut b)?,
            Experiment::Current => probability_current(r, &mut b)?,
            Experiment::GroupDelay => delay(r, &mut b)?,
            Experiment::Wigner => wigner_experiment(r, &mut b)?,
            Experiment::Multi => multi(r, &mut b)?,
            Experiment::Observable => observable(r, &mut b)?,
            Experiment::Dual => dual(r, &mut b)?,
            Experiment::Lognormal => lognormal(r, &mut b)?,
            Experiment::Criteria => criteria(&mut b)?,
            Experiment::Verify => verify(r, &mut b)?,
        }
        Ok(b)
    }
}

/// `alpha_<label>`, or `explicit` for a fixed phase set.
fn suffix(label: &str) -> String {
    if label == "explicit" {
        label.into()
    } else {
        format!("alpha_{label}")
    }
}

fn column(prefix: &str, label: &str) -> String {
    format!("{prefix}_{}", suffix(label))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest pointwise gap over all pairs.
fn max_pair_gap(curves: &[Vec<f64>]) -> f64 {
    let mut gap: f64 = 0.0;
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            gap = gap.max(max_abs_diff(a, b));
        }
    }
    gap
}

fn position_density(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let sweep = r.sweep()?;
    let curves = sweep
        .par_iter()
        .map(|(_, spec)| Ok(build_superposition(spec, &x_grid, s.hbar)?.wave.density().density().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("position_density").column("x", x_grid.points().collect());
    for ((label, _), c) in sweep.iter().zip(&curves) {
        t = t.column(column("density", label), c.clone());
    }
    b.table(t);
    b.check(Check::at_most("position density max |delta| across the sweep", max_pair_gap(&curves), 1e-12));
    Ok(())
}

fn momentum_density(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let sweep = r.sweep()?;
    let band = s.momentum_options();
    let full = s.full_band_options();
    let runs = sweep
        .par_iter()
        .map(|(_, spec)| {
            Ok((
                momentum_distribution(spec, &x_grid, s.hbar, &band)?,
                momentum_distribution(spec, &x_grid, s.hbar, &full)?.pipeline,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let p_grid = *runs[0].0.pipeline.grid();
    let mut t = Table::new("momentum_density").column("p", p_grid.points().collect());
    for ((label, _), (md, _)) in sweep.iter().zip(&runs) {
        t = t.column(column("density", label), md.pipeline.density().to_vec());
    }
    b.table(t);

    let discrepancy = runs.iter().map(|(md, _)| md.discrepancy).fold(0.0, f64::max);
    b.check(Check::at_most("pipeline vs closed form, relative to peak", discrepancy, 1e-6));
    let curves: Vec<Vec<f64>> = runs.iter().map(|(md, _)| md.pipeline.density().to_vec()).collect();
    if curves.len() > 1 {
        b.check(Check::above("max pointwise |P_a - P_b|", max_pair_gap(&curves), 0.1));
    }

    let full_densities: Vec<Distribution1D> = runs.into_iter().map(|(_, d)| d).collect();
    let keys: Vec<f64> = (0..sweep.len()).map(|i| i as f64).collect();
    let report = MomentReport::build(&keys, &full_densities, s.n_max)?;
    let mut t = Table::new("momentum_moments").column("n", report.orders.iter().map(|&n| n as f64).collect());
    for ((label, _), row) in sweep.iter().zip(&report.table) {
        t = t.column(column("moment", label), row.clone());
    }
    b.table(t.column("relative_spread", report.sensitivity.clone()));
    if sweep.len() > 1 {
        b.check(Check::at_most(
            format!("moment spread across the sweep, n <= {}", s.n_max),
            report.max_sensitivity(),
            1e-6,
        ));
        b.note("max L1 over pairs", report.distribution_distance);
    }
    Ok(())
}

fn charfun(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let theta = s.theta_grid()?;
    let x_grid = s.x_grid()?;
    let sweep = r.sweep()?;
    let mf = WindowAutocorrelation::new(&s.window, s.hbar);
    let window: Vec<Complex64> = theta.points().map(|t| mf.eval(t)).collect();
    let radius = s.window.extent / s.hbar;
    let beyond = theta
        .points()
        .zip(&window)
        .filter(|(t, _)| t.abs() >= radius)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    b.check(Check::at_most("max |M_F(theta)| for |theta| >= a/hbar", beyond, 0.0));

    let mut t = Table::new("charfun")
        .column("theta", theta.points().collect())
        .column("re_window", window.iter().map(|v| v.re).collect())
        .column("im_window", window.iter().map(|v| v.im).collect());
    let mut gap: f64 = 0.0;
    let two_lobe = s.lobes == 2;
    for (label, spec) in &sweep {
        let p = momentum_distribution(spec, &x_grid, s.hbar, &s.full_band_options())?.pipeline;
        let direct = char_function_of_distribution(&p, &theta);
        t = t
            .column(column("re", label), direct.values.iter().map(|v| v.re).collect())
            .column(column("im", label), direct.values.iter().map(|v| v.im).collect());
        if two_lobe {
            let assembled = char_function_two_lobe(spec, &theta, s.hbar);
            gap = gap.max(assembled.max_difference(&direct)?);
        }
    }
    b.table(t);
    if two_lobe {
        b.check(Check::at_most("max |M_assembled - M_direct|", gap, 1e-6));
    }
    Ok(())
}

fn moments(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let theta = s.theta_grid()?;
    let sweep = r.sweep()?;
    let densities = sweep
        .par_iter()
        .map(|(_, spec)| Ok(momentum_distribution(spec, &x_grid, s.hbar, &s.full_band_options())?.pipeline))
        .collect::<Result<Vec<_>>>()?;
    let report = MomentReport::build(&s.alphas, &densities, s.n_max)?;
    let mut quad = Table::new("moments_quadrature").column("n", report.orders.iter().map(|&n| n as f64).collect());
    for ((label, _), row) in sweep.iter().zip(&report.table) {
        quad = quad.column(column("moment", label), row.clone());
    }
    b.table(quad.column("relative_spread", report.sensitivity.clone()));
    b.check(Check::at_most(
        format!("quadrature moment spread across alpha, n <= {}", s.n_max),
        report.max_sensitivity(),
        1e-6,
    ));
    if let Some(n) = report.tail_flags.iter().position(|&f| f) {
        b.note("first order flagged divergent", n as f64);
    }

    let cn = s.charfun_n_max;
    let mut deriv = Table::new("moments_charfun").column("n", (0..=cn).map(|n| n as f64).collect());
    let mut gap: f64 = 0.0;
    for ((label, spec), p) in sweep.iter().zip(&densities) {
        let m = if s.lobes == 2 {
            char_function_two_lobe(spec, &theta, s.hbar)
        } else {
            char_function_of_distribution(p, &theta)
        };
        let by_charfun = moments_by_charfun(&m, cn)?;
        let by_quad = moments_by_quadrature(p, cn)?;
        for (c, q) in by_charfun.iter().zip(&by_quad) {
            gap = gap.max((c.value - q.value).abs() / q.absolute.max(f64::MIN_POSITIVE));
        }
        deriv = deriv.column(column("moment", label), by_charfun.iter().map(|c| c.value).collect());
    }
    b.table(deriv);
    b.check(Check::at_most(format!("derivative vs quadrature moments, relative, n <= {cn}"), gap, 1e-4));

    let mut cos = Table::new("cancellation").column("n", (0..=s.n_max).map(|n| n as f64).collect());
    let mut worst: f64 = 0.0;
    for &a in &s.alphas {
        let c = cosine_identity_check(&s.window, s.shift, a, s.n_max, s.hbar, &s.numerics)?;
        worst = worst.max(c.cosine.iter().map(|v| v.abs()).fold(0.0, f64::max));
        cos = cos.column(column("cosine", &alpha_label(a)), c.cosine);
    }
    b.table(cos);
    b.check(Check::at_most("max |int p^n |F|^2 cos(pL/hbar - alpha) dp|", worst, 1e-6));
    Ok(())
}

fn alpha_expectations(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let spec = s.spec(0.0)?;
    let gauss = alpha_dependent_expectation(&spec, &GWeight::gaussian(1.0)?, &s.alphas, s.hbar, &s.numerics)?;
    let x_grid = s.x_grid()?;
    let runs = s
        .alphas
        .par_iter()
        .map(|&a| Ok(momentum_distribution(&s.spec(a)?, &x_grid, s.hbar, &s.momentum_options())?))
        .collect::<Result<Vec<_>>>()?;
    let i0 = runs[0]
        .pipeline
        .grid()
        .index_of(0.0)
        .ok_or_else(|| ConfigError("p = 0 is not on the momentum grid".into()))?;
    let f0 = runs[0].window_spectrum.values()[i0].norm_sqr();
    let delta: Vec<f64> = runs.iter().map(|md| md.pipeline.density()[i0]).collect();
    let delta_closed: Vec<f64> = s.alphas.iter().map(|a| f0 * (1.0 + a.cos())).collect();
    let values: Vec<f64> = gauss.iter().map(|e| e.value).collect();
    b.table(
        Table::new("alpha_expectations")
            .column("alpha", s.alphas.clone())
            .column("gaussian", values.clone())
            .column("gaussian_interference", gauss.iter().map(|e| e.interference).collect())
            .column("delta", delta.clone())
            .column("delta_closed_form", delta_closed.clone()),
    );
    if s.alphas.len() > 1 {
        let hi = values.iter().cloned().fold(f64::MIN, f64::max);
        let lo = values.iter().cloned().fold(f64::MAX, f64::min);
        b.check(Check::above("max - min <exp(-p^2)> over alpha", hi - lo, 1e-3));
    }
    b.check(Check::at_most(
        "max |P(0; alpha) - |F(0)|^2 (1 + cos alpha)|",
        max_abs_diff(&delta, &delta_closed),
        1e-6,
    ));
    b.note("|F(0)|^2", f0);
    Ok(())
}

fn probability_current(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let sweep = r.sweep()?;
    let mut t = Table::new("current").column("x", x_grid.points().collect());
    let mut curves = Vec::new();
    let (mut forms, mut halved, mut total): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (label, spec) in &sweep {
        let sup = build_superposition(spec, &x_grid, s.hbar)?;
        let j = current(&sup.wave)?;
        total = total.max((j.iter().sum::<f64>() * x_grid.step()).abs());
        if let (2, Some(alpha)) = (s.lobes, spec.alpha()) {
            let f = current_forms(&sup.lobes[0], &sup.lobes[1], alpha)?;
            forms = forms
                .max(max_abs_diff(&f.bilinear, &f.amplitude_phase))
                .max(max_abs_diff(&f.bilinear, &f.symmetric));
            halved = halved.max(max_abs_diff(&f.bilinear, &f.halved_cross_terms));
        }
        t = t.column(column("current", label), j.clone());
        curves.push(j);
    }
    b.table(t);
    if s.lobes == 2 {
        b.check(Check::at_most("amplitude-phase forms vs hbar Im(psi* psi')", forms, 1e-8));
        b.note("form with halved cross terms, max |delta|", halved);
    }
    b.note("max |int j dx|", total);
    b.note("max |j_a - j_b|", max_pair_gap(&curves));
    Ok(())
}

fn delay(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let opts = s.momentum_options();
    let runs = s
        .alphas
        .par_iter()
        .map(|&a| {
            let spec = s.spec(a)?;
            let psi = build_superposition(&spec, &x_grid, s.hbar)?.wave;
            Ok((
                group_delay(&psi, &opts)?,
                group_delay_two_lobe_closed_form(&spec, &x_grid, s.hbar, &opts)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("group_delay").column("p", runs[0].0.p_grid.points().collect());
    let mut gap: f64 = 0.0;
    for (&a, (tau, closed)) in s.alphas.iter().zip(&runs) {
        let label = alpha_label(a);
        gap = gap.max(max_abs_diff(&tau.values, &closed.values));
        t = t
            .column(column("tau", &label), tau.values.clone())
            .column(column("closed_form", &label), closed.values.clone());
    }
    b.table(t);
    b.check(Check::at_most("tau(p) vs (2 eta' - L)|F|^2 cos^2((pL/hbar - alpha)/2)", gap, 1e-6));
    Ok(())
}

fn wigner_experiment(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let x_grid = s.x_grid()?;
    let band = s.momentum_options();
    let p_grid = output_grid(&x_grid, s.hbar, &band)?;
    let opts = WignerOptions {
        oversample: s.numerics.oversample,
        ..WignerOptions::default()
    };
    let orders: Vec<(usize, usize)> = (0..=MIXED_MAX_ORDER)
        .flat_map(|n| (0..=MIXED_MAX_ORDER - n).map(move |m| (n, m)))
        .collect();
    let mut mixed = Table::new("mixed_moments")
        .column("n", orders.iter().map(|o| o.0 as f64).collect())
        .column("m", orders.iter().map(|o| o.1 as f64).collect());
    let (mut pos, mut mom, mut j_gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut tables = Vec::new();
    let (xs, ps) = (r.output.wigner_x_stride, r.output.wigner_p_stride);
    for (label, spec) in &r.sweep()? {
        let psi = build_superposition(spec, &x_grid, s.hbar)?.wave;
        let w = wigner_with(&psi, &p_grid, &opts)?;
        pos = pos.max(max_abs_diff(&w.position_marginal(), psi.density().density()));
        let phi = to_momentum_with(&psi, &band)?;
        mom = mom.max(max_abs_diff(&w.momentum_marginal(), phi.density().density()));
        j_gap = j_gap.max(max_abs_diff(&w.local_mean_momentum(), &current(&psi)?));
        b.note(format!("min W, {label}"), w.min());

        let (mut cx, mut cp, mut cv) = (Vec::new(), Vec::new(), Vec::new());
        for i in (0..x_grid.count()).step_by(xs) {
            let row = w.row(i);
            for k in (0..p_grid.count()).step_by(ps) {
                cx.push(x_grid.point(i));
                cp.push(p_grid.point(k));
                cv.push(row[k]);
            }
        }
        b.table(
            Table::new(format!("wigner_{}", suffix(label)))
                .column("x", cx)
                .column("p", cp)
                .column("value", cv),
        );
        let table: Vec<(f64, f64)> = orders
            .iter()
            .map(|&(n, m)| (w.mixed_moment(n, m), w.mixed_moment_scale(n, m)))
            .collect();
        mixed = mixed.column(column("moment", label), table.iter().map(|v| v.0).collect());
        tables.push(table);
    }
    b.table(mixed);
    b.check(Check::at_most("position marginal vs |psi|^2", pos, 1e-6));
    b.check(Check::at_most("momentum marginal vs |phi|^2", mom, 1e-6));
    b.check(Check::at_most("j(x) vs int p W dp", j_gap, 1e-6));
    if tables.len() > 1 {
        let mut spread: f64 = 0.0;
        for k in 0..orders.len() {
            let scale = tables.iter().map(|t| t[k].1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            for t in &tables {
                spread = spread.max((t[k].0 - tables[0][k].0).abs() / scale);
            }
        }
        b.check(Check::at_most("mixed moment spread across the sweep, relative", spread, 1e-6));
    }

    let sup = build_superposition(&r.sweep()?[0].1, &x_grid, s.hbar)?;
    let mut cross: f64 = 0.0;
    for &(n, m) in &orders {
        let c = cross_mixed_moment(&sup.lobes[0], &sup.lobes[1], n, m, &p_grid)?;
        cross = cross.max(Complex64::new(c.quadrature[0], c.quadrature[1]).norm());
    }
    b.check(Check::at_most("disjoint-lobe cross moments, n + m <= 4", cross, 1e-8));
    Ok(())
}

fn multi(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let n = s.lobes;
    let x_grid = s.x_grid()?;
    let opts = s.momentum_options();
    let runs = s
        .alphas
        .par_iter()
        .map(|&a| Ok(momentum_distribution(&s.spec(a)?, &x_grid, s.hbar, &opts)?))
        .collect::<Result<Vec<_>>>()?;
    let p_grid = *runs[0].pipeline.grid();
    let window = runs[0].window_density();
    let mut t = Table::new("multi_density")
        .column("p", p_grid.points().collect())
        .column("window_density", window.density().to_vec());
    let mut discrepancy: f64 = 0.0;
    let mut ratio_gap: f64 = 0.0;
    for (&a, md) in s.alphas.iter().zip(&runs) {
        let label = alpha_label(a);
        discrepancy = discrepancy.max(md.discrepancy);
        t = t
            .column(column("density", &label), md.pipeline.density().to_vec())
            .column(column("closed_form", &label), md.closed_form.density().to_vec());
        if n >= 3 {
            let (measured, predicted) = peak_ratio(md.pipeline.density(), window.density(), &p_grid, a, r)?;
            b.note(format!("main/side peak ratio, alpha = {label}"), measured);
            ratio_gap = ratio_gap.max((measured - predicted).abs());
        }
    }
    b.table(t);
    b.check(Check::at_most(format!("N = {n} pipeline vs Dirichlet closed form, relative"), discrepancy, 1e-6));
    if n >= 3 {
        b.check(Check::at_most("main/side peak ratio vs |sin(Nx/2)/sin(x/2)|^2", ratio_gap, 1e-4));
    }
    Ok(())
}

/// Interference factor `P/|F|²` at the main fringe peak over its value at the
/// first side lobe, both on the grid, with the kernel's prediction at the same points.
fn peak_ratio(density: &[f64], window: &[f64], p_grid: &Grid1D, alpha: f64, r: &Resolved) -> Result<(f64, f64)> {
    let s = &r.scenario;
    let n = s.lobes as f64;
    let k = s.shift / s.hbar;
    let factor = |i: usize| density[i] / window[i];
    let main = p_grid.nearest_index(alpha / k);
    let (lo, hi) = (alpha / k + 2.0 * PI / (n * k), alpha / k + 4.0 * PI / (n * k));
    let side = (0..p_grid.count())
        .filter(|&i| (lo..=hi).contains(&p_grid.point(i)))
        .max_by(|&i, &j| factor(i).total_cmp(&factor(j)))
        .ok_or_else(|| ConfigError("momentum grid does not resolve the first side lobe".into()))?;
    let kernel = |i: usize| dirichlet_kernel(s.lobes, alpha - p_grid.point(i) * k);
    Ok((factor(main) / factor(side), kernel(main) / kernel(side)))
}

fn observable(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let bs = &s.basis;
    let center = s.basis_center();
    let grid = oscillator_grid(center, bs.length_scale, bs.size, s.numerics.x_step)?;
    let basis = oscillator_basis(&grid, bs.size, s.hbar, center, bs.length_scale)?;
    let sweep = observable_sweep(&s.spec(0.0)?, &s.alphas, &basis, 4)?;
    let mut probs = Table::new("observable_probabilities")
        .column("n", (0..bs.size).map(|n| n as f64).collect())
        .column("eigenvalue", sweep.eigenvalues.clone());
    let mut moments = Table::new("observable_moments").column("k", (0..=4).map(|k| k as f64).collect());
    for ((&a, p), m) in s.alphas.iter().zip(&sweep.probabilities).zip(&sweep.moments) {
        let label = alpha_label(a);
        probs = probs.column(column("probability", &label), p.clone());
        moments = moments.column(column("moment", &label), m.clone());
    }
    b.table(probs);
    b.table(moments.column("relative_spread", sweep.moment_spread.clone()));
    if s.alphas.len() > 1 {
        b.check(Check::above("max total-variation distance over alpha pairs", sweep.tv_gap, 1e-3));
        let spread = sweep.moment_spread.iter().cloned().fold(0.0, f64::max);
        b.check(Check::at_most("<H^k> spread across alpha, k <= 4", spread, 1e-5));
    }
    b.note("captured norm", sweep.min_captured_norm);
    for (k, (c, rel)) in sweep.cross_terms.iter().zip(&sweep.cross_term_relative).enumerate() {
        b.note(format!("|int psi2* H^{k} psi1|"), *c);
        b.note(format!("|int psi2* H^{k} psi1| / (|H^{k} psi1| |psi2|)"), *rel);
    }
    Ok(())
}

fn dual(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let s = &r.scenario;
    let p_grid = s.x_grid()?;
    let opts = s.full_band_options();
    let runs = s
        .alphas
        .par_iter()
        .map(|&a| Ok(dual_current(&s.spec(a)?, &p_grid, s.hbar, &opts)?))
        .collect::<Result<Vec<_>>>()?;
    let mut pos = Table::new("dual_position").column("x", runs[0].x_grid.points().collect());
    let mut delay = Table::new("dual_group_delay").column("p", runs[0].group_delay.p_grid.points().collect());
    for (&a, d) in s.alphas.iter().zip(&runs) {
        let label = alpha_label(a);
        pos = pos
            .column(column("density", &label), d.density.clone())
            .column(column("closed_form", &label), d.density_closed_form.clone())
            .column(column("current", &label), d.current.clone());
        delay = delay.column(column("tau", &label), d.group_delay.values.clone());
    }
    b.table(pos);
    b.table(delay);
    let fold = |f: &dyn Fn(&mindet_core::phasespace::DualCurrent) -> f64| runs.iter().map(f).fold(0.0, f64::max);
    b.check(Check::at_most(
        "|psi(x)|^2 vs |H|^2 [1 + cos(xL/hbar + alpha)]",
        fold(&|d| max_abs_diff(&d.density, &d.density_closed_form)),
        1e-6,
    ));
    b.note(
        "|psi(x)|^2 vs |H|^2 [1 + cos(xL/hbar - alpha)]",
        fold(&|d| max_abs_diff(&d.density, &d.density_reflected_phase)),
    );
    b.note("j(x) vs R^2 (S1' + L/2)", fold(&|d| max_abs_diff(&d.current, &d.shifted_pair_form)));
    let densities = runs
        .iter()
        .map(|d| Ok(Distribution1D::new(d.x_grid, d.density.clone())?))
        .collect::<Result<Vec<_>>>()?;
    let report = MomentReport::build(&s.alphas, &densities, s.n_max)?;
    b.check(Check::at_most(
        format!("position moment spread, n <= {}", s.n_max),
        report.max_sensitivity(),
        1e-6,
    ));
    if runs.len() > 1 {
        let currents: Vec<Vec<f64>> = runs.iter().map(|d| d.current.clone()).collect();
        b.check(Check::above("max |j_a(x) - j_b(x)|", max_pair_gap(&currents), 1e-3));
        let delays: Vec<Vec<f64>> = runs.iter().map(|d| d.group_delay.values.clone()).collect();
        b.check(Check::at_most("dual group delay spread across alpha", max_pair_gap(&delays), 1e-8));
    }
    Ok(())
}

fn lognormal(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    let n_max = r.scenario.n_max;
    let x_grid = Grid1D::new(0.0, 1.0 / 64.0, 20 * 64 + 1)?;
    let mut dens = Table::new("lognormal_density").column("x", x_grid.points().collect());
    let exact = lognormal_moments(n_max);
    let mut moments = Table::new("lognormal_moments")
        .column("n", (0..=n_max).map(|n| n as f64).collect())
        .column("closed_form", exact.clone());
    for &beta in &r.betas {
        let fam = LogNormalFamily::new(beta)?;
        let label = alpha_label(beta);
        dens = dens.column(format!("density_beta_{label}"), fam.density_on(&x_grid)?.density().to_vec());
        let m = fam.moments(n_max);
        let rel = m
            .iter()
            .zip(&exact)
            .take(5)
            .map(|(v, e)| (v - e).abs() / e)
            .fold(0.0, f64::max);
        b.check(Check::at_most(format!("beta = {beta}: moments n <= 4 vs e^(n^2/2), relative"), rel, 1e-3));
        moments = moments.column(format!("quadrature_beta_{label}"), m);
    }
    b.table(dens);
    b.table(moments);
    Ok(())
}

fn criteria(b: &mut ResultBundle) -> Result<()> {
    let k_max = 40;
    let ln = carleman_sum_from_logs(&lognormal_log_even_moments(k_max))?;
    let gaussian_logs: Vec<f64> = (1..=k_max)
        .map(|k| (1..=k).map(|j| ((2 * j - 1) as f64).ln()).sum())
        .collect();
    let g = carleman_sum_from_logs(&gaussian_logs)?;
    b.table(
        Table::new("carleman")
            .column("k", (1..=k_max).map(|k| k as f64).collect())
            .column("lognormal_term", ln.terms.clone())
            .column("lognormal_partial_sum", ln.partial_sums.clone())
            .column("gaussian_term", g.terms.clone())
            .column("gaussian_partial_sum", g.partial_sums.clone()),
    );
    b.check(Check::holds("log-normal Carleman verdict is not determinate", ln.verdict != CarlemanVerdict::SuggestsDeterminate));
    b.check(Check::holds("Gaussian Carleman sums diverge", g.verdict == CarlemanVerdict::SuggestsDeterminate));
    b.note("log-normal Carleman harmonic coefficient", ln.harmonic_coefficient);
    b.note("Gaussian Carleman harmonic coefficient", g.harmonic_coefficient);

    let u = Grid1D::symmetric(36.0, 1.0 / 64.0)?;
    let krein = krein_integral(&LogNormalFamily::new(0.0)?.log_density_on(&u)?, KreinCase::Stieltjes)?;
    b.check(Check::holds(
        "log-normal Krein (Stieltjes) suggests indeterminate",
        krein.verdict == KreinVerdict::SuggestsIndeterminate && krein.value.is_finite(),
    ));
    b.note("log-normal Krein integral", krein.value);
    let mut values = Vec::new();
    let extents = [4.0, 8.0, 16.0, 32.0];
    for &e in &extents {
        let grid = Grid1D::symmetric(e, 1.0 / 64.0)?;
        let d = Distribution1D::from_fn(grid, |x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt())?;
        values.push(krein_integral(&d, KreinCase::Hamburger)?.value);
    }
    b.table(
        Table::new("krein_gaussian")
            .column("extent", extents.to_vec())
            .column("hamburger_integral", values),
    );
    Ok(())
}

fn verify(r: &Resolved, b: &mut ResultBundle) -> Result<()> {
    for &id in &CRITERIA {
        let o = run_criterion(id, &r.scenario)?;
        println!("{}", o.summary_line());
        for c in o.checks {
            b.check(Check {
                name: format!("criterion {id}: {}", c.name),
                ..c
            });
        }
        for n in o.notes {
            b.note(format!("criterion {id}: {}", n.name), n.value);
        }
    }
    Ok(())
}
