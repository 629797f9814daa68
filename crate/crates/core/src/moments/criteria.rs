//! Carleman and Krein diagnostics. Both criteria are sufficient conditions only
//! and a finite computation cannot certify divergence, so the verdicts are
//! heuristic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{trapezoid, Distribution1D};

/// Floor applied to densities before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CarlemanVerdict {
    /// Partial sums keep growing at least half as fast as a harmonic series.
    SuggestsDeterminate,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlemanReport {
    /// `tₖ = ⟨x^{2k}⟩^{−1/2k}`, `k = 1..=n`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `c` of the least-squares fit `tₖ ≈ c/k`.
    pub harmonic_coefficient: f64,
    /// Last-quarter increment over the fitted harmonic increment.
    pub tail_ratio: f64,
    pub verdict: CarlemanVerdict,
}

/// Carleman partial sums from `⟨x^{2k}⟩`, `k = 1..=n`.
pub fn carleman_sum(even_moments: &[f64]) -> Result<CarlemanReport> {
    if let Some((i, m)) = even_moments
        .iter()
        .enumerate()
        .find(|(_, m)| !(**m > 0.0) || !m.is_finite())
    {
        return Err(Error::InvalidMomentSequence(format!(
            "moment of order {} is {m}; even moments must be finite and positive",
            2 * (i + 1)
        )));
    }
    let logs: Vec<f64> = even_moments.iter().map(|m| m.ln()).collect();
    carleman_sum_from_logs(&logs)
}

/// Same, from `ln⟨x^{2k}⟩`; avoids overflow for fast-growing sequences.
pub fn carleman_sum_from_logs(log_even_moments: &[f64]) -> Result<CarlemanReport> {
    let n = log_even_moments.len();
    if n < 4 {
        return Err(Error::InvalidMomentSequence(format!(
            "need at least 4 even moments, got {n}"
        )));
    }
    if let Some(i) = log_even_moments.iter().position(|l| !l.is_finite()) {
        return Err(Error::InvalidMomentSequence(format!(
            "moment of order {} is not finite and positive",
            2 * (i + 1)
        )));
    }
    let terms: Vec<f64> = log_even_moments
        .iter()
        .enumerate()
        .map(|(i, l)| (-l / (2.0 * (i + 1) as f64)).exp())
        .collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let (num, den) = terms
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(a, b), (i, t)| {
            let k = (i + 1) as f64;
            (a + t / k, b + 1.0 / (k * k))
        });
    let c = num / den;
    let q = (n / 4).max(1);
    let tail: f64 = terms[n - q..].iter().sum();
    let harmonic: f64 = (n - q + 1..=n).map(|k| c / k as f64).sum();
    let tail_ratio = if harmonic > 0.0 { tail / harmonic } else { 0.0 };
    let verdict = if tail_ratio >= 0.5 {
        CarlemanVerdict::SuggestsDeterminate
    } else {
        CarlemanVerdict::Inconclusive
    };
    Ok(CarlemanReport {
        terms,
        partial_sums,
        harmonic_coefficient: c,
        tail_ratio,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KreinCase {
    /// `−∫ ln P(x) / (1 + x²) dx` over the real line.
    Hamburger,
    /// `−∫₀^∞ ln f(x) / (√x (1 + x)) dx`, evaluated in `u = ln x`. The
    /// distribution passed in is the density `Q(u)` of `ln X`, so
    /// `f(eᵘ) = Q(u) e^{−u}` and the integrand becomes `(u − ln Q) / (2 cosh(u/2))`.
    Stieltjes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KreinVerdict {
    /// The truncated integral has stabilized.
    SuggestsIndeterminate,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KreinReport {
    pub case: KreinCase,
    /// Integral over the grid.
    pub value: f64,
    /// Part of `value` from the outer quarter (by distance from the grid center).
    pub outer_contribution: f64,
    pub outer_fraction: f64,
    /// Extrapolated contribution beyond the grid; `None` if the fitted tail
    /// does not decay fast enough to be integrable.
    pub tail_estimate: Option<f64>,
    pub verdict: KreinVerdict,
}

pub fn krein_integral(d: &Distribution1D, case: KreinCase) -> Result<KreinReport> {
    let g = d.grid();
    let integrand: Vec<f64> = g
        .points()
        .zip(d.density())
        .map(|(x, &p)| {
            let lp = p.max(LOG_FLOOR).ln();
            match case {
                KreinCase::Hamburger => -lp / (1.0 + x * x),
                KreinCase::Stieltjes => (x - lp) / (2.0 * (x / 2.0).cosh()),
            }
        })
        .collect();
    let value = trapezoid(&integrand, g.step());
    let center = g.origin() + 0.5 * g.extent();
    let half = 0.5 * g.extent();
    let outer: Vec<f64> = g
        .points()
        .zip(&integrand)
        .map(|(x, v)| if (x - center).abs() > 0.75 * half { *v } else { 0.0 })
        .collect();
    let outer_contribution = trapezoid(&outer, g.step());
    let outer_fraction = if value != 0.0 {
        (outer_contribution / value).abs()
    } else {
        f64::INFINITY
    };
    let verdict = if outer_fraction < 0.01 {
        KreinVerdict::SuggestsIndeterminate
    } else {
        KreinVerdict::Inconclusive
    };
    let tail_estimate = tail_estimate(g.points().collect(), &integrand, center, half, case);
    Ok(KreinReport {
        case,
        value,
        outer_contribution,
        outer_fraction,
        tail_estimate,
        verdict,
    })
}

/// Least-squares fit of the outer-quarter integrand on each side:
/// `|I| ≈ c r^{−q}` (Hamburger) or `|I| ≈ c e^{−b r}` (Stieltjes), `r = |x − center|`,
/// integrated from the grid edge to infinity.
fn tail_estimate(xs: Vec<f64>, integrand: &[f64], center: f64, half: f64, case: KreinCase) -> Option<f64> {
    let mut total = 0.0;
    for side in [-1.0, 1.0] {
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(integrand)
            .filter(|(x, v)| {
                let r = (*x - center) * side;
                r > 0.75 * half && v.abs() > 0.0
            })
            .map(|(x, v)| ((x - center).abs(), v.abs().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let t = |r: f64| match case {
            KreinCase::Hamburger => r.ln(),
            KreinCase::Stieltjes => r,
        };
        let n = pts.len() as f64;
        let mx = pts.iter().map(|(r, _)| t(*r)).sum::<f64>() / n;
        let my = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|(r, y)| (t(*r) - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(r, _)| (t(*r) - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let decay = -slope;
        match case {
            KreinCase::Hamburger => {
                if decay <= 1.0 {
                    return None;
                }
                total += intercept.exp() * half.powf(1.0 - decay) / (decay - 1.0);
            }
            KreinCase::Stieltjes => {
                if decay <= 0.0 {
                    return None;
                }
                total += (intercept - decay * half).exp() / decay;
            }
        }
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use std::f64::consts::{E, PI};

    fn gaussian_log_even(n: usize) -> Vec<f64> {
        // ln (2k−1)!!
        (1..=n)
            .map(|k| (1..=k).map(|j| ((2 * j - 1) as f64).ln()).sum())
            .collect()
    }

    #[test]
    fn gaussian_moments_diverge() {
        let r = carleman_sum_from_logs(&gaussian_log_even(60)).unwrap();
        assert_eq!(r.verdict, CarlemanVerdict::SuggestsDeterminate);
        // tₖ ~ √(e/2k)
        let k = 60.0;
        assert!((r.terms[59] / (E / (2.0 * k)).sqrt() - 1.0).abs() < 0.05);
        assert!(r.partial_sums[59] > r.partial_sums[29] * 1.3);
    }

    #[test]
    fn lognormal_moments_converge() {
        let logs: Vec<f64> = (1..=40).map(|k| 2.0 * (k * k) as f64).collect();
        let r = carleman_sum_from_logs(&logs).unwrap();
        assert_eq!(r.verdict, CarlemanVerdict::Inconclusive);
        assert!((r.partial_sums[39] - 1.0 / (E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn point_mass_suggests_determinate() {
        let r = carleman_sum(&[1.0; 32]).unwrap();
        assert_eq!(r.verdict, CarlemanVerdict::SuggestsDeterminate);
        assert_eq!(r.partial_sums[31], 32.0);
    }

    #[test]
    fn nonpositive_moment_is_rejected() {
        let err = carleman_sum(&[1.0, 2.0, 0.0, 4.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidMomentSequence(_)));
        assert!(err.to_string().contains("invalid moment sequence"));
    }

    #[test]
    fn gaussian_hamburger_integral_is_inconclusive() {
        let g = Grid1D::symmetric(30.0, 0.01).unwrap();
        let d = Distribution1D::from_fn(g, |x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt()).unwrap();
        let r = krein_integral(&d, KreinCase::Hamburger).unwrap();
        assert_eq!(r.verdict, KreinVerdict::Inconclusive);
        assert!(r.outer_fraction > 0.1);
        assert_eq!(r.tail_estimate, None);
    }

    #[test]
    fn lognormal_stieltjes_integral_is_finite() {
        // Wide enough for the tail, narrow enough that Q(u) stays above the log floor.
        let g = Grid1D::symmetric(36.0, 1.0 / 64.0).unwrap();
        let d = Distribution1D::from_fn(g, |u| (-u * u / 2.0).exp() / (2.0 * PI).sqrt()).unwrap();
        let r = krein_integral(&d, KreinCase::Stieltjes).unwrap();
        assert_eq!(r.verdict, KreinVerdict::SuggestsIndeterminate);
        let exact = PI.powi(3) / 2.0 + PI / 2.0 * (2.0 * PI).ln();
        let truncated = (r.value - exact).abs();
        assert!(truncated < 1e-4, "{} vs {exact}", r.value);
        let extrapolated = (r.value + r.tail_estimate.unwrap() - exact).abs();
        assert!(extrapolated < truncated, "{extrapolated} vs {truncated}");
    }

    #[test]
    fn cauchy_hamburger_integral_stabilizes() {
        // −ln P grows like 2 ln|x|, so the integrand decays like ln|x|/x².
        let g = Grid1D::symmetric(4000.0, 0.05).unwrap();
        let d = Distribution1D::from_fn(g, |x| 1.0 / (PI * (1.0 + x * x))).unwrap();
        let r = krein_integral(&d, KreinCase::Hamburger).unwrap();
        assert_eq!(r.verdict, KreinVerdict::SuggestsIndeterminate);
        assert!(r.tail_estimate.is_some());
    }
}
