//! The log-normal density and its Stieltjes perturbations
//! `P_LN(x) [1 + β sin(2π ln x)]`, all sharing the moments `e^{n²/2}`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{trapezoid, Distribution1D, Grid1D};

/// Step of the `u = ln x` grid used for moment quadrature.
const U_STEP: f64 = 1.0 / 128.0;
/// Half-width around the peak of `eⁿᵘ φ(u)` (at `u = n`) kept by the u grid.
const U_REACH: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogNormalFamily {
    beta: f64,
}

fn standard_normal(u: f64) -> f64 {
    (-u * u / 2.0).exp() / (2.0 * PI).sqrt()
}

impl LogNormalFamily {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta.abs() > 1.0 {
            return Err(Error::DensityWouldGoNegative(beta.abs()));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Density of `X` at `x`; zero for `x <= 0`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let u = x.ln();
        standard_normal(u) / x * (1.0 + self.beta * (2.0 * PI * u).sin())
    }

    /// Density of `U = ln X` at `u`.
    pub fn log_density(&self, u: f64) -> f64 {
        standard_normal(u) * (1.0 + self.beta * (2.0 * PI * u).sin())
    }

    pub fn density_on(&self, grid: &Grid1D) -> Result<Distribution1D> {
        Distribution1D::from_fn(*grid, |x| self.density(x).max(0.0))
    }

    pub fn log_density_on(&self, grid: &Grid1D) -> Result<Distribution1D> {
        Distribution1D::from_fn(*grid, |u| self.log_density(u).max(0.0))
    }

    /// `⟨Xⁿ⟩ = ∫ eⁿᵘ Q(u) du` by trapezoid on a u grid centered on the integrand's peak.
    pub fn moment(&self, n: usize) -> f64 {
        let nf = n as f64;
        let grid = Grid1D::covering(nf - U_REACH, nf + U_REACH, U_STEP, 0.0).expect("u grid");
        let values: Vec<f64> = grid.points().map(|u| (nf * u).exp() * self.log_density(u)).collect();
        trapezoid(&values, grid.step())
    }

    pub fn moments(&self, n_max: usize) -> Vec<f64> {
        (0..=n_max).map(|n| self.moment(n)).collect()
    }
}

/// `⟨xⁿ⟩ = e^{n²/2}`, `n = 0..=n_max`.
pub fn lognormal_moments(n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| ((n * n) as f64 / 2.0).exp()).collect()
}

/// `ln⟨x^{2k}⟩ = 2k²`, `k = 1..=k_max`.
pub fn lognormal_log_even_moments(k_max: usize) -> Vec<f64> {
    (1..=k_max).map(|k| 2.0 * (k * k) as f64).collect()
}

/// `∫ xⁿ P_LN(x) sin(2π ln x) dx`, zero in exact arithmetic for integer n.
pub fn perturbation_moment(n: usize) -> f64 {
    let nf = n as f64;
    let grid = Grid1D::covering(nf - U_REACH, nf + U_REACH, U_STEP, 0.0).expect("u grid");
    let values: Vec<f64> = grid
        .points()
        .map(|u| (nf * u).exp() * standard_normal(u) * (2.0 * PI * u).sin())
        .collect();
    trapezoid(&values, grid.step())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_moments() {
        let m = lognormal_moments(2);
        assert!((m[1] - 1.648_721_270_700_128).abs() < 1e-12);
        assert!((m[2] - 7.389_056_098_930_65).abs() < 1e-12);
    }

    #[test]
    fn perturbed_families_share_moments() {
        let exact = lognormal_moments(4);
        for beta in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let fam = LogNormalFamily::new(beta).unwrap();
            for (n, (m, e)) in fam.moments(4).iter().zip(&exact).enumerate() {
                assert!((m - e).abs() < 1e-3 * e, "β = {beta}, n = {n}");
            }
        }
    }

    #[test]
    fn perturbation_is_orthogonal_to_powers() {
        for n in 0..=4 {
            let e = ((n * n) as f64 / 2.0).exp();
            assert!(perturbation_moment(n).abs() <= 1e-4 * e);
        }
    }

    #[test]
    fn beta_beyond_one_is_rejected() {
        let err = LogNormalFamily::new(1.2).unwrap_err();
        assert_eq!(err, Error::DensityWouldGoNegative(1.2));
        assert!(err.to_string().contains("density would go negative"));
    }

    #[test]
    fn density_is_nonnegative_and_differs_from_base() {
        let grid = Grid1D::new(1e-3, 1e-2, 4000).unwrap();
        let base = LogNormalFamily::new(0.0).unwrap().density_on(&grid).unwrap();
        let pert = LogNormalFamily::new(1.0).unwrap().density_on(&grid).unwrap();
        assert!(pert.density().iter().all(|d| *d >= 0.0));
        assert!(base.l1_distance(&pert).unwrap() > 0.1);
    }

    #[test]
    fn log_density_is_normalized() {
        let grid = Grid1D::symmetric(20.0, 1.0 / 64.0).unwrap();
        for beta in [-1.0, 1.0] {
            let d = LogNormalFamily::new(beta).unwrap().log_density_on(&grid).unwrap();
            assert!(d.is_normalized());
        }
    }
}
