//! Inputs shared by the benchmarks.

use mindet_core::grid::{Grid1D, SampledWave};
use mindet_core::representations::{oscillator_basis, oscillator_grid};
use mindet_core::spectral::output_grid;
use mindet_core::wavepacket::build_superposition;
use mindet_core::{EigenBasis, Numerics, Scenario};

/// Canonical two-lobe wave at α = π/4.
pub fn canonical_wave() -> SampledWave {
    let s = Scenario::canonical();
    build_superposition(&s.spec(std::f64::consts::FRAC_PI_4).unwrap(), &s.x_grid().unwrap(), s.hbar)
        .unwrap()
        .wave
}

/// The canonical wave on a coarser grid, with a p grid its Wigner transform accepts.
pub fn coarse_wave(x_step: f64) -> (SampledWave, Grid1D) {
    let mut s = Scenario::canonical();
    s.numerics = Numerics { x_step, ..s.numerics };
    let x = s.x_grid().unwrap();
    let p = output_grid(&x, s.hbar, &s.momentum_options()).unwrap();
    let wave = build_superposition(&s.spec(std::f64::consts::FRAC_PI_4).unwrap(), &x, s.hbar)
        .unwrap()
        .wave;
    (wave, p)
}

/// Oscillator basis of `size` functions with the canonical wave rebuilt on its grid.
pub fn basis_fixture(size: usize) -> (SampledWave, EigenBasis) {
    let s = Scenario::canonical();
    let center = s.basis_center();
    let grid = oscillator_grid(center, s.basis.length_scale, size, s.numerics.x_step).unwrap();
    let basis = oscillator_basis(&grid, size, s.hbar, center, s.basis.length_scale).unwrap();
    let wave = build_superposition(&s.spec(0.0).unwrap(), &grid, s.hbar).unwrap().wave;
    (wave, basis)
}
