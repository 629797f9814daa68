//! Numerical laboratory for superpositions of non-overlapping wave functions.
//!
//! Position, momentum, phase-space and eigenbasis distributions of
//! `ψ = (ψ₁ + e^{iα} ψ₂)/√2` depend on the relative phase α, while every one
//! of their moments does not. This crate builds such superpositions on uniform
//! grids and measures both halves of that statement.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod moments;
pub mod phasespace;
pub mod representations;
pub mod scenario;
pub mod spectral;
pub mod verify;
pub mod wavepacket;

pub use error::{Error, Result};
pub use grid::{
    inner_product, quadrature, quadrature_fn, trapezoid, AxisKind, Distribution1D, Grid1D,
    SampledWave, Warning,
};
pub use moments::{GWeight, MomentReport};
pub use phasespace::{CrossWigner, WignerGrid, WignerOptions};
pub use representations::{BasisExpansion, EigenBasis, ObservableSweep};
pub use scenario::{BasisSettings, Numerics, Scenario};
pub use spectral::{CharFunction, MomentumDistribution, TransformOptions};
pub use verify::{Check, CriterionOutcome};
pub use wavepacket::{
    InternalPhase, Phases, SmoothnessClass, Superposition, SuperpositionSpec, WindowFamily,
    WindowSpec,
};
