//! Spectral toolkit for the electromagnetic vacuum between two perfectly
//! conducting plates on a square lateral torus.
//!
//! The slab `T²_L × [0, a]` has the lattice spectrum
//! `λ_{m,n} = (2π/L)²|m|² + (π/a)²n²`. On top of that the crate provides
//! certified heat-regulated traces, the TE/TM split of the Maxwell spectrum
//! into scalar Dirichlet and reduced-Neumann channels, the codimension-three
//! Riesz reduction, a counter-based Gaussian source sampler, and the
//! large-area parallel-plate finite parts.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` and `*32`
//! aliases below fix the scalar.

// NaN-rejecting `!(x > 0)` guards are intentional throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod heat_trace;
pub mod large_area;
pub mod modes;
pub mod quadrature;
pub mod riesz;
pub mod scalar;
pub mod source;
pub mod special;
pub mod spectrum;
pub mod summation;

pub use num_complex;

pub use error::{Error, Result};
pub use geometry::{spectral_gap, SlabGeometry};
pub use heat_trace::{
    heat_trace, heat_trace_with, tail_bound, trace_decomposition, trace_decomposition_residual,
    CountingMajorant, HeatTraceOptions, HeatTraceRequest, HeatTraceResult, TraceDecomposition,
};
pub use large_area::{
    channel_density, dirichlet_density, finite_part_extrapolate, subtract_divergences,
    zero_vertical_branch_density, zeta_finite_part, DensityChannel, DensityRequest,
    FinitePartResult,
};
pub use modes::{build_te_tm_pair, build_zero_m_pair, CoefficientBlock, ModePair};
pub use quadrature::{QuadratureResult, QuadratureSettings};
pub use riesz::{riesz_integral_analytic, riesz_integral_numeric, MollifierProfile, RieszRequest};
pub use scalar::Real;
pub use source::{mc_verify_trace_identity, GaussianConvention, McEstimate, SourceConfig};
pub use spectrum::{
    enumerate_maxwell_spectrum, enumerate_scalar_spectrum, enumerate_spectrum,
    verify_te_tm_equivalence, BranchTag, EigenEntry, EquivalenceReport, OperatorKind, Spectrum,
    WeightedEigenvalue,
};

pub type SlabGeometry64 = SlabGeometry<f64>;
pub type SlabGeometry32 = SlabGeometry<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type HeatTraceRequest64 = HeatTraceRequest<f64>;
pub type HeatTraceResult64 = HeatTraceResult<f64>;
pub type SourceConfig64 = SourceConfig<f64>;
pub type SourceConfig32 = SourceConfig<f32>;
pub type McEstimate64 = McEstimate<f64>;
pub type DensityRequest64 = DensityRequest<f64>;
pub type FinitePartResult64 = FinitePartResult<f64>;
pub type CoefficientBlock64 = CoefficientBlock<f64>;
