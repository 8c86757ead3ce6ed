//! Heat-regularized Gaussian source in eigencoordinates.
//!
//! Mode `j` of the truncated spectrum receives the coefficient
//! `c_j = (ħc/g)^{1/2} λ_j^{3/4} e^{−τλ_j/2} ξ_j` with unit-covariance noise
//! `ξ_j`, and the quadratic Green energy is `U = (g/2) Σ_j λ_j^{−1} |c_j|²`.
//! Its mean is `(ħc/2) Σ μ λ^{1/2} e^{−τλ}`.
//!
//! Noise is counter-based: sample `i` reads ChaCha8 stream `i` of the seeded
//! generator, and expanded mode `j` consumes words `4j .. 4j+4` of that
//! stream, so every `(sample, mode)` draw is fixed by the seed alone.

use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::heat_trace::spectral_trace;
use crate::scalar::Real;
use crate::spectrum::WeightedEigenvalue;
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GaussianConvention {
    /// `Re ξ`, `Im ξ` independent with variance 1/2 each.
    #[default]
    ComplexCircular,
    /// `ξ` real standard normal.
    Real,
}

impl GaussianConvention {
    /// `Var |ξ|²`.
    pub fn energy_variance_factor<T: Real>(self) -> T {
        match self {
            GaussianConvention::ComplexCircular => T::one(),
            GaussianConvention::Real => T::two(),
        }
    }
}

impl std::str::FromStr for GaussianConvention {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "complex" | "complex-circular" | "complexcircular" => {
                Ok(GaussianConvention::ComplexCircular)
            }
            "real" => Ok(GaussianConvention::Real),
            _ => invalid(format!("unknown Gaussian convention `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig<T> {
    pub modes: Vec<WeightedEigenvalue<T>>,
    pub tau: T,
    pub hbar_c: T,
    pub g: T,
    pub seed: u64,
    pub sample_count: usize,
    pub convention: GaussianConvention,
}

impl<T: Real> SourceConfig<T> {
    /// Unit `ħc` and `g`, seed 0, one sample, complex-circular noise.
    pub fn new(modes: Vec<WeightedEigenvalue<T>>, tau: T) -> Self {
        Self {
            modes,
            tau,
            hbar_c: T::one(),
            g: T::one(),
            seed: 0,
            sample_count: 1,
            convention: GaussianConvention::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    pub fn with_convention(mut self, convention: GaussianConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_hbar_c(mut self, hbar_c: T) -> Self {
        self.hbar_c = hbar_c;
        self
    }

    pub fn with_coupling(mut self, g: T) -> Self {
        self.g = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > T::zero()) {
            return invalid(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.g > T::zero()) {
            return invalid(format!("coupling g must be positive, got {}", self.g));
        }
        if !(self.hbar_c > T::zero()) {
            return invalid(format!("hbar_c must be positive, got {}", self.hbar_c));
        }
        if self.sample_count == 0 {
            return invalid("sample_count must be at least 1");
        }
        check_positive_modes(&self.modes)
    }

    /// Number of independent noise coefficients (modes counted with multiplicity).
    pub fn expanded_len(&self) -> usize {
        self.modes.iter().map(|w| w.multiplicity as usize).sum()
    }

    fn expanded_values(&self) -> impl Iterator<Item = T> + '_ {
        self.modes
            .iter()
            .flat_map(|w| std::iter::repeat_n(w.value, w.multiplicity as usize))
    }
}

fn check_positive_modes<T: Real>(modes: &[WeightedEigenvalue<T>]) -> Result<()> {
    match modes.iter().find(|w| !(w.value > T::zero())) {
        Some(w) => invalid(format!(
            "eigenvalue {} is not positive; remove zero modes first",
            w.value
        )),
        None => Ok(()),
    }
}

fn unit_uniform(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Two independent standard normals from one Box–Muller step.
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = 1.0 - unit_uniform(rng.next_u64());
    let u2 = unit_uniform(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Unit-covariance noise `ξ_j` of one sample, one entry per expanded mode.
pub fn standard_noise<T: Real>(cfg: &SourceConfig<T>, sample_index: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(sample_index);
    rng.set_word_pos(0);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    (0..cfg.expanded_len())
        .map(|_| {
            let (z1, z2) = box_muller(&mut rng);
            match cfg.convention {
                GaussianConvention::ComplexCircular => {
                    Complex::new(T::lit(z1 * half), T::lit(z2 * half))
                }
                GaussianConvention::Real => Complex::new(T::lit(z1), T::zero()),
            }
        })
        .collect()
}

/// Damping profile `(ħc/g)^{1/2} λ^{3/4} e^{−τλ/2}` of the source coefficients.
fn source_amplitude<T: Real>(cfg: &SourceConfig<T>, lambda: T) -> T {
    (cfg.hbar_c / cfg.g).sqrt() * lambda.powf(T::lit(0.75)) * (-cfg.tau * lambda * T::half()).exp()
}

/// Source coefficients `c_j` of one sample.
pub fn sample_source_coefficients<T: Real>(
    cfg: &SourceConfig<T>,
    sample_index: u64,
) -> Vec<Complex<T>> {
    standard_noise(cfg, sample_index)
        .into_iter()
        .zip(cfg.expanded_values())
        .map(|(xi, lambda)| xi * source_amplitude(cfg, lambda))
        .collect()
}

/// `U = (g/2) Σ_j λ_j^{−1} |c_j|²` for coefficients aligned with the expanded modes.
pub fn quadratic_energy<T: Real>(
    coefficients: &[Complex<T>],
    modes: &[WeightedEigenvalue<T>],
    g: T,
) -> Result<T> {
    check_positive_modes(modes)?;
    let expanded: usize = modes.iter().map(|w| w.multiplicity as usize).sum();
    if expanded != coefficients.len() {
        return invalid(format!(
            "{} coefficients for {expanded} expanded modes",
            coefficients.len()
        ));
    }
    let values = modes
        .iter()
        .flat_map(|w| std::iter::repeat_n(w.value, w.multiplicity as usize));
    let sum: CompensatedSum<T> = coefficients
        .iter()
        .zip(values)
        .map(|(c, l)| c.norm_sqr() / l)
        .collect();
    Ok(g * T::half() * sum.value())
}

/// Energy of one sample in the form `(ħc/2) Σ_j λ_j^{1/2} e^{−τλ_j} |ξ_j|²`,
/// where the coupling has cancelled. The value depends on the noise only.
pub fn sample_energy<T: Real>(cfg: &SourceConfig<T>, sample_index: u64) -> T {
    let noise = standard_noise(cfg, sample_index);
    let sum: CompensatedSum<T> = noise
        .iter()
        .zip(cfg.expanded_values())
        .map(|(xi, l)| l.sqrt() * (-cfg.tau * l).exp() * xi.norm_sqr())
        .collect();
    cfg.hbar_c * T::half() * sum.value()
}

/// Energies of samples `0 .. sample_count`, in index order regardless of thread count.
pub fn sample_energies<T: Real>(cfg: &SourceConfig<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    Ok((0..cfg.sample_count as u64)
        .into_par_iter()
        .map(|i| sample_energy(cfg, i))
        .collect())
}

/// Exact mean and variance of `U` on a truncated spectrum.
pub fn exact_moments<T: Real>(
    modes: &[WeightedEigenvalue<T>],
    tau: T,
    hbar_c: T,
    convention: GaussianConvention,
) -> (T, T) {
    let mean = hbar_c * T::half() * spectral_trace(modes, T::half(), tau);
    let var: CompensatedSum<T> = modes
        .iter()
        .map(|w| {
            let weight = hbar_c * T::half() * w.value.sqrt() * (-tau * w.value).exp();
            T::from_count(w.multiplicity as i64) * weight * weight
        })
        .collect();
    (mean, var.value() * convention.energy_variance_factor::<T>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub exact_mean: T,
    pub exact_variance: T,
    pub samples: usize,
    pub z_score: T,
}

/// Summarizes sampled energies against the exact moments.
pub fn summarize<T: Real>(energies: &[T], exact_mean: T, exact_variance: T) -> McEstimate<T> {
    let n = energies.len();
    let nf = T::from_count(n as i64);
    let mean = energies
        .iter()
        .copied()
        .collect::<CompensatedSum<T>>()
        .value()
        / nf;
    let var = if n > 1 {
        let ss: CompensatedSum<T> = energies.iter().map(|&u| (u - mean) * (u - mean)).collect();
        ss.value() / T::from_count(n as i64 - 1)
    } else {
        T::zero()
    };
    let std_error = (var / nf).sqrt();
    let diff = mean - exact_mean;
    let z_score = if std_error > T::zero() {
        diff / std_error
    } else if diff == T::zero() {
        T::zero()
    } else {
        diff.signum() * T::infinity()
    };
    McEstimate {
        mean,
        std_error,
        exact_mean,
        exact_variance,
        samples: n,
        z_score,
    }
}

/// Monte Carlo check of `E[U_τ] = (ħc/2) Tr(L^{1/2} e^{−τL})` on the configured spectrum.
pub fn mc_verify_trace_identity<T: Real>(cfg: &SourceConfig<T>) -> Result<McEstimate<T>> {
    let energies = sample_energies(cfg)?;
    let (mean, var) = exact_moments(&cfg.modes, cfg.tau, cfg.hbar_c, cfg.convention);
    Ok(summarize(&energies, mean, var))
}
