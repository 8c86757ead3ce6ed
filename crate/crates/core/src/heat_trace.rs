//! Regulated spectral traces `Tr(L^p e^{−τL})` with certified truncation bounds.
//!
//! # Tail bound
//!
//! With `α = 2π/L`, `β = π/a`, the number of lattice points with
//! `λ_{m,n} ≤ X` is at most
//!
//! ```text
//! N̄(X) = π (√X/β + 1)(√X/α + √2/2)²
//! ```
//!
//! (unit squares around the lateral points fit in a disc of radius
//! `r + √2/2`; the vertical index ranges over at most `√X/β + 1` values).
//! For `f(λ) = λ^p e^{−τλ}` decreasing on `[Λ, ∞)`, i.e. `Λ ≥ p/τ`,
//! Stieltjes integration by parts against the counting function gives
//!
//! ```text
//! Σ_{λ_j > Λ} μ_j f(λ_j) ≤ μ_max [ f(Λ) N̄(Λ) + ∫_Λ^∞ N̄'(λ) f(λ) dλ ]
//! ```
//!
//! and each power of `√λ` in `N̄'` integrates to an upper incomplete gamma
//! function. Below `p/τ` the bound adds `μ_max f(p/τ) N̄(p/τ)` for the
//! rising part of `f`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::SlabGeometry;
use crate::scalar::Real;
use crate::special::upper_incomplete_gamma;
use crate::spectrum::{enumerate_lattice, BranchTag, OperatorKind, WeightedEigenvalue};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct HeatTraceRequest<T> {
    pub geometry: SlabGeometry<T>,
    pub operator_kind: OperatorKind,
    pub p: T,
    pub tau: T,
    /// Absolute tolerance on the discarded tail.
    pub tolerance: T,
}

impl<T: Real> HeatTraceRequest<T> {
    pub fn new(
        geometry: SlabGeometry<T>,
        operator_kind: OperatorKind,
        p: T,
        tau: T,
        tolerance: T,
    ) -> Self {
        Self {
            geometry,
            operator_kind,
            p,
            tau,
            tolerance,
        }
    }

    fn validate(&self) -> Result<()> {
        check_exponents(self.p, self.tau)?;
        if !(self.tolerance > T::zero()) {
            return invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            ));
        }
        Ok(())
    }
}

fn check_exponents<T: Real>(p: T, tau: T) -> Result<()> {
    if !(tau > T::zero() && tau.is_finite()) {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    if !(p >= T::zero() && p.is_finite()) {
        return invalid(format!("p must be nonnegative, got {p}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeatTraceOptions {
    /// Upper limit on the number of enumerated lattice entries.
    pub max_terms: usize,
}

impl Default for HeatTraceOptions {
    fn default() -> Self {
        Self {
            max_terms: 4_000_000,
        }
    }
}

/// Polynomial majorant `N̄(λ) = π Σ_k c_k λ^{k/2}` of the lattice counting function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingMajorant<T> {
    /// `π c_k` for `k = 0..=3`.
    pub coefficients: [T; 4],
    pub max_multiplicity: u32,
}

impl<T: Real> CountingMajorant<T> {
    pub fn new(geom: &SlabGeometry<T>, kind: OperatorKind) -> Self {
        let alpha = geom.lateral_quantum();
        let beta = geom.vertical_quantum();
        let c = T::half() * T::two().sqrt();
        let pi = T::PI();
        // (s/β + 1)(s/α + c)² expanded in s = √λ
        let coefficients = [
            pi * c * c,
            pi * (c * c / beta + T::two() * c / alpha),
            pi * (T::two() * c / (alpha * beta) + T::one() / (alpha * alpha)),
            pi / (beta * alpha * alpha),
        ];
        Self {
            coefficients,
            max_multiplicity: kind.max_multiplicity(),
        }
    }

    /// Upper bound on the number of lattice indices with `λ ≤ x`.
    pub fn count(&self, x: T) -> T {
        let s = x.max(T::zero()).sqrt();
        let [c0, c1, c2, c3] = self.coefficients;
        ((c3 * s + c2) * s + c1) * s + c0
    }

    /// Certified bound on `Σ_{λ_j > cut} μ_j λ_j^p e^{−τλ_j}`.
    pub fn tail_bound(&self, p: T, tau: T, cut: T) -> T {
        let weight = T::from_count(self.max_multiplicity as i64);
        let f = |x: T| x.pow_nonneg(p) * (-tau * x).exp();
        let turning = p / tau;
        let (cut, rising) = if cut < turning {
            (turning, f(turning) * self.count(turning))
        } else {
            (cut.max(T::zero()), T::zero())
        };
        let x = tau * cut;
        let mut integral = T::zero();
        for k in 1..=3 {
            let half_k = T::from_count(k as i64) * T::half();
            let order = half_k + p;
            let gamma = upper_incomplete_gamma(order, x).unwrap_or_else(|_| T::zero());
            integral = integral + self.coefficients[k] * half_k * tau.powf(-order) * gamma;
        }
        weight * (rising + f(cut) * self.count(cut) + integral)
    }
}

/// Certified bound on the part of `Tr(L^p e^{−τL})` above `lambda_cut`.
pub fn tail_bound<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    p: T,
    tau: T,
    lambda_cut: T,
) -> Result<T> {
    check_exponents(p, tau)?;
    Ok(CountingMajorant::new(geom, kind).tail_bound(p, tau, lambda_cut))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct HeatTraceResult<T> {
    pub value: T,
    pub cutoff_used: T,
    pub tail_bound: T,
    pub term_count: usize,
    pub majorant: CountingMajorant<T>,
}

/// `Σ μ_j λ_j^p e^{−τλ_j}`, accumulated from the largest eigenvalue down.
pub fn spectral_trace<T: Real>(modes: &[WeightedEigenvalue<T>], p: T, tau: T) -> T {
    let mut terms: Vec<T> = modes
        .iter()
        .map(|w| {
            T::from_count(w.multiplicity as i64) * w.value.pow_nonneg(p) * (-tau * w.value).exp()
        })
        .collect();
    // summands decay with λ, so ascending magnitude is descending λ
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    terms.into_iter().collect::<CompensatedSum<T>>().value()
}

fn modes_from_lattice<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    cutoff: T,
) -> Vec<WeightedEigenvalue<T>> {
    enumerate_lattice(geom, kind, cutoff, T::one())
        .into_iter()
        .map(|e| WeightedEigenvalue::new(e.value, e.multiplicity))
        .collect()
}

/// Trace over the spectrum truncated at a fixed `cutoff`, with its tail bound.
pub fn trace_at_cutoff<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    p: T,
    tau: T,
    cutoff: T,
) -> Result<HeatTraceResult<T>> {
    check_exponents(p, tau)?;
    if !(cutoff >= T::zero() && cutoff.is_finite()) {
        return invalid(format!("cutoff must be nonnegative, got {cutoff}"));
    }
    let majorant = CountingMajorant::new(geom, kind);
    let modes = modes_from_lattice(geom, kind, cutoff);
    Ok(HeatTraceResult {
        value: spectral_trace(&modes, p, tau),
        cutoff_used: cutoff,
        tail_bound: majorant.tail_bound(p, tau, cutoff),
        term_count: modes.len(),
        majorant,
    })
}

/// Smallest cutoff (on a geometric ladder) whose certified tail bound meets the tolerance.
pub fn select_cutoff<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    p: T,
    tau: T,
    tolerance: T,
    options: &HeatTraceOptions,
) -> Result<T> {
    check_exponents(p, tau)?;
    let majorant = CountingMajorant::new(geom, kind);
    let max_terms = T::from_count(options.max_terms as i64);
    let growth = T::lit(1.25);
    let mut cut = (p / tau).max(geom.spectral_gap());
    let mut best = majorant.tail_bound(p, tau, cut);
    loop {
        if best <= tolerance {
            return Ok(cut);
        }
        let next = cut * growth;
        if majorant.count(next) > max_terms {
            return Err(Error::CutoffExhausted {
                cutoff: cut.to_f64().unwrap_or(f64::NAN),
                best_bound: best.to_f64().unwrap_or(f64::NAN),
                tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
            });
        }
        cut = next;
        best = majorant.tail_bound(p, tau, cut);
    }
}

/// Evaluates `Tr(L^p e^{−τL})` to the requested absolute tail tolerance.
pub fn heat_trace<T: Real>(req: &HeatTraceRequest<T>) -> Result<HeatTraceResult<T>> {
    heat_trace_with(req, &HeatTraceOptions::default())
}

pub fn heat_trace_with<T: Real>(
    req: &HeatTraceRequest<T>,
    options: &HeatTraceOptions,
) -> Result<HeatTraceResult<T>> {
    req.validate()?;
    let cut = select_cutoff(
        &req.geometry,
        req.operator_kind,
        req.p,
        req.tau,
        req.tolerance,
        options,
    )?;
    trace_at_cutoff(&req.geometry, req.operator_kind, req.p, req.tau, cut)
}

/// Maxwell, Dirichlet, reduced-Neumann and zero-vertical-branch traces at one shared cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceDecomposition<T> {
    pub maxwell: T,
    pub dirichlet: T,
    pub neumann_reduced: T,
    /// `Σ_{m≠0} |k_m|^{2p} e^{−τ|k_m|²}`.
    pub zero_vertical: T,
    pub cutoff: T,
    pub tail_bound: T,
}

impl<T: Real> TraceDecomposition<T> {
    /// `|Tr_Maxwell − Tr_D − Tr'_N|`.
    pub fn residual(&self) -> T {
        (self.maxwell - self.dirichlet - self.neumann_reduced).abs()
    }

    /// `|Tr_Maxwell − 2 Tr_D − B|`.
    pub fn linearity_residual(&self) -> T {
        (self.maxwell - T::two() * self.dirichlet - self.zero_vertical).abs()
    }
}

pub fn trace_decomposition<T: Real>(
    geom: &SlabGeometry<T>,
    p: T,
    tau: T,
    tol: T,
) -> Result<TraceDecomposition<T>> {
    let req = HeatTraceRequest::new(*geom, OperatorKind::Maxwell, p, tau, tol);
    req.validate()?;
    // the Maxwell majorant carries weight 2 and dominates both scalar tails
    let cut = select_cutoff(
        geom,
        OperatorKind::Maxwell,
        p,
        tau,
        tol,
        &HeatTraceOptions::default(),
    )?;
    let maxwell_entries = enumerate_lattice(geom, OperatorKind::Maxwell, cut, T::one());
    let branch: Vec<_> = maxwell_entries
        .iter()
        .filter(|e| e.branch == BranchTag::MaxwellNormalBranch)
        .map(|e| WeightedEigenvalue::new(e.value, e.multiplicity))
        .collect();
    let maxwell: Vec<_> = maxwell_entries
        .iter()
        .map(|e| WeightedEigenvalue::new(e.value, e.multiplicity))
        .collect();
    Ok(TraceDecomposition {
        maxwell: spectral_trace(&maxwell, p, tau),
        dirichlet: spectral_trace(
            &modes_from_lattice(geom, OperatorKind::Dirichlet, cut),
            p,
            tau,
        ),
        neumann_reduced: spectral_trace(
            &modes_from_lattice(geom, OperatorKind::NeumannReduced, cut),
            p,
            tau,
        ),
        zero_vertical: spectral_trace(&branch, p, tau),
        cutoff: cut,
        tail_bound: CountingMajorant::new(geom, OperatorKind::Maxwell).tail_bound(p, tau, cut),
    })
}

/// `|Tr_Maxwell − Tr_Dirichlet − Tr'_Neumann|` at a shared cutoff.
pub fn trace_decomposition_residual<T: Real>(
    geom: &SlabGeometry<T>,
    p: T,
    tau: T,
    tol: T,
) -> Result<T> {
    Ok(trace_decomposition(geom, p, tau, tol)?.residual())
}
