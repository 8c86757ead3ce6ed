//! Large-area regulated energy densities and the parallel-plate interaction finite part.
//!
//! Per unit plate area, one scalar Dirichlet channel carries
//! `E_{D,τ}(a) = ħc/(8π) τ^{−3/2} Σ_{n≥1} Γ(3/2, τ(πn/a)²)`, which behaves as
//! `ħc a/(8π²) τ^{−2} − ħc/(32√π) τ^{−3/2} − π²ħc/(1440 a³) + O(τ)`.
//! The zero-vertical branch contributes the separation-independent
//! `ħc/(16√π) τ^{−3/2}`; the reduced Neumann channel is Dirichlet plus branch,
//! and Maxwell is twice Dirichlet plus branch.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::special::upper_incomplete_gamma_32;
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityChannel {
    DirichletDensity,
    NeumannReducedDensity,
    ZeroVerticalBranch,
    MaxwellDensity,
}

impl std::str::FromStr for DensityChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "dirichlet" | "dirichletdensity" => Ok(DensityChannel::DirichletDensity),
            "neumannreduced" | "neumannreduceddensity" | "neumann" => {
                Ok(DensityChannel::NeumannReducedDensity)
            }
            "branch" | "zerovertical" | "zeroverticalbranch" => {
                Ok(DensityChannel::ZeroVerticalBranch)
            }
            "maxwell" | "maxwelldensity" => Ok(DensityChannel::MaxwellDensity),
            _ => invalid(format!("unknown density channel `{s}`")),
        }
    }
}

impl DensityChannel {
    /// Number of Dirichlet-type channels (each carrying bulk and surface terms).
    fn dirichlet_weight(self) -> u32 {
        match self {
            DensityChannel::DirichletDensity | DensityChannel::NeumannReducedDensity => 1,
            DensityChannel::MaxwellDensity => 2,
            DensityChannel::ZeroVerticalBranch => 0,
        }
    }

    fn has_branch(self) -> bool {
        !matches!(self, DensityChannel::DirichletDensity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRequest<T> {
    pub plate_gap: T,
    pub tau: T,
    pub hbar_c: T,
    pub channel: DensityChannel,
    /// Absolute tolerance on the truncated vertical-mode tail.
    pub tolerance: T,
}

impl<T: Real> DensityRequest<T> {
    pub fn new(channel: DensityChannel, plate_gap: T, tau: T) -> Self {
        Self {
            plate_gap,
            tau,
            hbar_c: T::one(),
            channel,
            tolerance: default_tolerance(),
        }
    }

    pub fn with_hbar_c(mut self, hbar_c: T) -> Self {
        self.hbar_c = hbar_c;
        self
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        check_positive("plate gap", self.plate_gap)?;
        check_positive("tau", self.tau)?;
        check_positive("hbar_c", self.hbar_c)?;
        check_positive("tolerance", self.tolerance)
    }
}

fn default_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(1e-3)
}

fn check_positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive, got {v}"))
    }
}

/// `Σ_{n≥1} Γ(3/2, c n²)` truncated where the integral tail bound drops below `tol`.
///
/// With `y = cN²`, `Γ(3/2, x) ≤ √x e^{−x}·x/(x − 1/2)` gives
/// `Σ_{n>N} ≤ y/(y − 1/2)·e^{−y}/(2√c)`.
fn vertical_mode_sum<T: Real>(c: T, tol: T) -> Result<T> {
    let half = T::half();
    let root_c = c.sqrt();
    let tail = |n: u64| {
        let y = c * T::from_count(n as i64).powi(2);
        if y <= T::one() {
            T::infinity()
        } else {
            y / (y - half) * (-y).exp() / (T::two() * root_c)
        }
    };
    let mut last = 1u64;
    while tail(last) > tol {
        last += 1;
        if last > 100_000_000 {
            return invalid("plate-mode sum needs more than 1e8 terms; increase tau");
        }
    }
    let mut acc = CompensatedSum::new();
    for n in (1..=last).rev() {
        acc.add(upper_incomplete_gamma_32(
            c * T::from_count(n as i64).powi(2),
        )?);
    }
    Ok(acc.value())
}

/// Bulk vacuum term `ħc a/(8π²) τ^{−2}` of one Dirichlet channel.
pub fn bulk_term<T: Real>(a: T, tau: T, hbar_c: T) -> T {
    hbar_c * a / (T::lit(8.0) * T::PI() * T::PI()) * tau.powi(-2)
}

/// One-plate surface term `−ħc/(32√π) τ^{−3/2}` of one Dirichlet channel.
pub fn surface_term<T: Real>(tau: T, hbar_c: T) -> T {
    -hbar_c / (T::lit(32.0) * T::PI().sqrt()) * tau.powf(T::lit(-1.5))
}

fn dirichlet_value<T: Real>(a: T, tau: T, hbar_c: T, tol: T) -> Result<T> {
    let nu = T::PI() / a;
    let prefactor = hbar_c / (T::lit(8.0) * T::PI()) * tau.powf(T::lit(-1.5));
    let sum = vertical_mode_sum(tau * nu * nu, tol / prefactor)?;
    Ok(prefactor * sum)
}

/// Large-area Dirichlet density `E_{D,τ}(a)`.
pub fn dirichlet_density<T: Real>(req: &DensityRequest<T>) -> Result<T> {
    if req.channel != DensityChannel::DirichletDensity {
        return invalid("dirichlet_density requires the DirichletDensity channel");
    }
    req.validate()?;
    dirichlet_value(req.plate_gap, req.tau, req.hbar_c, req.tolerance)
}

/// Large-area limit of the zero-vertical branch, `ħc τ^{−3/2}/(16√π)`.
pub fn zero_vertical_branch_density<T: Real>(tau: T, hbar_c: T) -> Result<T> {
    check_positive("tau", tau)?;
    check_positive("hbar_c", hbar_c)?;
    Ok(hbar_c * tau.powf(T::lit(-1.5)) / (T::lit(16.0) * T::PI().sqrt()))
}

/// Finite-area branch `(ħc/2) Σ_{m≠0} |k_m| e^{−τ|k_m|²} / L²`.
pub fn zero_vertical_branch_lattice_sum<T: Real>(lateral_size: T, tau: T, hbar_c: T) -> Result<T> {
    check_positive("lateral size", lateral_size)?;
    check_positive("tau", tau)?;
    let quantum = T::two() * T::PI() / lateral_size;
    // e^{−τk²} below 1e-30 beyond k² = 70/τ
    let m_max = ((T::lit(70.0) / tau).sqrt() / quantum)
        .ceil()
        .to_i64()
        .unwrap_or(0);
    let mut terms = Vec::new();
    for mx in -m_max..=m_max {
        for my in -m_max..=m_max {
            if mx == 0 && my == 0 {
                continue;
            }
            let k2 = quantum * quantum * T::from_count(mx * mx + my * my);
            terms.push(k2.sqrt() * (-tau * k2).exp());
        }
    }
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let sum = terms.into_iter().collect::<CompensatedSum<T>>().value();
    Ok(hbar_c * T::half() * sum / (lateral_size * lateral_size))
}

/// Raw regulated density of any channel.
pub fn channel_density<T: Real>(req: &DensityRequest<T>) -> Result<T> {
    req.validate()?;
    let branch = zero_vertical_branch_density(req.tau, req.hbar_c)?;
    let weight = req.channel.dirichlet_weight();
    let dirichlet = if weight > 0 {
        dirichlet_value(req.plate_gap, req.tau, req.hbar_c, req.tolerance / T::two())?
    } else {
        T::zero()
    };
    let branch_part = if req.channel.has_branch() {
        branch
    } else {
        T::zero()
    };
    Ok(T::from_count(weight as i64) * dirichlet + branch_part)
}

/// Whether `τ ≤ a²`, where the short-time expansion applies.
pub fn in_expansion_regime<T: Real>(a: T, tau: T) -> bool {
    tau <= a * a
}

/// Density with bulk, surface and separation-independent branch terms removed;
/// tends to the interaction finite part with an `O(τ)` error.
pub fn subtract_divergences<T: Real>(
    channel: DensityChannel,
    a: T,
    tau: T,
    hbar_c: T,
) -> Result<T> {
    let weight = T::from_count(channel.dirichlet_weight() as i64);
    if channel == DensityChannel::ZeroVerticalBranch {
        check_positive("plate gap", a)?;
        return Ok(T::zero());
    }
    let req = DensityRequest::new(DensityChannel::DirichletDensity, a, tau).with_hbar_c(hbar_c);
    req.validate()?;
    let single = dirichlet_value(a, tau, hbar_c, req.tolerance)?;
    let per_channel = single - bulk_term(a, tau, hbar_c) - surface_term(tau, hbar_c);
    // the branch is exactly the separation-independent τ^{-3/2} piece, so it cancels analytically
    Ok(weight * per_channel)
}

/// Closed-form interaction finite part of each channel.
pub fn zeta_finite_part<T: Real>(channel: DensityChannel, a: T, hbar_c: T) -> T {
    if channel == DensityChannel::ZeroVerticalBranch {
        return T::zero();
    }
    let single = -T::PI() * T::PI() * hbar_c / (T::lit(1440.0) * a.powi(3));
    T::from_count(channel.dirichlet_weight() as i64) * single
}

/// Plate force per unit area `−∂/∂a` of the closed-form finite part, `−3|FP|/a`.
pub fn interaction_force<T: Real>(channel: DensityChannel, a: T, hbar_c: T) -> T {
    T::lit(3.0) * zeta_finite_part(channel, a, hbar_c) / a
}

/// One row of the extrapolation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinitePartRow<T> {
    pub tau: T,
    pub raw_density: T,
    pub remainder: T,
    /// Highest-order Richardson extrapolant available at this `τ`.
    pub extrapolant: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePartResult<T> {
    /// Fitted `τ^{−2}` coefficient of the raw density (needs ≥ 3 grid points).
    pub bulk_coeff: Option<T>,
    /// Fitted `τ^{−3/2}` coefficient of the raw density.
    pub surface_coeff: Option<T>,
    /// Fitted constant of the raw density.
    pub fit_constant: Option<T>,
    pub fit_condition: Option<T>,
    pub finite_part: T,
    pub richardson_error_estimate: T,
    /// `false` when successive diagonal extrapolants stop shrinking.
    pub converging: bool,
    pub tau_grid: Vec<T>,
    pub rows: Vec<FinitePartRow<T>>,
}

/// `τ, τ/2, τ/4, …` with `levels` points.
pub fn halving_grid<T: Real>(tau_start: T, levels: usize) -> Vec<T> {
    (0..levels)
        .map(|k| tau_start * T::half().powi(k as i32))
        .collect()
}

const MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of the raw density to `c₂τ^{−2} + c_{3/2}τ^{−3/2} + c₀` on
/// column-equilibrated data; returns coefficients and the condition number.
fn three_term_fit<T: Real>(taus: &[T], densities: &[T]) -> Result<([T; 3], T)> {
    use nalgebra::{DMatrix, DVector};
    let rows = taus.len();
    let mut design = DMatrix::<f64>::zeros(rows, 3);
    for (i, &t) in taus.iter().enumerate() {
        let t = t.to_f64().unwrap_or(f64::NAN);
        design[(i, 0)] = t.powi(-2);
        design[(i, 1)] = t.powf(-1.5);
        design[(i, 2)] = 1.0;
    }
    let scales: Vec<f64> = (0..3).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let rhs = DVector::from_iterator(
        rows,
        densities.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)),
    );
    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::FitUnstable { condition });
    }
    let solution = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let coeffs = [0, 1, 2].map(|j| T::lit(solution[j] / scales[j]));
    Ok((coeffs, T::lit(condition)))
}

/// Richardson extrapolation of the subtracted remainder on a halving `τ` grid,
/// assuming a remainder `c₁τ + c₂τ² + …`, plus a three-term fit of the raw
/// density as an independent diagnostic.
pub fn finite_part_extrapolate<T: Real>(
    channel: DensityChannel,
    a: T,
    tau_grid: &[T],
    hbar_c: T,
) -> Result<FinitePartResult<T>> {
    if tau_grid.len() < 2 {
        return invalid("extrapolation needs at least two tau values");
    }
    for w in tau_grid.windows(2) {
        let ratio = w[0] / w[1];
        if !((ratio - T::two()).abs() <= T::lit(1e-12) * T::two()) {
            return invalid(format!(
                "tau grid must halve at each step, found ratio {ratio}"
            ));
        }
    }
    let n = tau_grid.len();
    let mut raw = Vec::with_capacity(n);
    let mut table: Vec<Vec<T>> = Vec::with_capacity(n);
    for (i, &tau) in tau_grid.iter().enumerate() {
        raw.push(channel_density(
            &DensityRequest::new(channel, a, tau).with_hbar_c(hbar_c),
        )?);
        let mut row = vec![subtract_divergences(channel, a, tau, hbar_c)?];
        for k in 1..=i {
            let factor = T::two().powi(k as i32);
            let next = (factor * row[k - 1] - table[i - 1][k - 1]) / (factor - T::one());
            row.push(next);
        }
        table.push(row);
    }
    let diag: Vec<T> = (0..n).map(|i| table[i][i]).collect();
    let finite_part = diag[n - 1];
    let estimate = (finite_part - table[n - 1][n - 2])
        .abs()
        .max((finite_part - diag[n - 2]).abs());
    let converging = diag
        .windows(3)
        .all(|w| (w[2] - w[1]).abs() <= (w[1] - w[0]).abs());

    let (bulk_coeff, surface_coeff, fit_constant, fit_condition) = if n >= 3 {
        let (c, cond) = three_term_fit(tau_grid, &raw)?;
        (Some(c[0]), Some(c[1]), Some(c[2]), Some(cond))
    } else {
        (None, None, None, None)
    };

    let rows = (0..n)
        .map(|i| FinitePartRow {
            tau: tau_grid[i],
            raw_density: raw[i],
            remainder: table[i][0],
            extrapolant: diag[i],
        })
        .collect();
    Ok(FinitePartResult {
        bulk_coeff,
        surface_coeff,
        fit_constant,
        fit_condition,
        finite_part,
        richardson_error_estimate: estimate,
        converging,
        tau_grid: tau_grid.to_vec(),
        rows,
    })
}
