//! Finite-volume spectra of the reduced Maxwell operator and the scalar
//! Dirichlet / Neumann comparison operators, and their trace-level equivalence.
//!
//! Every eigenvalue is `λ_{m,n} = |k_m|² + ν_n²` with `m ∈ ℤ²`, `n ≥ 0`.
//! Degenerate eigenvalues are stored as one entry per lattice index; the
//! operator determines which `(m, n)` occur and with what multiplicity:
//!
//! | operator         | `n ≥ 1`              | `n = 0`                    |
//! |------------------|----------------------|----------------------------|
//! | Maxwell          | pair, multiplicity 2 | `m ≠ 0`, multiplicity 1    |
//! | Dirichlet        | multiplicity 1       | absent                     |
//! | Neumann          | multiplicity 1       | every `m`, multiplicity 1  |
//! | reduced Neumann  | multiplicity 1       | `m ≠ 0`, multiplicity 1    |

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::SlabGeometry;
use crate::scalar::Real;

/// Which family an eigen-entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BranchTag {
    /// TE/TM pair at `n ≥ 1`.
    MaxwellPair,
    /// Normal-field branch `n = 0`, `m ≠ 0`.
    MaxwellNormalBranch,
    Dirichlet,
    /// Neumann cosine modes with `n ≥ 1`.
    NeumannInterior,
    /// Neumann modes with `n = 0`.
    NeumannZeroVertical,
}

impl BranchTag {
    pub fn multiplicity(self) -> u32 {
        match self {
            BranchTag::MaxwellPair => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BranchTag::MaxwellPair => "MaxwellPair",
            BranchTag::MaxwellNormalBranch => "MaxwellNormalBranch",
            BranchTag::Dirichlet => "Dirichlet",
            BranchTag::NeumannInterior => "NeumannInterior",
            BranchTag::NeumannZeroVertical => "NeumannZeroVertical",
        }
    }
}

/// Operator whose spectrum is enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Maxwell,
    Dirichlet,
    Neumann,
    NeumannReduced,
}

impl OperatorKind {
    /// Largest per-index multiplicity the operator produces.
    pub fn max_multiplicity(self) -> u32 {
        match self {
            OperatorKind::Maxwell => 2,
            _ => 1,
        }
    }

    fn branch_at(self, m: [i64; 2], n: u32) -> Option<BranchTag> {
        let zero_m = m == [0, 0];
        match (self, n) {
            (OperatorKind::Maxwell, 0) if zero_m => None,
            (OperatorKind::Maxwell, 0) => Some(BranchTag::MaxwellNormalBranch),
            (OperatorKind::Maxwell, _) => Some(BranchTag::MaxwellPair),
            (OperatorKind::Dirichlet, 0) => None,
            (OperatorKind::Dirichlet, _) => Some(BranchTag::Dirichlet),
            (OperatorKind::Neumann, 0) => Some(BranchTag::NeumannZeroVertical),
            (OperatorKind::NeumannReduced, 0) if zero_m => None,
            (OperatorKind::NeumannReduced, 0) => Some(BranchTag::NeumannZeroVertical),
            (OperatorKind::Neumann | OperatorKind::NeumannReduced, _) => {
                Some(BranchTag::NeumannInterior)
            }
        }
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "maxwell" => Ok(OperatorKind::Maxwell),
            "dirichlet" => Ok(OperatorKind::Dirichlet),
            "neumann" => Ok(OperatorKind::Neumann),
            "neumannreduced" | "reducedneumann" => Ok(OperatorKind::NeumannReduced),
            _ => invalid(format!("unknown operator kind `{s}`")),
        }
    }
}

/// Lattice label `(m, n)` of a separated mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeIndex {
    pub m: [i64; 2],
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry<T> {
    #[serde(rename = "lambda")]
    pub value: T,
    #[serde(rename = "mult")]
    pub multiplicity: u32,
    pub branch: BranchTag,
    pub m: [i64; 2],
    pub n: u32,
}

impl<T> EigenEntry<T> {
    pub fn lattice_index(&self) -> LatticeIndex {
        LatticeIndex {
            m: self.m,
            n: self.n,
        }
    }
}

/// Eigenvalue with multiplicity, stripped of lattice provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEigenvalue<T> {
    #[serde(rename = "lambda")]
    pub value: T,
    #[serde(rename = "mult")]
    pub multiplicity: u32,
}

impl<T: Real> WeightedEigenvalue<T> {
    pub fn new(value: T, multiplicity: u32) -> Self {
        Self {
            value,
            multiplicity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Spectrum<T> {
    pub geometry: SlabGeometry<T>,
    pub operator_kind: OperatorKind,
    pub cutoff: T,
    pub entries: Vec<EigenEntry<T>>,
}

fn canonical_order<T: Real>(a: &EigenEntry<T>, b: &EigenEntry<T>) -> Ordering {
    a.value
        .partial_cmp(&b.value)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.m.cmp(&b.m))
        .then_with(|| a.n.cmp(&b.n))
        .then_with(|| a.branch.cmp(&b.branch))
}

/// Enumerates every lattice point of `kind` with `λ ≤ cutoff`, scanning a
/// search box `radius_scale` times the minimal one.
pub(crate) fn enumerate_lattice<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    cutoff: T,
    radius_scale: T,
) -> Vec<EigenEntry<T>> {
    let root = cutoff.sqrt();
    let lateral = geom.lateral_quantum();
    let vertical = geom.vertical_quantum();
    let m_max = (radius_scale * root / lateral)
        .floor()
        .to_i64()
        .unwrap_or(0)
        + 1;
    let n_max = (radius_scale * root / vertical)
        .floor()
        .to_u32()
        .unwrap_or(0)
        + 1;
    let mut entries = Vec::new();
    for n in 0..=n_max {
        let nu2 = geom.eigenvalue([0, 0], n);
        if nu2 > cutoff {
            break;
        }
        for mx in -m_max..=m_max {
            for my in -m_max..=m_max {
                let m = [mx, my];
                let Some(branch) = kind.branch_at(m, n) else {
                    continue;
                };
                let value = geom.eigenvalue(m, n);
                if value <= cutoff {
                    entries.push(EigenEntry {
                        value,
                        multiplicity: branch.multiplicity(),
                        branch,
                        m,
                        n,
                    });
                }
            }
        }
    }
    entries.sort_by(canonical_order);
    entries
}

fn check_cutoff<T: Real>(lambda_max: T) -> Result<()> {
    if lambda_max > T::zero() && lambda_max.is_finite() {
        Ok(())
    } else {
        invalid(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        ))
    }
}

/// All reduced Maxwell eigenvalues `≤ lambda_max`.
pub fn enumerate_maxwell_spectrum<T: Real>(
    geom: &SlabGeometry<T>,
    lambda_max: T,
) -> Result<Spectrum<T>> {
    check_cutoff(lambda_max)?;
    Ok(Spectrum {
        geometry: *geom,
        operator_kind: OperatorKind::Maxwell,
        cutoff: lambda_max,
        entries: enumerate_lattice(geom, OperatorKind::Maxwell, lambda_max, T::one()),
    })
}

/// Scalar comparison spectrum `≤ lambda_max`.
///
/// A zero cutoff is accepted for the unreduced Neumann operator, whose
/// constant mode sits exactly at `λ = 0`.
pub fn enumerate_scalar_spectrum<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    lambda_max: T,
) -> Result<Spectrum<T>> {
    if kind == OperatorKind::Maxwell {
        return invalid("use enumerate_maxwell_spectrum for the Maxwell operator");
    }
    if !(kind == OperatorKind::Neumann && lambda_max == T::zero()) {
        check_cutoff(lambda_max)?;
    }
    Ok(Spectrum {
        geometry: *geom,
        operator_kind: kind,
        cutoff: lambda_max,
        entries: enumerate_lattice(geom, kind, lambda_max, T::one()),
    })
}

/// Dispatches to the Maxwell or scalar enumerator.
pub fn enumerate_spectrum<T: Real>(
    geom: &SlabGeometry<T>,
    kind: OperatorKind,
    lambda_max: T,
) -> Result<Spectrum<T>> {
    match kind {
        OperatorKind::Maxwell => enumerate_maxwell_spectrum(geom, lambda_max),
        _ => enumerate_scalar_spectrum(geom, kind, lambda_max),
    }
}

/// Number of eigenvalues `≤ threshold`, counted with multiplicity.
pub fn counting_function<T: Real>(spec: &Spectrum<T>, threshold: T) -> Result<u64> {
    if threshold > spec.cutoff {
        return Err(Error::OutOfRange(format!(
            "threshold {threshold} exceeds the certified cutoff {}",
            spec.cutoff
        )));
    }
    Ok(spec
        .entries
        .iter()
        .take_while(|e| e.value <= threshold)
        .map(|e| e.multiplicity as u64)
        .sum())
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn min_value(&self) -> Option<T> {
        self.entries.first().map(|e| e.value)
    }

    pub fn counting_function(&self, threshold: T) -> Result<u64> {
        counting_function(self, threshold)
    }

    /// One `(λ, multiplicity)` per lattice entry.
    pub fn weighted(&self) -> Vec<WeightedEigenvalue<T>> {
        self.entries
            .iter()
            .map(|e| WeightedEigenvalue::new(e.value, e.multiplicity))
            .collect()
    }

    /// Entries merged by value (ties within `1e-12·λ`), for reporting.
    pub fn aggregated(&self) -> Vec<WeightedEigenvalue<T>> {
        let tie = T::lit(1e-12);
        let mut out: Vec<WeightedEigenvalue<T>> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some(last)
                    if (e.value - last.value).abs()
                        <= tie * last.value.abs().max(e.value.abs()) =>
                {
                    last.multiplicity += e.multiplicity;
                }
                _ => out.push(WeightedEigenvalue::new(e.value, e.multiplicity)),
            }
        }
        out
    }

    /// Checks sortedness, recomputed values, branch multiplicities and the
    /// branch assigned to each lattice index.
    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(1e-14);
        for (i, e) in self.entries.iter().enumerate() {
            let expected = self.geometry.eigenvalue(e.m, e.n);
            if (e.value - expected).abs() > tol * expected.max(T::one()) {
                return invalid(format!(
                    "entry {i}: value {} disagrees with lattice value {expected}",
                    e.value
                ));
            }
            if e.value > self.cutoff {
                return invalid(format!(
                    "entry {i}: value {} above cutoff {}",
                    e.value, self.cutoff
                ));
            }
            if self.operator_kind.branch_at(e.m, e.n) != Some(e.branch) {
                return invalid(format!(
                    "entry {i}: branch {:?} not allowed at {:?}",
                    e.branch,
                    e.lattice_index()
                ));
            }
            if e.multiplicity != e.branch.multiplicity() {
                return invalid(format!(
                    "entry {i}: multiplicity {} for branch {:?}",
                    e.multiplicity, e.branch
                ));
            }
            if i > 0 && canonical_order(&self.entries[i - 1], e) != Ordering::Less {
                return invalid(format!("entry {i} out of canonical order"));
            }
        }
        Ok(())
    }
}

impl<T: Real + Serialize> Spectrum<T> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// Tabular dump with columns `lambda,mult,branch,mx,my,n`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
        w.write_record(["lambda", "mult", "branch", "mx", "my", "n"])
            .map_err(io)?;
        for e in &self.entries {
            w.write_record([
                format!("{:?}", e.value),
                e.multiplicity.to_string(),
                e.branch.as_str().to_string(),
                e.m[0].to_string(),
                e.m[1].to_string(),
                e.n.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

impl<T: Real + for<'de> Deserialize<'de>> Spectrum<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Reads a synthetic eigenvalue list from CSV with header `lambda,mult`.
pub fn read_weighted_csv<T, R>(reader: R) -> Result<Vec<WeightedEigenvalue<T>>>
where
    T: Real + for<'de> Deserialize<'de>,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<WeightedEigenvalue<T>>() {
        let row = row.map_err(|e| Error::InvalidArgument(e.to_string()))?;
        if !(row.value >= T::zero()) || row.multiplicity == 0 {
            return invalid(format!(
                "bad synthetic mode ({}, {})",
                row.value, row.multiplicity
            ));
        }
        out.push(row);
    }
    Ok(out)
}

/// First lattice index at which the Maxwell spectrum and the scalar union disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy<T> {
    pub lattice_index: LatticeIndex,
    pub lambda: T,
    pub maxwell_multiplicity: u32,
    pub scalar_multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport<T> {
    pub equal: bool,
    pub cutoff: T,
    pub maxwell_total: u64,
    pub scalar_total: u64,
    pub discrepancy: Option<Discrepancy<T>>,
}

/// Compares a Maxwell spectrum with the disjoint union of a Dirichlet and a
/// reduced Neumann spectrum, index by index.
///
/// A Maxwell pair at `(m, n ≥ 1)` must be matched by the Dirichlet and the
/// Neumann mode at the same index; a normal-branch entry `(m ≠ 0, 0)` by the
/// Neumann zero-vertical mode. Total multiplicity per index must agree, so
/// the comparison never relies on floating-point ties.
pub fn compare_spectra<T: Real>(
    maxwell: &Spectrum<T>,
    dirichlet: &Spectrum<T>,
    neumann_reduced: &Spectrum<T>,
) -> Result<EquivalenceReport<T>> {
    if maxwell.operator_kind != OperatorKind::Maxwell
        || dirichlet.operator_kind != OperatorKind::Dirichlet
        || neumann_reduced.operator_kind != OperatorKind::NeumannReduced
    {
        return invalid("compare_spectra expects (Maxwell, Dirichlet, NeumannReduced) spectra");
    }
    let mut counts: BTreeMap<LatticeIndex, (T, u32, u32)> = BTreeMap::new();
    for e in &maxwell.entries {
        counts.entry(e.lattice_index()).or_insert((e.value, 0, 0)).1 += e.multiplicity;
    }
    for e in dirichlet.entries.iter().chain(&neumann_reduced.entries) {
        counts.entry(e.lattice_index()).or_insert((e.value, 0, 0)).2 += e.multiplicity;
    }
    let discrepancy = counts
        .iter()
        .filter(|(_, (_, mx, sc))| mx != sc)
        .map(|(idx, &(lambda, mx, sc))| Discrepancy {
            lattice_index: *idx,
            lambda,
            maxwell_multiplicity: mx,
            scalar_multiplicity: sc,
        })
        .min_by(|a, b| {
            a.lambda
                .partial_cmp(&b.lambda)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.lattice_index.cmp(&b.lattice_index))
        });
    Ok(EquivalenceReport {
        equal: discrepancy.is_none(),
        cutoff: maxwell.cutoff,
        maxwell_total: maxwell.total_multiplicity(),
        scalar_total: dirichlet.total_multiplicity() + neumann_reduced.total_multiplicity(),
        discrepancy,
    })
}

/// Enumerates all three spectra up to `lambda_max` and compares them.
pub fn verify_te_tm_equivalence<T: Real>(
    geom: &SlabGeometry<T>,
    lambda_max: T,
) -> Result<EquivalenceReport<T>> {
    let maxwell = enumerate_maxwell_spectrum(geom, lambda_max)?;
    let dirichlet = enumerate_scalar_spectrum(geom, OperatorKind::Dirichlet, lambda_max)?;
    let neumann = enumerate_scalar_spectrum(geom, OperatorKind::NeumannReduced, lambda_max)?;
    compare_spectra(&maxwell, &dirichlet, &neumann)
}
