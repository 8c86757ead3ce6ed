use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Finite box `T_L^2 × [0, a]`: a square lateral torus of period `L` between plates at distance `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry<T>", into = "RawGeometry<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct SlabGeometry<T> {
    lateral_size: T,
    plate_gap: T,
}

#[derive(Serialize, Deserialize)]
struct RawGeometry<T> {
    lateral_size: T,
    plate_gap: T,
}

impl<T: Real> TryFrom<RawGeometry<T>> for SlabGeometry<T> {
    type Error = Error;

    fn try_from(raw: RawGeometry<T>) -> Result<Self> {
        Self::new(raw.lateral_size, raw.plate_gap)
    }
}

impl<T: Real> From<SlabGeometry<T>> for RawGeometry<T> {
    fn from(g: SlabGeometry<T>) -> Self {
        Self {
            lateral_size: g.lateral_size,
            plate_gap: g.plate_gap,
        }
    }
}

impl<T: Real> SlabGeometry<T> {
    pub fn new(lateral_size: T, plate_gap: T) -> Result<Self> {
        if !(lateral_size > T::zero() && lateral_size.is_finite()) {
            return invalid(format!(
                "lateral size must be positive and finite, got {lateral_size}"
            ));
        }
        if !(plate_gap > T::zero() && plate_gap.is_finite()) {
            return invalid(format!(
                "plate gap must be positive and finite, got {plate_gap}"
            ));
        }
        Ok(Self {
            lateral_size,
            plate_gap,
        })
    }

    /// `L = 2π`, `a = π`: every eigenvalue is an integer sum of squares.
    pub fn unit_lattice() -> Self {
        Self {
            lateral_size: T::two() * T::PI(),
            plate_gap: T::PI(),
        }
    }

    pub fn lateral_size(&self) -> T {
        self.lateral_size
    }

    pub fn plate_gap(&self) -> T {
        self.plate_gap
    }

    /// Lateral momentum quantum `2π/L`.
    pub fn lateral_quantum(&self) -> T {
        T::two() * T::PI() / self.lateral_size
    }

    /// Vertical momentum quantum `π/a`.
    pub fn vertical_quantum(&self) -> T {
        T::PI() / self.plate_gap
    }

    /// Lateral momentum `k_m = 2π m / L`.
    pub fn lateral_momentum(&self, m: [i64; 2]) -> [T; 2] {
        let q = self.lateral_quantum();
        [q * T::from_count(m[0]), q * T::from_count(m[1])]
    }

    /// Vertical wavenumber `ν_n = π n / a`.
    pub fn vertical_wavenumber(&self, n: u32) -> T {
        self.vertical_quantum() * T::from_count(n as i64)
    }

    /// `λ_{m,n} = |k_m|² + ν_n²`.
    ///
    /// The integer norms are formed first so that lattice points with equal
    /// `|m|²` produce bit-identical values.
    pub fn eigenvalue(&self, m: [i64; 2], n: u32) -> T {
        let lateral = self.lateral_quantum();
        let vertical = self.vertical_quantum();
        let m2 = m[0] * m[0] + m[1] * m[1];
        let n2 = (n as i64) * (n as i64);
        lateral * lateral * T::from_count(m2) + vertical * vertical * T::from_count(n2)
    }

    /// Finite-volume spectral gap `min{(2π/L)², (π/a)²}`.
    pub fn spectral_gap(&self) -> T {
        let lateral = self.lateral_quantum();
        let vertical = self.vertical_quantum();
        (lateral * lateral).min(vertical * vertical)
    }
}

/// Free-function form of [`SlabGeometry::spectral_gap`].
pub fn spectral_gap<T: Real>(geom: &SlabGeometry<T>) -> T {
    geom.spectral_gap()
}
