//! Fourier coefficient-block algebra.
//!
//! A block `(m, n)` carries tangential coefficients `a ∈ ℂ²` (sine branch,
//! `n ≥ 1` only) and a normal coefficient `b ∈ ℂ`. The divergence constraint
//! is `D = i k_m·a − ν_n b = 0`, and for every block the curl coefficients
//! satisfy `|C|² + |D|² = λ_{m,n}(|a|² + |b|²)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::SlabGeometry;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct CoefficientBlock<T> {
    m: [i64; 2],
    n: u32,
    a: [Complex<T>; 2],
    b: Complex<T>,
}

impl<T: Real> CoefficientBlock<T> {
    /// Builds a block, rejecting tangential data at `n = 0` and the static
    /// normal mode `(m, n) = (0, 0)` with `b ≠ 0`.
    pub fn new(m: [i64; 2], n: u32, a: [Complex<T>; 2], b: Complex<T>) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        if n == 0 && (a[0] != zero || a[1] != zero) {
            return invalid("n = 0 blocks carry no tangential coefficients");
        }
        if n == 0 && m == [0, 0] && b != zero {
            return invalid("the (0,0) normal block is the static zero mode and is excluded");
        }
        Ok(Self { m, n, a, b })
    }

    pub fn m(&self) -> [i64; 2] {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tangential(&self) -> [Complex<T>; 2] {
        self.a
    }

    pub fn normal(&self) -> Complex<T> {
        self.b
    }

    /// Squared ℂ³ norm `|a|² + |b|²`.
    pub fn norm_sqr(&self) -> T {
        self.a[0].norm_sqr() + self.a[1].norm_sqr() + self.b.norm_sqr()
    }

    /// ℂ³ inner product `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.a[0].conj() * other.a[0] + self.a[1].conj() * other.a[1] + self.b.conj() * other.b
    }
}

fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `D = i k_m·a − ν_n b` for a sine-branch block.
pub fn divergence_coefficient<T: Real>(
    block: &CoefficientBlock<T>,
    geom: &SlabGeometry<T>,
) -> Result<Complex<T>> {
    if block.n == 0 {
        return invalid("the divergence constraint only applies to n >= 1 blocks");
    }
    let k = geom.lateral_momentum(block.m);
    let nu = geom.vertical_wavenumber(block.n);
    let k_dot_a = block.a[0] * k[0] + block.a[1] * k[1];
    Ok(i_unit::<T>() * k_dot_a - block.b * nu)
}

/// Curl coefficients `(C^x, C^y, C^z)` of a block.
pub fn curl_coefficients<T: Real>(
    block: &CoefficientBlock<T>,
    geom: &SlabGeometry<T>,
) -> [Complex<T>; 3] {
    let [kx, ky] = geom.lateral_momentum(block.m);
    let i = i_unit::<T>();
    let b = block.b;
    if block.n == 0 {
        return [i * b * ky, -(i * b * kx), real(T::zero())];
    }
    let nu = geom.vertical_wavenumber(block.n);
    let [ax, ay] = block.a;
    [
        i * b * ky - ay * nu,
        ax * nu - i * b * kx,
        i * (ay * kx - ax * ky),
    ]
}

fn curl_norm_sqr<T: Real>(curl: &[Complex<T>; 3]) -> T {
    curl.iter()
        .map(|c| c.norm_sqr())
        .fold(T::zero(), |acc, v| acc + v)
}

/// `| |C|² + |D|² − λ_{m,n}(|a|² + |b|²) |` for a sine-branch block.
pub fn curl_div_identity_residual<T: Real>(
    block: &CoefficientBlock<T>,
    geom: &SlabGeometry<T>,
) -> Result<T> {
    let d = divergence_coefficient(block, geom)?;
    let lhs = curl_norm_sqr(&curl_coefficients(block, geom)) + d.norm_sqr();
    let rhs = geom.eigenvalue(block.m, block.n) * block.norm_sqr();
    Ok((lhs - rhs).abs())
}

/// `| |C|² − |k_m|²|b|² | + |C^z|` for an `n = 0` block.
pub fn zero_branch_identity_residual<T: Real>(
    block: &CoefficientBlock<T>,
    geom: &SlabGeometry<T>,
) -> Result<T> {
    if block.n != 0 {
        return invalid("zero-branch identity applies to n = 0 blocks only");
    }
    let curl = curl_coefficients(block, geom);
    let k2 = geom.eigenvalue(block.m, 0);
    Ok((curl_norm_sqr(&curl) - k2 * block.b.norm_sqr()).abs() + curl[2].norm())
}

/// Orthonormal polarization pair for one `(m, n)` eigenvalue block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct ModePair<T> {
    pub te: CoefficientBlock<T>,
    pub tm: CoefficientBlock<T>,
    pub lambda: T,
}

impl<T: Real> ModePair<T> {
    /// Largest violation of the pair's invariants: divergence residuals,
    /// unit norms, orthogonality, and the eigen-block condition
    /// `|C|² = λ·‖block‖²`.
    pub fn max_residual(&self, geom: &SlabGeometry<T>) -> Result<T> {
        let mut worst = T::zero();
        for block in [&self.te, &self.tm] {
            let d = divergence_coefficient(block, geom)?.norm();
            let norm = (block.norm_sqr() - T::one()).abs();
            let eigen = (curl_norm_sqr(&curl_coefficients(block, geom))
                - self.lambda * block.norm_sqr())
            .abs()
                / self.lambda;
            worst = worst.max(d / self.lambda.sqrt()).max(norm).max(eigen);
        }
        Ok(worst.max(self.te.inner(&self.tm).norm()))
    }
}

/// TE/TM pair at `m ≠ 0`, `n ≥ 1`: TE `a = k̂⊥, b = 0`; TM `a = −i(ν/√λ)k̂, b = |k|/√λ`.
pub fn build_te_tm_pair<T: Real>(
    m: [i64; 2],
    n: u32,
    geom: &SlabGeometry<T>,
) -> Result<ModePair<T>> {
    if m == [0, 0] {
        return invalid("TE/TM labels are not canonical at m = 0; use build_zero_m_pair");
    }
    if n == 0 {
        return invalid("TE/TM pairs require n >= 1");
    }
    let [kx, ky] = geom.lateral_momentum(m);
    let k_abs = kx.hypot(ky);
    let nu = geom.vertical_wavenumber(n);
    let lambda = geom.eigenvalue(m, n);
    let root = lambda.sqrt();
    let zero = real(T::zero());
    let (hx, hy) = (kx / k_abs, ky / k_abs);
    let te = CoefficientBlock::new(m, n, [real(-hy), real(hx)], zero)?;
    let scale = -(i_unit::<T>() * (nu / root));
    let tm = CoefficientBlock::new(m, n, [scale * hx, scale * hy], real(k_abs / root))?;
    Ok(ModePair { te, tm, lambda })
}

/// Zero-lateral-momentum pair at `n ≥ 1`: `a = e_x` and `a = e_y`, `b = 0`, `λ = ν_n²`.
///
/// At `m = 0` any orthonormal rotation of this pair is equally valid; this
/// one is pinned for reproducible fixtures.
pub fn build_zero_m_pair<T: Real>(n: u32, geom: &SlabGeometry<T>) -> Result<ModePair<T>> {
    if n == 0 {
        return invalid("zero-m polarization pair requires n >= 1");
    }
    let zero = real(T::zero());
    let one = real(T::one());
    Ok(ModePair {
        te: CoefficientBlock::new([0, 0], n, [one, zero], zero)?,
        tm: CoefficientBlock::new([0, 0], n, [zero, one], zero)?,
        lambda: geom.eigenvalue([0, 0], n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn unit() -> SlabGeometry<f64> {
        SlabGeometry::unit_lattice()
    }

    fn close(a: C, b: C) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn divergence_examples() {
        let g = unit();
        let b1 = CoefficientBlock::new([1, 0], 1, [c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert!(close(divergence_coefficient(&b1, &g).unwrap(), c(0.0, 0.0)));
        let b2 = CoefficientBlock::new([1, 0], 1, [c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 1.0)).unwrap();
        assert!(close(divergence_coefficient(&b2, &g).unwrap(), c(0.0, 0.0)));
        let b3 = CoefficientBlock::new([1, 0], 1, [c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert!(close(divergence_coefficient(&b3, &g).unwrap(), c(0.0, 1.0)));
        let b0 = CoefficientBlock::new([1, 0], 0, [c(0.0, 0.0); 2], c(1.0, 0.0)).unwrap();
        assert!(divergence_coefficient(&b0, &g).is_err());
    }

    #[test]
    fn curl_examples() {
        let g = unit();
        let b = CoefficientBlock::new([1, 0], 1, [c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0)).unwrap();
        let curl = curl_coefficients(&b, &g);
        assert!(
            close(curl[0], c(-1.0, 0.0))
                && close(curl[1], c(0.0, 0.0))
                && close(curl[2], c(0.0, 1.0))
        );

        let b0 = CoefficientBlock::new([1, 0], 0, [c(0.0, 0.0); 2], c(1.0, 0.0)).unwrap();
        let curl = curl_coefficients(&b0, &g);
        assert!(
            close(curl[0], c(0.0, 0.0))
                && close(curl[1], c(0.0, -1.0))
                && close(curl[2], c(0.0, 0.0))
        );

        let z = CoefficientBlock::new([3, -1], 2, [c(0.0, 0.0); 2], c(0.0, 0.0)).unwrap();
        assert!(curl_coefficients(&z, &g).iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn identity_examples() {
        let g = unit();
        let b = CoefficientBlock::new([1, 0], 1, [c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0)).unwrap();
        assert!(curl_div_identity_residual(&b, &g).unwrap() < 1e-15);
        let z = CoefficientBlock::new([0, 0], 3, [c(0.0, 0.0); 2], c(0.0, 0.0)).unwrap();
        assert_eq!(curl_div_identity_residual(&z, &g).unwrap(), 0.0);
        let b0 = CoefficientBlock::new([2, 1], 0, [c(0.0, 0.0); 2], c(0.3, -0.7)).unwrap();
        assert!(curl_div_identity_residual(&b0, &g).is_err());
        assert!(zero_branch_identity_residual(&b0, &g).unwrap() < 1e-14);
    }

    #[test]
    fn block_constructor_rejections() {
        assert!(CoefficientBlock::new([1, 0], 0, [c(1.0, 0.0), c(0.0, 0.0)], c(0.0, 0.0)).is_err());
        assert!(CoefficientBlock::new([0, 0], 0, [c(0.0, 0.0); 2], c(1.0, 0.0)).is_err());
        assert!(CoefficientBlock::new([0, 0], 0, [c(0.0, 0.0); 2], c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn te_tm_fixture() {
        let g = unit();
        let pair = build_te_tm_pair([1, 0], 1, &g).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(pair.te.tangential()[0], c(0.0, 0.0)));
        assert!(close(pair.te.tangential()[1], c(1.0, 0.0)));
        assert_eq!(pair.te.normal(), c(0.0, 0.0));
        assert!(close(pair.tm.tangential()[0], c(0.0, -s)));
        assert!(close(pair.tm.tangential()[1], c(0.0, 0.0)));
        assert!(close(pair.tm.normal(), c(s, 0.0)));
        assert!((pair.lambda - 2.0).abs() < 1e-15);
        assert!(pair.max_residual(&g).unwrap() < 1e-14);
        assert!(build_te_tm_pair([0, 0], 1, &g).is_err());
        assert!(build_te_tm_pair([1, 0], 0, &g).is_err());
    }

    #[test]
    fn zero_m_pair_fixture() {
        let g = unit();
        let pair = build_zero_m_pair(1, &g).unwrap();
        assert_eq!(pair.lambda, 1.0);
        assert_eq!(pair.te.tangential(), [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(pair.tm.tangential(), [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(pair.te.inner(&pair.tm), c(0.0, 0.0));
        assert_eq!(pair.max_residual(&g).unwrap(), 0.0);
        assert!(build_zero_m_pair(0, &g).is_err());
    }

    #[test]
    fn block_json_layout() {
        let b =
            CoefficientBlock::new([1, -2], 3, [c(1.0, 2.0), c(-0.5, 0.0)], c(0.0, 1.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(b).unwrap();
        assert_eq!(v["a"], serde_json::json!([[1.0, 2.0], [-0.5, 0.0]]));
        assert_eq!(v["b"], serde_json::json!([0.0, 1.0]));
        assert_eq!(v["m"], serde_json::json!([1, -2]));
        let back: CoefficientBlock<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, b);
    }

    fn disc() -> impl Strategy<Value = C> {
        (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r.sqrt(), t))
    }

    proptest! {
        #[test]
        fn curl_div_identity_holds(
            mx in -20i64..=20, my in -20i64..=20, n in 1u32..30,
            l in 0.3..10.0f64, a in 0.3..10.0f64,
            ax in disc(), ay in disc(), b in disc(),
        ) {
            let g = SlabGeometry::new(l, a).unwrap();
            let block = CoefficientBlock::new([mx, my], n, [ax, ay], b).unwrap();
            let scale = g.eigenvalue([mx, my], n) * block.norm_sqr();
            let r = curl_div_identity_residual(&block, &g).unwrap();
            prop_assert!(r <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn zero_branch_identity_holds(mx in -20i64..=20, my in -20i64..=20, l in 0.3..10.0f64, b in disc()) {
            prop_assume!([mx, my] != [0, 0]);
            let g = SlabGeometry::new(l, 1.0).unwrap();
            let block = CoefficientBlock::new([mx, my], 0, [C::new(0.0, 0.0); 2], b).unwrap();
            let scale = g.eigenvalue([mx, my], 0) * b.norm_sqr();
            prop_assert!(zero_branch_identity_residual(&block, &g).unwrap() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn te_tm_pairs_are_orthonormal_eigenblocks(
            mx in -15i64..=15, my in -15i64..=15, n in 1u32..20, l in 0.3..10.0f64, a in 0.3..10.0f64,
        ) {
            prop_assume!([mx, my] != [0, 0]);
            let g = SlabGeometry::new(l, a).unwrap();
            let pair = build_te_tm_pair([mx, my], n, &g).unwrap();
            prop_assert!(pair.max_residual(&g).unwrap() < 1e-14);
            let nu = g.vertical_wavenumber(n);
            let k2 = g.eigenvalue([mx, my], 0);
            prop_assert!((nu * nu / pair.lambda + k2 / pair.lambda - 1.0).abs() < 1e-14);
        }
    }
}
