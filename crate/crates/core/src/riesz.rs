//! Codimension-three Riesz reduction.
//!
//! For a spectral value `λ > 0` and `s > 3/2`,
//! `T_s(λ) = ∫ d³q/(2π)³ (λ + |q|²)^{−s} = (4π)^{−3/2} Γ(s−3/2)/Γ(s) λ^{3/2−s}`,
//! which at `s = 5/2` is `λ^{−1}/(6π²)`. The numerical route reduces to the
//! radial integral `(1/2π²) ∫₀^∞ q² (λ+q²)^{−s} dq` and compactifies it with
//! `q = √λ tan θ`, giving `λ^{3/2−s}/(2π²) ∫₀^{π/2} sin²θ cos^{2s−4}θ dθ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::SlabGeometry;
use crate::quadrature::{integrate, QuadratureSettings};
use crate::scalar::Real;
use crate::special::gamma;
use crate::spectrum::enumerate_maxwell_spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszRequest<T> {
    pub lambda: T,
    pub s: T,
    pub quadrature: QuadratureSettings,
}

impl<T: Real> RieszRequest<T> {
    pub fn new(lambda: T, s: T, quadrature: QuadratureSettings) -> Self {
        Self {
            lambda,
            s,
            quadrature,
        }
    }
}

fn check_args<T: Real>(lambda: T, s: T) -> Result<()> {
    if !(s > T::lit(1.5) && s.is_finite()) {
        return invalid(format!(
            "the transverse integral diverges unless s > 3/2, got s = {s}"
        ));
    }
    if !(lambda > T::zero() && lambda.is_finite()) {
        return invalid(format!("lambda must be positive, got {lambda}"));
    }
    Ok(())
}

/// Transverse momentum profile `|η̂(u)|²` of a normalized mollifier (`η̂(0) = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MollifierProfile {
    /// `η̂(u) = exp(−u²/2)`.
    #[default]
    Gaussian,
    /// `η̂(u) = (1 + u²)^{−2}`.
    RationalQuartic,
}

impl MollifierProfile {
    fn weight<T: Real>(self, u: T) -> T {
        let u2 = u * u;
        match self {
            MollifierProfile::Gaussian => (-u2).exp(),
            MollifierProfile::RationalQuartic => (T::one() + u2).powi(-4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierProbe<T> {
    pub lambda: T,
    /// Mollifier width; `0` selects the exact unmollified limit.
    pub epsilon: T,
    pub profile: MollifierProfile,
}

fn transverse_integral<T: Real>(
    lambda: T,
    s: T,
    weight: impl Fn(T) -> T,
    split: Option<T>,
    quad: &QuadratureSettings,
) -> Result<T> {
    let root = lambda.sqrt();
    let power = T::two() * s - T::lit(4.0);
    let integrand = |theta: T| {
        let (sin, cos) = theta.sin_cos();
        sin * sin * cos.powf(power) * weight(root * theta.tan())
    };
    let end = T::FRAC_PI_2();
    let raw = match split {
        Some(mid) if mid > T::zero() && mid < end => {
            integrate(integrand, T::zero(), mid, quad)?.value
                + integrate(integrand, mid, end, quad)?.value
        }
        _ => integrate(integrand, T::zero(), end, quad)?.value,
    };
    let two_pi_sq = T::two() * T::PI() * T::PI();
    Ok(lambda.powf(T::lit(1.5) - s) * raw / two_pi_sq)
}

/// Adaptive-quadrature value of `T_s(λ)`.
pub fn riesz_integral_numeric<T: Real>(req: &RieszRequest<T>) -> Result<T> {
    check_args(req.lambda, req.s)?;
    transverse_integral(req.lambda, req.s, |_| T::one(), None, &req.quadrature)
}

/// Closed form `(4π)^{−3/2} Γ(s−3/2)/Γ(s) λ^{3/2−s}`.
pub fn riesz_integral_analytic<T: Real>(lambda: T, s: T) -> Result<T> {
    check_args(lambda, s)?;
    let three_halves = T::lit(1.5);
    let prefactor = (T::lit(4.0) * T::PI()).powf(-three_halves);
    Ok(prefactor * gamma(s - three_halves) / gamma(s) * lambda.powf(three_halves - s))
}

/// Mediator prefactor `g = κ/(6π²)`.
pub fn mediator_coupling<T: Real>(kappa: T) -> T {
    kappa / (T::lit(6.0) * T::PI() * T::PI())
}

/// `(1/2π²) ∫₀^∞ q² |η̂(εq)|² (λ+q²)^{−s} dq`.
pub fn mollified_restriction<T: Real>(
    probe: &MollifierProbe<T>,
    s: T,
    quad: &QuadratureSettings,
) -> Result<T> {
    check_args(probe.lambda, s)?;
    if !(probe.epsilon >= T::zero() && probe.epsilon.is_finite()) {
        return invalid(format!(
            "mollifier width must be nonnegative, got {}",
            probe.epsilon
        ));
    }
    if probe.epsilon == T::zero() {
        return riesz_integral_analytic(probe.lambda, s);
    }
    let eps = probe.epsilon;
    let profile = probe.profile;
    // the profile cuts off near q ≈ 1/ε, i.e. tan θ ≈ 1/(ε√λ)
    let split = (T::one() / (eps * probe.lambda.sqrt())).atan();
    transverse_integral(
        probe.lambda,
        s,
        |q| profile.weight(eps * q),
        Some(split),
        quad,
    )
}

fn solve3<T: Real>(m: [[T; 3]; 3], rhs: [T; 3]) -> Result<[T; 3]> {
    let det = |a: [[T; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d == T::zero() || !d.is_finite() {
        return invalid("singular extrapolation system");
    }
    let mut out = [T::zero(); 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][col] = rhs[row];
        }
        *slot = det(a) / d;
    }
    Ok(out)
}

/// `ε → 0` limit of the mollified restriction, extrapolated from widths
/// `ε₀, ε₀/2, ε₀/4`.
///
/// The deviation from the limit behaves like `ε^{2s−3}` for `s < 5/2`,
/// `ε² ln ε` at `s = 5/2`, and `ε²` above; the two leading terms of that
/// model are eliminated.
pub fn mollified_limit<T: Real>(
    lambda: T,
    s: T,
    profile: MollifierProfile,
    epsilon0: T,
    quad: &QuadratureSettings,
) -> Result<T> {
    check_args(lambda, s)?;
    if !(epsilon0 > T::zero()) {
        return invalid("extrapolation needs a positive initial width");
    }
    let five_halves = T::lit(2.5);
    let basis = |e: T| -> [T; 2] {
        if s < five_halves {
            [e.powf(T::two() * s - T::lit(3.0)), e * e]
        } else if s == five_halves {
            [e * e * e.ln(), e * e]
        } else {
            [e * e, e.powf((T::two() * s - T::lit(3.0)).min(T::lit(4.0)))]
        }
    };
    let mut rows = [[T::zero(); 3]; 3];
    let mut rhs = [T::zero(); 3];
    let mut eps = epsilon0;
    for i in 0..3 {
        let [b1, b2] = basis(eps);
        rows[i] = [T::one(), b1, b2];
        rhs[i] = mollified_restriction(
            &MollifierProbe {
                lambda,
                epsilon: eps,
                profile,
            },
            s,
            quad,
        )?;
        eps = eps * T::half();
    }
    Ok(solve3(rows, rhs)?[0])
}

/// Numeric value, closed form and relative deviation for one spectral value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszComparison<T> {
    pub numeric: T,
    pub analytic: T,
    pub rel_dev: T,
}

/// Compares the numeric transverse integral (optionally mollified) with the closed form.
pub fn riesz_compare<T: Real>(
    lambda: T,
    s: T,
    epsilon: Option<T>,
    quad: &QuadratureSettings,
) -> Result<RieszComparison<T>> {
    let analytic = riesz_integral_analytic(lambda, s)?;
    let numeric = match epsilon {
        Some(epsilon) => mollified_restriction(
            &MollifierProbe {
                lambda,
                epsilon,
                profile: MollifierProfile::Gaussian,
            },
            s,
            quad,
        )?,
        None => riesz_integral_numeric(&RieszRequest::new(lambda, s, *quad))?,
    };
    Ok(RieszComparison {
        numeric,
        analytic,
        rel_dev: ((numeric - analytic) / analytic).abs(),
    })
}

/// Largest relative deviation of the numeric `T_{5/2}(λ)` from `λ^{−1}/(6π²)` over the given values.
pub fn mediator_deviation<T: Real>(values: &[T], quad: &QuadratureSettings) -> Result<T> {
    let six_pi_sq = T::lit(6.0) * T::PI() * T::PI();
    let mut worst = T::zero();
    for &lambda in values {
        let numeric = riesz_integral_numeric(&RieszRequest::new(lambda, T::lit(2.5), *quad))?;
        let exact = T::one() / (six_pi_sq * lambda);
        worst = worst.max(((numeric - exact) / exact).abs());
    }
    Ok(worst)
}

/// Checks `V = g L^{−1}` diagonally on every distinct Maxwell eigenvalue up to `lambda_max`.
pub fn reduced_mediator_check<T: Real>(
    geom: &SlabGeometry<T>,
    lambda_max: T,
    quad: &QuadratureSettings,
) -> Result<T> {
    let spectrum = enumerate_maxwell_spectrum(geom, lambda_max)?;
    let values: Vec<T> = spectrum.aggregated().into_iter().map(|w| w.value).collect();
    mediator_deviation(&values, quad)
}
