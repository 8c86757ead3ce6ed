//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals.

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_057_840_794,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Relative tolerance and subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSettings {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return invalid(format!(
                "quadrature tolerance must be positive, got {}",
                self.rel_tol
            ));
        }
        if self.max_subdivisions == 0 {
            return invalid("quadrature needs at least one subdivision");
        }
        Ok(())
    }
}

/// Integral estimate with its error estimate and the number of panels used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error: T,
    pub subdivisions: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn kronrod_panel<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Panel<T> {
    let center = T::half() * (lo + hi);
    let half_len = T::half() * (hi - lo);
    let f_center = f(center);
    let mut kronrod = f_center * T::lit(WGK[10]);
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    let value = kronrod * half_len;
    let raw_err = ((kronrod - gauss) * half_len).abs();
    // floor the error at rounding level so converged panels do not get split forever
    let floor = T::lit(50.0) * T::epsilon() * value.abs();
    Panel {
        lo,
        hi,
        value,
        error: raw_err.max(floor),
    }
}

/// Integrates `f` over `[lo, hi]` until the summed panel error is below `rel_tol · |I|`.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult<T>> {
    settings.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return invalid("integration limits must be finite");
    }
    let tol = T::lit(settings.rel_tol);
    let mut panels = vec![kronrod_panel(&f, lo, hi)];
    loop {
        let value: T = panels.iter().map(|p| p.value).sum();
        let error: T = panels.iter().map(|p| p.error).sum();
        if error <= tol * value.abs() || error == T::zero() {
            return Ok(QuadratureResult {
                value,
                abs_error: error,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= settings.max_subdivisions {
            return Err(Error::QuadratureNonconvergence {
                estimate: value.to_f64().unwrap_or(f64::NAN),
                error: error.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, p)| {
                    if p.error > be {
                        (i, p.error)
                    } else {
                        (bi, be)
                    }
                });
        let p = panels.swap_remove(worst);
        let mid = T::half() * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            return Err(Error::QuadratureNonconvergence {
                estimate: value.to_f64().unwrap_or(f64::NAN),
                error: error.to_f64().unwrap_or(f64::NAN),
            });
        }
        panels.push(kronrod_panel(&f, p.lo, mid));
        panels.push(kronrod_panel(&f, mid, p.hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        // single panel on [-1, 1]: ∫ x^k = 2/(k+1) for even k
        for k in (0..=30).step_by(2) {
            let p = kronrod_panel(&|x: f64| x.powi(k), -1.0, 1.0);
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((p.value - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn gauss_rule_is_exact_for_degree_19() {
        for k in (0..=18).step_by(2) {
            let gauss: f64 = (0..5).map(|j| WG[j] * 2.0 * XGK[2 * j + 1].powi(k)).sum();
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((gauss - exact).abs() < 1e-14, "degree {k}");
        }
        let total: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        assert!((total - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(
            |x: f64| x.powf(-0.5),
            0.0,
            1.0,
            &QuadratureSettings::with_tolerance(1e-10),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!(r.subdivisions > 1);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let s = QuadratureSettings {
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        match integrate(|x: f64| (1.0 / x).sin() * x.powf(-0.9), 1e-8, 1.0, &s) {
            Err(Error::QuadratureNonconvergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_settings() {
        let s = QuadratureSettings {
            rel_tol: 0.0,
            max_subdivisions: 10,
        };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &s).is_err());
    }
}
