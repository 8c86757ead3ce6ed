use proptest::prelude::*;

use casimir_slab::heat_trace::trace_at_cutoff;
use casimir_slab::*;

/// Brute-force Maxwell count with a deliberately oversized search box.
fn brute_force_maxwell(l: f64, a: f64, cutoff: f64) -> u64 {
    let k = 2.0 * std::f64::consts::PI / l;
    let nu = std::f64::consts::PI / a;
    let m_max = (2.0 * cutoff.sqrt() / k) as i64 + 2;
    let n_max = (2.0 * cutoff.sqrt() / nu) as i64 + 2;
    let mut total = 0;
    for mx in -m_max..=m_max {
        for my in -m_max..=m_max {
            for n in 0..=n_max {
                if mx == 0 && my == 0 && n == 0 {
                    continue;
                }
                let lambda = k * k * (mx * mx + my * my) as f64 + nu * nu * (n * n) as f64;
                if lambda <= cutoff {
                    total += if n == 0 { 1 } else { 2 };
                }
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn te_tm_equivalence_holds(l in 0.5f64..6.0, a in 0.3f64..3.0, factor in 1.0f64..60.0) {
        let geom = SlabGeometry64::new(l, a).unwrap();
        let report = verify_te_tm_equivalence(&geom, factor * geom.spectral_gap()).unwrap();
        prop_assert!(report.equal);
        prop_assert_eq!(report.maxwell_total, report.scalar_total);
    }

    #[test]
    fn enumeration_is_complete(l in 0.5f64..5.0, a in 0.3f64..3.0, factor in 1.0f64..40.0) {
        let geom = SlabGeometry64::new(l, a).unwrap();
        let cutoff = factor * geom.spectral_gap();
        let spec = enumerate_maxwell_spectrum(&geom, cutoff).unwrap();
        prop_assert_eq!(spec.total_multiplicity(), brute_force_maxwell(l, a, cutoff));
    }

    #[test]
    fn doubling_the_cutoff_extends_the_spectrum(l in 0.5f64..5.0, a in 0.3f64..3.0, factor in 1.0f64..30.0) {
        let geom = SlabGeometry64::new(l, a).unwrap();
        let cutoff = factor * geom.spectral_gap();
        let small = enumerate_maxwell_spectrum(&geom, cutoff).unwrap();
        let large = enumerate_maxwell_spectrum(&geom, 2.0 * cutoff).unwrap();
        let prefix: Vec<_> = large.entries.iter().filter(|e| e.value <= cutoff).cloned().collect();
        prop_assert_eq!(prefix, small.entries);
    }

    #[test]
    fn tail_bound_dominates_true_remainder(
        l in 1.0f64..5.0, a in 0.5f64..2.5, p in 0.0f64..2.0, tau in 0.3f64..2.0, factor in 2.0f64..20.0
    ) {
        let geom = SlabGeometry64::new(l, a).unwrap();
        let cut = factor * geom.spectral_gap();
        let lower = trace_at_cutoff(&geom, OperatorKind::Maxwell, p, tau, cut).unwrap();
        let upper = trace_at_cutoff(&geom, OperatorKind::Maxwell, p, tau, 4.0 * cut + 40.0 / tau).unwrap();
        prop_assert!(upper.value - lower.value <= lower.tail_bound * (1.0 + 1e-12) + 1e-14 * upper.value);
    }
}

#[test]
fn unit_lattice_first_value() {
    let spec = enumerate_maxwell_spectrum(&SlabGeometry64::unit_lattice(), 10.0).unwrap();
    assert_eq!(spec.min_value(), Some(1.0));
    let back = Spectrum64::from_json(&spec.to_json().unwrap()).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn single_precision_pipeline() {
    let geom = SlabGeometry32::unit_lattice();
    let report = verify_te_tm_equivalence(&geom, 50.0f32).unwrap();
    assert!(report.equal);
    let single = heat_trace(&HeatTraceRequest::new(
        geom,
        OperatorKind::Maxwell,
        0.5f32,
        1.0,
        1e-4,
    ))
    .unwrap();
    let double = heat_trace(&HeatTraceRequest::new(
        SlabGeometry64::unit_lattice(),
        OperatorKind::Maxwell,
        0.5,
        1.0,
        1e-10,
    ))
    .unwrap();
    assert!(((single.value as f64 - double.value) / double.value).abs() < 1e-4);
    let fp = zeta_finite_part(DensityChannel::MaxwellDensity, 1.0f32, 1.0);
    assert!((fp as f64 + std::f64::consts::PI.powi(2) / 720.0).abs() < 1e-7);
}

#[test]
fn invalid_inputs_are_classified() {
    assert_eq!(
        SlabGeometry64::new(-1.0, 1.0).unwrap_err().kind(),
        "invalid_argument"
    );
    let err = heat_trace(&HeatTraceRequest::new(
        SlabGeometry64::unit_lattice(),
        OperatorKind::Maxwell,
        0.5,
        -1.0,
        1e-8,
    ))
    .unwrap_err();
    assert!(err.is_invalid_input());
}

#[test]
fn dirichlet_heat_trace_factorizes_into_theta_functions() {
    let (l, a, tau) = (3.0f64, 1.7f64, 0.15f64);
    let k2 = (2.0 * std::f64::consts::PI / l).powi(2);
    let nu2 = (std::f64::consts::PI / a).powi(2);
    let lateral: f64 = (-200i64..=200)
        .map(|m| (-tau * k2 * (m * m) as f64).exp())
        .sum();
    let vertical: f64 = (1i64..=200)
        .map(|n| (-tau * nu2 * (n * n) as f64).exp())
        .sum();
    let oracle = lateral * lateral * vertical;
    let geom = SlabGeometry64::new(l, a).unwrap();
    let res = heat_trace(&HeatTraceRequest::new(
        geom,
        OperatorKind::Dirichlet,
        0.0,
        tau,
        1e-11,
    ))
    .unwrap();
    assert!((res.value - oracle).abs() <= 1e-11 + 1e-13 * oracle);
    let maxwell = heat_trace(&HeatTraceRequest::new(
        geom,
        OperatorKind::Maxwell,
        0.0,
        tau,
        1e-11,
    ))
    .unwrap();
    let neumann_reduced = lateral * lateral * (vertical + 1.0) - 1.0;
    assert!((maxwell.value - oracle - neumann_reduced).abs() <= 1e-10 + 1e-13 * maxwell.value);
}
