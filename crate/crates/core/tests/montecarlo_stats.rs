use mgregion_core::analytic::{finite, scheme_point_se, su_max};
use mgregion_core::montecarlo::{compare, estimate, Axis};
use mgregion_core::netmodel::{build_hex, build_wyner, TopoKind};
use mgregion_core::scheduler::Scheme;
use mgregion_core::traffic::{ArrivalModel, Depth, ScenarioParams};

const SCHEMES: [Scheme; 4] = [
    Scheme::AdaptiveTxRx,
    Scheme::NonAdaptiveTxRx,
    Scheme::AdaptiveRx,
    Scheme::NonAdaptiveRx,
];

fn params(rho: f64, rf: f64, depth: Depth, model: ArrivalModel, scheme: Scheme) -> ScenarioParams {
    ScenarioParams::new(rho, rf, depth, model, scheme.coop()).unwrap()
}

#[test]
fn inactive_network_has_zero_mg() {
    let topo = build_wyner(100).unwrap();
    for scheme in SCHEMES {
        let p = params(0.0, 0.3, Depth::Finite(4), ArrivalModel::Model2, scheme);
        let e = estimate(&p, scheme, &topo, 5, 0, 2).unwrap();
        assert_eq!((e.su_mean, e.sum_mean, e.se_mean), (0.0, 0.0, 0.0));
    }
}

#[test]
fn nonadaptive_sum_without_urllc() {
    let topo = build_wyner(5000).unwrap();
    let p = params(0.8, 0.0, Depth::Finite(10), ArrivalModel::Model2, Scheme::NonAdaptiveTxRx);
    let e = estimate(&p, Scheme::NonAdaptiveTxRx, &topo, 100, 3, 4).unwrap();
    assert!((e.sum_mean - 0.8 * 11.0 / 12.0).abs() < 0.01, "{}", e.sum_mean);
}

#[test]
fn urllc_mean_is_unbiased_for_every_scheme() {
    let wyner = build_wyner(1000).unwrap();
    let hex = build_hex(18, 18).unwrap();
    for model in [ArrivalModel::Model1, ArrivalModel::Model2] {
        for scheme in SCHEMES {
            let p = params(0.6, 0.4, Depth::Finite(4), model, scheme);
            let e = estimate(&p, scheme, &wyner, 100, 17, 4).unwrap();
            let c = compare(&e, su_max(&p, TopoKind::Wyner), Axis::Su, 4.0);
            assert!(c.pass, "{scheme:?} {model:?}: {c:?}");
            let ph = ScenarioParams { depth: Depth::Infinite, ..p };
            let e = estimate(&ph, scheme, &hex, 100, 18, 4).unwrap();
            let c = compare(&e, su_max(&ph, TopoKind::Hex), Axis::Su, 4.0);
            assert!(c.pass, "torus {scheme:?} {model:?}: {c:?}");
        }
    }
}

#[test]
fn scheme_points_match_simulation() {
    let wyner = build_wyner(4000).unwrap();
    let hex = build_hex(30, 30).unwrap();
    for model in [ArrivalModel::Model1, ArrivalModel::Model2] {
        for scheme in SCHEMES {
            let p = params(0.7, 0.4, Depth::Finite(4), model, scheme);
            let e = estimate(&p, scheme, &wyner, 100, 23, 4).unwrap();
            let want = scheme_point_se(&p, scheme, TopoKind::Wyner).unwrap();
            let c = compare(&e, want, Axis::Se, 4.0);
            assert!(c.pass, "{scheme:?} {model:?}: {c:?}");
            let ph = ScenarioParams { depth: Depth::Infinite, ..p };
            let e = estimate(&ph, scheme, &hex, 100, 24, 4).unwrap();
            let want = scheme_point_se(&ph, scheme, TopoKind::Hex).unwrap();
            let c = compare(&e, want, Axis::Se, 4.0);
            assert!(c.pass, "torus {scheme:?} {model:?}: {c:?}");
        }
    }
}

#[test]
fn stderr_shrinks_like_inverse_sqrt_trials() {
    let topo = build_wyner(300).unwrap();
    let p = params(0.7, 0.4, Depth::Finite(4), ArrivalModel::Model1, Scheme::AdaptiveTxRx);
    let a = estimate(&p, Scheme::AdaptiveTxRx, &topo, 400, 5, 4).unwrap();
    let b = estimate(&p, Scheme::AdaptiveTxRx, &topo, 800, 6, 4).unwrap();
    let ratio = b.sum_stderr / a.sum_stderr;
    let want = 1.0 / 2f64.sqrt();
    assert!((ratio / want - 1.0).abs() < 0.2, "ratio {ratio}");
}

/// Edge effects shrink as the line grows. Exact expectations are used so
/// that sampling noise cannot mask the trend.
#[test]
fn edge_bias_decays_with_network_size() {
    for model in [ArrivalModel::Model1, ArrivalModel::Model2] {
        for scheme in SCHEMES {
            let p = params(0.8, 0.6, Depth::Finite(10), model, scheme);
            let limit = su_max(&p, TopoKind::Wyner) + scheme_point_se(&p, scheme, TopoKind::Wyner).unwrap();
            let mut prev = f64::INFINITY;
            for k in [500, 1000, 2000, 4000] {
                let (_, sum) = finite::expected_wyner(&p, scheme, k).unwrap();
                let bias = (sum / k as f64 - limit).abs();
                assert!(bias < prev || bias < 1e-12, "{scheme:?} {model:?} K={k}: {bias} vs {prev}");
                assert!(bias <= 10.0 / k as f64, "{scheme:?} {model:?} K={k}: {bias}");
                prev = bias;
            }
        }
    }
}
