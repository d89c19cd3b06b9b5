//! The `verify` command: identity grid, series against closed forms,
//! random schedule validity, and region nesting.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use mgregion_core::analytic::{
    boundary_se, check_identity_grid, identity_closed, inner_region, outer_region, series, IdentityId,
};
use mgregion_core::netmodel::{build_hex, build_wyner, TopoKind};
use mgregion_core::region::{is_subset, polygon_from_constraints};
use mgregion_core::scheduler::{schedule, validate_schedule, Scheme};
use mgregion_core::traffic::{sample_activity, ArrivalModel, Coop, Depth, ScenarioParams};

use crate::args::{invalid, Format, VerifyArgs, VerifyPart};
use crate::output::{write_csv, write_json, SCHEMA};

const MODELS: [ArrivalModel; 2] = [ArrivalModel::Model1, ArrivalModel::Model2];
const SCHEMES: [Scheme; 4] = [
    Scheme::AdaptiveTxRx,
    Scheme::NonAdaptiveTxRx,
    Scheme::AdaptiveRx,
    Scheme::NonAdaptiveRx,
];

#[derive(Debug, Serialize)]
struct CheckRow {
    schema: u32,
    check: &'static str,
    pass: bool,
    checked: usize,
    failed: usize,
    max_error: f64,
    detail: String,
}

fn grid() -> impl Iterator<Item = (f64, f64, u32)> {
    [0.2, 0.4, 0.6, 0.8]
        .into_iter()
        .flat_map(|rho| [0.1, 0.3, 0.6, 0.9].into_iter().map(move |rf| (rho, rf)))
        .flat_map(|(rho, rf)| [2, 4, 10].into_iter().map(move |d| (rho, rf, d)))
}

fn params(rho: f64, rf: f64, depth: Depth, model: ArrivalModel, coop: Coop) -> ScenarioParams {
    ScenarioParams::new(rho, rf, depth, model, coop).expect("grid parameters are valid")
}

fn identities(tail: f64, flip: Option<IdentityId>) -> CheckRow {
    let report = check_identity_grid(1e-8, tail, |id, c, d, a, b| {
        let v = identity_closed(id, c, d, a, b)?;
        Ok(if Some(id) == flip { -v } else { v })
    });
    CheckRow {
        schema: SCHEMA,
        check: "identities",
        pass: report.failures.is_empty() && report.checked > 0,
        checked: report.checked,
        failed: report.failures.len(),
        max_error: report.max_error,
        detail: report
            .failures
            .first()
            .map(|f| format!("first mismatch {:?} at c={}, d={}, A={}, B={}", f.id, f.c, f.d, f.a, f.b))
            .unwrap_or_default(),
    }
}

fn series_check() -> CheckRow {
    let (mut checked, mut failed, mut worst) = (0, 0, 0.0_f64);
    let mut detail = String::new();
    for (rho, rf, d) in grid() {
        for model in MODELS {
            let tx = params(rho, rf, Depth::Finite(d), model, Coop::TxRx);
            let rx = ScenarioParams { coop: Coop::RxOnly, ..tx };
            let cases = [
                (series::txrx(&tx, 5000, series::LCount::Doubled), boundary_se(&tx, Scheme::AdaptiveTxRx, TopoKind::Wyner)),
                (series::rx(&rx, 5000), boundary_se(&rx, Scheme::AdaptiveRx, TopoKind::Wyner)),
            ];
            for (s, closed) in cases {
                checked += 1;
                let err = closed.map(|c| (c - s).abs()).unwrap_or(f64::INFINITY);
                worst = worst.max(err);
                if !(err <= 1e-6) {
                    failed += 1;
                    if detail.is_empty() {
                        detail = format!("{model:?} at ({rho}, {rf}, D={d}): |diff| {err:e}");
                    }
                }
            }
        }
    }
    CheckRow {
        schema: SCHEMA,
        check: "series",
        pass: failed == 0,
        checked,
        failed,
        max_error: worst,
        detail,
    }
}

fn schedules_check(draws: usize, seed: u64) -> CheckRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = 0;
    let mut detail = String::new();
    for _ in 0..draws {
        let scheme = SCHEMES[rng.random_range(0..4)];
        let model = MODELS[rng.random_range(0..2)];
        let (topo, depth) = if rng.random_bool(0.5) {
            let d = [0, 2, 4, 6, 10][rng.random_range(0..5)];
            (build_wyner(rng.random_range(1..=120)).expect("K >= 1"), Depth::Finite(d))
        } else {
            let (w, h) = [(3, 3), (6, 6), (9, 6), (12, 12)][rng.random_range(0..4)];
            (build_hex(w, h).expect("valid torus"), Depth::Infinite)
        };
        let p = params(rng.random_range(0.05..=1.0), rng.random_range(0.0..=1.0), depth, model, scheme.coop());
        let r = sample_activity(&p, &topo, &mut rng);
        let valid = schedule(&p, scheme, &topo, &r).map(|s| validate_schedule(&topo, &s, &p));
        match valid {
            Ok(report) if report.is_valid() => {}
            other => {
                failed += 1;
                if detail.is_empty() {
                    detail = format!("{} {p:?}: {other:?}", scheme.name());
                }
            }
        }
    }
    CheckRow {
        schema: SCHEMA,
        check: "schedules",
        pass: failed == 0,
        checked: draws,
        failed,
        max_error: 0.0,
        detail,
    }
}

fn regions_check() -> CheckRow {
    let (mut checked, mut failed, mut worst) = (0, 0, 0.0_f64);
    let mut detail = String::new();
    let mut cases: Vec<(ScenarioParams, Scheme, TopoKind)> = Vec::new();
    for (rho, rf, d) in grid() {
        for model in MODELS {
            for scheme in SCHEMES {
                cases.push((params(rho, rf, Depth::Finite(d), model, scheme.coop()), scheme, TopoKind::Wyner));
                if d == 2 {
                    cases.push((params(rho, rf, Depth::Infinite, model, scheme.coop()), scheme, TopoKind::Hex));
                }
            }
        }
    }
    for (p, scheme, topo) in cases {
        checked += 1;
        let inner = inner_region(&p, scheme, topo).and_then(|c| polygon_from_constraints(&c));
        let outer = outer_region(&p, topo).and_then(|c| polygon_from_constraints(&c));
        let v = match (inner, outer) {
            (Ok(i), Ok(o)) => is_subset(&i, &o, 200).1,
            _ => f64::INFINITY,
        };
        worst = worst.max(v);
        if !(v <= 1e-9) {
            failed += 1;
            if detail.is_empty() {
                detail = format!("{} {topo:?} {p:?}: violation {v:e}", scheme.name());
            }
        }
    }
    CheckRow {
        schema: SCHEMA,
        check: "regions",
        pass: failed == 0,
        checked,
        failed,
        max_error: worst,
        detail,
    }
}

pub fn verify(args: &VerifyArgs, config: &Value) -> Result<bool> {
    if args.output.format == Format::Svg {
        return invalid("verify has no SVG output; use json or csv");
    }
    if !(args.terms_tail > 0.0 && args.terms_tail < 1.0) {
        return invalid("--terms-tail must lie in (0, 1)");
    }
    let flip = match &args.inject_sign_flip {
        None => None,
        Some(name) => match IdentityId::ALL.iter().find(|id| id.name().eq_ignore_ascii_case(name)) {
            Some(&id) => Some(id),
            None => return invalid(format!("unknown identity {name:?}")),
        },
    };
    let wanted = |part: VerifyPart| args.only.is_none_or(|o| o == part);
    let mut rows = Vec::new();
    if wanted(VerifyPart::Identities) {
        rows.push(identities(args.terms_tail, flip));
    }
    if wanted(VerifyPart::Series) {
        rows.push(series_check());
    }
    if wanted(VerifyPart::Schedules) {
        rows.push(schedules_check(args.draws, args.seed));
    }
    if wanted(VerifyPart::Regions) {
        rows.push(regions_check());
    }
    let passed = rows.iter().all(|r| r.pass);
    for r in &rows {
        eprintln!(
            "{} {}: {} checked, {} failed, max error {:.2e}{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.checked,
            r.failed,
            r.max_error,
            if r.detail.is_empty() { String::new() } else { format!(" ({})", r.detail) }
        );
    }
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Csv => write_csv(out, config, &rows)?,
        _ => write_json(out, config, json!({ "checks": rows, "pass": passed }))?,
    }
    Ok(passed)
}
