use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use mgregion_core::analytic::{
    boundary_se, inner_region, intercept, outer_region, scheme_point_se, se_max, slope_coefficient, su_max,
    LinearConstraint,
};
use mgregion_core::montecarlo::{
    compare, compare_values, estimate, estimate_offcolor_embb, trial_realization, Axis, Comparison,
};
use mgregion_core::netmodel::{hex_color_partition, TopoKind};
use mgregion_core::region::{polygon_from_constraints, to_svg, MGRegion};
use mgregion_core::scheduler::{schedule, validate_schedule, MGTally, PhasedSchedule, Scheme};
use mgregion_core::traffic::{ActivityRealization, ArrivalModel, Coop, Depth, ScenarioParams};

use crate::args::{
    invalid, parse_depth, scenario, to_valid, topology, Format, RegionArgs, SimulateArgs, SweepArgs, TopoArg,
    TopologyArgs,
};
use crate::output::{write_csv, write_json, write_svg, SCHEMA};

/// Whether every check of a command passed; failures exit with code 3.
pub type Passed = bool;

fn schemes_for(coop: Coop) -> [Scheme; 2] {
    [Scheme::from_parts(true, coop), Scheme::from_parts(false, coop)]
}

fn depth_label(d: Depth) -> String {
    match d {
        Depth::Finite(d) => d.to_string(),
        Depth::Infinite => "inf".into(),
    }
}

fn no_svg(format: Format, command: &str) -> Result<()> {
    if format == Format::Svg {
        return invalid(format!("{command} has no SVG output; use json or csv"));
    }
    Ok(())
}

#[derive(Serialize)]
struct Coefficient {
    name: String,
    value: Option<f64>,
}

#[derive(Serialize)]
struct NamedRegion {
    name: String,
    region: MGRegion,
}

#[derive(Serialize)]
struct RegionRow {
    schema: u32,
    kind: &'static str,
    name: String,
    index: Option<usize>,
    su: Option<f64>,
    se: Option<f64>,
    value: Option<f64>,
}

fn polygon(constraints: mgregion_core::Result<Vec<LinearConstraint>>) -> Result<MGRegion> {
    to_valid(constraints.and_then(|c| polygon_from_constraints(&c)))
}

pub fn region(args: &RegionArgs, config: &Value) -> Result<Passed> {
    let p = scenario(&args.scenario)?;
    let topo = args.scenario.topo.kind();
    let mut regions = Vec::new();
    let mut coefficients = Vec::new();
    for scheme in schemes_for(p.coop) {
        let tag = if scheme.is_adaptive() { "adaptive" } else { "nonadaptive" };
        regions.push(NamedRegion {
            name: format!("inner_{tag}"),
            region: polygon(inner_region(&p, scheme, topo))?,
        });
        coefficients.push(Coefficient {
            name: format!("slope_{tag}"),
            value: slope_coefficient(&p, scheme, topo).ok(),
        });
        coefficients.push(Coefficient {
            name: format!("intercept_{tag}"),
            value: Some(to_valid(intercept(&p, scheme, topo))?),
        });
        coefficients.push(Coefficient {
            name: format!("boundary_se_{tag}"),
            value: Some(to_valid(boundary_se(&p, scheme, topo))?),
        });
    }
    regions.push(NamedRegion {
        name: "outer".into(),
        region: polygon(outer_region(&p, topo))?,
    });
    coefficients.push(Coefficient {
        name: "su_max".into(),
        value: Some(su_max(&p, topo)),
    });
    if topo == TopoKind::Wyner {
        coefficients.push(Coefficient {
            name: "se_max".into(),
            value: Some(se_max(&p)),
        });
    }
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => write_json(out, config, json!({ "regions": regions, "coefficients": coefficients }))?,
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &regions {
                for (i, &(su, se)) in r.region.vertices.iter().enumerate() {
                    rows.push(RegionRow {
                        schema: SCHEMA,
                        kind: "vertex",
                        name: r.name.clone(),
                        index: Some(i),
                        su: Some(su),
                        se: Some(se),
                        value: None,
                    });
                }
            }
            for c in &coefficients {
                rows.push(RegionRow {
                    schema: SCHEMA,
                    kind: "coefficient",
                    name: c.name.clone(),
                    index: None,
                    su: None,
                    se: None,
                    value: c.value,
                });
            }
            write_csv(out, config, &rows)?;
        }
        Format::Svg => {
            let curves: Vec<(&str, &MGRegion)> = regions.iter().map(|r| (r.name.as_str(), &r.region)).collect();
            write_svg(out, config, &to_svg(&curves))?;
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct SimRow {
    schema: u32,
    scheme: &'static str,
    k: usize,
    trials: usize,
    seed: u64,
    axis: String,
    mean: f64,
    target: f64,
    stderr: f64,
    k_sigma: f64,
    bias_allowance: f64,
    deviation: f64,
    pass: bool,
}

/// A logged trial: the realization plus, optionally, the tally it gave.
#[derive(Serialize, Deserialize)]
struct TrialLog {
    realization: ActivityRealization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tally: Option<MGTally>,
}

#[derive(Serialize)]
struct RoleRow {
    schema: u32,
    phase: usize,
    user: usize,
    active: u8,
    urllc: u8,
    role: String,
}

fn role_rows(topo_labels: impl Fn(usize) -> usize, r: &ActivityRealization, s: &PhasedSchedule) -> Vec<RoleRow> {
    let mut rows = Vec::new();
    for (i, roles) in s.phases.iter().enumerate() {
        for (u, role) in roles.iter().enumerate() {
            rows.push(RoleRow {
                schema: SCHEMA,
                phase: i + 1,
                user: topo_labels(u),
                active: u8::from(r.active[u]),
                urllc: u8::from(r.urllc[u]),
                role: serde_json::to_value(role)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default(),
            });
        }
    }
    rows
}

pub fn simulate(args: &SimulateArgs, config: &Value) -> Result<Passed> {
    no_svg(args.output.format, "simulate")?;
    let p = scenario(&args.scenario)?;
    let scheme = args.scheme.scheme(p.coop);
    let topo = topology(args.scenario.topo, &args.size)?;
    if args.trials < 2 {
        return invalid("--trials must be at least 2");
    }
    if args.workers == 0 {
        return invalid("--workers must be at least 1");
    }
    if !(args.k_sigma > 0.0) {
        return invalid("--k-sigma must be positive");
    }
    let out = args.output.out.as_deref();

    if args.dump_trial.is_some() || args.replay.is_some() {
        let (log, trial) = match (&args.replay, args.dump_trial) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                let log = match serde_json::from_str::<TrialLog>(&text) {
                    Ok(log) => log,
                    Err(_) => TrialLog {
                        realization: serde_json::from_str(&text)
                            .map_err(|e| crate::args::Invalid(format!("{} is not a realization: {e}", path.display())))?,
                        tally: None,
                    },
                };
                (log, None)
            }
            (None, Some(t)) => (
                TrialLog {
                    realization: trial_realization(&p, &topo, args.seed, t),
                    tally: None,
                },
                Some(t),
            ),
            (None, None) => unreachable!("guarded above"),
        };
        let sched = to_valid(schedule(&p, scheme, &topo, &log.realization))?;
        let tally = sched.tally();
        let report = validate_schedule(&topo, &sched, &p);
        let matches = log.tally.as_ref().map(|t| *t == tally);
        let passed = matches.unwrap_or(true) && report.is_valid();
        match args.output.format {
            Format::Json => write_json(
                out,
                config,
                json!({
                    "scheme": scheme.name(),
                    "trial": trial,
                    "realization": log.realization,
                    "tally": tally,
                    "schedule": sched,
                    "violations": report.violations,
                    "matches_logged_tally": matches,
                }),
            )?,
            Format::Csv => write_csv(out, config, &role_rows(|u| topo.label(u), &log.realization, &sched))?,
            Format::Svg => unreachable!("rejected above"),
        }
        return Ok(passed);
    }

    let topo_kind = topo.topo_kind();
    let est = to_valid(estimate(&p, scheme, &topo, args.trials, args.seed, args.workers))?;
    let mut comparisons: Vec<(String, Comparison)> = vec![
        ("su".into(), compare(&est, su_max(&p, topo_kind), Axis::Su, args.k_sigma)),
        (
            "se".into(),
            compare(&est, to_valid(scheme_point_se(&p, scheme, topo_kind))?, Axis::Se, args.k_sigma),
        ),
    ];
    if topo_kind == TopoKind::Hex && scheme == Scheme::AdaptiveRx {
        let (mean, stderr) = to_valid(estimate_offcolor_embb(&p, scheme, &topo, args.trials, args.seed, args.workers))?;
        let holder = match p.model {
            ArrivalModel::Model1 => p.rho,
            ArrivalModel::Model2 => p.rho * (1.0 - p.rho_f),
        };
        let target = holder * (1.0 - p.rho * p.rho_f).powi(3);
        comparisons.push((
            "offcolor_embb_fraction".into(),
            compare_values(mean, stderr, est.k, target, Axis::Se, args.k_sigma),
        ));
    }
    let passed = comparisons.iter().all(|(_, c)| c.pass);
    match args.output.format {
        Format::Json => {
            let comps: Vec<Value> = comparisons
                .iter()
                .map(|(name, c)| {
                    let mut v = serde_json::to_value(c).unwrap_or(Value::Null);
                    v["quantity"] = json!(name);
                    v
                })
                .collect();
            write_json(
                out,
                config,
                json!({ "scheme": scheme.name(), "estimate": est, "comparisons": comps, "pass": passed }),
            )?
        }
        Format::Csv => {
            let rows: Vec<SimRow> = comparisons
                .iter()
                .map(|(name, c)| SimRow {
                    schema: SCHEMA,
                    scheme: scheme.name(),
                    k: est.k,
                    trials: est.trials,
                    seed: est.seed,
                    axis: name.clone(),
                    mean: c.mean,
                    target: c.target,
                    stderr: c.stderr,
                    k_sigma: c.k_sigma,
                    bias_allowance: c.bias_allowance,
                    deviation: c.deviation,
                    pass: c.pass,
                })
                .collect();
            write_csv(out, config, &rows)?
        }
        Format::Svg => unreachable!("rejected above"),
    }
    Ok(passed)
}

#[derive(Serialize)]
struct SweepRow {
    schema: u32,
    topo: TopoArg,
    scheme: &'static str,
    model: u8,
    rho: f64,
    rhof: f64,
    #[serde(rename = "D")]
    d: String,
    su_max: f64,
    se_max: Option<f64>,
    slope: Option<f64>,
    intercept: f64,
    boundary_se: f64,
}

pub fn sweep(args: &SweepArgs, config: &Value) -> Result<Passed> {
    no_svg(args.output.format, "sweep")?;
    let depths = args.d_list.iter().map(|s| parse_depth(s)).collect::<Result<Vec<_>>>()?;
    let topo = args.topo.kind();
    let coop = args.coop.coop();
    let model = args.model.model();
    let mut rows = Vec::new();
    for &rho in &args.rho_list {
        for &rhof in &args.rhof_list {
            for &depth in &depths {
                if args.topo == TopoArg::Hex && depth != Depth::Infinite {
                    return invalid("the torus bounds assume unbounded cooperation; use --D-list inf");
                }
                let p = to_valid(ScenarioParams::new(rho, rhof, depth, model, coop))?;
                for scheme in schemes_for(coop) {
                    rows.push(SweepRow {
                        schema: SCHEMA,
                        topo: args.topo,
                        scheme: scheme.name(),
                        model: if model == ArrivalModel::Model1 { 1 } else { 2 },
                        rho,
                        rhof,
                        d: depth_label(depth),
                        su_max: su_max(&p, topo),
                        se_max: (topo == TopoKind::Wyner).then(|| se_max(&p)),
                        slope: slope_coefficient(&p, scheme, topo).ok(),
                        intercept: to_valid(intercept(&p, scheme, topo))?,
                        boundary_se: to_valid(boundary_se(&p, scheme, topo))?,
                    });
                }
            }
        }
    }
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => write_json(out, config, json!({ "rows": rows }))?,
        _ => write_csv(out, config, &rows)?,
    }
    Ok(true)
}

#[derive(Serialize)]
struct EdgeRow {
    schema: u32,
    from: usize,
    to: usize,
}

pub fn topology_cmd(args: &TopologyArgs, config: &Value) -> Result<Passed> {
    no_svg(args.output.format, "topology")?;
    let topo = topology(args.topo, &args.size)?;
    let edges: Vec<(usize, usize)> = topo.edges().into_iter().map(|(j, k)| (topo.label(j), topo.label(k))).collect();
    let out = args.output.out.as_deref();
    match args.output.format {
        Format::Json => {
            let n = topo.user_count();
            let colors = hex_color_partition(&topo).ok().map(|p| (0..n).map(|u| p.label(u)).collect::<Vec<_>>());
            let coords: Option<Vec<(usize, usize)>> = (0..n).map(|u| topo.hex_coords(u)).collect();
            write_json(
                out,
                config,
                json!({
                    "users": (0..n).map(|u| topo.label(u)).collect::<Vec<_>>(),
                    "edges": edges,
                    "coords": coords,
                    "colors": colors,
                }),
            )?
        }
        _ => {
            let rows: Vec<EdgeRow> = edges.iter().map(|&(from, to)| EdgeRow { schema: SCHEMA, from, to }).collect();
            write_csv(out, config, &rows)?
        }
    }
    Ok(true)
}
