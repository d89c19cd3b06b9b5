//! Closed-form MG bounds, the summation identities they are built from,
//! term-by-term series oracles, and exact finite-network expectations.
//!
//! Notation: `q = 1 - rho_f`, `A = D + 2`, `f = (D + 1) / (D + 2)`.
//! `se_max` is the largest per-user eMBB MG without URLLC traffic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::TopoKind;
use crate::scheduler::{lset, msum_full, msum_red, Scheme};
use crate::traffic::{
    embb_subnet_prob_rx, in_phase, subnet_prob_m1, subnet_prob_m2_phase, ArrivalModel, Coop, Depth,
    ScenarioParams,
};

/// `coeff_u * S^U + coeff_e * S^e <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeff_u: f64,
    pub coeff_e: f64,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn su_cap(rhs: f64) -> Self {
        LinearConstraint {
            coeff_u: 1.0,
            coeff_e: 0.0,
            rhs,
        }
    }

    pub fn se_line(slope: f64, rhs: f64) -> Self {
        LinearConstraint {
            coeff_u: slope,
            coeff_e: 1.0,
            rhs,
        }
    }

    /// Signed excess `lhs - rhs` at a point; positive means violated.
    pub fn excess(&self, su: f64, se: f64) -> f64 {
        self.coeff_u * su + self.coeff_e * se - self.rhs
    }
}

// ---------------------------------------------------------------------------
// Summation identities
// ---------------------------------------------------------------------------

/// Power series identities `sum_l c^l w(l) d^{e(l)}` used by the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    GeomFloor,
    GeomFloorShiftDiff,
    FloorSimple,
    FloorSimpleDiff,
    CeilVariant,
    CeilShiftDiff,
    EllFloor,
    EvenFloor,
    EvenEllFloor,
    EvenShiftDiff,
    CeilHalfFloor,
    CeilHalfEll,
    CeilHalfShiftDiff,
    GeomBasic,
    EllGeom,
    EllSqGeom,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::GeomFloor,
        IdentityId::GeomFloorShiftDiff,
        IdentityId::FloorSimple,
        IdentityId::FloorSimpleDiff,
        IdentityId::CeilVariant,
        IdentityId::CeilShiftDiff,
        IdentityId::EllFloor,
        IdentityId::EvenFloor,
        IdentityId::EvenEllFloor,
        IdentityId::EvenShiftDiff,
        IdentityId::CeilHalfFloor,
        IdentityId::CeilHalfEll,
        IdentityId::CeilHalfShiftDiff,
        IdentityId::GeomBasic,
        IdentityId::EllGeom,
        IdentityId::EllSqGeom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::GeomFloor => "GeomFloor",
            IdentityId::GeomFloorShiftDiff => "GeomFloorShiftDiff",
            IdentityId::FloorSimple => "FloorSimple",
            IdentityId::FloorSimpleDiff => "FloorSimpleDiff",
            IdentityId::CeilVariant => "CeilVariant",
            IdentityId::CeilShiftDiff => "CeilShiftDiff",
            IdentityId::EllFloor => "EllFloor",
            IdentityId::EvenFloor => "EvenFloor",
            IdentityId::EvenEllFloor => "EvenEllFloor",
            IdentityId::EvenShiftDiff => "EvenShiftDiff",
            IdentityId::CeilHalfFloor => "CeilHalfFloor",
            IdentityId::CeilHalfEll => "CeilHalfEll",
            IdentityId::CeilHalfShiftDiff => "CeilHalfShiftDiff",
            IdentityId::GeomBasic => "GeomBasic",
            IdentityId::EllGeom => "EllGeom",
            IdentityId::EllSqGeom => "EllSqGeom",
        }
    }

    /// Degree of the polynomial bound on the summand weight.
    fn weight_degree(self) -> i32 {
        use IdentityId::*;
        match self {
            GeomFloorShiftDiff | FloorSimpleDiff | CeilShiftDiff | EvenShiftDiff | CeilHalfShiftDiff
            | GeomBasic => 0,
            EllSqGeom => 2,
            _ => 1,
        }
    }
}

fn pw(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

fn floor_diff(l: usize, a: usize) -> usize {
    (l + 1) / a - l / a
}

fn domain(id: IdentityId, reason: impl Into<String>) -> Error {
    Error::IdentityDomain {
        identity: id.name(),
        reason: reason.into(),
    }
}

fn check_identity(id: IdentityId, c: f64, d: f64, a: usize, b: usize) -> Result<()> {
    use IdentityId::*;
    if !(0.0..1.0).contains(&c) {
        return Err(domain(id, format!("c must lie in [0, 1), got {c}")));
    }
    if !(0.0..=1.0).contains(&d) {
        return Err(domain(id, format!("d must lie in [0, 1], got {d}")));
    }
    if a == 0 || b == 0 {
        return Err(domain(id, "A and B must be positive"));
    }
    let divides = || {
        if a.is_multiple_of(b) {
            Ok(())
        } else {
            Err(domain(id, format!("B = {b} must divide A = {a}")))
        }
    };
    match id {
        GeomFloor | GeomFloorShiftDiff => divides()?,
        CeilVariant | CeilShiftDiff => {
            if b < 2 || a < 2 {
                return Err(domain(id, format!("needs A >= 2 and B >= 2, got A = {a}, B = {b}")));
            }
            divides()?;
        }
        EvenFloor => {
            if !b.is_multiple_of(2) {
                return Err(domain(id, format!("B must be even, got {b}")));
            }
            divides()?;
        }
        EvenEllFloor => {
            if !b.is_multiple_of(2) {
                return Err(domain(id, format!("B must be even, got {b}")));
            }
        }
        EvenShiftDiff => {
            if !a.is_multiple_of(2) {
                return Err(domain(id, format!("A must be even, got {a}")));
            }
            divides()?;
        }
        CeilHalfFloor | CeilHalfShiftDiff
            if !a.is_multiple_of(2) => {
                return Err(domain(id, format!("A must be even, got {a}")));
            }
        _ => {}
    }
    Ok(())
}

/// Closed form of an identity. `a`, `b` are the integers `A`, `B`; for
/// `GeomBasic` the sum runs over `0..=A`.
pub fn identity_closed(id: IdentityId, c: f64, d: f64, a: usize, b: usize) -> Result<f64> {
    use IdentityId::*;
    check_identity(id, c, d, a, b)?;
    let cb = pw(c, b);
    let v = match id {
        GeomFloor => {
            let t = pw(c, a) * pw(d, a / b);
            t / ((1.0 - t) * (1.0 - cb * d)) * (1.0 - cb) / (1.0 - c)
        }
        GeomFloorShiftDiff => {
            let t = pw(c, a) * pw(d, a / b);
            pw(c, a - 1) * pw(d, a / b - 1) / (1.0 - t)
        }
        FloorSimple => pw(c, a) / ((1.0 - pw(c, a)) * (1.0 - c)),
        FloorSimpleDiff => pw(c, a - 1) / (1.0 - pw(c, a)),
        CeilVariant => {
            let t = pw(c, a) * pw(d, a / b);
            t / (1.0 - t) * (1.0 + c * d / (1.0 - cb * d) * (1.0 - cb) / (1.0 - c))
        }
        CeilShiftDiff => {
            let t = pw(c, a) * pw(d, a / b);
            pw(c, a - 1) * pw(d, a / b) / (1.0 - t)
        }
        EllFloor => {
            let bf = b as f64;
            bf * cb * d / (1.0 - cb * d).powi(2) * (1.0 - cb) / (1.0 - c)
                + ((bf - 1.0) * cb * c - bf * cb + c) / ((1.0 - cb * d) * (c - 1.0).powi(2))
        }
        EvenFloor => {
            let t = pw(c, a) * pw(d, a / b);
            t / ((1.0 - t) * (1.0 - cb * d)) * (1.0 - cb) / (1.0 - c * c)
        }
        EvenEllFloor => {
            let bf = b as f64;
            bf * cb * d / (1.0 - cb * d).powi(2) * (1.0 - cb) / (1.0 - c * c)
                + ((bf - 2.0) * cb * c * c - bf * cb + 2.0 * c * c)
                    / ((1.0 - cb * d) * (c * c - 1.0).powi(2))
        }
        EvenShiftDiff => 0.0,
        CeilHalfFloor => {
            let t = pw(c, a) * pw(d, a / 2);
            t * (1.0 + c * d) / ((1.0 - t) * (1.0 - c * c * d))
        }
        CeilHalfEll => c * d * (2.0 * c + c * c * d + 1.0) / (1.0 - c * c * d).powi(2),
        CeilHalfShiftDiff => {
            let t = pw(c, a) * pw(d, a / 2);
            pw(c, a - 1) * pw(d, a / 2) / (1.0 - t)
        }
        GeomBasic => (1.0 - pw(c, a + 1)) / (1.0 - c),
        EllGeom => c / (1.0 - c).powi(2),
        EllSqGeom => c * (c + 1.0) / (1.0 - c).powi(3),
    };
    Ok(v)
}

/// Summand weight `w(l) d^{e(l)}` without the `c^l` factor.
fn summand(id: IdentityId, l: usize, d: f64, a: usize, b: usize) -> f64 {
    use IdentityId::*;
    let even = l.is_multiple_of(2);
    let lf = l as f64;
    match id {
        GeomFloor => (l / a) as f64 * pw(d, l / b),
        GeomFloorShiftDiff => floor_diff(l, a) as f64 * pw(d, l / b),
        FloorSimple => (l / a) as f64,
        FloorSimpleDiff => floor_diff(l, a) as f64,
        CeilVariant => (l / a) as f64 * pw(d, l.div_ceil(b)),
        CeilShiftDiff => floor_diff(l, a) as f64 * pw(d, l.div_ceil(b)),
        EllFloor => lf * pw(d, l / b),
        EvenFloor if even => (l / a) as f64 * pw(d, l / b),
        EvenEllFloor if even => lf * pw(d, l / b),
        EvenShiftDiff if even => floor_diff(l, a) as f64 * pw(d, l / b),
        EvenFloor | EvenEllFloor | EvenShiftDiff => 0.0,
        CeilHalfFloor => (l / a) as f64 * pw(d, l.div_ceil(2)),
        CeilHalfEll => lf * pw(d, l.div_ceil(2)),
        CeilHalfShiftDiff => floor_diff(l, a) as f64 * pw(d, l.div_ceil(2)),
        GeomBasic => 1.0,
        EllGeom => lf,
        EllSqGeom => lf * lf,
    }
}

/// Partial sum over `l = 1..=n` (over `l = 0..=min(n, A)` for `GeomBasic`).
pub fn identity_truncated(id: IdentityId, c: f64, d: f64, a: usize, b: usize, n: usize) -> Result<f64> {
    check_identity(id, c, d, a, b)?;
    if n == 0 {
        return Err(domain(id, "term count must be at least 1"));
    }
    if id == IdentityId::GeomBasic {
        let mut s = 0.0;
        let mut cl = 1.0;
        for _ in 0..=n.min(a) {
            s += cl;
            cl *= c;
        }
        return Ok(s);
    }
    let mut s = 0.0;
    let mut cl = 1.0;
    for l in 1..=n {
        cl *= c;
        if cl == 0.0 {
            break;
        }
        s += cl * summand(id, l, d, a, b);
    }
    Ok(s)
}

/// Smallest term count whose geometric tail bound
/// `(N+1)^p c^{N+1} / (1 - c ((N+2)/(N+1))^p)` is below `tol`.
pub fn truncation_terms(id: IdentityId, c: f64, tol: f64) -> usize {
    tail_terms(c, id.weight_degree(), tol)
}

fn tail_terms(c: f64, p: i32, tol: f64) -> usize {
    if c <= 0.0 {
        return 1;
    }
    let mut n: usize = 1;
    loop {
        let n1 = (n + 1) as f64;
        let ratio = c * ((n1 + 1.0) / n1).powi(p);
        if ratio < 1.0 {
            let bound = n1.powi(p) * c.powf(n1) / (1.0 - ratio);
            if bound < tol {
                return n;
            }
        }
        n += 1;
    }
}

/// Closed form of the ceiling-half ell sum's general-`B` sibling is not
/// available; this partial sum `sum_{l=1}^{n} c^l l d^{ceil(l/B)}` is the
/// only exported evaluation.
pub fn ceil_ell_truncated(c: f64, d: f64, b: usize, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&c) || !(0.0..=1.0).contains(&d) || b < 2 || n == 0 {
        return Err(Error::IdentityDomain {
            identity: "CeilEll",
            reason: format!("needs c in [0,1), d in [0,1], B >= 2, N >= 1; got c={c}, d={d}, B={b}, N={n}"),
        });
    }
    let mut s = 0.0;
    let mut cl = 1.0;
    for l in 1..=n {
        cl *= c;
        s += cl * l as f64 * pw(d, l.div_ceil(b));
    }
    Ok(s)
}

/// One failing grid point of an identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityMismatch {
    pub id: IdentityId,
    pub c: f64,
    pub d: f64,
    pub a: usize,
    pub b: usize,
    pub closed: f64,
    pub truncated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityGridReport {
    pub checked: usize,
    pub max_error: f64,
    pub failures: Vec<IdentityMismatch>,
}

/// The standard identity grid: `c` in 0.1..0.9, `d` in {0, 0.3, 0.7, 1},
/// `A` in {2, 4, 8, 12}, `B` in {2, A}. Points outside an identity's
/// domain are skipped.
pub fn identity_grid() -> Vec<(f64, f64, usize, usize)> {
    let mut out = Vec::new();
    for ci in 1..=9 {
        for d in [0.0, 0.3, 0.7, 1.0] {
            for a in [2usize, 4, 8, 12] {
                let mut bs = vec![2, a];
                bs.dedup();
                for b in bs {
                    out.push((ci as f64 / 10.0, d, a, b));
                }
            }
        }
    }
    out
}

/// Compares `closed` against the truncated sums on the identity grid.
/// The closure is a parameter so that a deliberately broken closed form
/// can be fed through the same check.
pub fn check_identity_grid<F>(tol: f64, tail_tol: f64, closed: F) -> IdentityGridReport
where
    F: Fn(IdentityId, f64, f64, usize, usize) -> Result<f64>,
{
    let mut checked = 0;
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    for id in IdentityId::ALL {
        for &(c, d, a, b) in &identity_grid() {
            let Ok(cl) = closed(id, c, d, a, b) else {
                continue;
            };
            let n = truncation_terms(id, c, tail_tol);
            let Ok(tr) = identity_truncated(id, c, d, a, b, n) else {
                continue;
            };
            checked += 1;
            let err = (cl - tr).abs();
            max_error = max_error.max(err);
            if !(err <= tol) {
                failures.push(IdentityMismatch {
                    id,
                    c,
                    d,
                    a,
                    b,
                    closed: cl,
                    truncated: tr,
                });
            }
        }
    }
    IdentityGridReport {
        checked,
        max_error,
        failures,
    }
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

fn depth_fraction(depth: Depth) -> f64 {
    match depth {
        Depth::Finite(d) => (d as f64 + 1.0) / (d as f64 + 2.0),
        Depth::Infinite => 1.0,
    }
}

/// Largest per-user eMBB MG on a line whose users are present with
/// probability `z`, when every `(D+2)`-th user of each run is silenced.
fn se_max_z(z: f64, depth: Depth) -> f64 {
    match depth {
        Depth::Infinite => z,
        Depth::Finite(d) => {
            if z >= 1.0 {
                return depth_fraction(depth);
            }
            let t = pw(z, d as usize + 2);
            z - (1.0 - z) * t / (1.0 - t)
        }
    }
}

/// Largest per-user eMBB MG without URLLC traffic (Wyner line).
pub fn se_max(params: &ScenarioParams) -> f64 {
    match params.model {
        ArrivalModel::Model1 => se_max_z(params.rho, params.depth),
        ArrivalModel::Model2 => se_max_z(params.rho * (1.0 - params.rho_f), params.depth),
    }
}

/// Largest per-user URLLC MG: half (line) or a third (torus) of the
/// URLLC arrival probability, set by the number of phases.
pub fn su_max(params: &ScenarioParams, topo: TopoKind) -> f64 {
    match topo {
        TopoKind::Wyner => params.rho * params.rho_f / 2.0,
        TopoKind::Hex => params.rho * params.rho_f / 3.0,
    }
}

/// `x^h / ((1 - x^h)(1 - x))`; vanishes for unbounded `h`.
fn geom_tail(x: f64, h: Option<usize>) -> f64 {
    match h {
        None => 0.0,
        Some(h) => {
            let xh = pw(x, h);
            xh / ((1.0 - xh) * (1.0 - x))
        }
    }
}

/// `sum_{l even} x^{l/2} F(l)` with `F(l) = l - floor(l / 2h)`, scaled so
/// that `x` counts pairs of users.
fn even_part(x: f64, h: Option<usize>) -> f64 {
    2.0 * x / (1.0 - x).powi(2) - geom_tail(x, h)
}

/// Odd-length companion of [`even_part`]: `sum_{l odd} x^{(l-1)/2} F(l)`.
fn odd_part(x: f64, h: Option<usize>) -> f64 {
    2.0 * x / (1.0 - x).powi(2) + 1.0 / (1.0 - x) - geom_tail(x, h)
}

fn half_period(depth: Depth) -> Option<usize> {
    depth.period().map(|a| a / 2)
}

/// eMBB MG at full URLLC load for the adaptive Tx+Rx scheme, Model 1.
fn adaptive_txrx_m1_se(rho: f64, rho_f: f64, depth: Depth) -> f64 {
    let Depth::Finite(d) = depth else {
        return rho - rho * rho_f / 2.0;
    };
    if rho >= 1.0 {
        return depth_fraction(depth) - rho_f / 2.0;
    }
    let q = 1.0 - rho_f;
    let a = d as usize + 2;
    let ra = pw(rho, a);
    let r1 = pw(rho, a - 1);
    rho - rho * rho_f / 2.0 - (1.0 - rho * rho) * r1 / (2.0 * (1.0 - ra))
        + (1.0 - rho).powi(2) * r1 * q * q / (2.0 * (1.0 - ra * q * q))
}

/// eMBB MG at full URLLC load for the adaptive Tx+Rx scheme, Model 2.
fn adaptive_txrx_m2_se(rho: f64, rho_f: f64, depth: Depth) -> f64 {
    let q = 1.0 - rho_f;
    let Some(h) = half_period(depth) else {
        return rho * q;
    };
    if rho <= 0.0 {
        return 0.0;
    }
    let x = rho * rho * q;
    let u = 1.0 - rho * q;
    let v = 1.0 - rho;
    let y = pw(rho, 2 * h) * pw(q, h);
    let o = odd_part(x, Some(h));
    let e = even_part(x, Some(h));
    let full = 0.5 * (u * u * rho * o + u * v * e) + 0.5 * (v * v * rho * q * o + u * v * e);
    let red_loss = 0.5 * v * v / rho * (y / (1.0 - y) - y * q * q / (1.0 - y * q * q));
    full - red_loss - rho * rho_f / 2.0
}

/// eMBB MG at full URLLC load for the adaptive Rx-only scheme.
fn adaptive_rx_se(rho: f64, rho_f: f64, depth: Depth, model: ArrivalModel) -> f64 {
    let q = 1.0 - rho_f;
    let h = half_period(depth);
    let cp = 1.0 - rho;
    match model {
        ArrivalModel::Model1 => {
            let co = 1.0 - rho + rho * rho * rho_f;
            let x = rho * rho * q;
            0.5 * (co * co * rho * q * odd_part(x, h) + 2.0 * co * cp * even_part(x, h) + cp * cp * rho * odd_part(x, h))
        }
        ArrivalModel::Model2 => {
            let z = rho * q;
            let co = 1.0 - z + z * rho * rho_f;
            let x = z * z;
            0.5 * ((co * co + cp * cp) * z * odd_part(x, h) + 2.0 * co * cp * even_part(x, h))
        }
    }
}

fn check_scheme(params: &ScenarioParams, scheme: Scheme) -> Result<()> {
    params.validate()?;
    if params.coop != scheme.coop() {
        return Err(Error::Unsupported(format!(
            "scheme {} needs {:?} cooperation, scenario has {:?}",
            scheme.name(),
            scheme.coop(),
            params.coop
        )));
    }
    Ok(())
}

fn check_hex_depth(params: &ScenarioParams, topo: TopoKind) -> Result<()> {
    if topo == TopoKind::Hex && params.depth != Depth::Infinite {
        return Err(Error::Unsupported(
            "hexagonal bounds assume unbounded cooperation (use D = infinity)".into(),
        ));
    }
    Ok(())
}

/// `S^e` intercept (value at `S^U = 0`) of a scheme's inner bound.
pub fn intercept(params: &ScenarioParams, scheme: Scheme, topo: TopoKind) -> Result<f64> {
    check_scheme(params, scheme)?;
    check_hex_depth(params, topo)?;
    let (rho, q) = (params.rho, 1.0 - params.rho_f);
    let holder = match params.model {
        ArrivalModel::Model1 => rho,
        ArrivalModel::Model2 => rho * q,
    };
    Ok(match topo {
        TopoKind::Hex => holder,
        TopoKind::Wyner => {
            if scheme.is_adaptive() {
                se_max(params)
            } else {
                holder * depth_fraction(params.depth)
            }
        }
    })
}

/// Slope coefficient `M` (line) or `L` (torus) of the inner bound
/// `S^e + M S^U <= intercept`.
///
/// Slopes that divide by the URLLC load are undefined at `rho_f = 0` or
/// `rho = 0`; the inner region then reduces to a bound on `S^e` alone.
pub fn slope_coefficient(params: &ScenarioParams, scheme: Scheme, topo: TopoKind) -> Result<f64> {
    check_scheme(params, scheme)?;
    check_hex_depth(params, topo)?;
    let (rho, rf) = (params.rho, params.rho_f);
    let q = 1.0 - rf;
    let m1 = params.model == ArrivalModel::Model1;
    let need_load = |what: &'static str| -> Result<()> {
        if rho * rf > 0.0 {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                result: what,
                reason: format!("slope needs rho * rho_f > 0, got rho = {rho}, rho_f = {rf}"),
            })
        }
    };
    match (topo, scheme) {
        (_, Scheme::NonAdaptiveTxRx) | (TopoKind::Hex, Scheme::AdaptiveTxRx) => Ok(if m1 { 1.0 } else { 0.0 }),
        (TopoKind::Hex, Scheme::NonAdaptiveRx) => {
            need_load("non-adaptive Rx-only slope (torus)")?;
            Ok(if m1 { (2.0 + rf) / rf } else { 2.0 * q / rf })
        }
        (TopoKind::Hex, Scheme::AdaptiveRx) => {
            need_load("adaptive Rx-only slope (torus)")?;
            let keep = (1.0 - rho * rf).powi(3);
            Ok(if m1 {
                (2.0 + rf - 2.0 * keep) / rf
            } else {
                2.0 * q * (1.0 - keep) / rf
            })
        }
        (TopoKind::Wyner, Scheme::NonAdaptiveRx) => {
            need_load("non-adaptive Rx-only slope")?;
            let f = depth_fraction(params.depth);
            Ok(if m1 { f * 2.0 / rf - q / rf } else { q / rf * 2.0 * f })
        }
        (TopoKind::Wyner, Scheme::AdaptiveTxRx) | (TopoKind::Wyner, Scheme::AdaptiveRx) => {
            need_load("adaptive slope")?;
            let top = intercept(params, scheme, topo)?;
            let at = inner_corner_se(params, scheme)?;
            let m = (top - at) / su_max(params, topo);
            // Rounding can push a touching boundary a hair past the intercept.
            Ok(if m < 0.0 && m > -1e-12 { 0.0 } else { m })
        }
    }
}

/// `S^e` of the adaptive Wyner inner bound at `S^U = rho rho_f / 2`.
fn inner_corner_se(params: &ScenarioParams, scheme: Scheme) -> Result<f64> {
    let (rho, rf, depth) = (params.rho, params.rho_f, params.depth);
    Ok(match (scheme, params.model) {
        (Scheme::AdaptiveTxRx, ArrivalModel::Model1) => adaptive_txrx_m1_se(rho, rf, depth),
        (Scheme::AdaptiveTxRx, ArrivalModel::Model2) => adaptive_txrx_m2_se(rho, rf, depth),
        (Scheme::AdaptiveRx, model) => adaptive_rx_se(rho, rf, depth, model),
        _ => {
            return Err(Error::Unsupported(format!(
                "no adaptive corner for scheme {}",
                scheme.name()
            )))
        }
    })
}

/// `S^e` on the inner bound at the largest URLLC MG.
pub fn boundary_se(params: &ScenarioParams, scheme: Scheme, topo: TopoKind) -> Result<f64> {
    let top = intercept(params, scheme, topo)?;
    let su = su_max(params, topo);
    if su == 0.0 {
        return Ok(top);
    }
    Ok(top - slope_coefficient(params, scheme, topo)? * su)
}

/// Inner bound `{S^U <= su_max, S^e + slope S^U <= intercept}`.
pub fn inner_region(params: &ScenarioParams, scheme: Scheme, topo: TopoKind) -> Result<Vec<LinearConstraint>> {
    let top = intercept(params, scheme, topo)?;
    let su = su_max(params, topo);
    if su == 0.0 {
        return Ok(vec![LinearConstraint::su_cap(0.0), LinearConstraint::se_line(0.0, top)]);
    }
    let m = slope_coefficient(params, scheme, topo)?;
    Ok(vec![LinearConstraint::su_cap(su), LinearConstraint::se_line(m, top)])
}

/// Converse region for the scenario's model and cooperation type.
///
/// The torus has no dedicated converse; the constraints returned for it only
/// use that no user exceeds MG 1.
pub fn outer_region(params: &ScenarioParams, topo: TopoKind) -> Result<Vec<LinearConstraint>> {
    params.validate()?;
    let (rho, rf) = (params.rho, params.rho_f);
    let q = 1.0 - rf;
    if topo == TopoKind::Hex {
        let mut out = vec![LinearConstraint::su_cap(rho * rf), LinearConstraint::se_line(1.0, rho)];
        if params.model == ArrivalModel::Model2 {
            out.push(LinearConstraint::se_line(0.0, rho * q));
        }
        return Ok(out);
    }
    let su = su_max(params, topo);
    let smax = se_max(params);
    let mut out = vec![LinearConstraint::su_cap(su)];
    match (params.coop, params.model) {
        (Coop::TxRx, ArrivalModel::Model1) => out.push(LinearConstraint::se_line(1.0, smax)),
        (Coop::TxRx, ArrivalModel::Model2) => out.push(LinearConstraint::se_line(0.0, smax)),
        (Coop::RxOnly, ArrivalModel::Model1) => {
            out.push(LinearConstraint::se_line(1.0, smax));
            out.push(LinearConstraint::se_line(1.0 + rho, rho));
        }
        (Coop::RxOnly, ArrivalModel::Model2) => {
            out.push(LinearConstraint::se_line(0.0, smax));
            out.push(LinearConstraint::se_line(rho * q, rho * q));
        }
    }
    Ok(out)
}

/// Expected per-user `S^e` of the implemented construction at full URLLC
/// load, in the large-network limit.
///
/// This differs from [`boundary_se`] in two places. The adaptive Tx+Rx
/// scheme tests the distinct `L_k` positions, which is slightly better than
/// the closed form at `D = 2`. The non-adaptive Rx-only Model 2 construction
/// keeps the in-phase eMBB users, which the published slope does not credit.
pub fn scheme_point_se(params: &ScenarioParams, scheme: Scheme, topo: TopoKind) -> Result<f64> {
    check_scheme(params, scheme)?;
    check_hex_depth(params, topo)?;
    let (rho, rf) = (params.rho, params.rho_f);
    match (topo, scheme) {
        (TopoKind::Wyner, Scheme::AdaptiveTxRx) if params.depth != Depth::Infinite && rho < 1.0 => {
            let n = tail_terms(rho, 1, 1e-15).max(10);
            Ok(series::txrx(params, n, series::LCount::Distinct))
        }
        (TopoKind::Wyner, Scheme::NonAdaptiveRx) => Ok(rho * (1.0 - rf) / 2.0),
        _ => boundary_se(params, scheme, topo),
    }
}

/// Term-by-term series for the large-network boundary values.
pub mod series {
    use super::*;

    /// How many `L_k` users a subnet of length `l` has to test.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum LCount {
        /// `2 ceil(l / (D+2))`, as in the closed forms.
        Doubled,
        /// Size of the distinct position set, as the scheme uses it.
        Distinct,
    }

    fn full(l: usize, depth: Depth) -> f64 {
        match depth {
            Depth::Finite(d) => msum_full(l, d) as f64,
            Depth::Infinite => l as f64,
        }
    }

    fn reduced(l: usize, depth: Depth) -> f64 {
        match depth {
            Depth::Finite(d) => msum_red(l, d) as f64,
            Depth::Infinite => l as f64,
        }
    }

    fn l_count(l: usize, depth: Depth, mode: LCount) -> usize {
        match depth {
            Depth::Infinite => 2,
            Depth::Finite(d) => match mode {
                LCount::Doubled => 2 * l.div_ceil(d as usize + 2),
                LCount::Distinct => lset(1, l, d).0.len(),
            },
        }
    }

    /// Adaptive Tx+Rx `S^e` at full URLLC load from `n` series terms.
    pub fn txrx(params: &ScenarioParams, n: usize, mode: LCount) -> f64 {
        let (rho, rf, depth) = (params.rho, params.rho_f, params.depth);
        let q = 1.0 - rf;
        let mut s = 0.0;
        for l in 1..=n {
            let p = pw(q, l_count(l, depth, mode));
            let mixed = p * full(l, depth) + (1.0 - p) * reduced(l, depth);
            let term = match params.model {
                ArrivalModel::Model1 => pw(rho, l) * (1.0 - rho).powi(2) * 0.5 * (full(l, depth) + mixed),
                ArrivalModel::Model2 => {
                    let (u, v) = (1.0 - rho * q, 1.0 - rho);
                    let (a, b) = if l % 2 == 1 { (u * u, v * v) } else { (u * v, u * v) };
                    0.5 * pw(rho, l) * pw(q, l / 2) * a * full(l, depth)
                        + 0.5 * pw(rho, l) * pw(q, l.div_ceil(2)) * b * mixed
                }
            };
            if term == 0.0 && l > 1 && pw(rho, l) == 0.0 {
                break;
            }
            s += term;
        }
        s - rho * rf / 2.0
    }

    /// Adaptive Rx-only `S^e` at full URLLC load from `n` series terms.
    pub fn rx(params: &ScenarioParams, n: usize) -> f64 {
        let (rho, rf, depth) = (params.rho, params.rho_f, params.depth);
        let q = 1.0 - rf;
        let h = match params.model {
            ArrivalModel::Model1 => rho,
            ArrivalModel::Model2 => rho * q,
        };
        let co = 1.0 - h + h * rho * rf;
        let cp = 1.0 - rho;
        let mut s = 0.0;
        for l in 1..=n {
            let (a, b) = match params.model {
                ArrivalModel::Model1 => (pw(rho, l) * pw(q, l.div_ceil(2)), pw(rho, l) * pw(q, l / 2)),
                ArrivalModel::Model2 => (pw(rho * q, l), pw(rho * q, l)),
            };
            if a == 0.0 && b == 0.0 && l > 1 {
                break;
            }
            // Runs starting in phase have an out-of-phase left neighbour; the
            // right neighbour's phase depends on the parity of l.
            let (ra, rb) = if l % 2 == 1 { (co, cp) } else { (cp, co) };
            s += full(l, depth) * (a * co * ra + b * cp * rb);
        }
        s / 2.0
    }
}

/// Exact expectations on finite networks, computed from the subnet laws.
pub mod finite {
    use super::*;

    /// Expected `(urllc_total, sum_total)` of a Wyner scheme on `k` users.
    pub fn expected_wyner(params: &ScenarioParams, scheme: Scheme, k: usize) -> Result<(f64, f64)> {
        check_scheme(params, scheme)?;
        let (rho, rf) = (params.rho, params.rho_f);
        let q = 1.0 - rf;
        let m1 = params.model == ArrivalModel::Model1;
        let urllc = k as f64 * rho * rf / 2.0;
        let mg: Vec<(f64, f64)> = if scheme == Scheme::AdaptiveTxRx {
            (0..=k)
                .map(|l| {
                    if l == 0 {
                        return (0.0, 0.0);
                    }
                    (
                        adaptive_txrx_subnet_mg(params.depth, q, l, true),
                        adaptive_txrx_subnet_mg(params.depth, q, l, false),
                    )
                })
                .collect()
        } else {
            Vec::new()
        };
        let mut sum = 0.0;
        for phase in 1..=2 {
            let mut s = 0.0;
            match scheme {
                Scheme::NonAdaptiveTxRx => {
                    for u in 0..k {
                        let silenced = params.depth.period().is_some_and(|a| (u + 1) % a == (phase - 1) % a);
                        if !silenced {
                            s += if in_phase(u, phase) || m1 { rho } else { rho * q };
                        }
                    }
                }
                Scheme::NonAdaptiveRx => {
                    s = (0..k).filter(|&u| in_phase(u, phase)).count() as f64 * rho;
                }
                Scheme::AdaptiveTxRx => {
                    for start in 1..=k {
                        for l in 1..=(k - start + 1) {
                            let p = if m1 {
                                subnet_prob_m1(rho, l, start, k)?
                            } else {
                                subnet_prob_m2_phase(rho, rf, l, start, k, phase)?
                            };
                            if p == 0.0 {
                                continue;
                            }
                            let (aligned, shifted) = mg[l];
                            s += p * if in_phase(start - 1, phase) { aligned } else { shifted };
                        }
                    }
                }
                Scheme::AdaptiveRx => {
                    s += (0..k).filter(|&u| in_phase(u, phase)).count() as f64 * rho * rf;
                    for start in 1..=k {
                        for l in 1..=(k - start + 1) {
                            let p = embb_subnet_prob_rx(rho, rf, l, start, k, phase, params.model)?;
                            if p == 0.0 {
                                continue;
                            }
                            s += p * series_full(params.depth, l);
                        }
                    }
                }
            }
            sum += 0.5 * s;
        }
        Ok((urllc, sum))
    }

    fn series_full(depth: Depth, l: usize) -> f64 {
        match depth {
            Depth::Finite(d) => msum_full(l, d) as f64,
            Depth::Infinite => l as f64,
        }
    }

    /// Expected MG of one subnet under the adaptive Tx+Rx rule.
    fn adaptive_txrx_subnet_mg(depth: Depth, q: f64, l: usize, aligned: bool) -> f64 {
        let Depth::Finite(d) = depth else {
            return l as f64;
        };
        let full = msum_full(l, d) as f64;
        if aligned {
            return full;
        }
        let p = pw(q, lset(1, l, d).0.len());
        p * full + (1.0 - p) * msum_red(l, d) as f64
    }

    /// Expected `(urllc_total, sum_total)` of a torus scheme with `k` cells.
    pub fn expected_hex(params: &ScenarioParams, scheme: Scheme, k: usize) -> Result<(f64, f64)> {
        check_scheme(params, scheme)?;
        let (rho, rf) = (params.rho, params.rho_f);
        let q = 1.0 - rf;
        let kf = k as f64;
        let class = kf / 3.0;
        let holder = match params.model {
            ArrivalModel::Model1 => rho,
            ArrivalModel::Model2 => rho * q,
        };
        let per_phase = match scheme {
            Scheme::AdaptiveTxRx | Scheme::NonAdaptiveTxRx => match params.model {
                ArrivalModel::Model1 => kf * rho,
                ArrivalModel::Model2 => kf * holder + class * rho * rf,
            },
            Scheme::NonAdaptiveRx => class * rho,
            Scheme::AdaptiveRx => class * rho + (kf - class) * holder * (1.0 - rho * rf).powi(3),
        };
        Ok((kf * rho * rf / 3.0, per_phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(rho: f64, rf: f64, d: u32, model: ArrivalModel, coop: Coop) -> ScenarioParams {
        ScenarioParams::new(rho, rf, Depth::Finite(d), model, coop).unwrap()
    }

    #[test]
    fn floor_simple_examples() {
        assert_abs_diff_eq!(identity_closed(IdentityId::FloorSimple, 0.5, 1.0, 2, 1).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(identity_truncated(IdentityId::FloorSimple, 0.5, 1.0, 2, 1, 3).unwrap(), 0.375, epsilon = 1e-15);
    }

    #[test]
    fn geom_floor_at_unit_d_is_floor_simple() {
        for a in [2, 4, 8] {
            let g = identity_closed(IdentityId::GeomFloor, 0.6, 1.0, a, 2).unwrap();
            let f = identity_closed(IdentityId::FloorSimple, 0.6, 1.0, a, 2).unwrap();
            assert_abs_diff_eq!(g, f, epsilon = 1e-14);
        }
    }

    #[test]
    fn floor_family_vanishes_at_zero_c() {
        use IdentityId::*;
        for id in [GeomFloor, FloorSimple, CeilVariant, EvenFloor, CeilHalfFloor, EllFloor, CeilHalfEll, EllGeom] {
            assert_eq!(identity_closed(id, 0.0, 0.5, 4, 2).unwrap(), 0.0, "{id:?}");
        }
    }

    #[test]
    fn domain_errors_name_the_precondition() {
        let e = identity_closed(IdentityId::GeomFloor, 0.5, 0.5, 5, 2).unwrap_err();
        assert!(e.to_string().contains("must divide"), "{e}");
        assert!(identity_closed(IdentityId::EvenFloor, 0.5, 0.5, 6, 3).is_err());
        assert!(identity_closed(IdentityId::CeilHalfFloor, 0.5, 0.5, 3, 1).is_err());
        assert!(identity_closed(IdentityId::FloorSimple, 1.0, 0.5, 2, 1).is_err());
        assert!(identity_truncated(IdentityId::FloorSimple, 0.5, 0.5, 2, 1, 0).is_err());
    }

    #[test]
    fn truncated_sums_are_monotone() {
        for id in IdentityId::ALL {
            let mut prev = 0.0;
            for n in 1..60 {
                let Ok(v) = identity_truncated(id, 0.7, 0.3, 4, 2, n) else {
                    break;
                };
                assert!(v >= prev - 1e-15, "{id:?} n={n}");
                prev = v;
            }
        }
    }

    #[test]
    fn se_max_values() {
        let m1 = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::TxRx);
        assert_abs_diff_eq!(se_max(&m1), 0.785243, epsilon = 5e-5);
        let m2 = ScenarioParams { model: ArrivalModel::Model2, ..m1 };
        assert_abs_diff_eq!(se_max(&m2), 0.319999216012473, epsilon = 1e-9);
        let near = ScenarioParams { rho: 1.0 - 1e-9, ..m1 };
        assert_abs_diff_eq!(se_max(&near), 11.0 / 12.0 * near.rho, epsilon = 1e-6);
        let one = ScenarioParams { rho: 1.0, ..m1 };
        assert_abs_diff_eq!(se_max(&one), 11.0 / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn su_max_values() {
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::TxRx);
        assert_abs_diff_eq!(su_max(&m, TopoKind::Wyner), 0.24, epsilon = 1e-15);
        assert_abs_diff_eq!(su_max(&m, TopoKind::Hex), 0.16, epsilon = 1e-15);
        let none = ScenarioParams { rho_f: 0.0, ..m };
        assert_eq!(su_max(&none, TopoKind::Wyner), 0.0);
    }

    #[test]
    fn adaptive_txrx_model1_slope_at_reference_point() {
        // Direct evaluation of the boundary gives about 1.0065.
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::TxRx);
        let slope = slope_coefficient(&m, Scheme::AdaptiveTxRx, TopoKind::Wyner).unwrap();
        assert_abs_diff_eq!(slope, 1.0065, epsilon = 5e-4);
    }

    #[test]
    fn intercepts_at_reference_point() {
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::TxRx);
        assert_abs_diff_eq!(intercept(&m, Scheme::AdaptiveTxRx, TopoKind::Wyner).unwrap(), 0.7852, epsilon = 5e-5);
        assert_abs_diff_eq!(intercept(&m, Scheme::NonAdaptiveTxRx, TopoKind::Wyner).unwrap(), 0.733333333333, epsilon = 1e-9);
    }

    #[test]
    fn zero_urllc_gives_a_single_se_constraint() {
        let m = p(0.8, 0.0, 10, ArrivalModel::Model2, Coop::TxRx);
        let c = inner_region(&m, Scheme::AdaptiveTxRx, TopoKind::Wyner).unwrap();
        assert_eq!(c[0], LinearConstraint::su_cap(0.0));
        assert_eq!(c[1].coeff_u, 0.0);
        assert!(slope_coefficient(&m, Scheme::AdaptiveTxRx, TopoKind::Wyner).is_err());
    }

    #[test]
    fn hex_needs_unbounded_depth() {
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::RxOnly);
        assert!(slope_coefficient(&m, Scheme::AdaptiveRx, TopoKind::Hex).is_err());
    }

    #[test]
    fn mismatched_cooperation_rejected() {
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::TxRx);
        assert!(inner_region(&m, Scheme::AdaptiveRx, TopoKind::Wyner).is_err());
    }

    #[test]
    fn outer_rx_point() {
        let m = p(0.8, 0.6, 10, ArrivalModel::Model1, Coop::RxOnly);
        let c = outer_region(&m, TopoKind::Wyner).unwrap();
        let line = c.iter().find(|c| (c.coeff_u - 1.8).abs() < 1e-12).unwrap();
        assert_abs_diff_eq!(line.rhs - line.coeff_u * 0.24, 0.368, epsilon = 1e-6);
    }
}
