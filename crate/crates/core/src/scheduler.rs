//! Phased schedules for the Wyner line and the hexagonal torus, their
//! multiplexing-gain tally, and the C1/C2/C3 validity checks.
//!
//! Every scheme time-shares one schedule per URLLC phase. On the Wyner line
//! phase 1 serves odd users and phase 2 even users. On the torus phase `i`
//! serves colour class `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{bfs_distances, hex_color_partition, HexPartition, Topology, TopologyKind};
use crate::traffic::{
    embb_participants, in_phase, phase_urllc, runs, ActivityRealization, ArrivalModel, Coop, Depth,
    ScenarioParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Silent,
    Urllc,
    Embb,
    /// Sends an eMBB message with the interference-free URLLC coding.
    ActsAsUrllc,
}

impl Role {
    fn is_urllc_like(self) -> bool {
        matches!(self, Role::Urllc | Role::ActsAsUrllc)
    }

    fn transmits(self) -> bool {
        !matches!(self, Role::Silent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    AdaptiveTxRx,
    NonAdaptiveTxRx,
    AdaptiveRx,
    NonAdaptiveRx,
}

impl Scheme {
    pub fn from_parts(adaptive: bool, coop: Coop) -> Scheme {
        match (adaptive, coop) {
            (true, Coop::TxRx) => Scheme::AdaptiveTxRx,
            (false, Coop::TxRx) => Scheme::NonAdaptiveTxRx,
            (true, Coop::RxOnly) => Scheme::AdaptiveRx,
            (false, Coop::RxOnly) => Scheme::NonAdaptiveRx,
        }
    }

    pub fn coop(self) -> Coop {
        match self {
            Scheme::AdaptiveTxRx | Scheme::NonAdaptiveTxRx => Coop::TxRx,
            Scheme::AdaptiveRx | Scheme::NonAdaptiveRx => Coop::RxOnly,
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Scheme::AdaptiveTxRx | Scheme::AdaptiveRx)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::AdaptiveTxRx => "adaptive_txrx",
            Scheme::NonAdaptiveTxRx => "nonadaptive_txrx",
            Scheme::AdaptiveRx => "adaptive_rx",
            Scheme::NonAdaptiveRx => "nonadaptive_rx",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasedSchedule {
    pub phases: Vec<Vec<Role>>,
    pub phase_weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTally {
    /// Users sending URLLC traffic.
    pub urllc: usize,
    /// Users transmitting anything, each worth MG 1.
    pub sum: usize,
}

/// Realization-level MG accounting. Totals are phase-weighted sums over
/// users, not per-user values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MGTally {
    pub per_phase: Vec<PhaseTally>,
    pub urllc_total: f64,
    pub sum_total: f64,
}

impl PhasedSchedule {
    pub fn tally(&self) -> MGTally {
        let per_phase: Vec<PhaseTally> = self
            .phases
            .iter()
            .map(|roles| PhaseTally {
                urllc: roles.iter().filter(|&&r| r == Role::Urllc).count(),
                sum: roles.iter().filter(|r| r.transmits()).count(),
            })
            .collect();
        let mut urllc_total = 0.0;
        let mut sum_total = 0.0;
        for (t, w) in per_phase.iter().zip(&self.phase_weights) {
            urllc_total += w * t.urllc as f64;
            sum_total += w * t.sum as f64;
        }
        MGTally {
            per_phase,
            urllc_total,
            sum_total,
        }
    }
}

/// Total MG of a subnet of `l` users when every `(D+2)`-th user is silenced.
pub fn msum_full(l: usize, d: u32) -> usize {
    l - l / (d as usize + 2)
}

/// Total MG of the reduced construction, which loses one more user when
/// `l + 1` reaches a multiple of `D + 2`.
pub fn msum_red(l: usize, d: u32) -> usize {
    l - (l + 1) / (d as usize + 2)
}

/// Relative positions (1-based) whose users must hold eMBB traffic for the
/// full construction to apply to a subnet that starts out of phase.
fn lset_relative(l: usize, d: u32) -> Vec<usize> {
    let a = d as usize + 2;
    let mut out = Vec::new();
    for c in 1..=l.div_ceil(a) {
        for p in [(c - 1) * a + 2, (c * a).saturating_sub(2)] {
            if p >= 1 && p <= l {
                out.push(p);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The set `L_k` as absolute labels, plus the closed-form count `L`.
///
/// The count treats the two positions of each block as distinct. For
/// `D >= 4` it equals the set size; for `D = 2` the positions coincide and
/// the count is twice the set size.
pub fn lset(k: usize, l: usize, d: u32) -> (Vec<usize>, usize) {
    let a = d as usize + 2;
    let set = lset_relative(l, d).into_iter().map(|p| k + p - 1).collect();
    let size = match l % a {
        r if r == 0 || r == a - 2 || r == a - 1 => 2 * l.div_ceil(a),
        1 => 2 * (l / a),
        _ => 2 * (l / a) + 1,
    };
    (set, size)
}

fn check_coop(params: &ScenarioParams, scheme: Scheme) -> Result<()> {
    if params.coop != scheme.coop() {
        return Err(Error::Unsupported(format!(
            "scheme {} needs {:?} cooperation but the scenario uses {:?}",
            scheme.name(),
            scheme.coop(),
            params.coop
        )));
    }
    Ok(())
}

/// Non-adaptive Tx+Rx scheme on the Wyner line.
///
/// The silenced users do not depend on the activity pattern: labels
/// congruent to 0 (phase 1) or 1 (phase 2) modulo `D + 2`. Users of the
/// phase parity use URLLC coding, carrying eMBB data when they have no URLLC
/// message.
pub fn schedule_nonadaptive_wyner(params: &ScenarioParams, r: &ActivityRealization) -> PhasedSchedule {
    let k = r.len();
    let phases = (1..=2)
        .map(|phase| {
            (0..k)
                .map(|u| {
                    let label = u + 1;
                    let silenced = match params.depth.period() {
                        Some(a) => label % a == (phase - 1) % a,
                        None => false,
                    };
                    if silenced || !r.active[u] {
                        Role::Silent
                    } else if in_phase(u, phase) {
                        if r.urllc[u] {
                            Role::Urllc
                        } else {
                            Role::ActsAsUrllc
                        }
                    } else if params.model == ArrivalModel::Model2 && r.urllc[u] {
                        Role::Silent
                    } else {
                        Role::Embb
                    }
                })
                .collect()
        })
        .collect();
    PhasedSchedule {
        phases,
        phase_weights: vec![0.5, 0.5],
    }
}

/// Full construction on `roles[..]` (one subnet, relative positions 1..=l).
///
/// Silences every `(D+2)`-th user. A URLLC user on such a position keeps
/// transmitting and the silence moves to its right neighbour (or its left
/// one at the end of the subnet). Both ends of every block use URLLC coding
/// so that each eMBB group spans at most `D - 1` users.
fn full_construction(roles: &mut [Role], urllc: &[bool], d: u32) {
    let l = roles.len();
    let a = d as usize + 2;
    let at = |p: usize| p - 1;
    let mut c = 1;
    while c * a <= l {
        let p = c * a;
        if urllc[at(p)] {
            let q = if p < l { p + 1 } else { p - 1 };
            roles[at(q)] = Role::Silent;
        } else {
            roles[at(p)] = Role::Silent;
        }
        c += 1;
    }
    let mut c = 0;
    while c * a < l {
        let b = c * a + 1;
        let e = c * a + d as usize + 1;
        let right_blocked = e < l && urllc[at(e + 1)];
        if e <= l && roles[at(e)] == Role::Embb && !right_blocked {
            roles[at(e)] = Role::ActsAsUrllc;
        }
        if right_blocked {
            if b < l && roles[at(b + 1)] == Role::Embb {
                roles[at(b + 1)] = Role::ActsAsUrllc;
            }
        } else if roles[at(b)] == Role::Embb {
            roles[at(b)] = Role::ActsAsUrllc;
        }
        c += 1;
    }
}

/// Per-subnet rule of the adaptive Tx+Rx scheme.
fn adaptive_txrx_subnet(roles: &mut [Role], urllc: &[bool], d: u32, aligned: bool) {
    let l = roles.len();
    let blocked = !aligned && lset_relative(l, d).iter().any(|&p| urllc[p - 1]);
    if !blocked {
        full_construction(roles, urllc, d);
        return;
    }
    let d = d as usize;
    let head = l.min(d);
    if head >= 2 && roles[1] == Role::Embb && roles[0] == Role::Embb {
        roles[0] = Role::ActsAsUrllc;
    }
    if l > d {
        roles[d] = Role::Silent;
        let (rest_roles, rest_urllc) = (&mut roles[d + 1..], &urllc[d + 1..]);
        if !rest_roles.is_empty() {
            full_construction(rest_roles, rest_urllc, d as u32);
        }
    }
}

/// Adaptive Tx+Rx scheme on the Wyner line, either arrival model.
pub fn schedule_adaptive_wyner_txrx(params: &ScenarioParams, r: &ActivityRealization) -> PhasedSchedule {
    let k = r.len();
    let phases = (1..=2)
        .map(|phase| {
            let part = embb_participants(r, phase, params);
            let urllc = phase_urllc(r, phase);
            let mut roles = vec![Role::Silent; k];
            for s in runs(&part) {
                let lo = s.start - 1;
                let hi = lo + s.len;
                for u in lo..hi {
                    roles[u] = if urllc[u] { Role::Urllc } else { Role::Embb };
                }
                if let Depth::Finite(d) = params.depth {
                    adaptive_txrx_subnet(&mut roles[lo..hi], &urllc[lo..hi], d, in_phase(lo, phase));
                }
            }
            roles
        })
        .collect();
    PhasedSchedule {
        phases,
        phase_weights: vec![0.5, 0.5],
    }
}

/// Adaptive Rx-only scheme on the Wyner line.
pub fn schedule_adaptive_wyner_rxonly(params: &ScenarioParams, r: &ActivityRealization) -> PhasedSchedule {
    let k = r.len();
    let phases = (1..=2)
        .map(|phase| {
            let urllc = phase_urllc(r, phase);
            let part = embb_participants(r, phase, params);
            let mut roles: Vec<Role> = (0..k)
                .map(|u| if urllc[u] { Role::Urllc } else { Role::Silent })
                .collect();
            for s in runs(&part) {
                for p in 1..=s.len {
                    let silenced = params.depth.period().is_some_and(|a| p % a == 0);
                    if !silenced {
                        roles[s.start + p - 2] = Role::Embb;
                    }
                }
            }
            roles
        })
        .collect();
    PhasedSchedule {
        phases,
        phase_weights: vec![0.5, 0.5],
    }
}

/// Non-adaptive Rx-only scheme on the Wyner line: only users of the phase
/// parity transmit, URLLC if they have such a message and eMBB otherwise.
pub fn schedule_nonadaptive_wyner_rxonly(params: &ScenarioParams, r: &ActivityRealization) -> PhasedSchedule {
    let k = r.len();
    let phases = (1..=2)
        .map(|phase| {
            (0..k)
                .map(|u| match (in_phase(u, phase), r.active[u], r.urllc[u]) {
                    (true, true, true) => Role::Urllc,
                    (true, true, false) if r.has_embb(u, params.model) => Role::Embb,
                    _ => Role::Silent,
                })
                .collect()
        })
        .collect();
    PhasedSchedule {
        phases,
        phase_weights: vec![0.5, 0.5],
    }
}

/// Three-phase schemes on the hexagonal torus (unbounded cooperation).
pub fn schedule_hex(
    params: &ScenarioParams,
    scheme: Scheme,
    r: &ActivityRealization,
    topo: &Topology,
    partition: &HexPartition,
) -> PhasedSchedule {
    let k = r.len();
    let model = params.model;
    let phases = (0..3)
        .map(|class| {
            let on = |u: usize| partition.class(u) == class;
            let sched = |u: usize| on(u) && r.urllc[u];
            (0..k)
                .map(|u| {
                    if sched(u) {
                        return Role::Urllc;
                    }
                    if !r.has_embb(u, model) {
                        return Role::Silent;
                    }
                    match scheme {
                        Scheme::AdaptiveTxRx | Scheme::NonAdaptiveTxRx => Role::Embb,
                        Scheme::NonAdaptiveRx => {
                            if on(u) {
                                Role::Embb
                            } else {
                                Role::Silent
                            }
                        }
                        Scheme::AdaptiveRx => {
                            if topo.neighbors(u).iter().any(|&v| sched(v)) {
                                Role::Silent
                            } else {
                                Role::Embb
                            }
                        }
                    }
                })
                .collect()
        })
        .collect();
    PhasedSchedule {
        phases,
        phase_weights: vec![1.0 / 3.0; 3],
    }
}

/// Builds the schedule of `scheme` for one realization.
pub fn schedule(
    params: &ScenarioParams,
    scheme: Scheme,
    topo: &Topology,
    r: &ActivityRealization,
) -> Result<PhasedSchedule> {
    check_coop(params, scheme)?;
    if r.len() != topo.user_count() {
        return Err(Error::Unsupported(format!(
            "realization has {} users but the topology has {}",
            r.len(),
            topo.user_count()
        )));
    }
    match topo.kind() {
        TopologyKind::WynerLine => Ok(match scheme {
            Scheme::NonAdaptiveTxRx => schedule_nonadaptive_wyner(params, r),
            Scheme::AdaptiveTxRx => schedule_adaptive_wyner_txrx(params, r),
            Scheme::AdaptiveRx => schedule_adaptive_wyner_rxonly(params, r),
            Scheme::NonAdaptiveRx => schedule_nonadaptive_wyner_rxonly(params, r),
        }),
        TopologyKind::HexTorus { .. } => {
            let partition = hex_color_partition(topo)?;
            Ok(schedule_hex(params, scheme, r, topo, &partition))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2,
    C3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    /// 1-based phase index.
    pub phase: usize,
    /// External labels of the users involved.
    pub users: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Hop radius allowed between a master receiver and its eMBB group.
///
/// With Tx and Rx cooperation one round is spent at the transmitters, so
/// the receivers have `D/2 - 1` hops each way; with receiver cooperation
/// only they have `D/2`. `None` means unbounded.
pub fn c2_radius(params: &ScenarioParams) -> Option<i64> {
    match params.depth {
        Depth::Infinite => None,
        Depth::Finite(d) => Some(match params.coop {
            Coop::TxRx => d as i64 / 2 - 1,
            Coop::RxOnly => d as i64 / 2,
        }),
    }
}

fn embb_groups(topo: &Topology, roles: &[Role]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; roles.len()];
    let mut groups = Vec::new();
    for start in 0..roles.len() {
        if seen[start] || roles[start] != Role::Embb {
            continue;
        }
        let mut group = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < group.len() {
            let u = group[i];
            for &v in topo.neighbors(u) {
                if !seen[v] && roles[v] == Role::Embb {
                    seen[v] = true;
                    group.push(v);
                }
            }
            i += 1;
        }
        group.sort_unstable();
        groups.push(group);
    }
    groups
}

fn group_has_master(topo: &Topology, group: &[usize], radius: i64) -> bool {
    if radius < 0 {
        return false;
    }
    let radius = radius as usize;
    if let TopologyKind::WynerLine = topo.kind() {
        // Groups on a line are contiguous runs.
        return group.len() - 1 <= 2 * radius;
    }
    group.iter().any(|&m| {
        let dist = bfs_distances(topo, m);
        group.iter().all(|&u| dist[u].is_some_and(|x| x <= radius))
    })
}

pub fn validate_schedule(topo: &Topology, schedule: &PhasedSchedule, params: &ScenarioParams) -> ValidationReport {
    let mut violations = Vec::new();
    let radius = c2_radius(params);
    let edges = topo.edges();
    for (pi, roles) in schedule.phases.iter().enumerate() {
        let phase = pi + 1;
        for &(j, k) in &edges {
            if roles[j].is_urllc_like() && roles[k].is_urllc_like() {
                violations.push(Violation {
                    condition: Condition::C1,
                    phase,
                    users: vec![topo.label(j), topo.label(k)],
                });
            }
            if params.coop == Coop::RxOnly {
                let mixed = (roles[j] == Role::Embb && roles[k] == Role::Urllc)
                    || (roles[j] == Role::Urllc && roles[k] == Role::Embb);
                if mixed {
                    violations.push(Violation {
                        condition: Condition::C3,
                        phase,
                        users: vec![topo.label(j), topo.label(k)],
                    });
                }
            }
        }
        if let Some(r) = radius {
            for group in embb_groups(topo, roles) {
                if !group_has_master(topo, &group, r) {
                    violations.push(Violation {
                        condition: Condition::C2,
                        phase,
                        users: group.iter().map(|&u| topo.label(u)).collect(),
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{build_hex, build_wyner};
    use crate::traffic::enumerate_patterns;

    fn params(model: ArrivalModel, coop: Coop, d: u32) -> ScenarioParams {
        ScenarioParams::new(0.8, 0.6, Depth::Finite(d), model, coop).unwrap()
    }

    #[test]
    fn msum_values() {
        assert_eq!(msum_full(20, 6), 18);
        assert_eq!(msum_full(12, 10), 11);
        assert_eq!(msum_full(7, 6), 7);
        assert_eq!(msum_red(11, 10), 10);
        assert_eq!(msum_red(10, 10), 10);
        for d in [0, 2, 4, 10] {
            for l in 1..=10_000 {
                let (f, r) = (msum_full(l, d), msum_red(l, d));
                assert!(r == f || r + 1 == f, "l={l} d={d}");
            }
        }
    }

    #[test]
    fn lset_example_and_cardinality() {
        let (set, size) = lset(1, 20, 6);
        assert_eq!(set, vec![2, 6, 10, 14, 18]);
        assert_eq!(size, 5);
        for d in [2u32, 4, 6, 10] {
            let a = d as usize + 2;
            for l in 1..=500 {
                let (set, size) = lset(1, l, d);
                if l % a == 1 {
                    assert_eq!(size, 2 * (l / a));
                }
                if d >= 4 {
                    assert_eq!(set.len(), size, "l={l} d={d}");
                } else {
                    assert_eq!(2 * set.len(), size, "l={l} d={d}");
                }
            }
        }
    }

    #[test]
    fn nonadaptive_all_active_k24() {
        let p = ScenarioParams::new(1.0, 0.0, Depth::Finite(10), ArrivalModel::Model1, Coop::TxRx).unwrap();
        let r = ActivityRealization::from_bits(&[1; 24], &[0; 24]).unwrap();
        let t = schedule_nonadaptive_wyner(&p, &r).tally();
        assert_eq!(t.sum_total, 22.0);
    }

    #[test]
    fn rx_only_example_phase2() {
        let p = params(ArrivalModel::Model1, Coop::RxOnly, 4);
        let r = ActivityRealization::from_bits(&[1, 1, 1], &[0, 1, 0]).unwrap();
        let s = schedule_adaptive_wyner_rxonly(&p, &r);
        assert_eq!(s.phases[1], vec![Role::Silent, Role::Urllc, Role::Silent]);
        assert_eq!(s.tally().per_phase[1].sum, 1);
    }

    #[test]
    fn short_out_of_phase_subnet_keeps_its_length() {
        // Subnet of users 2..5 (starts even, out of phase 1); URLLC at label 3
        // which is an L position, so the reduced rule runs on l = 4 <= D.
        let p = params(ArrivalModel::Model1, Coop::TxRx, 6);
        let r = ActivityRealization::from_bits(&[0, 1, 1, 1, 1, 0], &[0, 0, 1, 0, 0, 0]).unwrap();
        let s = schedule_adaptive_wyner_txrx(&p, &r);
        assert_eq!(s.tally().per_phase[0].sum, 4);
        assert!(validate_schedule(&build_wyner(6).unwrap(), &s, &p).is_valid());
    }

    #[test]
    fn no_urllc_model1_is_full_on_each_run() {
        let p = params(ArrivalModel::Model1, Coop::TxRx, 2);
        let bits = [1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1];
        let r = ActivityRealization::from_bits(&bits, &[0; 20]).unwrap();
        let s = schedule_adaptive_wyner_txrx(&p, &r);
        let expect: usize = runs(&r.active).iter().map(|s| msum_full(s.len, 2)).sum();
        for t in s.tally().per_phase {
            assert_eq!(t.sum, expect);
        }
    }

    #[test]
    fn hand_built_violations() {
        let topo = build_wyner(6).unwrap();
        let p = params(ArrivalModel::Model1, Coop::RxOnly, 4);
        let mut roles = vec![Role::Silent; 6];
        roles[2] = Role::Urllc;
        roles[3] = Role::Urllc;
        let s = PhasedSchedule {
            phases: vec![roles],
            phase_weights: vec![1.0],
        };
        let rep = validate_schedule(&topo, &s, &p);
        assert!(rep.violations.iter().any(|v| v.condition == Condition::C1 && v.users == vec![3, 4]));

        let mut roles = vec![Role::Silent; 6];
        roles[1] = Role::Embb;
        roles[2] = Role::Urllc;
        let s = PhasedSchedule {
            phases: vec![roles],
            phase_weights: vec![1.0],
        };
        let rep = validate_schedule(&topo, &s, &p);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].condition, Condition::C3);
        assert_eq!(rep.violations[0].users, vec![2, 3]);
    }

    #[test]
    fn c2_detects_long_groups() {
        let topo = build_wyner(8).unwrap();
        let p = params(ArrivalModel::Model1, Coop::TxRx, 4);
        let s = PhasedSchedule {
            phases: vec![vec![Role::Embb; 4].into_iter().chain(vec![Role::Silent; 4]).collect()],
            phase_weights: vec![1.0],
        };
        // Radius D/2 - 1 = 1 admits at most 3 users.
        let rep = validate_schedule(&topo, &s, &p);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].condition, Condition::C2);
    }

    #[test]
    fn hex_txrx_all_active_sums_to_one_per_user() {
        let topo = build_hex(6, 6).unwrap();
        let p = ScenarioParams::new(1.0, 0.0, Depth::Infinite, ArrivalModel::Model1, Coop::TxRx).unwrap();
        let r = ActivityRealization::from_bits(&[1; 36], &[0; 36]).unwrap();
        let s = schedule(&p, Scheme::AdaptiveTxRx, &topo, &r).unwrap();
        let t = s.tally();
        for ph in &t.per_phase {
            assert_eq!(ph.sum, 36);
        }
        assert!((t.sum_total - 36.0).abs() < 1e-12);
    }

    #[test]
    fn coop_mismatch_rejected() {
        let topo = build_wyner(4).unwrap();
        let p = params(ArrivalModel::Model1, Coop::TxRx, 2);
        let r = ActivityRealization::from_bits(&[1; 4], &[0; 4]).unwrap();
        assert!(schedule(&p, Scheme::AdaptiveRx, &topo, &r).is_err());
    }

    #[test]
    fn every_small_pattern_validates() {
        // Exhaustive check on K = 9 for every Wyner scheme and several D.
        let topo = build_wyner(9).unwrap();
        for d in [0u32, 2, 4, 6] {
            for model in [ArrivalModel::Model1, ArrivalModel::Model2] {
                for scheme in [
                    Scheme::AdaptiveTxRx,
                    Scheme::NonAdaptiveTxRx,
                    Scheme::AdaptiveRx,
                    Scheme::NonAdaptiveRx,
                ] {
                    let p = params(model, scheme.coop(), d);
                    for (r, _) in enumerate_patterns(9, 0.5, 0.5) {
                        let s = schedule(&p, scheme, &topo, &r).unwrap();
                        let rep = validate_schedule(&topo, &s, &p);
                        assert!(rep.is_valid(), "{scheme:?} {model:?} D={d} {r:?} {rep:?} {s:?}");
                    }
                }
            }
        }
    }
}
