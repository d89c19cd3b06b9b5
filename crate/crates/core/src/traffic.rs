//! Random activity and arrival patterns, subnet decomposition of the Wyner
//! line, and the exact laws of subnet starts and lengths.
//!
//! Phase `i = 1` schedules URLLC traffic of odd users and phase `i = 2` that
//! of even users (1-based labels). User labels `k` passed to the laws are
//! 1-based as well.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::netmodel::Topology;

/// Number of cooperation rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Finite(u32),
    Infinite,
}

impl Depth {
    /// Period `D + 2` of the silencing pattern, if finite.
    pub fn period(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d as usize + 2),
            Depth::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrivalModel {
    /// Every active user has an eMBB message and possibly a URLLC one.
    Model1,
    /// Every active user has exactly one message.
    Model2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coop {
    TxRx,
    RxOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub rho: f64,
    pub rho_f: f64,
    pub depth: Depth,
    pub model: ArrivalModel,
    pub coop: Coop,
}

impl ScenarioParams {
    pub fn new(rho: f64, rho_f: f64, depth: Depth, model: ArrivalModel, coop: Coop) -> Result<Self> {
        let p = ScenarioParams {
            rho,
            rho_f,
            depth,
            model,
            coop,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(param("rho", format!("must lie in [0, 1], got {}", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.rho_f) {
            return Err(param("rho_f", format!("must lie in [0, 1], got {}", self.rho_f)));
        }
        if let Depth::Finite(d) = self.depth {
            if d % 2 != 0 {
                return Err(param("D", format!("must be even, got {d}")));
            }
        }
        Ok(())
    }
}

/// Activity bits `A_k` and URLLC bits `B_k` of one network draw.
///
/// `urllc[u]` is false whenever `active[u]` is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRealization {
    #[serde(with = "bits")]
    pub active: Vec<bool>,
    #[serde(with = "bits")]
    pub urllc: Vec<bool>,
}

mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
            })
            .collect()
    }
}

impl ActivityRealization {
    pub fn new(active: Vec<bool>, urllc: Vec<bool>) -> Result<Self> {
        if active.len() != urllc.len() {
            return Err(param("realization", "activity and URLLC vectors differ in length"));
        }
        if active.iter().zip(&urllc).any(|(&a, &b)| b && !a) {
            return Err(param("realization", "a URLLC bit is set on an inactive user"));
        }
        Ok(ActivityRealization { active, urllc })
    }

    /// Builds a realization from 0/1 slices.
    pub fn from_bits(active: &[u8], urllc: &[u8]) -> Result<Self> {
        Self::new(
            active.iter().map(|&b| b != 0).collect(),
            urllc.iter().map(|&b| b != 0).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Active user holding an eMBB message.
    pub fn has_embb(&self, u: usize, model: ArrivalModel) -> bool {
        match model {
            ArrivalModel::Model1 => self.active[u],
            ArrivalModel::Model2 => self.active[u] && !self.urllc[u],
        }
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn urllc_count(&self) -> usize {
        self.urllc.iter().filter(|&&b| b).count()
    }
}

/// Maximal run of participating users `[start, start + len - 1]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subnet {
    pub start: usize,
    pub len: usize,
}

/// Whether the 0-based user `u` sends URLLC traffic in phase `phase`.
pub fn in_phase(u: usize, phase: usize) -> bool {
    u.is_multiple_of(2) == (phase == 1)
}

fn check_phase(phase: usize) -> Result<()> {
    if phase == 1 || phase == 2 {
        Ok(())
    } else {
        Err(param("phase", format!("must be 1 or 2, got {phase}")))
    }
}

pub fn sample_activity<R: Rng + ?Sized>(
    params: &ScenarioParams,
    topo: &Topology,
    rng: &mut R,
) -> ActivityRealization {
    let k = topo.user_count();
    let mut active = Vec::with_capacity(k);
    let mut urllc = Vec::with_capacity(k);
    for _ in 0..k {
        let a = rng.random_bool(params.rho);
        let b = a && rng.random_bool(params.rho_f);
        active.push(a);
        urllc.push(b);
    }
    ActivityRealization { active, urllc }
}

/// Maximal runs of `true` entries.
pub fn runs(mask: &[bool]) -> Vec<Subnet> {
    let mut out = Vec::new();
    let mut u = 0;
    while u < mask.len() {
        if mask[u] {
            let s = u;
            while u < mask.len() && mask[u] {
                u += 1;
            }
            out.push(Subnet {
                start: s + 1,
                len: u - s,
            });
        } else {
            u += 1;
        }
    }
    out
}

pub fn decompose_active_subnets(r: &ActivityRealization) -> Vec<Subnet> {
    runs(&r.active)
}

/// URLLC users scheduled in `phase`: active, `B = 1`, right parity.
pub fn phase_urllc(r: &ActivityRealization, phase: usize) -> Vec<bool> {
    (0..r.len()).map(|u| r.urllc[u] && in_phase(u, phase)).collect()
}

/// Participation mask of the users that form eMBB-subnets in `phase`.
pub fn embb_participants(r: &ActivityRealization, phase: usize, params: &ScenarioParams) -> Vec<bool> {
    let k = r.len();
    match params.coop {
        Coop::TxRx => match params.model {
            ArrivalModel::Model1 => r.active.clone(),
            ArrivalModel::Model2 => (0..k)
                .map(|u| r.active[u] && !(r.urllc[u] && !in_phase(u, phase)))
                .collect(),
        },
        Coop::RxOnly => {
            let sched = phase_urllc(r, phase);
            (0..k)
                .map(|u| {
                    let near = (u > 0 && sched[u - 1]) || (u + 1 < k && sched[u + 1]);
                    let holder = match params.model {
                        ArrivalModel::Model1 => r.active[u] && !sched[u],
                        ArrivalModel::Model2 => r.active[u] && !r.urllc[u],
                    };
                    holder && !near
                })
                .collect()
        }
    }
}

pub fn decompose_embb_subnets(
    r: &ActivityRealization,
    phase: usize,
    params: &ScenarioParams,
) -> Result<Vec<Subnet>> {
    check_phase(phase)?;
    Ok(runs(&embb_participants(r, phase, params)))
}

fn check_range(l: usize, k: usize, n: usize) -> Result<()> {
    if k == 0 || l == 0 || k > n || l > n - k + 1 {
        return Err(Error::Param {
            name: "(l, k)",
            reason: format!("need 1 <= k and 1 <= l <= K-k+1, got l={l}, k={k}, K={n}"),
        });
    }
    Ok(())
}

fn check_prob(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(param(name, format!("must lie in [0, 1], got {p}")))
    }
}

/// Run law with success probability `z`: a run of length `l` at `k`.
fn run_law(z: f64, l: usize, k: usize, n: usize) -> f64 {
    let cuts = usize::from(k > 1) + usize::from(k + l - 1 < n);
    z.powi(l as i32) * (1.0 - z).powi(cuts as i32)
}

/// Probability that an active subnet of length `l` starts at user `k`.
pub fn subnet_prob_m1(rho: f64, l: usize, k: usize, n: usize) -> Result<f64> {
    check_prob("rho", rho)?;
    check_range(l, k, n)?;
    Ok(run_law(rho, l, k, n))
}

/// Law of runs of eMBB holders under Model 2 (no URLLC scheduled).
pub fn subnet_prob_m2(rho: f64, rho_f: f64, l: usize, k: usize, n: usize) -> Result<f64> {
    check_prob("rho", rho)?;
    check_prob("rho_f", rho_f)?;
    check_range(l, k, n)?;
    Ok(run_law(rho * (1.0 - rho_f), l, k, n))
}

/// Law of phase-`i` subnets under Model 2 with Tx and Rx cooperation.
///
/// Out-of-phase users must hold eMBB traffic, in-phase users need only be
/// active. A neighbour outside the run is absent with probability
/// `1 - rho(1 - rho_f)` if it is out of phase and `1 - rho` otherwise.
pub fn subnet_prob_m2_phase(rho: f64, rho_f: f64, l: usize, k: usize, n: usize, phase: usize) -> Result<f64> {
    check_prob("rho", rho)?;
    check_prob("rho_f", rho_f)?;
    check_phase(phase)?;
    check_range(l, k, n)?;
    let q = 1.0 - rho_f;
    let aligned = in_phase(k - 1, phase);
    let off = if aligned { l / 2 } else { l.div_ceil(2) };
    let core = rho.powi(l as i32) * q.powi(off as i32);
    let cut = |label: usize| {
        if in_phase(label - 1, phase) {
            1.0 - rho
        } else {
            1.0 - rho * q
        }
    };
    let left = if k == 1 { 1.0 } else { cut(k - 1) };
    let last = k + l - 1;
    let right = if last == n { 1.0 } else { cut(last + 1) };
    Ok(core * left * right)
}

/// Law of Rx-only eMBB-subnets in phase `i`.
///
/// A boundary neighbour in phase must be inactive. A boundary neighbour out
/// of phase is unusable when it holds no eMBB message or when its far
/// neighbour is a scheduled URLLC user, which happens with probability
/// `1 - h + h rho rho_f`, where `h` is the eMBB-holder probability. At the
/// network edge that far neighbour is missing and the factor is `1 - h`.
pub fn embb_subnet_prob_rx(
    rho: f64,
    rho_f: f64,
    l: usize,
    k: usize,
    n: usize,
    phase: usize,
    model: ArrivalModel,
) -> Result<f64> {
    check_prob("rho", rho)?;
    check_prob("rho_f", rho_f)?;
    check_phase(phase)?;
    check_range(l, k, n)?;
    let q = 1.0 - rho_f;
    let h = match model {
        ArrivalModel::Model1 => rho,
        ArrivalModel::Model2 => rho * q,
    };
    let core = match model {
        ArrivalModel::Model1 => {
            let on = if in_phase(k - 1, phase) { l.div_ceil(2) } else { l / 2 };
            rho.powi(l as i32) * q.powi(on as i32)
        }
        ArrivalModel::Model2 => h.powi(l as i32),
    };
    // `nb` is the boundary neighbour, `far` the label beyond it (may be absent).
    let cut = |nb: usize, far_exists: bool| {
        if in_phase(nb - 1, phase) {
            1.0 - rho
        } else if far_exists {
            1.0 - h + h * rho * rho_f
        } else {
            1.0 - h
        }
    };
    let left = if k == 1 { 1.0 } else { cut(k - 1, k >= 3) };
    let last = k + l - 1;
    let right = if last == n { 1.0 } else { cut(last + 1, last + 2 <= n) };
    Ok(core * left * right)
}

/// Every arrival pattern of `n` users with its probability.
///
/// Each user is inactive, active with `B = 0`, or active with `B = 1`, so
/// there are `3^n` patterns.
pub fn enumerate_patterns(n: usize, rho: f64, rho_f: f64) -> impl Iterator<Item = (ActivityRealization, f64)> {
    let total = 3usize.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut active = vec![false; n];
        let mut urllc = vec![false; n];
        let mut p = 1.0;
        for u in 0..n {
            match code % 3 {
                0 => p *= 1.0 - rho,
                1 => {
                    active[u] = true;
                    p *= rho * (1.0 - rho_f);
                }
                _ => {
                    active[u] = true;
                    urllc[u] = true;
                    p *= rho * rho_f;
                }
            }
            code /= 3;
        }
        (ActivityRealization { active, urllc }, p)
    })
}
