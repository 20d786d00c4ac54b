//! Signaling, rule-coincidence and frame-invariance audits, plus the bundled
//! scenarios they are demonstrated on.

use serde::Serialize;

use crate::distribution::OutcomeDistribution;
use crate::engines::{evaluate_plan, joint, plan_for, Rule};
use crate::error::{Error, Result};
use crate::field::{build_field_sorkin_scenario, demo_field_spec};
use crate::geometry::{regions_spacelike, Event, Region};
use crate::linalg::{c, CMatrix, DensityMatrix};
use crate::observables::PortionObservable;
use crate::operators::{pauli_x, pauli_z, spin_x, spin_z};
use crate::oracle::{sequential_collapse_with, OracleOptions};
use crate::outcome_fn::parse_f;
use crate::scenario::{Factor, Instrument, Scenario};

/// Largest boost speed accepted by the frame audit.
pub const MAX_AUDIT_SPEED: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDelta {
    pub outcome: Vec<f64>,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signaling {
    pub rule: String,
    /// Total variation distance between the receiver marginals with and
    /// without the sender.
    pub magnitude: f64,
    /// Receiver marginal with the sender minus without, per outcome.
    pub deltas: Vec<OutcomeDelta>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameShift {
    pub velocity: Vec<f64>,
    pub bloch_shift: Option<f64>,
    pub relational_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub sender: String,
    pub receiver: String,
    pub signaling: Vec<Signaling>,
    /// Largest elementwise difference of the two joints; absent without a frame.
    pub coincidence_gap: Option<f64>,
    pub frame_audit: Vec<FrameShift>,
}

fn pair(s: &Scenario, sender: &str, receiver: &str) -> Result<(usize, usize)> {
    let a = s.instrument_index(sender)?;
    let b = s.instrument_index(receiver)?;
    if a == b || !regions_spacelike(&s.instruments[a].region, &s.instruments[b].region) {
        return Err(Error::NotSpacelike(sender.to_string(), receiver.to_string()));
    }
    Ok((a, b))
}

/// Receiver marginals with and without the sender, computed by `eval`,
/// which receives the list of instruments to omit.
fn receiver_marginals(
    s: &Scenario,
    sender: &str,
    receiver: &str,
    eval: impl Fn(&[usize]) -> Result<OutcomeDistribution>,
) -> Result<(OutcomeDistribution, OutcomeDistribution)> {
    let (a, _) = pair(s, sender, receiver)?;
    let with = eval(&[])?.marginal_onto(&[receiver])?;
    let without = eval(&[a])?.marginal_onto(&[receiver])?;
    Ok((with, without))
}

fn signaling_entry(s: &Scenario, rule: Rule, sender: &str, receiver: &str) -> Result<Signaling> {
    let (with, without) = receiver_marginals(s, sender, receiver, |omit| {
        evaluate_plan(s, &plan_for(s, rule, omit)?)
    })?;
    Ok(Signaling {
        rule: rule.to_string(),
        magnitude: with.tv_distance(&without)?,
        deltas: with
            .deltas(&without)?
            .into_iter()
            .map(|(outcome, delta)| OutcomeDelta { outcome, delta })
            .collect(),
    })
}

/// Total variation distance between the receiver's marginal with the sender
/// present and with the sender deleted. The sender and receiver must be
/// spacelike separated.
pub fn signaling_magnitude(s: &Scenario, rule: Rule, sender: &str, receiver: &str) -> Result<f64> {
    Ok(signaling_entry(s, rule, sender, receiver)?.magnitude)
}

/// The same quantity evaluated by sequential collapse.
pub fn oracle_signaling_magnitude(s: &Scenario, rule: Rule, sender: &str, receiver: &str) -> Result<f64> {
    let (with, without) = receiver_marginals(s, sender, receiver, |omit| {
        let opts = OracleOptions {
            omit: omit.to_vec(),
            reverse: false,
        };
        Ok(sequential_collapse_with(s, rule, &opts)?.distribution())
    })?;
    with.tv_distance(&without)
}

/// Largest elementwise difference between the Bloch and relational joints.
pub fn rules_coincidence_gap(s: &Scenario) -> Result<f64> {
    joint(s, Rule::Bloch)?.max_deviation(&joint(s, Rule::Relational)?)
}

/// Recomputes both rules on the boosted scenario for each velocity. The
/// Bloch shift is `None` when the scenario has no frame.
pub fn frame_invariance_audit(s: &Scenario, boosts: &[Vec<f64>]) -> Result<Vec<FrameShift>> {
    let rel = joint(s, Rule::Relational)?;
    let bloch = if s.frame.is_some() {
        Some(joint(s, Rule::Bloch)?)
    } else {
        None
    };
    boosts
        .iter()
        .map(|v| {
            let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if speed > MAX_AUDIT_SPEED {
                return Err(Error::SuperluminalFrame(speed));
            }
            let b = s.boosted(v)?;
            let bloch_shift = match &bloch {
                Some(d) => Some(joint(&b, Rule::Bloch)?.max_deviation(d)?),
                None => None,
            };
            Ok(FrameShift {
                velocity: v.clone(),
                bloch_shift,
                relational_shift: joint(&b, Rule::Relational)?.max_deviation(&rel)?,
            })
        })
        .collect()
}

/// Full report for one sender/receiver pair.
pub fn audit(s: &Scenario, sender: &str, receiver: &str, boosts: &[Vec<f64>]) -> Result<AuditReport> {
    pair(s, sender, receiver)?;
    let mut signaling = Vec::new();
    if s.frame.is_some() {
        signaling.push(signaling_entry(s, Rule::Bloch, sender, receiver)?);
    }
    signaling.push(signaling_entry(s, Rule::Relational, sender, receiver)?);
    let coincidence_gap = if s.frame.is_some() {
        Some(rules_coincidence_gap(s)?)
    } else {
        None
    };
    Ok(AuditReport {
        sender: sender.to_string(),
        receiver: receiver.to_string(),
        signaling,
        coincidence_gap,
        frame_audit: frame_invariance_audit(s, boosts)?,
    })
}

fn point(t: f64, x: f64) -> Event {
    Event::new(t, vec![x])
}

fn sorkin_geometry() -> (Region, Region, Region, Region) {
    (
        Region::new(vec![point(-10.0, 0.0)]),
        Region::new(vec![point(0.0, 0.0)]),
        // point 0 lies inside the cone of A, point 1 outside it
        Region::new(vec![point(1.0, 0.5), point(1.0, 3.0)]),
        Region::new(vec![point(2.0, 3.5)]),
    )
}

struct Observables {
    a: CMatrix,
    b1: CMatrix,
    b2: CMatrix,
    c: CMatrix,
    f: &'static str,
}

/// Factor `x` carries A then B2; factor `y` carries B1 then C. B1 sits on
/// point 1 of the B region, B2 on point 0.
fn sorkin_like(
    x_dim: usize,
    obs: Observables,
    rho: DensityMatrix,
    geometry: (Region, Region, Region, Region),
) -> Result<Scenario> {
    let factors = vec![Factor::new("x", x_dim), Factor::new("y", 2)];
    let dims = [x_dim, 2];
    let (initial, ra, rb, rc) = geometry;
    let a = Instrument::simple("A", ra, PortionObservable::new("A", obs.a, vec![0], &dims)?)?;
    let b = Instrument::new(
        "B",
        rb,
        vec![
            PortionObservable::new("B1", obs.b1, vec![1], &dims)?,
            PortionObservable::new("B2", obs.b2, vec![0], &dims)?,
        ],
        vec![vec![1], vec![0]],
        parse_f(obs.f, 2)?,
    )?;
    let cc = Instrument::simple("C", rc, PortionObservable::new("C", obs.c, vec![1], &dims)?)?;
    Scenario::new(factors, rho, initial, vec![a, b, cc], Some(vec![0.0]), None)
}

// cos(π/8) and sin(π/8), written out so documents reproduce them exactly.
const COS_PI_8: f64 = 0.923_879_532_511_286_7;
const SIN_PI_8: f64 = 0.382_683_432_365_089_8;

/// Two qubits in `cos(π/8)|00⟩ + sin(π/8)|11⟩`, `f = b1 + b2`.
pub fn sorkin_linear() -> Scenario {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = [c(COS_PI_8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(SIN_PI_8, 0.0)];
    let obs = Observables {
        a: pauli_x(),
        b1: pauli_z(),
        b2: pauli_z(),
        c: CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        f: "b1+b2",
    };
    sorkin_like(2, obs, DensityMatrix::pure(&amps).expect("normalized"), sorkin_geometry())
        .expect("bundled scenario is valid")
}

fn square_observables() -> Observables {
    Observables {
        a: spin_x(3),
        b1: pauli_z(),
        b2: spin_z(3),
        c: pauli_x(),
        f: "(b1+b2)^2",
    }
}

/// Qutrit `x` starting in the `b2 = 0` eigenvector, qubit `y` in `|+⟩`,
/// `f = (b1 + b2)^2`.
fn square_state() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 6];
    amps[2] = c(h, 0.0);
    amps[3] = c(h, 0.0);
    DensityMatrix::pure(&amps).expect("normalized")
}

pub fn sorkin_square() -> Scenario {
    sorkin_like(3, square_observables(), square_state(), sorkin_geometry()).expect("bundled scenario is valid")
}

/// The observables of `sorkin_square` with B wholly inside the cone of A and
/// C inside the cone of B.
pub fn unsplit() -> Scenario {
    let geometry = (
        Region::new(vec![point(-10.0, 0.0)]),
        Region::new(vec![point(0.0, 0.0)]),
        Region::new(vec![point(1.0, 0.2), point(1.0, -0.3)]),
        Region::new(vec![point(2.0, 0.5)]),
    );
    sorkin_like(3, square_observables(), square_state(), geometry).expect("bundled scenario is valid")
}

pub fn field_demo() -> Scenario {
    build_field_sorkin_scenario(&demo_field_spec())
        .expect("bundled scenario is valid")
        .scenario
}

pub const CANONICAL_NAMES: &[&str] = &["sorkin-linear", "sorkin-square", "unsplit", "field"];

pub fn canonical(name: &str) -> Option<Scenario> {
    match name {
        "sorkin-linear" => Some(sorkin_linear()),
        "sorkin-square" => Some(sorkin_square()),
        "unsplit" => Some(unsplit()),
        "field" => Some(field_demo()),
        _ => None,
    }
}

pub fn canonical_scenarios() -> Vec<(&'static str, Scenario)> {
    CANONICAL_NAMES
        .iter()
        .map(|&n| (n, canonical(n).expect("known name")))
        .collect()
}
