//! Reference evaluation by literal sequential collapse `ρ → PρP`.
//!
//! The oracle builds its own measurement sequence straight from the event
//! coordinates rather than from the staged causal order, then walks every
//! branch of the collapse tree depth first.

use crate::distribution::OutcomeDistribution;
use crate::engines::{Rule, PRUNE};
use crate::error::{Error, Result};
use crate::geometry::{boost, strictly_precedes, Event};
use crate::linalg::{CMatrix, ProjectorFamily};
use crate::scenario::Scenario;

/// A unit of the oracle's sequence: a whole instrument or one portion of a
/// split instrument.
#[derive(Debug, Clone)]
struct Unit {
    label: String,
    instrument: usize,
    portion: Option<usize>,
    points: Vec<Event>,
    family: ProjectorFamily,
}

/// One leaf of the collapse tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Projector index chosen at each step of `sequence`.
    pub choices: Vec<usize>,
    pub outcome: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseHistory {
    pub rule: Rule,
    pub sequence: Vec<String>,
    pub axes: Vec<String>,
    pub branches: Vec<Branch>,
}

impl CollapseHistory {
    pub fn distribution(&self) -> OutcomeDistribution {
        let mut d = OutcomeDistribution::new(self.axes.clone());
        for b in &self.branches {
            d.add(&b.outcome, b.weight);
        }
        d
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleOptions {
    /// Instruments removed from the experiment. The relational sequence keeps
    /// the portions of the full scenario.
    pub omit: Vec<usize>,
    /// Deliberately measure in reverse order. Used as a negative control.
    pub reverse: bool,
}

fn units(s: &Scenario, rule: Rule, omit: &[usize]) -> Vec<Unit> {
    let mut out = Vec::new();
    for (i, inst) in s.instruments.iter().enumerate() {
        if omit.contains(&i) {
            continue;
        }
        if rule == Rule::Bloch || !s.order().is_split(i) {
            out.push(Unit {
                label: inst.name.clone(),
                instrument: i,
                portion: None,
                points: inst.region.points.clone(),
                family: inst.observable.family.clone(),
            });
            continue;
        }
        for (k, p) in inst.observable.portions.iter().enumerate() {
            out.push(Unit {
                label: format!("{}.{}", inst.name, p.name),
                instrument: i,
                portion: Some(k),
                points: inst.portion_points[k].iter().map(|&j| inst.region.points[j].clone()).collect(),
                family: p.spectral.clone(),
            });
        }
    }
    out
}

fn unit_precedes(u: &Unit, v: &Unit) -> Result<bool> {
    for p in &u.points {
        for q in &v.points {
            if strictly_precedes(p, q)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Any linear extension of the precedence relation between units.
fn causal_sequence(mut pending: Vec<Unit>) -> Result<Vec<Unit>> {
    let mut placed = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let mut next = None;
        for (a, u) in pending.iter().enumerate() {
            let mut minimal = true;
            for (b, v) in pending.iter().enumerate() {
                if a != b && u.instrument != v.instrument && unit_precedes(v, u)? {
                    minimal = false;
                    break;
                }
            }
            if minimal {
                next = Some(a);
                break;
            }
        }
        let a = next.ok_or_else(|| {
            Error::InconsistentOrder(format!(
                "no causally minimal unit among {}",
                pending.iter().map(|u| u.label.as_str()).collect::<Vec<_>>().join(", ")
            ))
        })?;
        placed.push(pending.remove(a));
    }
    Ok(placed)
}

fn frame_sequence(s: &Scenario, pending: Vec<Unit>) -> Result<Vec<(f64, Unit)>> {
    let v = s.frame.as_ref().ok_or(Error::MissingFrame)?;
    let mut timed = Vec::new();
    for u in pending {
        let mut t = f64::INFINITY;
        for p in &u.points {
            t = t.min(boost(p, v)?.t);
        }
        timed.push((t, u));
    }
    timed.sort_by(|a, b| {
        let tol = 1e-12 * a.0.abs().max(b.0.abs()).max(1.0);
        if (a.0 - b.0).abs() <= tol {
            a.1.label.cmp(&b.1.label)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    Ok(timed)
}

/// Fails unless no unit is measured after a unit it strictly precedes.
fn validate_causal(seq: &[Unit]) -> Result<()> {
    for (a, u) in seq.iter().enumerate() {
        for v in &seq[a + 1..] {
            if u.instrument != v.instrument && unit_precedes(v, u)? {
                return Err(Error::InconsistentOrder(format!(
                    "'{}' is measured before '{}' but lies in its future",
                    u.label, v.label
                )));
            }
        }
    }
    Ok(())
}

fn validate_frame(seq: &[(f64, Unit)]) -> Result<()> {
    for w in seq.windows(2) {
        if w[1].0 < w[0].0 - 1e-12 * w[0].0.abs().max(1.0) {
            return Err(Error::InconsistentOrder(format!(
                "'{}' at frame time {} is measured after '{}' at {}",
                w[0].1.label, w[0].0, w[1].1.label, w[1].0
            )));
        }
    }
    Ok(())
}

/// Reported value of instrument `i` given the labels its units produced.
fn read_instrument(s: &Scenario, i: usize, whole: Option<f64>, parts: &[Option<f64>]) -> Result<f64> {
    if let Some(b) = whole {
        return Ok(b);
    }
    let obs = &s.instruments[i].observable;
    let values: Vec<f64> = parts.iter().map(|v| v.expect("every portion measured")).collect();
    let b = obs.f.evaluate(&values)?;
    let nearest = obs
        .family
        .labels
        .iter()
        .copied()
        .min_by(|x, y| (x - b).abs().total_cmp(&(y - b).abs()));
    Ok(match nearest {
        Some(l) if (l - b).abs() <= obs.eps_f.max(1e-12 * b.abs().max(1.0)) => l,
        _ => b,
    })
}

/// Sequential collapse of the initial state through every unit, returning
/// every surviving branch.
pub fn sequential_collapse_with(s: &Scenario, rule: Rule, opts: &OracleOptions) -> Result<CollapseHistory> {
    let pending = units(s, rule, &opts.omit);
    let mut seq: Vec<Unit> = match rule {
        Rule::Relational => {
            let seq = causal_sequence(pending)?;
            validate_causal(&seq)?;
            seq
        }
        Rule::Bloch => {
            let timed = frame_sequence(s, pending)?;
            validate_frame(&timed)?;
            timed.into_iter().map(|(_, u)| u).collect()
        }
    };
    if opts.reverse {
        seq.reverse();
    }

    let reported: Vec<usize> = (0..s.instruments.len()).filter(|i| !opts.omit.contains(i)).collect();
    let axes = reported.iter().map(|&i| s.instruments[i].name.clone()).collect();
    let mut branches = Vec::new();
    let mut choices = Vec::with_capacity(seq.len());
    collapse(&seq, s.rho0.matrix().clone(), &mut choices, &mut |choices, weight| {
        let mut whole = vec![None; s.instruments.len()];
        let mut parts: Vec<Vec<Option<f64>>> = s
            .instruments
            .iter()
            .map(|inst| vec![None; inst.observable.portions.len()])
            .collect();
        for (u, &j) in seq.iter().zip(choices) {
            let b = u.family.labels[j];
            match u.portion {
                None => whole[u.instrument] = Some(b),
                Some(k) => parts[u.instrument][k] = Some(b),
            }
        }
        let outcome = reported
            .iter()
            .map(|&i| read_instrument(s, i, whole[i], &parts[i]))
            .collect::<Result<Vec<_>>>()?;
        branches.push(Branch {
            choices: choices.to_vec(),
            outcome,
            weight,
        });
        Ok(())
    })?;
    Ok(CollapseHistory {
        rule,
        sequence: seq.into_iter().map(|u| u.label).collect(),
        axes,
        branches,
    })
}

fn collapse(
    seq: &[Unit],
    rho: CMatrix,
    choices: &mut Vec<usize>,
    leaf: &mut dyn FnMut(&[usize], f64) -> Result<()>,
) -> Result<()> {
    let depth = choices.len();
    if depth == seq.len() {
        return leaf(choices, rho.trace().re);
    }
    for (j, p) in seq[depth].family.projectors.iter().enumerate() {
        let next = p * &rho * p;
        if next.trace().re <= PRUNE {
            continue;
        }
        choices.push(j);
        collapse(seq, next, choices, leaf)?;
        choices.pop();
    }
    Ok(())
}

pub fn sequential_collapse(s: &Scenario, rule: Rule) -> Result<CollapseHistory> {
    sequential_collapse_with(s, rule, &OracleOptions::default())
}

/// Joint distribution from the oracle.
pub fn oracle_joint(s: &Scenario, rule: Rule) -> Result<OutcomeDistribution> {
    Ok(sequential_collapse(s, rule)?.distribution())
}

/// Branch count of the full collapse tree, before pruning.
pub fn history_count(s: &Scenario, rule: Rule) -> u128 {
    units(s, rule, &[]).iter().map(|u| u.family.len() as u128).product()
}
