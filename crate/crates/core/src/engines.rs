//! The two collapse rules. Both turn a scenario into a measurement plan, an
//! ordered list of projective steps, and evaluate every history of that plan.

use std::fmt;

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::geometry::boost;
use crate::linalg::{commutator_norm, CMatrix, ProjectorFamily};
use crate::scenario::Scenario;

/// Histories whose weight falls to this level are dropped.
pub const PRUNE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Bloch,
    Relational,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Bloch => "bloch",
            Rule::Relational => "relational",
        })
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bloch" => Ok(Rule::Bloch),
            "relational" => Ok(Rule::Relational),
            _ => Err(Error::schema("rule", format!("unknown rule '{s}'"))),
        }
    }
}

/// One projective measurement in a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub label: String,
    pub instrument: usize,
    /// Observable portion measured, or `None` for the whole instrument.
    pub portion: Option<usize>,
    /// Zero-based stage (relational) or position in frame order (Bloch).
    pub rank: usize,
    /// Frame time of the instrument, for Bloch plans.
    pub time: Option<f64>,
    pub family: ProjectorFamily,
}

/// How an instrument's reported outcome is read off a history.
#[derive(Debug, Clone, PartialEq)]
pub enum Readout {
    /// The label of the projector chosen at this step.
    Whole(usize),
    /// `f` of the labels chosen at these steps, one per observable portion.
    Composite(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub rule: Rule,
    pub steps: Vec<Step>,
    /// Reported instruments in scenario order.
    pub readouts: Vec<(usize, Readout)>,
}

impl Plan {
    pub fn axes(&self, s: &Scenario) -> Vec<String> {
        self.readouts
            .iter()
            .map(|(i, _)| s.instruments[*i].name.clone())
            .collect()
    }

    /// Number of branches of the full history tree.
    pub fn history_count(&self) -> u128 {
        self.steps.iter().map(|s| s.family.len() as u128).product()
    }

    /// Outcome tuple reported for a history given by projector indices.
    pub fn outcome(&self, s: &Scenario, choice: &[usize]) -> Result<Vec<f64>> {
        self.readouts
            .iter()
            .map(|(i, r)| match r {
                Readout::Whole(k) => Ok(self.steps[*k].family.labels[choice[*k]]),
                Readout::Composite(ks) => {
                    let values: Vec<f64> = ks.iter().map(|&k| self.steps[k].family.labels[choice[k]]).collect();
                    let obs = &s.instruments[*i].observable;
                    let (b, idx) = obs.label_for(&values)?;
                    Ok(idx.map_or(b, |j| obs.family.labels[j]))
                }
            })
            .collect()
    }

    /// Distribution with every combination of instrument labels present.
    pub fn empty_distribution(&self, s: &Scenario) -> OutcomeDistribution {
        let mut d = OutcomeDistribution::new(self.axes(s));
        let label_sets: Vec<&[f64]> = self
            .readouts
            .iter()
            .map(|(i, _)| s.instruments[*i].observable.family.labels.as_slice())
            .collect();
        let mut idx = vec![0usize; label_sets.len()];
        if label_sets.iter().any(|l| l.is_empty()) {
            return d;
        }
        loop {
            let v: Vec<f64> = idx.iter().zip(&label_sets).map(|(&j, l)| l[j]).collect();
            d.add(&v, 0.0);
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return d;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < label_sets[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn families_commute(a: &ProjectorFamily, b: &ProjectorFamily) -> bool {
    a.projectors.iter().all(|p| {
        b.projectors
            .iter()
            .all(|q| commutator_norm(p, q) <= 1e-9 * p.norm().max(1.0) * q.norm().max(1.0))
    })
}

/// Frame time of an instrument: earliest boosted time over its region.
pub fn frame_time(s: &Scenario, instrument: usize, velocity: &[f64]) -> Result<f64> {
    let mut t = f64::INFINITY;
    for p in &s.instruments[instrument].region.points {
        t = t.min(boost(p, velocity)?.t);
    }
    Ok(t)
}

/// Bloch plan: whole instruments in increasing time of the scenario's frame.
pub fn frame_plan(s: &Scenario, omit: &[usize]) -> Result<Plan> {
    let v = s.frame.as_ref().ok_or(Error::MissingFrame)?;
    let mut timed = Vec::new();
    for i in (0..s.instruments.len()).filter(|i| !omit.contains(i)) {
        timed.push((frame_time(s, i, v)?, i));
    }
    let tied = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    timed.sort_by(|a, b| {
        if tied(a.0, b.0) {
            s.instruments[a.1].name.cmp(&s.instruments[b.1].name)
        } else {
            a.0.total_cmp(&b.0)
        }
    });
    for (x, &(ta, a)) in timed.iter().enumerate() {
        for &(tb, b) in &timed[x + 1..] {
            if tied(ta, tb)
                && !families_commute(&s.instruments[a].observable.family, &s.instruments[b].observable.family)
            {
                return Err(Error::AmbiguousFrameOrder(
                    s.instruments[a].name.clone(),
                    s.instruments[b].name.clone(),
                ));
            }
        }
    }
    let steps: Vec<Step> = timed
        .iter()
        .enumerate()
        .map(|(rank, &(t, i))| Step {
            label: s.instruments[i].name.clone(),
            instrument: i,
            portion: None,
            rank,
            time: Some(t),
            family: s.instruments[i].observable.family.clone(),
        })
        .collect();
    let mut readouts: Vec<(usize, Readout)> = steps
        .iter()
        .enumerate()
        .map(|(k, st)| (st.instrument, Readout::Whole(k)))
        .collect();
    readouts.sort_by_key(|r| r.0);
    Ok(Plan {
        rule: Rule::Bloch,
        steps,
        readouts,
    })
}

/// Relational plan: causal portions stage by stage. An unsplit instrument is
/// measured through its composite family; a split one through each of its
/// observable portions in the stage of that portion. Instruments in `omit`
/// are left out while the causal order of the full scenario is kept.
pub fn stage_plan(s: &Scenario, omit: &[usize]) -> Result<Plan> {
    let order = s.order();
    let mut steps: Vec<Step> = Vec::new();
    let mut portion_step: Vec<Vec<Option<usize>>> = s
        .instruments
        .iter()
        .map(|i| vec![None; i.observable.portions.len()])
        .collect();
    let mut whole_step: Vec<Option<usize>> = vec![None; s.instruments.len()];

    for (stage, members) in order.stages.iter().enumerate() {
        let first = steps.len();
        for &cp in members {
            let i = order.portions[cp].instrument;
            if omit.contains(&i) {
                continue;
            }
            let inst = &s.instruments[i];
            if !order.is_split(i) {
                whole_step[i] = Some(steps.len());
                steps.push(Step {
                    label: inst.name.clone(),
                    instrument: i,
                    portion: None,
                    rank: stage,
                    time: None,
                    family: inst.observable.family.clone(),
                });
                continue;
            }
            for (k, p) in inst.observable.portions.iter().enumerate() {
                if s.causal_portion(i, k) == cp {
                    portion_step[i][k] = Some(steps.len());
                    steps.push(Step {
                        label: format!("{}.{}", inst.name, p.name),
                        instrument: i,
                        portion: Some(k),
                        rank: stage,
                        time: None,
                        family: p.spectral.clone(),
                    });
                }
            }
        }
        for a in first..steps.len() {
            for b in a + 1..steps.len() {
                if steps[a].instrument != steps[b].instrument
                    && !families_commute(&steps[a].family, &steps[b].family)
                {
                    return Err(Error::StageCommutationFailure(
                        steps[a].label.clone(),
                        steps[b].label.clone(),
                    ));
                }
            }
        }
    }

    let mut readouts = Vec::new();
    for i in (0..s.instruments.len()).filter(|i| !omit.contains(i)) {
        let r = match whole_step[i] {
            Some(k) => Readout::Whole(k),
            None => Readout::Composite(portion_step[i].iter().map(|k| k.expect("every portion is staged")).collect()),
        };
        readouts.push((i, r));
    }
    Ok(Plan {
        rule: Rule::Relational,
        steps,
        readouts,
    })
}

pub fn plan_for(s: &Scenario, rule: Rule, omit: &[usize]) -> Result<Plan> {
    match rule {
        Rule::Bloch => frame_plan(s, omit),
        Rule::Relational => stage_plan(s, omit),
    }
}

/// Sums `Re Tr[L ρ L†]` over every history, `L` being the product of the
/// chosen projectors in plan order.
pub fn evaluate_plan(s: &Scenario, plan: &Plan) -> Result<OutcomeDistribution> {
    let mut dist = plan.empty_distribution(s);
    let rho = s.rho0.matrix();
    let n = rho.nrows();
    let mut choice = vec![0usize; plan.steps.len()];
    let mut err = None;
    let w0 = rho.trace().re;
    walk(plan, rho, &CMatrix::identity(n, n), w0, 0, &mut choice, &mut |choice, w| {
        match plan.outcome(s, choice) {
            Ok(o) => dist.add(&o, w),
            Err(e) => {
                err.get_or_insert(e);
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(dist),
    }
}

fn walk(
    plan: &Plan,
    rho: &CMatrix,
    l: &CMatrix,
    weight: f64,
    depth: usize,
    choice: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], f64),
) {
    if depth == plan.steps.len() {
        emit(choice, weight);
        return;
    }
    for (j, p) in plan.steps[depth].family.projectors.iter().enumerate() {
        let next = p * l;
        let w = (&next * rho * next.adjoint()).trace().re;
        if w <= PRUNE {
            continue;
        }
        choice[depth] = j;
        walk(plan, rho, &next, w, depth + 1, choice, emit);
    }
}

pub fn joint(s: &Scenario, rule: Rule) -> Result<OutcomeDistribution> {
    evaluate_plan(s, &plan_for(s, rule, &[])?)
}

/// Joint outcome distribution under the Bloch rule in the scenario's frame.
pub fn bloch_joint(s: &Scenario) -> Result<OutcomeDistribution> {
    joint(s, Rule::Bloch)
}

/// Joint outcome distribution under the relational rule.
pub fn relational_joint(s: &Scenario) -> Result<OutcomeDistribution> {
    joint(s, Rule::Relational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{sorkin_linear, sorkin_square};

    #[test]
    fn rule_names_round_trip() {
        for r in [Rule::Bloch, Rule::Relational] {
            assert_eq!(r.to_string().parse::<Rule>().unwrap(), r);
        }
        assert!("lüders".parse::<Rule>().is_err());
    }

    #[test]
    fn plans_follow_the_stages() {
        let s = sorkin_square();
        let rel = stage_plan(&s, &[]).unwrap();
        let labels: Vec<&str> = rel.steps.iter().map(|st| st.label.as_str()).collect();
        assert_eq!(labels, vec!["A", "B.B1", "B.B2", "C"]);
        let ranks: Vec<usize> = rel.steps.iter().map(|st| st.rank).collect();
        assert_eq!(ranks, vec![0, 0, 1, 1]);
        let bloch = frame_plan(&s, &[]).unwrap();
        assert_eq!(bloch.steps.len(), 3);
        assert_eq!(bloch.axes(&s), vec!["A", "B", "C"]);
        assert_eq!(bloch.history_count(), 3 * 3 * 2);
    }

    #[test]
    fn empty_distribution_lists_every_label() {
        let s = sorkin_linear();
        let plan = plan_for(&s, Rule::Bloch, &[]).unwrap();
        let d = plan.empty_distribution(&s);
        assert_eq!(d.len(), 2 * 3 * 2);
        assert_eq!(d.total(), 0.0);
    }

    #[test]
    fn frame_times_use_the_earliest_point() {
        let s = sorkin_square();
        let b = s.instrument_index("B").unwrap();
        assert_eq!(frame_time(&s, b, &[0.0]).unwrap(), 1.0);
        assert!(frame_time(&s, b, &[0.8]).unwrap() < 0.0);
    }
}
