//! Minkowski events and regions, light-cone precedence, Lorentz boosts, and
//! the covariant staged order of instrument portions.
//!
//! Units have `c = 1`. Precedence uses the closed forward cone with a strict
//! increase in time: lightlike separation counts as causal.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spacetime point `(t, x)` with spatial dimension 1 to 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: Vec<f64>,
}

impl Event {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Event { t, x: x.into() }
    }

    pub fn spatial_dim(&self) -> usize {
        self.x.len()
    }

    /// `[t, x1, ..., xd]`
    pub fn to_array(&self) -> Vec<f64> {
        std::iter::once(self.t).chain(self.x.iter().copied()).collect()
    }

    pub fn from_array(a: &[f64]) -> Option<Self> {
        match a {
            [t, x @ ..] if (1..=3).contains(&x.len()) => Some(Event::new(*t, x.to_vec())),
            _ => None,
        }
    }
}

/// Squared Minkowski interval `(Δt)² - |Δx|²`; positive for timelike pairs.
pub fn interval(p: &Event, q: &Event) -> f64 {
    let dt = q.t - p.t;
    let dx2: f64 = p.x.iter().zip(&q.x).map(|(a, b)| (b - a) * (b - a)).sum();
    dt * dt - dx2
}

fn same_dim(p: &Event, q: &Event) -> Result<()> {
    if p.x.len() != q.x.len() {
        return Err(Error::DimensionMismatch(format!(
            "events with spatial dimension {} and {}",
            p.x.len(),
            q.x.len()
        )));
    }
    Ok(())
}

/// `q` lies in the closed forward light cone of `p`, strictly later in time.
pub fn strictly_precedes(p: &Event, q: &Event) -> Result<bool> {
    same_dim(p, q)?;
    Ok(precedes_unchecked(p, q))
}

fn precedes_unchecked(p: &Event, q: &Event) -> bool {
    q.t > p.t && interval(p, q) >= 0.0
}

/// Either event strictly precedes the other.
pub fn causally_related(p: &Event, q: &Event) -> bool {
    precedes_unchecked(p, q) || precedes_unchecked(q, p)
}

/// The spacelike slice an instrument acts on, plus its four-velocity
/// (spatial part). The velocity is carried along but does not affect the
/// causal construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub points: Vec<Event>,
    pub velocity: Vec<f64>,
}

impl Region {
    pub fn new(points: Vec<Event>) -> Self {
        let d = points.first().map_or(1, Event::spatial_dim);
        Region {
            points,
            velocity: vec![0.0; d],
        }
    }

    pub fn with_velocity(mut self, velocity: Vec<f64>) -> Self {
        self.velocity = velocity;
        self
    }

    pub fn min_time(&self) -> f64 {
        self.points.iter().map(|p| p.t).fold(f64::INFINITY, f64::min)
    }

    /// Boosts every point and transforms the velocity metadata.
    pub fn boosted(&self, v: &[f64]) -> Result<Region> {
        let points = self
            .points
            .iter()
            .map(|p| boost(p, v))
            .collect::<Result<Vec<_>>>()?;
        let u2: f64 = self.velocity.iter().map(|u| u * u).sum();
        let velocity = if u2 < 1.0 {
            let g = 1.0 / (1.0 - u2).sqrt();
            let four = Event::new(g, self.velocity.iter().map(|u| g * u).collect::<Vec<_>>());
            let b = boost(&four, v)?;
            b.x.iter().map(|x| x / b.t).collect()
        } else {
            self.velocity.clone()
        };
        Ok(Region { points, velocity })
    }
}

/// Every point of `r2` is strictly preceded by at least one point of `r1`.
pub fn region_precedes(r1: &Region, r2: &Region) -> bool {
    r2.points
        .iter()
        .all(|q| r1.points.iter().any(|p| precedes_unchecked(p, q)))
}

/// No two points of the region are causally related.
pub fn validate_achronal(r: &Region) -> bool {
    r.points.iter().enumerate().all(|(i, p)| {
        r.points[i + 1..].iter().all(|q| !causally_related(p, q))
    })
}

/// No point of `a` is causally related to a point of `b`.
pub fn regions_spacelike(a: &Region, b: &Region) -> bool {
    a.points
        .iter()
        .all(|p| b.points.iter().all(|q| !causally_related(p, q)))
}

/// Lorentz boost to a frame moving with velocity `v` (`|v| < 1`).
pub fn boost(e: &Event, v: &[f64]) -> Result<Event> {
    if v.len() != e.x.len() {
        return Err(Error::DimensionMismatch(format!(
            "boost velocity has {} components, event has {}",
            v.len(),
            e.x.len()
        )));
    }
    let v2: f64 = v.iter().map(|a| a * a).sum();
    if v2 >= 1.0 || !v2.is_finite() {
        return Err(Error::SuperluminalFrame(v2.sqrt()));
    }
    if v2 == 0.0 {
        return Ok(e.clone());
    }
    let gamma = 1.0 / (1.0 - v2).sqrt();
    let vx: f64 = v.iter().zip(&e.x).map(|(a, b)| a * b).sum();
    let t = gamma * (e.t - vx);
    let k = (gamma - 1.0) * vx / v2 - gamma * e.t;
    let x = e.x.iter().zip(v).map(|(xi, vi)| xi + k * vi).collect();
    Ok(Event { t, x })
}

/// An instrument portion: a maximal set of an instrument's points that share
/// a causal stage and lie entirely inside (or outside) the forward cone of
/// every earlier portion.
#[derive(Debug, Clone, PartialEq)]
pub struct Portion {
    pub instrument: usize,
    /// Indices into the instrument's region points, ascending.
    pub points: Vec<usize>,
    /// Zero-based stage index (stage `S¹` is index 0).
    pub stage: usize,
}

/// Staged order `S¹ < S² < ...` over instrument portions.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalOrder {
    pub portions: Vec<Portion>,
    /// Portion indices per stage.
    pub stages: Vec<Vec<usize>>,
    /// Portion indices per instrument, in stage order.
    pub by_instrument: Vec<Vec<usize>>,
}

impl CausalOrder {
    /// Portion index containing point `point` of `instrument`.
    pub fn portion_of(&self, instrument: usize, point: usize) -> Option<usize> {
        self.by_instrument
            .get(instrument)?
            .iter()
            .copied()
            .find(|&p| self.portions[p].points.contains(&point))
    }

    pub fn is_split(&self, instrument: usize) -> bool {
        self.by_instrument[instrument].len() > 1
    }

    /// Combinatorial signature: for each instrument, its portions as
    /// (stage, point set) pairs.
    pub fn signature(&self) -> Vec<Vec<(usize, Vec<usize>)>> {
        self.by_instrument
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|&p| (self.portions[p].stage, self.portions[p].points.clone()))
                    .collect()
            })
            .collect()
    }

    /// Checks partition, stage spacelikeness and monotonicity against the
    /// instrument regions the order was built from.
    pub fn check_invariants(&self, instruments: &[Region]) -> std::result::Result<(), String> {
        for (i, region) in instruments.iter().enumerate() {
            for k in 0..region.points.len() {
                let owners = self.by_instrument[i]
                    .iter()
                    .filter(|&&p| self.portions[p].points.contains(&k))
                    .count();
                if owners != 1 {
                    return Err(format!("point {k} of instrument {i} is in {owners} portions"));
                }
            }
        }
        for (s, stage) in self.stages.iter().enumerate() {
            for &p in stage {
                if self.portions[p].stage != s {
                    return Err(format!("portion {p} listed in stage {s} but tagged {}", self.portions[p].stage));
                }
            }
        }
        let located: Vec<(usize, usize, &Event)> = instruments
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.points.iter().enumerate().map(move |(k, e)| (i, k, e)))
            .collect();
        for &(i, k, p) in &located {
            for &(j, l, q) in &located {
                if i == j || !precedes_unchecked(p, q) {
                    continue;
                }
                let sp = self.portions[self.portion_of(i, k).unwrap()].stage;
                let sq = self.portions[self.portion_of(j, l).unwrap()].stage;
                if sp >= sq {
                    return Err(format!(
                        "point {k} of instrument {i} precedes point {l} of instrument {j} but stages are {sp} >= {sq}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Builds the staged order for `instruments`, all of which must lie in the
/// forward cone of `initial`.
///
/// Points of different instruments are joined by an edge when one strictly
/// precedes the other; a point's stage is the length of the longest chain
/// ending at it. Within a stage, an instrument's points are further grouped by
/// which earlier portions contain them in their forward cone, so every
/// portion lies completely inside or completely outside each earlier
/// portion's cone.
pub fn build_order(instruments: &[Region], initial: &Region) -> Result<CausalOrder> {
    build_order_named(instruments, initial, &default_names(instruments.len()))
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("#{i}")).collect()
}

pub(crate) fn build_order_named(
    instruments: &[Region],
    initial: &Region,
    names: &[String],
) -> Result<CausalOrder> {
    let dim = initial.points.first().map(Event::spatial_dim);
    for (i, r) in instruments.iter().enumerate() {
        if r.points.is_empty() {
            return Err(Error::schema(format!("instruments[{i}].region"), "region has no points"));
        }
        if let Some(d) = dim {
            if r.points.iter().any(|p| p.spatial_dim() != d) {
                return Err(Error::DimensionMismatch(format!(
                    "instrument '{}' mixes spatial dimensions",
                    names[i]
                )));
            }
        }
        if !validate_achronal(r) {
            return Err(Error::NotAchronal(names[i].clone()));
        }
        if !region_precedes(initial, r) {
            return Err(Error::InitialNotPreceding(names[i].clone()));
        }
    }

    // Flattened points, processed in time order so predecessors come first.
    let mut pts: Vec<(usize, usize)> = instruments
        .iter()
        .enumerate()
        .flat_map(|(i, r)| (0..r.points.len()).map(move |k| (i, k)))
        .collect();
    let ev = |&(i, k): &(usize, usize)| &instruments[i].points[k];
    pts.sort_by(|a, b| ev(a).t.total_cmp(&ev(b).t));

    let mut depth = vec![0usize; pts.len()];
    for q in 0..pts.len() {
        let mut d = 1;
        for p in 0..q {
            if pts[p].0 != pts[q].0 && precedes_unchecked(ev(&pts[p]), ev(&pts[q])) {
                d = d.max(depth[p] + 1);
            }
        }
        depth[q] = d;
    }
    let max_depth = depth.iter().copied().max().unwrap_or(0);

    let mut portions: Vec<Portion> = Vec::new();
    for level in 1..=max_depth {
        // (instrument, signature) -> points
        let mut groups: Vec<(usize, BTreeSet<usize>, Vec<usize>)> = Vec::new();
        for (idx, &(i, k)) in pts.iter().enumerate() {
            if depth[idx] != level {
                continue;
            }
            let q = &instruments[i].points[k];
            let sig: BTreeSet<usize> = portions
                .iter()
                .enumerate()
                .filter(|(_, por)| {
                    por.instrument != i
                        && por
                            .points
                            .iter()
                            .any(|&pk| precedes_unchecked(&instruments[por.instrument].points[pk], q))
                })
                .map(|(pi, _)| pi)
                .collect();
            match groups.iter_mut().find(|g| g.0 == i && g.1 == sig) {
                Some(g) => g.2.push(k),
                None => groups.push((i, sig, vec![k])),
            }
        }
        groups.sort_by(|a, b| (a.0, a.2.iter().min()).cmp(&(b.0, b.2.iter().min())));
        for (i, _, mut points) in groups {
            points.sort_unstable();
            portions.push(Portion {
                instrument: i,
                points,
                stage: level - 1,
            });
        }
    }

    let mut stages = vec![Vec::new(); max_depth];
    let mut by_instrument = vec![Vec::new(); instruments.len()];
    for (pi, p) in portions.iter().enumerate() {
        stages[p.stage].push(pi);
        by_instrument[p.instrument].push(pi);
    }
    Ok(CausalOrder {
        portions,
        stages,
        by_instrument,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: f64, x: f64) -> Event {
        Event::new(t, vec![x])
    }

    fn region(points: &[(f64, f64)]) -> Region {
        Region::new(points.iter().map(|&(t, x)| e(t, x)).collect())
    }

    #[test]
    fn precedence_examples() {
        assert!(strictly_precedes(&e(0.0, 0.0), &e(2.0, 1.0)).unwrap());
        assert!(!strictly_precedes(&e(0.0, 0.0), &e(0.0, 5.0)).unwrap());
        assert!(strictly_precedes(&e(0.0, 0.0), &e(1.0, 1.0)).unwrap());
        assert!(!strictly_precedes(&e(0.0, 0.0), &e(0.0, 0.0)).unwrap());
        let err = strictly_precedes(&e(0.0, 0.0), &Event::new(1.0, vec![0.0, 0.0])).unwrap_err();
        assert_eq!(err.code(), "DimensionMismatch");
    }

    #[test]
    fn region_precedence_examples() {
        let a = region(&[(0.0, 0.0)]);
        assert!(region_precedes(&a, &region(&[(2.0, 0.5), (2.0, -0.5)])));
        assert!(!region_precedes(&a, &region(&[(1.0, 0.5), (1.0, 3.0)])));
        let r = region(&[(0.0, 0.0), (0.0, 5.0)]);
        assert!(!region_precedes(&r, &r));
    }

    #[test]
    fn achronality_examples() {
        assert!(validate_achronal(&region(&[(0.0, 0.0), (0.0, 5.0)])));
        assert!(!validate_achronal(&region(&[(0.0, 0.0), (2.0, 1.0)])));
        assert!(validate_achronal(&region(&[(3.0, 3.0)])));
    }

    #[test]
    fn sorkin_arrangement_stages() {
        let a = region(&[(0.0, 0.0)]);
        let b = region(&[(1.0, 0.5), (1.0, 3.0)]);
        let c = region(&[(2.0, 3.5)]);
        // geometry of the arrangement
        assert!(strictly_precedes(&e(0.0, 0.0), &e(1.0, 0.5)).unwrap());
        assert!(!strictly_precedes(&e(0.0, 0.0), &e(1.0, 3.0)).unwrap());
        assert!(strictly_precedes(&e(1.0, 3.0), &e(2.0, 3.5)).unwrap());
        assert!(!causally_related(&e(0.0, 0.0), &e(2.0, 3.5)));
        assert!(!causally_related(&e(1.0, 0.5), &e(2.0, 3.5)));

        let initial = region(&[(-10.0, 0.0)]);
        let order = build_order(&[a.clone(), b.clone(), c.clone()], &initial).unwrap();
        assert_eq!(order.stages.len(), 2);
        let stage_of = |i: usize, k: usize| order.portions[order.portion_of(i, k).unwrap()].stage;
        assert_eq!(stage_of(0, 0), 0);
        assert_eq!(stage_of(1, 1), 0);
        assert_eq!(stage_of(1, 0), 1);
        assert_eq!(stage_of(2, 0), 1);
        assert!(order.is_split(1));
        order.check_invariants(&[a, b, c]).unwrap();
    }

    #[test]
    fn spacelike_instruments_share_stage() {
        let order = build_order(
            &[region(&[(0.0, 0.0)]), region(&[(0.0, 5.0)])],
            &region(&[(-10.0, 2.5)]),
        )
        .unwrap();
        assert_eq!(order.stages, vec![vec![0, 1]]);
    }

    #[test]
    fn total_connection_stays_unsplit() {
        let order = build_order(
            &[region(&[(0.0, 0.0)]), region(&[(2.0, 0.0)])],
            &region(&[(-10.0, 0.0)]),
        )
        .unwrap();
        assert_eq!(order.stages, vec![vec![0], vec![1]]);
        assert!(!order.is_split(1));
    }

    #[test]
    fn initial_must_precede() {
        let err = build_order(&[region(&[(0.0, 0.0)])], &region(&[(-1.0, 5.0)])).unwrap_err();
        assert_eq!(err.code(), "InitialNotPreceding");
        let err = build_order(&[region(&[(0.0, 0.0), (1.0, 0.0)])], &region(&[(-10.0, 0.0)])).unwrap_err();
        assert_eq!(err.code(), "NotAchronal");
    }

    #[test]
    fn same_depth_points_split_by_cone_membership() {
        // X at depth 1 far left, U at depth 1 far right; T has one point in
        // X's cone and one in U's cone, both at depth 2.
        let x = region(&[(0.0, 0.0)]);
        let u = region(&[(0.0, 10.0)]);
        let t = region(&[(1.0, 0.5), (1.0, 9.5)]);
        let order = build_order(&[x, u, t], &region(&[(-20.0, 5.0)])).unwrap();
        assert_eq!(order.by_instrument[2].len(), 2);
        assert!(order.by_instrument[2].iter().all(|&p| order.portions[p].stage == 1));
    }

    #[test]
    fn boost_examples() {
        let p = e(0.3, -1.2);
        assert_eq!(boost(&p, &[0.0]).unwrap(), p);
        let o = boost(&e(0.0, 0.0), &[0.7]).unwrap();
        assert_eq!((o.t, o.x[0]), (0.0, 0.0));
        let (a, b) = (e(0.0, 0.0), e(2.0, 1.0));
        let before = interval(&a, &b);
        let after = interval(&boost(&a, &[0.6]).unwrap(), &boost(&b, &[0.6]).unwrap());
        assert!((before - after).abs() <= 1e-9 * before.abs());
        assert_eq!(boost(&a, &[1.0]).unwrap_err().code(), "SuperluminalFrame");
    }

    #[test]
    fn boosted_velocity_composes() {
        let r = region(&[(0.0, 0.0)]).with_velocity(vec![0.5]);
        let b = r.boosted(&[0.5]).unwrap();
        assert!(b.velocity[0].abs() < 1e-15);
        let b = r.boosted(&[-0.5]).unwrap();
        assert!((b.velocity[0] - 0.8).abs() < 1e-14);
    }
}
