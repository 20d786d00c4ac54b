//! The complete input of a simulation: tensor factors, initial state,
//! instruments with their regions and observables, and an optional frame.

use crate::error::{Error, Result};
use crate::field::LatticeSpec;
use crate::geometry::{build_order_named, causally_related, CausalOrder, Event, Region};
use crate::linalg::DensityMatrix;
use crate::observables::{check_commute, CompositeObservable, PortionObservable};
use crate::outcome_fn::OutcomeFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub name: String,
    pub dim: usize,
}

impl Factor {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Factor {
            name: name.into(),
            dim,
        }
    }
}

/// A measuring device: region, decomposed observable, and the region points
/// each observable portion occupies.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub name: String,
    pub region: Region,
    pub observable: CompositeObservable,
    /// Indices into `region.points`, one list per observable portion.
    pub portion_points: Vec<Vec<usize>>,
}

impl Instrument {
    pub fn new(
        name: impl Into<String>,
        region: Region,
        portions: Vec<PortionObservable>,
        portion_points: Vec<Vec<usize>>,
        f: OutcomeFunction,
    ) -> Result<Self> {
        let name = name.into();
        if portions.is_empty() {
            return Err(Error::schema(format!("instrument '{name}'"), "no portions"));
        }
        if portion_points.len() != portions.len() {
            return Err(Error::schema(
                format!("instrument '{name}'"),
                "every portion needs a point assignment",
            ));
        }
        let n = region.points.len();
        let mut owner = vec![None; n];
        for (k, pts) in portion_points.iter().enumerate() {
            if pts.is_empty() {
                return Err(Error::schema(
                    format!("instrument '{name}'.portions[{k}].points"),
                    "portion occupies no points",
                ));
            }
            for &p in pts {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, limit: n });
                }
                if owner[p].replace(k).is_some() {
                    return Err(Error::OverlappingPortions(format!("point {p} of instrument '{name}'")));
                }
            }
        }
        if let Some(p) = owner.iter().position(Option::is_none) {
            return Err(Error::schema(
                format!("instrument '{name}'.region.points[{p}]"),
                "point is not assigned to any portion",
            ));
        }
        let observable = CompositeObservable::new(portions, f)?;
        Ok(Instrument {
            name,
            region,
            observable,
            portion_points,
        })
    }

    /// Single-portion instrument occupying its whole region.
    pub fn simple(name: impl Into<String>, region: Region, portion: PortionObservable) -> Result<Self> {
        let all = (0..region.points.len()).collect();
        Self::new(name, region, vec![portion], vec![all], OutcomeFunction::identity())
    }
}

/// Validated scenario. Construction checks dimensions, the state, causal
/// preconditions, portion alignment with the causal split, and commutation of
/// every pair of spacelike portions.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub factors: Vec<Factor>,
    pub rho0: DensityMatrix,
    pub initial_region: Region,
    pub instruments: Vec<Instrument>,
    /// Velocity of the Lorentz frame used by the Bloch rule.
    pub frame: Option<Vec<f64>>,
    pub lattice: Option<LatticeSpec>,
    order: CausalOrder,
    /// Causal portion of each observable portion, per instrument.
    causal_portion: Vec<Vec<usize>>,
}

impl Scenario {
    pub fn new(
        factors: Vec<Factor>,
        rho0: DensityMatrix,
        initial_region: Region,
        instruments: Vec<Instrument>,
        frame: Option<Vec<f64>>,
        lattice: Option<LatticeSpec>,
    ) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.dim == 0) {
            return Err(Error::schema("factors", "need at least one factor of positive dimension"));
        }
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::schema("factors", format!("duplicate factor name '{}'", f.name)));
            }
        }
        for (i, inst) in instruments.iter().enumerate() {
            if instruments[..i].iter().any(|j| j.name == inst.name) {
                return Err(Error::schema("instruments", format!("duplicate instrument name '{}'", inst.name)));
            }
        }
        if instruments.is_empty() {
            return Err(Error::schema("instruments", "need at least one instrument"));
        }
        let total: usize = factors.iter().map(|f| f.dim).product();
        if rho0.dim() != total {
            return Err(Error::DimensionMismatch(format!(
                "initial state has dimension {} but the factors span {total}",
                rho0.dim()
            )));
        }
        for inst in &instruments {
            for p in &inst.observable.portions {
                if p.operator.nrows() != total {
                    return Err(Error::DimensionMismatch(format!(
                        "portion '{}' of '{}' acts on dimension {}",
                        p.name,
                        inst.name,
                        p.operator.nrows()
                    )));
                }
            }
        }

        let d = initial_region
            .points
            .first()
            .map(Event::spatial_dim)
            .ok_or_else(|| Error::schema("initial_region", "region has no points"))?;
        if initial_region.points.iter().any(|p| p.spatial_dim() != d) {
            return Err(Error::DimensionMismatch("initial region mixes spatial dimensions".into()));
        }
        if let Some(v) = &frame {
            if v.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "frame velocity has {} components, events have {d}",
                    v.len()
                )));
            }
            let speed = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if speed >= 1.0 {
                return Err(Error::SuperluminalFrame(speed));
            }
        }

        let regions: Vec<Region> = instruments.iter().map(|i| i.region.clone()).collect();
        let names: Vec<String> = instruments.iter().map(|i| i.name.clone()).collect();
        let order = build_order_named(&regions, &initial_region, &names)?;

        let mut causal_portion = Vec::with_capacity(instruments.len());
        for (i, inst) in instruments.iter().enumerate() {
            let mut map = Vec::with_capacity(inst.portion_points.len());
            for (k, pts) in inst.portion_points.iter().enumerate() {
                let owners: Vec<usize> = pts.iter().map(|&p| order.portion_of(i, p).unwrap()).collect();
                if owners.iter().any(|&o| o != owners[0]) {
                    return Err(Error::PortionStraddlesStages(format!(
                        "{}.{}",
                        inst.name, inst.observable.portions[k].name
                    )));
                }
                map.push(owners[0]);
            }
            causal_portion.push(map);
        }

        // Microcausality: observable portions of different instruments with
        // no causal relation between their points must commute.
        for (i, a) in instruments.iter().enumerate() {
            for b in &instruments[i + 1..] {
                for (ka, pa) in a.observable.portions.iter().enumerate() {
                    for (kb, pb) in b.observable.portions.iter().enumerate() {
                        let related = a.portion_points[ka].iter().any(|&x| {
                            b.portion_points[kb]
                                .iter()
                                .any(|&y| causally_related(&a.region.points[x], &b.region.points[y]))
                        });
                        if !related {
                            check_commute(
                                &pa.operator,
                                &pb.operator,
                                &format!("{}.{}", a.name, pa.name),
                                &format!("{}.{}", b.name, pb.name),
                            )?;
                        }
                    }
                }
            }
        }

        Ok(Scenario {
            factors,
            rho0,
            initial_region,
            instruments,
            frame,
            lattice,
            order,
            causal_portion,
        })
    }

    pub fn order(&self) -> &CausalOrder {
        &self.order
    }

    /// Causal portion index of observable portion `k` of instrument `i`.
    pub fn causal_portion(&self, i: usize, k: usize) -> usize {
        self.causal_portion[i][k]
    }

    /// Zero-based stage of observable portion `k` of instrument `i`.
    pub fn stage_of(&self, i: usize, k: usize) -> usize {
        self.order.portions[self.causal_portion[i][k]].stage
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.rho0.dim()
    }

    pub fn instrument_index(&self, name: &str) -> Result<usize> {
        self.instruments
            .iter()
            .position(|i| i.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn instrument_names(&self) -> Vec<String> {
        self.instruments.iter().map(|i| i.name.clone()).collect()
    }

    /// Display name of a causal portion: the instrument name when unsplit,
    /// otherwise the names of the observable portions it holds.
    pub fn portion_label(&self, causal: usize) -> String {
        let i = self.order.portions[causal].instrument;
        let inst = &self.instruments[i];
        if !self.order.is_split(i) {
            return inst.name.clone();
        }
        inst.observable
            .portions
            .iter()
            .enumerate()
            .filter(|(k, _)| self.causal_portion[i][*k] == causal)
            .map(|(_, p)| p.name.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// The same scenario with every event (and region velocity) expressed in
    /// coordinates boosted by `v`. The Bloch frame velocity is unchanged, so
    /// the Bloch rule sees the new coordinate times.
    pub fn boosted(&self, v: &[f64]) -> Result<Scenario> {
        let instruments = self
            .instruments
            .iter()
            .map(|inst| {
                Ok(Instrument {
                    region: inst.region.boosted(v)?,
                    ..inst.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(
            self.factors.clone(),
            self.rho0.clone(),
            self.initial_region.boosted(v)?,
            instruments,
            self.frame.clone(),
            self.lattice.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Event;
    use crate::linalg::CMatrix;
    use crate::operators::{pauli_x, pauli_z};

    fn region(t: f64, x: f64) -> Region {
        Region::new(vec![Event::new(t, vec![x])])
    }

    fn qubit_instrument(name: &str, r: Region, op: CMatrix, factor: usize) -> Instrument {
        Instrument::simple(name, r, PortionObservable::new(name, op, vec![factor], &[2, 2]).unwrap()).unwrap()
    }

    fn build(instruments: Vec<Instrument>, frame: Option<Vec<f64>>) -> Result<Scenario> {
        Scenario::new(
            vec![Factor::new("a", 2), Factor::new("b", 2)],
            DensityMatrix::maximally_mixed(4),
            region(-10.0, 0.0),
            instruments,
            frame,
            None,
        )
    }

    #[test]
    fn spacelike_instruments_must_commute() {
        let p = qubit_instrument("P", region(0.0, 0.0), pauli_x(), 0);
        let q = qubit_instrument("Q", region(0.0, 3.0), pauli_z(), 0);
        assert!(matches!(build(vec![p.clone(), q], None), Err(Error::NonCommuting { .. })));
        // the same pair is fine when Q is in P's future
        let q = qubit_instrument("Q", region(4.0, 3.0), pauli_z(), 0);
        assert!(build(vec![p, q], None).is_ok());
    }

    #[test]
    fn names_and_frames_are_checked() {
        let p = qubit_instrument("P", region(0.0, 0.0), pauli_x(), 0);
        let q = qubit_instrument("P", region(0.0, 3.0), pauli_z(), 1);
        assert!(matches!(build(vec![p.clone(), q], None), Err(Error::SchemaError { .. })));
        assert!(matches!(build(vec![p.clone()], Some(vec![1.0])), Err(Error::SuperluminalFrame(_))));
        assert!(matches!(build(vec![p], Some(vec![0.1, 0.2])), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn portion_points_must_partition_the_region() {
        let r = Region::new(vec![Event::new(0.0, vec![0.0]), Event::new(0.0, vec![3.0])]);
        let ops = || {
            vec![
                PortionObservable::new("X", pauli_x(), vec![0], &[2, 2]).unwrap(),
                PortionObservable::new("Z", pauli_z(), vec![1], &[2, 2]).unwrap(),
            ]
        };
        let f = || crate::outcome_fn::parse_f("b1+b2", 2).unwrap();
        assert!(Instrument::new("I", r.clone(), ops(), vec![vec![0], vec![1]], f()).is_ok());
        assert!(matches!(
            Instrument::new("I", r.clone(), ops(), vec![vec![0, 1], vec![1]], f()),
            Err(Error::OverlappingPortions(_))
        ));
        assert!(matches!(
            Instrument::new("I", r.clone(), ops(), vec![vec![0], vec![2]], f()),
            Err(Error::IndexOutOfRange { .. }) | Err(Error::SchemaError { .. })
        ));
        assert!(Instrument::new("I", r, ops(), vec![vec![0], vec![]], f()).is_err());
    }

    #[test]
    fn lookups() {
        let p = qubit_instrument("P", region(0.0, 0.0), pauli_x(), 0);
        let q = qubit_instrument("Q", region(0.0, 3.0), pauli_z(), 1);
        let s = build(vec![p, q], Some(vec![0.0])).unwrap();
        assert_eq!(s.instrument_index("Q").unwrap(), 1);
        assert!(matches!(s.instrument_index("R"), Err(Error::UnknownAxis(_))));
        assert_eq!(s.total_dim(), 4);
        assert_eq!(s.stage_of(0, 0), 0);
        let b = s.boosted(&[0.5]).unwrap();
        assert_eq!(b.frame, s.frame);
        assert!(b.instruments[1].region.points[0].t < 0.0);
    }
}
