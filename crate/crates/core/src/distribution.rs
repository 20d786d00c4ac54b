//! Joint probability distributions over instrument outcomes.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;

use crate::error::{Error, Result};

/// Outcome tuple, one value per axis.
pub type Outcome = Vec<OrderedFloat<f64>>;

/// Mass below which conditioning is refused.
pub const CONDITION_FLOOR: f64 = 1e-12;

/// Tolerance used when matching outcome values across distributions.
const KEY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutcomeDistribution {
    pub axes: Vec<String>,
    pub support: BTreeMap<Outcome, f64>,
}

fn key(values: &[f64]) -> Outcome {
    values.iter().map(|&v| OrderedFloat(if v == 0.0 { 0.0 } else { v })).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= KEY_TOL * a.abs().max(b.abs()).max(1.0)
}

fn keys_close(a: &Outcome, b: &Outcome) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(x.0, y.0))
}

impl OutcomeDistribution {
    pub fn new(axes: Vec<String>) -> Self {
        OutcomeDistribution {
            axes,
            support: BTreeMap::new(),
        }
    }

    /// Adds `p` to the entry for `values`, creating it if needed.
    pub fn add(&mut self, values: &[f64], p: f64) {
        debug_assert_eq!(values.len(), self.axes.len());
        *self.support.entry(key(values)).or_insert(0.0) += p;
    }

    pub fn probability(&self, values: &[f64]) -> f64 {
        let k = key(values);
        if let Some(p) = self.support.get(&k) {
            return *p;
        }
        self.support
            .iter()
            .filter(|(o, _)| keys_close(o, &k))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.support.values().sum()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.support
            .iter()
            .map(|(k, &p)| (k.iter().map(|v| v.0).collect(), p))
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    /// Sums out the named axes.
    pub fn marginalize(&self, sum_out: &[&str]) -> Result<OutcomeDistribution> {
        let drop = sum_out
            .iter()
            .map(|n| self.axis_index(n))
            .collect::<Result<Vec<_>>>()?;
        let keep: Vec<usize> = (0..self.axes.len()).filter(|i| !drop.contains(i)).collect();
        self.project(&keep)
    }

    /// Keeps only the named axes, in the given order.
    pub fn marginal_onto(&self, axes: &[&str]) -> Result<OutcomeDistribution> {
        let keep = axes
            .iter()
            .map(|n| self.axis_index(n))
            .collect::<Result<Vec<_>>>()?;
        self.project(&keep)
    }

    fn project(&self, keep: &[usize]) -> Result<OutcomeDistribution> {
        let mut out = OutcomeDistribution::new(keep.iter().map(|&i| self.axes[i].clone()).collect());
        for (k, &p) in &self.support {
            let sub: Outcome = keep.iter().map(|&i| k[i]).collect();
            *out.support.entry(sub).or_insert(0.0) += p;
        }
        Ok(out)
    }

    /// Distribution of the other axes given `axis = value`.
    pub fn condition(&self, axis: &str, value: f64) -> Result<OutcomeDistribution> {
        let a = self.axis_index(axis)?;
        let keep: Vec<usize> = (0..self.axes.len()).filter(|&i| i != a).collect();
        let mut out = OutcomeDistribution::new(keep.iter().map(|&i| self.axes[i].clone()).collect());
        let mut mass = 0.0;
        for (k, &p) in &self.support {
            if close(k[a].0, value) {
                mass += p;
                let sub: Outcome = keep.iter().map(|&i| k[i]).collect();
                *out.support.entry(sub).or_insert(0.0) += p;
            }
        }
        if mass < CONDITION_FLOOR {
            return Err(Error::ConditionOnNull(mass));
        }
        for p in out.support.values_mut() {
            *p /= mass;
        }
        Ok(out)
    }

    /// Pairs of probabilities over the union of both supports, matching
    /// outcome values up to a small tolerance.
    fn aligned(&self, other: &OutcomeDistribution) -> Result<Vec<(f64, f64)>> {
        if self.axes != other.axes {
            return Err(Error::DimensionMismatch(format!(
                "distributions over {:?} and {:?}",
                self.axes, other.axes
            )));
        }
        let mut used = vec![false; other.support.len()];
        let others: Vec<(&Outcome, f64)> = other.support.iter().map(|(k, &p)| (k, p)).collect();
        let mut pairs = Vec::new();
        for (k, &p) in &self.support {
            let mut q = 0.0;
            for (j, (k2, p2)) in others.iter().enumerate() {
                if !used[j] && keys_close(k, k2) {
                    used[j] = true;
                    q += p2;
                }
            }
            pairs.push((p, q));
        }
        for (j, (_, p2)) in others.iter().enumerate() {
            if !used[j] {
                pairs.push((0.0, *p2));
            }
        }
        Ok(pairs)
    }

    /// Total variation distance.
    pub fn tv_distance(&self, other: &OutcomeDistribution) -> Result<f64> {
        Ok(0.5 * self.aligned(other)?.iter().map(|(p, q)| (p - q).abs()).sum::<f64>())
    }

    /// Largest absolute difference of any single probability.
    pub fn max_deviation(&self, other: &OutcomeDistribution) -> Result<f64> {
        Ok(self
            .aligned(other)?
            .iter()
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max))
    }

    /// Signed differences `self - other` per outcome of the union.
    pub fn deltas(&self, other: &OutcomeDistribution) -> Result<Vec<(Vec<f64>, f64)>> {
        let mut keys: Vec<Outcome> = self.support.keys().cloned().collect();
        for k in other.support.keys() {
            if !keys.iter().any(|k2| keys_close(k, k2)) {
                keys.push(k.clone());
            }
        }
        keys.sort();
        Ok(keys
            .into_iter()
            .map(|k| {
                let v: Vec<f64> = k.iter().map(|x| x.0).collect();
                let d = self.probability(&v) - other.probability(&v);
                (v, d)
            })
            .collect())
    }
}
