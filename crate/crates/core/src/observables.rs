//! Instrument observables built from commuting portion observables joined by
//! an outcome function, and the collisions of that function.

use crate::error::{Error, Result};
use crate::linalg::{
    check_hermitian, cluster_weighted, commutator_norm, embed, spectral_decompose, CMatrix,
    ProjectorFamily, SpectralDecomposition, EPS_EIG, EPS_NUM,
};
use crate::outcome_fn::OutcomeFunction;

/// Relative commutator tolerance: `||[A,B]|| <= EPS_COMM * ||A|| * ||B||`.
pub const EPS_COMM: f64 = 1e-9;

/// Rank below which a product of spectral projectors is treated as empty.
const EMPTY_RANK: f64 = 0.5;

/// An observable attached to one portion of an instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct PortionObservable {
    pub name: String,
    /// Factors the local operator acts on, in the local operator's order.
    pub factors: Vec<usize>,
    pub local: CMatrix,
    /// `local` embedded into the full tensor space.
    pub operator: CMatrix,
    pub spectral: SpectralDecomposition,
}

impl PortionObservable {
    pub fn new(name: impl Into<String>, local: CMatrix, factors: Vec<usize>, dims: &[usize]) -> Result<Self> {
        let name = name.into();
        check_hermitian(&local, &format!("observable of portion '{name}'"))?;
        let operator = embed(&local, &factors, dims)?;
        let spectral = spectral_decompose(&operator, EPS_EIG)?;
        Ok(PortionObservable {
            name,
            factors,
            local,
            operator,
            spectral,
        })
    }
}

/// Commutes within the relative tolerance, or reports the pair.
pub fn check_commute(a: &CMatrix, b: &CMatrix, a_name: &str, b_name: &str) -> Result<()> {
    let norm = commutator_norm(a, b);
    if norm > EPS_COMM * a.norm() * b.norm() {
        return Err(Error::NonCommuting {
            first: a_name.to_string(),
            second: b_name.to_string(),
            norm,
        });
    }
    Ok(())
}

fn check_pairwise_commuting(portions: &[PortionObservable]) -> Result<()> {
    for (i, a) in portions.iter().enumerate() {
        for b in &portions[i + 1..] {
            check_commute(&a.operator, &b.operator, &a.name, &b.name)?;
        }
    }
    Ok(())
}

/// Iterates every joint tuple of cluster indices, first portion slowest.
fn for_each_tuple(sizes: &[usize], mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if sizes.contains(&0) {
        return Ok(());
    }
    let mut idx = vec![0; sizes.len()];
    loop {
        visit(&idx)?;
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn values_of(portions: &[PortionObservable], idx: &[usize]) -> Vec<f64> {
    portions
        .iter()
        .zip(idx)
        .map(|(p, &i)| p.spectral.labels[i])
        .collect()
}

/// Default clustering tolerance for outcome values: `1e-8` of their spread,
/// but never below `EPS_NUM` so values that differ only by rounding merge.
pub fn default_outcome_eps(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi, scale) = values.into_iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64),
        |(lo, hi, s), v| (lo.min(v), hi.max(v), s.max(v.abs())),
    );
    if lo > hi {
        return 0.0;
    }
    (1e-8 * (hi - lo)).max(1e-12 * scale).max(EPS_NUM)
}

/// Composite projector family `P_b = Σ_{f(b1..bk) = b} P_{bk} ... P_{b1}`.
///
/// `eps_f` clusters outcome values; pass `None` for the default.
pub fn compose_projectors(
    portions: &[PortionObservable],
    f: &OutcomeFunction,
    eps_f: Option<f64>,
) -> Result<ProjectorFamily> {
    if portions.len() != f.arity {
        return Err(Error::InvalidOutcomeFunction(format!(
            "'{f}' takes {} arguments but the instrument has {} portions",
            f.arity,
            portions.len()
        )));
    }
    check_pairwise_commuting(portions)?;
    let dim = portions[0].operator.nrows();
    let sizes: Vec<usize> = portions.iter().map(|p| p.spectral.len()).collect();

    let mut items = Vec::new();
    for_each_tuple(&sizes, |idx| {
        let mut q = portions[0].spectral.projectors[idx[0]].clone();
        for (p, &i) in portions.iter().zip(idx).skip(1) {
            q = &p.spectral.projectors[i] * q;
        }
        let rank = q.trace().re;
        if rank < EMPTY_RANK {
            return Ok(());
        }
        let b = f.evaluate(&values_of(portions, idx))?;
        items.push((b, rank, q));
        Ok(())
    })?;

    let eps = eps_f.unwrap_or_else(|| default_outcome_eps(items.iter().map(|i| i.0)));
    let mut labels = Vec::new();
    let mut projectors = Vec::new();
    for (label, members) in cluster_weighted(items, eps) {
        labels.push(label);
        projectors.push(members.into_iter().fold(CMatrix::zeros(dim, dim), |acc, q| acc + q));
    }
    Ok(ProjectorFamily { labels, projectors })
}

/// An instrument's observable `O = f(O¹, ..., Oᵏ)` with its projector family.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeObservable {
    pub portions: Vec<PortionObservable>,
    pub f: OutcomeFunction,
    pub family: ProjectorFamily,
    pub eps_f: f64,
}

impl CompositeObservable {
    pub fn new(portions: Vec<PortionObservable>, f: OutcomeFunction) -> Result<Self> {
        let family = compose_projectors(&portions, &f, None)?;
        let eps_f = default_outcome_eps(family.labels.iter().copied());
        Ok(CompositeObservable {
            portions,
            f,
            family,
            eps_f,
        })
    }

    /// Label index for the outcome of a portion tuple, if that outcome is one
    /// of the composite labels.
    pub fn label_for(&self, portion_values: &[f64]) -> Result<(f64, Option<usize>)> {
        let b = self.f.evaluate(portion_values)?;
        let tol = self.eps_f.max(1e-12 * b.abs().max(1.0));
        Ok((b, self.family.find_label(b, tol)))
    }

    pub fn collisions(&self) -> Result<Vec<Collision>> {
        collision_structure(&self.portions, &self.f, Some(self.eps_f))
    }
}

/// Two first-portion outcomes `first != first_alt` that give the same
/// instrument outcome for the same values of the remaining portions.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub first: f64,
    pub first_alt: f64,
    pub rest: Vec<f64>,
}

/// Enumerates every collision of `f` in its first argument over the joint
/// spectrum of the portions.
pub fn collision_structure(
    portions: &[PortionObservable],
    f: &OutcomeFunction,
    eps_f: Option<f64>,
) -> Result<Vec<Collision>> {
    if portions.len() != f.arity {
        return Err(Error::InvalidOutcomeFunction(format!(
            "'{f}' takes {} arguments but {} portions were given",
            f.arity,
            portions.len()
        )));
    }
    check_pairwise_commuting(portions)?;
    let sizes: Vec<usize> = portions.iter().map(|p| p.spectral.len()).collect();
    let mut outcomes = Vec::new();
    for_each_tuple(&sizes, |idx| {
        outcomes.push((idx.to_vec(), f.evaluate(&values_of(portions, idx))?));
        Ok(())
    })?;
    let eps = eps_f.unwrap_or_else(|| default_outcome_eps(outcomes.iter().map(|o| o.1)));
    let mut found = Vec::new();
    for (idx, b) in &outcomes {
        for (idx2, b2) in &outcomes {
            if idx[0] != idx2[0] && idx[1..] == idx2[1..] && (b - b2).abs() <= eps {
                let vals = values_of(portions, idx);
                found.push(Collision {
                    first: vals[0],
                    first_alt: portions[0].spectral.labels[idx2[0]],
                    rest: vals[1..].to_vec(),
                });
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::operators::{pauli_z, spin_z};
    use crate::outcome_fn::parse_f;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v, 0.0)),
        ))
    }

    fn two_qubits() -> Vec<PortionObservable> {
        vec![
            PortionObservable::new("B1", pauli_z(), vec![0], &[2, 2]).unwrap(),
            PortionObservable::new("B2", pauli_z(), vec![1], &[2, 2]).unwrap(),
        ]
    }

    fn qubit_qutrit() -> Vec<PortionObservable> {
        vec![
            PortionObservable::new("B1", pauli_z(), vec![0], &[2, 3]).unwrap(),
            PortionObservable::new("B2", spin_z(3), vec![1], &[2, 3]).unwrap(),
        ]
    }

    #[test]
    fn linear_sum_of_two_z() {
        let fam = compose_projectors(&two_qubits(), &parse_f("b1+b2", 2).unwrap(), None).unwrap();
        assert_eq!(fam.labels, vec![-2.0, 0.0, 2.0]);
        assert_eq!(fam.projectors[1], diag(&[0.0, 1.0, 1.0, 0.0]));
        assert!(fam.defects().max() < 1e-12);
    }

    #[test]
    fn square_of_sum_with_qutrit() {
        let portions = qubit_qutrit();
        let f = parse_f("(b1+b2)^2", 2).unwrap();
        let fam = compose_projectors(&portions, &f, None).unwrap();
        assert_eq!(fam.labels, vec![0.0, 1.0, 4.0]);
        // Brute force over the six joint basis states |b1⟩|b2⟩.
        let b1 = [1.0, -1.0];
        let b2 = [1.0, 0.0, -1.0];
        let mut expected_rank = [0usize; 3];
        for x in b1 {
            for y in b2 {
                let v: f64 = (x + y) * (x + y);
                expected_rank[fam.labels.iter().position(|&l| l == v).unwrap()] += 1;
            }
        }
        assert_eq!(fam.ranks(), expected_rank.to_vec());
        assert_eq!(fam.ranks()[1], 2);
        // label 1 collects (+1, 0) and (-1, 0): I ⊗ |0⟩⟨0| in the spin basis
        assert_eq!(fam.projectors[1], diag(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn single_portion_identity_is_own_spectrum() {
        let p = PortionObservable::new("A", spin_z(3), vec![0], &[3]).unwrap();
        let fam = compose_projectors(std::slice::from_ref(&p), &OutcomeFunction::identity(), None).unwrap();
        assert_eq!(fam, p.spectral);
    }

    #[test]
    fn non_commuting_portions_are_rejected() {
        let dims = [2];
        let a = PortionObservable::new("X", crate::operators::pauli_x(), vec![0], &dims).unwrap();
        let b = PortionObservable::new("Z", pauli_z(), vec![0], &dims).unwrap();
        let err = compose_projectors(&[a, b], &parse_f("b1+b2", 2).unwrap(), None).unwrap_err();
        assert_eq!(err.code(), "NonCommuting");
    }

    #[test]
    fn collisions_of_linear_function_are_empty() {
        let f = parse_f("b1+b2", 2).unwrap();
        assert!(collision_structure(&two_qubits(), &f, None).unwrap().is_empty());
        assert!(collision_structure(&qubit_qutrit(), &f, None).unwrap().is_empty());
    }

    #[test]
    fn collisions_of_square_sit_at_zero() {
        let f = parse_f("(b1+b2)^2", 2).unwrap();
        let found = collision_structure(&qubit_qutrit(), &f, None).unwrap();
        assert_eq!(
            found,
            vec![
                Collision { first: -1.0, first_alt: 1.0, rest: vec![0.0] },
                Collision { first: 1.0, first_alt: -1.0, rest: vec![0.0] },
            ]
        );
    }

    #[test]
    fn collisions_of_square_on_binary_spectra_are_empty() {
        // b1, b2 ∈ {0, 1}: enumerate the 8 candidate (b1, b1', b2) triples.
        let dims = [2, 2];
        let proj = diag(&[0.0, 1.0]);
        let portions = vec![
            PortionObservable::new("B1", proj.clone(), vec![0], &dims).unwrap(),
            PortionObservable::new("B2", proj, vec![1], &dims).unwrap(),
        ];
        let f = parse_f("(b1+b2)^2", 2).unwrap();
        let mut brute = 0;
        for b1 in [0.0, 1.0] {
            for b1p in [0.0, 1.0] {
                for b2 in [0.0, 1.0] {
                    if b1 != b1p && (f.evaluate(&[b1, b2]).unwrap() - f.evaluate(&[b1p, b2]).unwrap()).abs() < 1e-12 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 0);
        assert!(collision_structure(&portions, &f, None).unwrap().is_empty());
    }
}
