//! Truncated lattice scalar field and the field version of the Sorkin
//! arrangement: two smeared field portions joined by `f = (b1 + b2)^2`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Event, Region};
use crate::linalg::{embed, identity, max_abs, CMatrix, DensityMatrix, C64};
use crate::observables::PortionObservable;
use crate::operators::{compressed_square, field_quadrature, momentum_quadrature};
use crate::outcome_fn::parse_f;
use crate::scenario::{Factor, Instrument, Scenario};

/// Largest lattice Hilbert space we are willing to diagonalize.
pub const MAX_LATTICE_DIM: usize = 4096;

/// Gap below which the two lowest levels count as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub per_site_dim: usize,
    pub mass: f64,
    pub coupling: f64,
    /// Spatial coordinate of each site on the slice `t = time`.
    pub positions: Vec<f64>,
    pub time: f64,
}

impl LatticeSpec {
    pub fn new(
        n_sites: usize,
        per_site_dim: usize,
        mass: f64,
        coupling: f64,
        positions: Vec<f64>,
        time: f64,
    ) -> Result<Self> {
        let spec = LatticeSpec {
            n_sites,
            per_site_dim,
            mass,
            coupling,
            positions,
            time,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.per_site_dim == 0 {
            return Err(Error::schema("lattice", "need at least one site and one level"));
        }
        let total = self.checked_dim();
        if total.is_none_or(|d| d > MAX_LATTICE_DIM) {
            return Err(Error::schema(
                "lattice",
                format!(
                    "{}^{} exceeds the lattice dimension cap {MAX_LATTICE_DIM}",
                    self.per_site_dim, self.n_sites
                ),
            ));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::schema("lattice.mass", "mass must be positive"));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::schema("lattice.coupling", "coupling must be nonnegative"));
        }
        if self.positions.len() != self.n_sites {
            return Err(Error::schema(
                "lattice.positions",
                format!("{} positions for {} sites", self.positions.len(), self.n_sites),
            ));
        }
        Ok(())
    }

    fn checked_dim(&self) -> Option<usize> {
        (0..self.n_sites).try_fold(1usize, |acc, _| acc.checked_mul(self.per_site_dim))
    }

    pub fn dim(&self) -> usize {
        self.per_site_dim.pow(self.n_sites as u32)
    }

    pub fn site_dims(&self) -> Vec<usize> {
        vec![self.per_site_dim; self.n_sites]
    }

    pub fn site_event(&self, site: usize) -> Event {
        Event::new(self.time, vec![self.positions[site]])
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            return Err(Error::IndexOutOfRange {
                index: site,
                limit: self.n_sites,
            });
        }
        Ok(())
    }
}

/// Truncated `φ̂` of one site, embedded into the lattice space.
pub fn site_field_operator(l: &LatticeSpec, site: usize) -> Result<CMatrix> {
    l.check_site(site)?;
    embed(&field_quadrature(l.per_site_dim), &[site], &l.site_dims())
}

/// `Σ g(x) φ̂_x` over `sites` on the lattice space.
pub fn smeared_operator(l: &LatticeSpec, sites: &[usize], weights: &[f64]) -> Result<CMatrix> {
    if sites.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} smearing weights for {} sites",
            weights.len(),
            sites.len()
        )));
    }
    let mut out = CMatrix::zeros(l.dim(), l.dim());
    for (k, (&s, &g)) in sites.iter().zip(weights).enumerate() {
        if sites[..k].contains(&s) {
            return Err(Error::OverlappingPortions(format!("site {s} listed twice")));
        }
        out += site_field_operator(l, s)?.scale(g);
    }
    Ok(out)
}

/// A portion observable `Σ g(x) φ̂_x`. `claimed` lists sites already owned
/// by other portions of the same instrument; `dims` are the scenario factor
/// dimensions with the lattice sites first.
pub fn smeared_portion_operator(
    l: &LatticeSpec,
    name: &str,
    sites: &[usize],
    weights: &[f64],
    claimed: &[usize],
    dims: &[usize],
) -> Result<PortionObservable> {
    if let Some(s) = sites.iter().find(|s| claimed.contains(s)) {
        return Err(Error::OverlappingPortions(format!("site {s} in portion '{name}'")));
    }
    let local = smeared_operator(l, sites, weights)?;
    PortionObservable::new(name, local, (0..l.n_sites).collect(), dims)
}

/// `H = ½Σπ² + ½κΣ(φ_{i+1} − φ_i)² + ½m²Σφ²` compressed onto the truncated
/// space. Squares of quadratures are the exact compressions, so enlarging
/// the truncation can only lower the ground energy.
pub fn lattice_hamiltonian(l: &LatticeSpec) -> Result<CMatrix> {
    l.validate()?;
    let d = l.per_site_dim;
    let dims = l.site_dims();
    let phi2 = compressed_square(field_quadrature, d);
    let pi2 = compressed_square(momentum_quadrature, d);
    let mut h = CMatrix::zeros(l.dim(), l.dim());
    for i in 0..l.n_sites {
        // each bond (i, j) contributes ½κ(φ_i² + φ_j²) - κφ_iφ_j
        let bonds = usize::from(i > 0) + usize::from(i + 1 < l.n_sites);
        let phi2_weight = 0.5 * l.mass * l.mass + 0.5 * l.coupling * bonds as f64;
        let local = pi2.scale(0.5) + phi2.scale(phi2_weight);
        h += embed(&local, &[i], &dims)?;
    }
    if l.coupling > 0.0 {
        let phi = field_quadrature(d);
        for i in 0..l.n_sites.saturating_sub(1) {
            h -= embed(&phi, &[i], &dims)? * embed(&phi, &[i + 1], &dims)?.scale(l.coupling);
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// Distance to the first excited level.
    pub gap: f64,
    pub degenerate: bool,
    pub vector: DVector<C64>,
}

/// Lowest eigenvector of the lattice Hamiltonian, with its largest
/// component made real and positive.
pub fn ground_state(l: &LatticeSpec) -> Result<GroundState> {
    let h = lattice_hamiltonian(l)?;
    let n = h.nrows();
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::EigenFailure(n))?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energy = eig.eigenvalues[idx[0]];
    let gap = idx.get(1).map_or(f64::INFINITY, |&k| eig.eigenvalues[k] - energy);
    let degenerate = gap <= DEGENERACY_GAP;
    if degenerate {
        log::warn!("GroundStateDegenerate: lowest lattice levels differ by {gap:.3e}; using the first");
    }
    let mut v: DVector<C64> = eig.eigenvectors.column(idx[0]).into_owned();
    let (kmax, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |(k, m), (j, z)| if z.norm() > m + 1e-12 { (j, z.norm()) } else { (k, m) });
    let phase = v[kmax] / v[kmax].norm();
    v *= phase.conj();
    Ok(GroundState {
        energy,
        gap,
        degenerate,
        vector: v,
    })
}

/// Where a single-region instrument of the field scenario acts.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Lattice sites, in the operator's factor order.
    Sites(Vec<usize>),
    /// Ancilla factors, indexed from 0 after the lattice.
    Ancillas(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalObservable {
    pub target: Target,
    pub operator: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Smearing {
    pub sites: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Smearing {
    /// Unit weight on each site.
    pub fn uniform(sites: Vec<usize>) -> Self {
        let weights = vec![1.0; sites.len()];
        Smearing { sites, weights }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSorkinSpec {
    pub lattice: LatticeSpec,
    pub ancillas: Vec<Factor>,
    pub b1: Smearing,
    pub b2: Smearing,
    pub a: LocalObservable,
    pub c: LocalObservable,
    pub a_region: Region,
    pub c_region: Region,
    pub initial_region: Region,
    pub frame: Option<Vec<f64>>,
    /// Unitary applied to ground ⊗ |0…0⟩ of the ancillas.
    pub preparation: Option<CMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldScenario {
    pub scenario: Scenario,
    pub ground: GroundState,
}

/// Lattice factors `site0, site1, ...` followed by the ancillas.
pub fn lattice_factors(l: &LatticeSpec, ancillas: &[Factor]) -> Vec<Factor> {
    (0..l.n_sites)
        .map(|i| Factor::new(format!("site{i}"), l.per_site_dim))
        .chain(ancillas.iter().cloned())
        .collect()
}

/// Ground state on the lattice tensored with `|0⟩` on each ancilla, then
/// conjugated by `preparation`.
pub fn ground_initial_state(
    l: &LatticeSpec,
    ancillas: &[Factor],
    preparation: Option<&CMatrix>,
) -> Result<(DensityMatrix, GroundState)> {
    let ground = ground_state(l)?;
    let anc_dim: usize = ancillas.iter().map(|f| f.dim).product();
    let mut psi = DVector::zeros(ground.vector.len() * anc_dim);
    for (k, &a) in ground.vector.iter().enumerate() {
        psi[k * anc_dim] = a;
    }
    if let Some(u) = preparation {
        if u.nrows() != psi.len() || u.ncols() != psi.len() {
            return Err(Error::DimensionMismatch(format!(
                "preparation is {}x{}, state space is {}",
                u.nrows(),
                u.ncols(),
                psi.len()
            )));
        }
        let defect = max_abs(&(u.adjoint() * u - identity(psi.len())));
        if defect > 1e-9 {
            return Err(Error::InvalidState(format!("preparation is not unitary (defect {defect:.3e})")));
        }
        psi = u * psi;
    }
    let rho = DensityMatrix::new(&psi * psi.adjoint())?;
    Ok((rho, ground))
}

pub fn build_field_sorkin_scenario(spec: &FieldSorkinSpec) -> Result<FieldScenario> {
    let l = &spec.lattice;
    l.validate()?;
    let factors = lattice_factors(l, &spec.ancillas);
    let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();

    let b1 = smeared_portion_operator(l, "B1", &spec.b1.sites, &spec.b1.weights, &[], &dims)?;
    let b2 = smeared_portion_operator(l, "B2", &spec.b2.sites, &spec.b2.weights, &spec.b1.sites, &dims)?;
    let points: Vec<Event> = spec.b1.sites.iter().chain(&spec.b2.sites).map(|&s| l.site_event(s)).collect();
    let n1 = spec.b1.sites.len();
    let assignment = vec![(0..n1).collect(), (n1..points.len()).collect()];
    let b = Instrument::new(
        "B",
        Region::new(points),
        vec![b1, b2],
        assignment,
        parse_f("(b1+b2)^2", 2)?,
    )?;

    let local = |name: &str, obs: &LocalObservable| -> Result<PortionObservable> {
        let targets = match &obs.target {
            Target::Sites(s) => {
                for &x in s {
                    l.check_site(x)?;
                }
                s.clone()
            }
            Target::Ancillas(a) => a
                .iter()
                .map(|&k| {
                    if k >= spec.ancillas.len() {
                        Err(Error::IndexOutOfRange {
                            index: k,
                            limit: spec.ancillas.len(),
                        })
                    } else {
                        Ok(l.n_sites + k)
                    }
                })
                .collect::<Result<_>>()?,
        };
        PortionObservable::new(name, obs.operator.clone(), targets, &dims)
    };
    let a = Instrument::simple("A", spec.a_region.clone(), local("A", &spec.a)?)?;
    let cc = Instrument::simple("C", spec.c_region.clone(), local("C", &spec.c)?)?;

    let (rho, ground) = ground_initial_state(l, &spec.ancillas, spec.preparation.as_ref())?;
    let scenario = Scenario::new(
        factors,
        rho,
        spec.initial_region.clone(),
        vec![a, b, cc],
        spec.frame.clone(),
        Some(l.clone()),
    )?;
    Ok(FieldScenario { scenario, ground })
}

/// The bundled field arrangement: two sites with three levels each. Site 0
/// (the `B1` portion) sits at `x = 3`, outside the cone of `A`; site 1 (the
/// `B2` portion) sits at `x = 0.5`, inside it. `A` reads the momentum of
/// site 1 and `C` the momentum of site 0.
pub fn demo_field_spec() -> FieldSorkinSpec {
    let lattice = LatticeSpec {
        n_sites: 2,
        per_site_dim: 3,
        mass: 1.0,
        coupling: 0.5,
        positions: vec![3.0, 0.5],
        time: 1.0,
    };
    let p = momentum_quadrature(3);
    FieldSorkinSpec {
        lattice,
        ancillas: Vec::new(),
        b1: Smearing::uniform(vec![0]),
        b2: Smearing::uniform(vec![1]),
        a: LocalObservable {
            target: Target::Sites(vec![1]),
            operator: p.clone(),
        },
        c: LocalObservable {
            target: Target::Sites(vec![0]),
            operator: p,
        },
        a_region: Region::new(vec![Event::new(0.0, vec![0.0])]),
        c_region: Region::new(vec![Event::new(2.0, vec![3.5])]),
        initial_region: Region::new(vec![Event::new(-10.0, vec![0.0])]),
        frame: Some(vec![0.0]),
        preparation: None,
    }
}
