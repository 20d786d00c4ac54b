//! Dense complex linear algebra: Hermitian spectral decomposition with
//! eigenvalue clustering, projector families, tensor embedding and traces.
//!
//! All operators are square `DMatrix<C64>` values on a tensor product of
//! finite factors. Factor 0 is the slowest-varying index in the flattened
//! basis, so `embed(Z, [0], [2, 2])` is `Z ⊗ I`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const EPS_HERM: f64 = 1e-9;
/// Absolute tolerance for projector identities and state normalization.
pub const EPS_NUM: f64 = 1e-10;
/// Default relative gap below which eigenvalues are merged into one cluster.
pub const EPS_EIG: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|M - M†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Accepts `m` as Hermitian if `max|M - M†| <= EPS_HERM * max(1, max|M|)`.
pub fn check_hermitian(m: &CMatrix, context: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{context}: {}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let deviation = hermiticity_deviation(m);
    if deviation > EPS_HERM * max_abs(m).max(1.0) {
        return Err(Error::NonHermitian {
            context: context.to_string(),
            deviation,
        });
    }
    Ok(())
}

/// `(M + M†) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of `AB - BA`.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm()
}

/// Trace of `A B` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Trace of the ordered product `F_0 F_1 ... F_{n-1}`.
pub fn trace_product(factors: &[&CMatrix]) -> Result<C64> {
    let Some(first) = factors.first() else {
        return Err(Error::DimensionMismatch("empty product".into()));
    };
    let n = first.nrows();
    for (i, f) in factors.iter().enumerate() {
        if f.nrows() != n || f.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "factor {i} is {}x{}, expected {n}x{n}",
                f.nrows(),
                f.ncols()
            )));
        }
    }
    if factors.len() == 1 {
        return Ok(first.trace());
    }
    let mut acc = (*first).clone();
    for f in &factors[1..factors.len() - 1] {
        acc = &acc * *f;
    }
    Ok(trace_of_product(&acc, factors[factors.len() - 1]))
}

/// Mixed-radix digits of `index`, factor 0 first.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Acts with `op` on the factors `targets` (in the given order) and with the
/// identity on every other factor of `dims`.
pub fn embed(op: &CMatrix, targets: &[usize], dims: &[usize]) -> Result<CMatrix> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= dims.len() {
            return Err(Error::IndexOutOfRange {
                index: t,
                limit: dims.len(),
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DimensionMismatch(format!(
                "factor {t} targeted twice"
            )));
        }
    }
    let local: usize = targets.iter().map(|&t| dims[t]).product();
    if op.nrows() != local || op.ncols() != local {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but targeted factors span {local}",
            op.nrows(),
            op.ncols()
        )));
    }
    let total: usize = dims.iter().product();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !targets.contains(k)).collect();

    // Split every global index into (local index, rest index).
    let mut split = Vec::with_capacity(total);
    let mut dig = vec![0; dims.len()];
    for g in 0..total {
        digits(g, dims, &mut dig);
        let l = targets.iter().fold(0, |acc, &t| acc * dims[t] + dig[t]);
        let r = rest.iter().fold(0, |acc, &t| acc * dims[t] + dig[t]);
        split.push((l, r));
    }
    let mut out = CMatrix::zeros(total, total);
    for (i, &(li, ri)) in split.iter().enumerate() {
        for (j, &(lj, rj)) in split.iter().enumerate() {
            if ri == rj {
                out[(i, j)] = op[(li, lj)];
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list of matrices, first factor slowest.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    ops.into_iter()
        .fold(CMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

/// A complete set of orthogonal projectors labelled by real outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    /// Outcome values, strictly ascending.
    pub labels: Vec<f64>,
    pub projectors: Vec<CMatrix>,
}

/// Eigenvalue clusters of a Hermitian matrix with their spectral projectors.
pub type SpectralDecomposition = ProjectorFamily;

/// Worst-case deviations from the projector-family identities, measured in
/// Frobenius norm.
#[derive(Debug, Clone, Copy, Default)]
pub struct FamilyDefects {
    pub orthogonality: f64,
    pub idempotence: f64,
    pub completeness: f64,
}

impl FamilyDefects {
    pub fn max(&self) -> f64 {
        self.orthogonality.max(self.idempotence).max(self.completeness)
    }
}

impl ProjectorFamily {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors.first().map_or(0, |p| p.nrows())
    }

    /// Index of the label within `tol` of `value`, if any.
    pub fn find_label(&self, value: f64, tol: f64) -> Option<usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l - value).abs()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    /// `Σ λ_i P_i`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        self.labels
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(n, n), |acc, (l, p)| acc + p.scale(*l))
    }

    pub fn defects(&self) -> FamilyDefects {
        let n = self.dim();
        let mut d = FamilyDefects::default();
        let mut sum = CMatrix::zeros(n, n);
        for (i, p) in self.projectors.iter().enumerate() {
            d.idempotence = d.idempotence.max((p * p - p).norm());
            for q in &self.projectors[i + 1..] {
                d.orthogonality = d.orthogonality.max((p * q).norm());
            }
            sum += p;
        }
        d.completeness = (sum - identity(n)).norm();
        d
    }

    /// Numerical rank of each projector.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect()
    }
}

/// Single-linkage clustering of weighted values: neighbours (after sorting)
/// closer than `eps` share a cluster. Representatives are weighted means.
pub(crate) fn cluster_weighted<T>(mut items: Vec<(f64, f64, T)>, eps: f64) -> Vec<(f64, Vec<T>)> {
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<(f64, f64, f64, Vec<T>)> = Vec::new(); // (last value, Σw·v, Σw, members)
    for (v, w, payload) in items {
        match clusters.last_mut() {
            Some(last) if v - last.0 <= eps => {
                last.0 = v;
                last.1 += w * v;
                last.2 += w;
                last.3.push(payload);
            }
            _ => clusters.push((v, w * v, w, vec![payload])),
        }
    }
    clusters
        .into_iter()
        .map(|(last, wsum_v, wsum, members)| {
            let rep = if wsum > 0.0 { wsum_v / wsum } else { last };
            (rep, members)
        })
        .collect()
}

/// Diagonalizes a Hermitian matrix and merges eigenvalues whose gap is at
/// most `eps_eig * max(1, ||M||)` into a single spectral projector.
pub fn spectral_decompose(m: &CMatrix, eps_eig: f64) -> Result<SpectralDecomposition> {
    check_hermitian(m, "spectral_decompose")?;
    let n = m.nrows();
    let h = hermitian_part(m);
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::EigenFailure(n))?;
    let norm = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let items = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, 1.0, k))
        .collect();
    let clusters = cluster_weighted(items, eps_eig * norm.max(1.0));
    let mut labels = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for (rep, members) in clusters {
        let mut p = CMatrix::zeros(n, n);
        for k in members {
            let v = eig.eigenvectors.column(k);
            p += v * v.adjoint();
        }
        labels.push(rep);
        projectors.push(p);
    }
    Ok(ProjectorFamily { labels, projectors })
}

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m, "density matrix").map_err(|e| Error::InvalidState(e.to_string()))?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > EPS_NUM || tr.im.abs() > EPS_NUM {
            return Err(Error::InvalidState(format!(
                "trace is {:.12} (expected 1)",
                tr.re
            )));
        }
        let eig = hermitian_part(&m)
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(Error::EigenFailure(m.nrows()))?;
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EPS_NUM {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min:.3e} is negative"
            )));
        }
        Ok(DensityMatrix(m))
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}
