//! Named single-factor operators.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Truncated annihilation operator on `d` Fock levels.
pub fn annihilation(d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// Position quadrature `(a + a†)/√2` on `d` levels.
pub fn field_quadrature(d: usize) -> CMatrix {
    let a = annihilation(d);
    (&a + a.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Momentum quadrature `i(a† - a)/√2` on `d` levels.
pub fn momentum_quadrature(d: usize) -> CMatrix {
    let a = annihilation(d);
    (a.adjoint() - &a) * c(0.0, std::f64::consts::FRAC_1_SQRT_2)
}

/// `a†a` on `d` levels.
pub fn number(d: usize) -> CMatrix {
    let a = annihilation(d);
    a.adjoint() * a
}

/// Compression of `q²` onto the first `d` levels, where `q` is a quadrature
/// of the untruncated oscillator. Computed exactly from `d + 1` levels.
pub fn compressed_square(quadrature: fn(usize) -> CMatrix, d: usize) -> CMatrix {
    let q = quadrature(d + 1);
    (&q * &q).view((0, 0), (d, d)).into_owned()
}

/// Spin-j operators for `d = 2j + 1` with the basis ordered `m = j, j-1, ..., -j`.
fn spin_ladder(d: usize) -> CMatrix {
    // J+ |j,m⟩ = sqrt(j(j+1) - m(m+1)) |j,m+1⟩
    let j = (d as f64 - 1.0) / 2.0;
    let mut jp = CMatrix::zeros(d, d);
    for k in 1..d {
        let m = j - k as f64;
        jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    jp
}

pub fn spin_x(d: usize) -> CMatrix {
    let jp = spin_ladder(d);
    (&jp + jp.adjoint()).scale(0.5)
}

pub fn spin_y(d: usize) -> CMatrix {
    let jp = spin_ladder(d);
    (&jp - jp.adjoint()) * c(0.0, -0.5)
}

pub fn spin_z(d: usize) -> CMatrix {
    let j = (d as f64 - 1.0) / 2.0;
    CMatrix::from_fn(d, d, |r, s| if r == s { c(j - r as f64, 0.0) } else { c(0.0, 0.0) })
}

/// Looks up a named operator for a factor of dimension `d`.
pub fn named(name: &str, d: usize) -> Result<CMatrix> {
    let need_qubit = |m: CMatrix| {
        if d == 2 {
            Ok(m)
        } else {
            Err(Error::DimensionMismatch(format!("'{name}' needs a dimension-2 factor, got {d}")))
        }
    };
    match name {
        "pauli_x" => need_qubit(pauli_x()),
        "pauli_y" => need_qubit(pauli_y()),
        "pauli_z" => need_qubit(pauli_z()),
        "spin_x" => Ok(spin_x(d)),
        "spin_y" => Ok(spin_y(d)),
        "spin_z" => Ok(spin_z(d)),
        "field" => Ok(field_quadrature(d)),
        "momentum" => Ok(momentum_quadrature(d)),
        "number" => Ok(number(d)),
        _ => Err(Error::schema("observable", format!("unknown named observable '{name}'"))),
    }
}

pub const NAMED_OBSERVABLES: &[&str] = &[
    "pauli_x", "pauli_y", "pauli_z", "spin_x", "spin_y", "spin_z", "field", "momentum", "number",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_decompose, EPS_EIG};

    #[test]
    fn qubit_field_quadrature() {
        let phi = field_quadrature(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi[(0, 1)].re - h).abs() < 1e-15 && (phi[(1, 0)].re - h).abs() < 1e-15);
        let sd = spectral_decompose(&phi, EPS_EIG).unwrap();
        assert!((sd.labels[0] + h).abs() < 1e-14 && (sd.labels[1] - h).abs() < 1e-14);
    }

    #[test]
    fn spin_one_matrices() {
        let sz = spin_z(3);
        assert_eq!(sz[(0, 0)].re, 1.0);
        assert_eq!(sz[(2, 2)].re, -1.0);
        let sx = spin_x(3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sx[(0, 1)].re - h).abs() < 1e-15 && (sx[(1, 2)].re - h).abs() < 1e-15);
        // [Jx, Jy] = i Jz
        let comm = &sx * spin_y(3) - spin_y(3) * &sx;
        assert!((comm - sz * c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn compressed_square_of_quadratures() {
        // P(x² + p²)P = P(2a†a + 1)P
        let s = compressed_square(field_quadrature, 4) + compressed_square(momentum_quadrature, 4);
        for n in 0..4 {
            assert!((s[(n, n)].re - (2 * n + 1) as f64).abs() < 1e-13);
        }
    }
}
