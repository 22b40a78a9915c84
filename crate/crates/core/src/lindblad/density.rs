use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Density matrix on `field (x) absorber_1 (x) ... (x) absorber_Na`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
    fock_dim: usize,
    n_absorbers: usize,
}

impl DensityMatrix {
    pub fn from_matrix(data: DMatrix<Complex64>, fock_dim: usize, n_absorbers: usize) -> Result<Self> {
        let dim = fock_dim << n_absorbers;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::domain(
                "DensityMatrix",
                format!("expected {dim}x{dim}, got {}x{}", data.nrows(), data.ncols()),
            ));
        }
        Ok(DensityMatrix {
            data,
            fock_dim,
            n_absorbers,
        })
    }

    /// `rho_field (x) |g...g><g...g|`.
    pub fn with_ground_absorbers(field: &FieldState, n_absorbers: usize) -> Self {
        let d = field.dim();
        let block = 1usize << n_absorbers;
        let mut data = DMatrix::zeros(d * block, d * block);
        for n in 0..d {
            for m in 0..d {
                data[(n * block, m * block)] = field.matrix()[(n, m)];
            }
        }
        DensityMatrix {
            data,
            fock_dim: d,
            n_absorbers,
        }
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.data
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn n_absorbers(&self) -> usize {
        self.n_absorbers
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn factor_labels(&self) -> Vec<String> {
        let mut v = vec![String::from("field")];
        v.extend((1..=self.n_absorbers).map(|k| format!("absorber_{k}")));
        v
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        hermitian_part(&mut self.data);
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.data)
    }

    /// Trace over all absorbers.
    pub fn field_reduced(&self) -> FieldState {
        let block = 1usize << self.n_absorbers;
        let d = self.fock_dim;
        let m = DMatrix::from_fn(d, d, |n, m| {
            (0..block).map(|b| self.data[(n * block + b, m * block + b)]).sum()
        });
        FieldState {
            matrix: m,
            truncation_deficit: 0.0,
        }
    }
}

pub(crate) fn hermitian_part(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(j, j)] = Complex64::new(m[(j, j)].re, 0.0);
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Reduced density matrix of the probe mode in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    matrix: DMatrix<Complex64>,
    truncation_deficit: f64,
}

impl FieldState {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::domain("FieldState", "matrix must be square with dimension >= 2"));
        }
        Ok(FieldState {
            matrix,
            truncation_deficit: 0.0,
        })
    }

    /// Number state `|n>`.
    pub fn fock(n: usize, fock_dim: usize) -> Result<Self> {
        if n >= fock_dim {
            return Err(Error::config("input_state.n", format!("n = {n} needs fock_dim > {n}")));
        }
        let mut m = DMatrix::zeros(fock_dim, fock_dim);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(FieldState {
            matrix: m,
            truncation_deficit: 0.0,
        })
    }

    /// Coherent state with real amplitude `sqrt(n_mean)`, truncated and renormalized.
    pub fn coherent(n_mean: f64, fock_dim: usize) -> Result<Self> {
        if !(n_mean >= 0.0 && n_mean.is_finite()) {
            return Err(Error::config("input_state.n_mean", "must be finite and >= 0"));
        }
        let alpha = libm::sqrt(n_mean);
        let mut c = Vec::with_capacity(fock_dim);
        let mut amp = libm::exp(-0.5 * n_mean);
        for k in 0..fock_dim {
            if k > 0 {
                amp *= alpha / libm::sqrt(k as f64);
            }
            c.push(amp);
        }
        let norm2: f64 = c.iter().map(|x| x * x).sum();
        let m = DMatrix::from_fn(fock_dim, fock_dim, |i, j| Complex64::new(c[i] * c[j] / norm2, 0.0));
        Ok(FieldState {
            matrix: m,
            truncation_deficit: (1.0 - norm2).max(0.0),
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Probability mass lost to truncation before renormalization.
    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PhotonStatistics {
    pub mean: f64,
    pub variance: f64,
    /// `variance / mean`; `None` when the mean vanishes.
    pub fano_std: Option<f64>,
    /// `mean / variance`; `None` when the variance vanishes.
    pub fano_paper: Option<f64>,
}

pub fn photon_statistics(field: &FieldState) -> PhotonStatistics {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (n, p) in field.populations().into_iter().enumerate() {
        let n = n as f64;
        m1 += n * p;
        m2 += n * n * p;
    }
    let variance = (m2 - m1 * m1).max(0.0);
    PhotonStatistics {
        mean: m1,
        variance,
        fano_std: (m1 > 0.0).then(|| variance / m1),
        fano_paper: (variance > 0.0).then(|| m1 / variance),
    }
}
