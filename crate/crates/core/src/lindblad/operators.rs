use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Sparse operator stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        SparseOperator { dim, entries: merged }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        SparseOperator::new(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        SparseOperator::new(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect())
    }

    pub fn add(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut e = self.entries.clone();
        e.extend_from_slice(&other.entries);
        SparseOperator::new(self.dim, e)
    }

    pub fn mul(&self, other: &SparseOperator) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut e = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(k2, c, w) in &other.entries {
                if k == k2 {
                    e.push((r, c, v * w));
                }
            }
        }
        SparseOperator::new(self.dim, e)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `out += s * self * rho`.
    pub fn left_mul_acc(&self, rho: &DMatrix<Complex64>, s: Complex64, out: &mut DMatrix<Complex64>) {
        let n = self.dim;
        for col in 0..n {
            let src = rho.column(col);
            let mut dst = out.column_mut(col);
            for &(r, k, v) in &self.entries {
                dst[r] += s * v * src[k];
            }
        }
    }

    /// `out += s * rho * self`.
    pub fn right_mul_acc(&self, rho: &DMatrix<Complex64>, s: Complex64, out: &mut DMatrix<Complex64>) {
        for &(k, c, v) in &self.entries {
            let sv = s * v;
            let src = rho.column(k);
            let mut dst = out.column_mut(c);
            for (d, x) in dst.iter_mut().zip(src.iter()) {
                *d += x * sv;
            }
        }
    }

    /// `out += s * self * rho * self^dagger`.
    pub fn sandwich_acc(&self, rho: &DMatrix<Complex64>, s: Complex64, out: &mut DMatrix<Complex64>) {
        for &(r2, c2, v2) in &self.entries {
            let w = s * v2.conj();
            for &(r1, c1, v1) in &self.entries {
                out[(r1, r2)] += w * v1 * rho[(c1, c2)];
            }
        }
    }

    /// `tr(self * rho)`.
    pub fn expectation(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        self.entries.iter().map(|&(r, c, v)| v * rho[(c, r)]).sum()
    }
}

/// Field and absorber operators on the space `field (x) absorber_1 (x) ... (x) absorber_Na`.
///
/// The basis index is `n * 2^Na + bits`, with absorber 1 in the most
/// significant bit and `|e>` encoded as 1.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub n_absorbers: usize,
    pub fock_dim: usize,
    pub annihilate: SparseOperator,
    pub create: SparseOperator,
    pub number: SparseOperator,
    pub sigma: Vec<SparseOperator>,
    pub sigma_dagger: Vec<SparseOperator>,
    pub sigma_z: Vec<SparseOperator>,
}

impl OperatorSet {
    pub fn dim(&self) -> usize {
        self.fock_dim << self.n_absorbers
    }
}

/// Bit mask of absorber `k` (0-based, absorber 1 is `k = 0`).
pub(crate) fn absorber_bit(k: usize, n_absorbers: usize) -> usize {
    1 << (n_absorbers - 1 - k)
}

pub fn build_operators(n_absorbers: usize, fock_dim: usize) -> OperatorSet {
    assert!(n_absorbers >= 1 && fock_dim >= 2);
    let block = 1usize << n_absorbers;
    let dim = fock_dim * block;
    let one = Complex64::new(1.0, 0.0);

    let mut a = Vec::new();
    let mut num = Vec::new();
    for n in 0..fock_dim {
        for b in 0..block {
            let i = n * block + b;
            if n > 0 {
                a.push(((n - 1) * block + b, i, Complex64::new(libm::sqrt(n as f64), 0.0)));
                num.push((i, i, Complex64::new(n as f64, 0.0)));
            }
        }
    }
    let annihilate = SparseOperator::new(dim, a);

    let mut sigma = Vec::with_capacity(n_absorbers);
    let mut sigma_z = Vec::with_capacity(n_absorbers);
    for k in 0..n_absorbers {
        let bit = absorber_bit(k, n_absorbers);
        let mut s = Vec::new();
        let mut z = Vec::new();
        for i in 0..dim {
            if i & bit != 0 {
                s.push((i & !bit, i, one));
                z.push((i, i, one));
            } else {
                z.push((i, i, -one));
            }
        }
        sigma.push(SparseOperator::new(dim, s));
        sigma_z.push(SparseOperator::new(dim, z));
    }

    OperatorSet {
        n_absorbers,
        fock_dim,
        create: annihilate.adjoint(),
        annihilate,
        number: SparseOperator::new(dim, num),
        sigma_dagger: sigma.iter().map(SparseOperator::adjoint).collect(),
        sigma,
        sigma_z,
    }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use std::vec;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn number_operator_smallest_case() {
        let ops = build_operators(1, 2);
        assert_eq!(ops.dim(), 4);
        let n = ops.number.to_dense();
        let diag: std::vec::Vec<f64> = (0..4).map(|i| n[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(ops.create.mul(&ops.annihilate), ops.number);
    }

    #[test]
    fn sigma_algebra() {
        let ops = build_operators(3, 3);
        for k in 0..3 {
            assert_eq!(ops.sigma[k].mul(&ops.sigma[k]).nnz(), 0);
            let p = ops.sigma_dagger[k].mul(&ops.sigma[k]).to_dense();
            for i in 0..ops.dim() {
                let d = p[(i, i)].re;
                assert!(d == 0.0 || d == 1.0);
            }
            let z = ops.sigma_z[k].to_dense();
            let expect = p.scale(2.0) - DMatrix::<Complex64>::identity(ops.dim(), ops.dim());
            assert_eq!(z, expect);
        }
        // distinct absorbers commute
        let ab = ops.sigma[0].mul(&ops.sigma_dagger[1]).to_dense();
        let ba = ops.sigma_dagger[1].mul(&ops.sigma[0]).to_dense();
        assert_eq!(ab, ba);
    }

    #[test]
    fn commutator_below_truncation() {
        let ops = build_operators(2, 5);
        let block = 4;
        let comm = ops.annihilate.mul(&ops.create).to_dense() - ops.create.mul(&ops.annihilate).to_dense();
        for i in 0..ops.dim() {
            for j in 0..ops.dim() {
                let expect = if i == j {
                    if i / block == 4 {
                        c(-4.0)
                    } else {
                        c(1.0)
                    }
                } else {
                    c(0.0)
                };
                assert!((comm[(i, j)] - expect).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn sparse_products_match_dense() {
        let ops = build_operators(2, 3);
        let d = ops.dim();
        let rho = DMatrix::from_fn(d, d, |i, j| Complex64::new((i * 7 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02));
        let h = ops.annihilate.mul(&ops.sigma_dagger[1]).add(&ops.sigma[0]);
        let hd = h.to_dense();
        let s = Complex64::new(0.3, -1.1);
        let mut l = DMatrix::zeros(d, d);
        h.left_mul_acc(&rho, s, &mut l);
        let mut r = DMatrix::zeros(d, d);
        h.right_mul_acc(&rho, s, &mut r);
        let mut w = DMatrix::zeros(d, d);
        h.sandwich_acc(&rho, s, &mut w);
        let tol = 1e-13;
        assert!((l - (&hd * &rho) * s).norm() < tol);
        assert!((r - (&rho * &hd) * s).norm() < tol);
        assert!((w - &hd * &rho * hd.adjoint() * s).norm() < tol);
        assert!((h.expectation(&rho) - (&hd * &rho).trace()).norm() < tol);
    }
}
