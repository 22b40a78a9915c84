use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::hermitian_part;
use super::operators::{absorber_bit, build_operators, OperatorSet, SparseOperator};
use crate::{Error, Result};

/// Generator of the slice dynamics
/// `d rho/dt = -i[H, rho] + gamma_sp sum_k D[sigma_k] rho + gamma_dp sum_k D[sigma_z_k] rho`
/// with `H = g sum_k (a sigma_k^dagger + a^dagger sigma_k)` in the interaction picture.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    ops: OperatorSet,
    hamiltonian: SparseOperator,
    jumps: Vec<SparseOperator>,
    gamma_sp: f64,
    /// Elementwise rate from the `sigma^dagger sigma` anticommutators and the
    /// dephasing terms, both diagonal in the product basis.
    diagonal_rates: DMatrix<f64>,
}

impl LindbladGenerator {
    pub fn new(n_absorbers: usize, fock_dim: usize, g: f64, gamma_sp: f64, gamma_dp: f64) -> Self {
        let ops = build_operators(n_absorbers, fock_dim);
        let dim = ops.dim();
        let mut h = SparseOperator::new(dim, Vec::new());
        if g != 0.0 {
            for k in 0..n_absorbers {
                h = h
                    .add(&ops.annihilate.mul(&ops.sigma_dagger[k]))
                    .add(&ops.create.mul(&ops.sigma[k]));
            }
            h = h.scale(Complex64::new(g, 0.0));
        }

        let excited = |i: usize| -> Vec<bool> {
            (0..n_absorbers).map(|k| i & absorber_bit(k, n_absorbers) != 0).collect()
        };
        let flags: Vec<Vec<bool>> = (0..dim).map(excited).collect();
        let diagonal_rates = DMatrix::from_fn(dim, dim, |i, j| {
            let mut r = 0.0;
            for (&ei, &ej) in flags[i].iter().zip(&flags[j]) {
                if gamma_sp != 0.0 {
                    r -= 0.5 * gamma_sp * (ei as u8 + ej as u8) as f64;
                }
                if gamma_dp != 0.0 && ei != ej {
                    r -= 2.0 * gamma_dp;
                }
            }
            r
        });
        let jumps = if gamma_sp != 0.0 { ops.sigma.clone() } else { Vec::new() };
        LindbladGenerator {
            ops,
            hamiltonian: h,
            jumps,
            gamma_sp,
            diagonal_rates,
        }
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn hamiltonian(&self) -> &SparseOperator {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.ops.dim()
    }

    /// Writes `d rho/dt` into `out`.
    pub fn rhs_into(&self, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        for (o, (x, r)) in out.iter_mut().zip(rho.iter().zip(self.diagonal_rates.iter())) {
            *o = x * *r;
        }
        let minus_i = Complex64::new(0.0, -1.0);
        self.hamiltonian.left_mul_acc(rho, minus_i, out);
        self.hamiltonian.right_mul_acc(rho, -minus_i, out);
        let gsp = Complex64::new(self.gamma_sp, 0.0);
        for c in &self.jumps {
            c.sandwich_acc(rho, gsp, out);
        }
    }

    pub fn rhs(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        self.rhs_into(rho, &mut out);
        out
    }

    /// `<a^dagger a + sum_k sigma_k^dagger sigma_k>`.
    pub fn total_excitation(&self, rho: &DMatrix<Complex64>) -> f64 {
        let mut x = self.ops.number.expectation(rho).re;
        for k in 0..self.ops.n_absorbers {
            let bit = absorber_bit(k, self.ops.n_absorbers);
            x += (0..self.dim()).filter(|i| i & bit != 0).map(|i| rho[(i, i)].re).sum::<f64>();
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields))]
pub enum IntegratorSpec {
    /// Adaptive Dormand-Prince 5(4) with this local tolerance (relative and absolute).
    Dopri5 {
        #[cfg_attr(feature = "serde", serde(default = "default_tolerance"))]
        tolerance: f64,
    },
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4 { step: f64 },
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[cfg(feature = "serde")]
fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec::Dopri5 {
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl IntegratorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            IntegratorSpec::Dopri5 { tolerance } if !(tolerance > 0.0 && tolerance < 1.0) => {
                Err(Error::config("integrator.tolerance", "must lie in (0, 1)"))
            }
            IntegratorSpec::Rk4 { step } if !(step > 0.0 && step.is_finite()) => {
                Err(Error::config("integrator.step", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 1_000_000;

/// Integrates from `t = 0` to `t_end`, symmetrizing after every accepted step.
pub fn integrate(
    generator: &LindbladGenerator,
    rho: &mut DMatrix<Complex64>,
    t_end: f64,
    spec: IntegratorSpec,
) -> Result<StepStats> {
    spec.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::domain("integrate", "end time must be finite and >= 0"));
    }
    match spec {
        IntegratorSpec::Dopri5 { tolerance } => dopri5(generator, rho, t_end, tolerance),
        IntegratorSpec::Rk4 { step } => Ok(rk4(generator, rho, t_end, step)),
    }
}

fn rk4(generator: &LindbladGenerator, rho: &mut DMatrix<Complex64>, t_end: f64, step: f64) -> StepStats {
    let n_steps = libm::ceil(t_end / step).max(if t_end > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if n_steps > 0 { t_end / n_steps as f64 } else { 0.0 };
    let d = rho.nrows();
    let mut k = [(); 4].map(|_| DMatrix::<Complex64>::zeros(d, d));
    for _ in 0..n_steps {
        generator.rhs_into(rho, &mut k[0]);
        let y = &*rho + &k[0] * Complex64::new(0.5 * h, 0.0);
        generator.rhs_into(&y, &mut k[1]);
        let y = &*rho + &k[1] * Complex64::new(0.5 * h, 0.0);
        generator.rhs_into(&y, &mut k[2]);
        let y = &*rho + &k[2] * Complex64::new(h, 0.0);
        generator.rhs_into(&y, &mut k[3]);
        let w = Complex64::new(h / 6.0, 0.0);
        *rho += (&k[0] + &k[1] * Complex64::new(2.0, 0.0) + &k[2] * Complex64::new(2.0, 0.0) + &k[3]) * w;
        hermitian_part(rho);
    }
    StepStats {
        accepted: n_steps,
        rejected: 0,
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dopri5(generator: &LindbladGenerator, rho: &mut DMatrix<Complex64>, t_end: f64, tol: f64) -> Result<StepStats> {
    let mut stats = StepStats::default();
    if t_end == 0.0 {
        return Ok(stats);
    }
    let d = rho.nrows();
    let mut k: Vec<DMatrix<Complex64>> = (0..7).map(|_| DMatrix::zeros(d, d)).collect();
    let mut y = DMatrix::<Complex64>::zeros(d, d);
    let mut err = DMatrix::<Complex64>::zeros(d, d);
    generator.rhs_into(rho, &mut k[0]);

    let scale = |y0: &DMatrix<Complex64>, y1: &DMatrix<Complex64>, e: &DMatrix<Complex64>| -> f64 {
        let mut worst: f64 = 0.0;
        for ((a, b), e) in y0.iter().zip(y1.iter()).zip(e.iter()) {
            let s = tol + tol * a.norm().max(b.norm());
            worst = worst.max(e.norm() / s);
        }
        worst
    };

    // Initial step from the size of the derivative.
    let d0 = rho.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let d1 = k[0].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut h = if d1 > 0.0 { (0.01 * (d0 + tol) / d1).min(t_end) } else { t_end };
    h = h.max(1e-6 * t_end);

    let mut t = 0.0;
    while t < t_end {
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::NoConvergence {
                op: "dopri5",
                iterations: MAX_STEPS,
            });
        }
        let last = t + h >= t_end * (1.0 - 1e-14);
        if last {
            h = t_end - t;
        }
        for (s, row) in A.iter().enumerate().skip(1) {
            y.copy_from(rho);
            let (done, rest) = k.split_at_mut(s);
            for (kj, &a) in done.iter().zip(row.iter()) {
                if a != 0.0 {
                    y.zip_apply(kj, |yv, kv| *yv += kv * (h * a));
                }
            }
            generator.rhs_into(&y, &mut rest[0]);
        }
        // The last stage is evaluated at the fifth-order solution, so y holds it.
        err.fill(Complex64::new(0.0, 0.0));
        for (j, &e) in E.iter().enumerate() {
            if e != 0.0 {
                err.zip_apply(&k[j], |ev, kv| *ev += kv * (h * e));
            }
        }
        let en = scale(rho, &y, &err);
        if !en.is_finite() {
            return Err(Error::StepUnderflow { t, step: h, error: en });
        }
        if en <= 1.0 {
            t = if last { t_end } else { t + h };
            core::mem::swap(rho, &mut y);
            hermitian_part(rho);
            stats.accepted += 1;
            generator.rhs_into(rho, &mut k[0]);
            let factor = if en == 0.0 { 5.0 } else { (0.9 * libm::pow(en, -0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * libm::pow(en, -0.2)).clamp(0.1, 0.9);
            if h < 1e-14 * t_end.max(t) {
                return Err(Error::StepUnderflow { t, step: h, error: en });
            }
        }
    }
    Ok(stats)
}
