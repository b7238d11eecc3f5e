//! Truncated Fock space `⊕_{n≤N} X_n` and its shift operators.
//!
//! Coordinates are fiber coordinates: block `n` has width `dim X_n` and the
//! vacuum is the single coordinate of block 0. A shift beyond block `N` is cut
//! to zero, so evaluations are compressions of the true operators unless the
//! Fock space itself is finite.

use serde::Serialize;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, kron, op_norm, unit_vector, C64, ONE, ZERO};
use crate::ncpoly::NcPoly;
use crate::subproduct::SubproductSystem;

/// Matrix on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<C64>,
    /// `Some(k)` when the operator maps block `m` into block `m + k`.
    pub degree_shift: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockEval {
    pub op: FockOperator,
    /// The truncated matrix has the norm of the untruncated operator.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockNorm {
    pub value: f64,
    pub exact: bool,
    pub total_dim: usize,
}

#[derive(Debug, Clone)]
pub struct FockTruncation {
    system: SubproductSystem,
    offsets: Vec<usize>,
    total_dim: usize,
    shifts: Vec<DMatrix<C64>>,
}

impl FockTruncation {
    pub fn new(system: SubproductSystem) -> Self {
        let mut offsets = Vec::with_capacity(system.max_degree() + 2);
        let mut acc = 0;
        for k in system.dims() {
            offsets.push(acc);
            acc += k;
        }
        offsets.push(acc);
        let mut f = FockTruncation {
            system,
            offsets,
            total_dim: acc,
            shifts: Vec::new(),
        };
        let d = f.system.dim_vars();
        f.shifts = (0..d)
            .map(|i| f.shift_matrix(&unit_vector(d, i), 1))
            .collect();
        f
    }

    pub fn system(&self) -> &SubproductSystem {
        &self.system
    }

    pub fn max_degree(&self) -> usize {
        self.system.max_degree()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn block_range(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    /// Degree of the block containing coordinate `k`.
    pub fn block_of(&self, k: usize) -> usize {
        self.offsets.partition_point(|&o| o <= k) - 1
    }

    pub fn vacuum(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.total_dim);
        v[0] = ONE;
        v
    }

    /// `S_i`: `y ∈ X_n ↦ p_{n+1}(e_i ⊗ y)`, the compression of the free shift.
    pub fn generator_shift(&self, i: usize) -> &DMatrix<C64> {
        &self.shifts[i - 1]
    }

    pub fn generator_shifts(&self) -> &[DMatrix<C64>] {
        &self.shifts
    }

    fn shift_matrix(&self, x: &[C64], m: usize) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.total_dim, self.total_dim);
        let top = self.max_degree();
        if m > top {
            return out;
        }
        for n in 0..=top - m {
            let (src, dst) = (self.system.fiber(n), self.system.fiber(m + n));
            if src.is_zero() || dst.is_zero() {
                continue;
            }
            let (r0, c0) = (self.offsets[m + n], self.offsets[n]);
            for c in 0..src.dim() {
                let coords = dst.coordinates(&kron(x, &src.vector(c)));
                for (a, z) in coords.into_iter().enumerate() {
                    out[(r0 + a, c0 + c)] = z;
                }
            }
        }
        out
    }

    /// `S(x)`: `y ∈ X_n ↦ p_{m+n}(x ⊗ y)` for `x ∈ X_m`.
    pub fn shift(&self, x: &[C64], m: usize) -> Result<FockOperator> {
        if m > self.max_degree() {
            return Err(Error::DegreeOverflow {
                degree: m,
                max_degree: self.max_degree(),
            });
        }
        let fiber = self.system.fiber(m);
        if x.len() != fiber.ambient() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} is not in degree {m}",
                x.len()
            )));
        }
        let residual = fiber.residual(x);
        if residual > self.system.tol() * linalg::norm(x).max(1.0) {
            return Err(Error::NotInFiber {
                degree: m,
                residual,
            });
        }
        Ok(FockOperator {
            matrix: self.shift_matrix(x, m),
            degree_shift: Some(m as i64),
        })
    }

    /// Evaluation at the truncated shifts, `f(S) = Σ_w f_w S_{w_1}⋯S_{w_k}`.
    pub fn eval_on_fock(&self, f: &NcPoly) -> Result<FockEval> {
        self.check_poly(f)?;
        let matrix = f.eval_matrices(&self.shifts, self.total_dim)?;
        let degree_shift = if f.is_homogeneous() {
            Some(f.degree().unwrap_or(0) as i64)
        } else {
            None
        };
        Ok(FockEval {
            op: FockOperator {
                matrix,
                degree_shift,
            },
            exact: self.is_exact_for(f),
        })
    }

    fn check_poly(&self, f: &NcPoly) -> Result<()> {
        if f.dim_vars() != self.system.dim_vars() {
            return Err(Error::DimensionMismatch {
                left: self.system.dim_vars(),
                right: f.dim_vars(),
            });
        }
        let deg = f.degree().unwrap_or(0);
        if deg > self.max_degree() {
            return Err(Error::DegreeOverflow {
                degree: deg,
                max_degree: self.max_degree(),
            });
        }
        Ok(())
    }

    /// Whether `‖f(S)‖` at this truncation is the untruncated norm: the Fock
    /// space is finite, or `f` is homogeneous (its norm is attained on the vacuum).
    pub fn is_exact_for(&self, f: &NcPoly) -> bool {
        self.system.is_finite() || f.is_homogeneous()
    }

    /// `⊕_n p_n(f_n)` in fiber coordinates, the vacuum image of `f(S)`.
    pub fn vacuum_image(&self, f: &NcPoly) -> Result<DVector<C64>> {
        self.check_poly(f)?;
        let mut v = DVector::zeros(self.total_dim);
        for n in 0..=f.degree().unwrap_or(0) {
            let part = f.homogeneous_component(n);
            if part.is_zero() {
                continue;
            }
            let c = self.system.fiber(n).coordinates(&part.to_vector(n));
            for (k, z) in c.into_iter().enumerate() {
                v[self.offsets[n] + k] = z;
            }
        }
        Ok(v)
    }

    /// Largest singular value of `f(S)`, a lower bound for the quotient norm.
    pub fn fock_norm_lower_bound(&self, f: &NcPoly) -> Result<FockNorm> {
        let eval = self.eval_on_fock(f)?;
        Ok(FockNorm {
            value: op_norm(&eval.op.matrix),
            exact: eval.exact,
            total_dim: self.total_dim,
        })
    }

    fn gauge_diagonal(&self, lambda: C64) -> Vec<C64> {
        let mut diag = Vec::with_capacity(self.total_dim);
        for n in 0..=self.max_degree() {
            let p = lambda.powu(n as u32);
            diag.extend(std::iter::repeat_n(p, self.system.fiber(n).dim()));
        }
        diag
    }

    /// `U_λ = ⊕_m λ^m I`.
    pub fn gauge(&self, lambda: C64) -> Result<FockOperator> {
        let modulus = lambda.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { modulus });
        }
        let diag = self.gauge_diagonal(lambda);
        Ok(FockOperator {
            matrix: DMatrix::from_diagonal(&DVector::from_vec(diag)),
            degree_shift: Some(0),
        })
    }

    /// `U_λ A U_λ^{-1}`.
    pub fn gauge_conjugate(&self, lambda: C64, a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let modulus = lambda.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { modulus });
        }
        let diag = self.gauge_diagonal(lambda);
        Ok(DMatrix::from_fn(self.total_dim, self.total_dim, |i, j| {
            diag[i] * a[(i, j)] * diag[j].conj()
        }))
    }

    /// `Φ_n(A) = (1/M) Σ_{j<M} ω^{-nj} U_{ω^j} A U_{ω^j}^{-1}` with
    /// `ω = e^{2πi/M}`, `M = 2N + 1`; exact for block shifts in `[−N, N]`.
    pub fn grading_projection(&self, a: &FockOperator, n: i64) -> FockOperator {
        let nodes = 2 * self.max_degree() + 1;
        let mut acc = DMatrix::zeros(self.total_dim, self.total_dim);
        for j in 0..nodes {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            let lambda = C64::from_polar(1.0, theta);
            let weight = C64::from_polar(1.0, -(n as f64) * theta);
            let conj = self
                .gauge_conjugate(lambda, &a.matrix)
                .expect("unit modulus by construction");
            acc += conj * weight;
        }
        FockOperator {
            matrix: acc / C64::new(nodes as f64, 0.0),
            degree_shift: Some(n),
        }
    }

    /// Keeps the blocks `(m + n, m)` of `A`.
    pub fn block_filter(&self, a: &FockOperator, n: i64) -> FockOperator {
        let matrix = DMatrix::from_fn(self.total_dim, self.total_dim, |i, j| {
            if self.block_of(i) as i64 - self.block_of(j) as i64 == n {
                a.matrix[(i, j)]
            } else {
                ZERO
            }
        });
        FockOperator {
            matrix,
            degree_shift: Some(n),
        }
    }

    /// Largest entry of `A` outside the `k`-th block superdiagonal.
    pub fn homogeneity_defect(&self, a: &DMatrix<C64>, k: i64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.total_dim {
            for j in 0..self.total_dim {
                if self.block_of(i) as i64 - self.block_of(j) as i64 != k {
                    worst = worst.max(a[(i, j)].norm());
                }
            }
        }
        worst
    }
}
