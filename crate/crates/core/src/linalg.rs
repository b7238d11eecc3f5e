//! Dense complex linear algebra shared by the ideal, fiber and Fock code.
//!
//! Degree-`n` tensors live in `ℂ^{d^n}` with the graded-lex word layout, so
//! `e_u ⊗ e_v` is the coordinate vector of the concatenated word `uv` and
//! [`kron`] is the tensor product of vectors.

use std::borrow::Cow;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `Σ a_i conj(b_i)`.
#[inline]
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = ZERO;
    for (x, y) in a.iter().zip(b) {
        acc += x * y.conj();
    }
    acc
}

#[inline]
pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// `y -= alpha * x`
#[inline]
fn sub_scaled(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= alpha * xi;
    }
}

pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

pub fn unit_vector(len: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; len];
    v[k] = ONE;
    v
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Smallest singular value; infinite for empty matrices.
pub fn min_singular(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return f64::INFINITY;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Top singular triple `(sigma, u, v)` with `m v = sigma u`.
pub fn top_singular(m: &DMatrix<C64>) -> (f64, Vec<C64>, Vec<C64>) {
    let svd = m.clone().svd(true, true);
    let (mut best, mut k) = (f64::NEG_INFINITY, 0);
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > best {
            best = *s;
            k = i;
        }
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let u_col = u.column(k).iter().cloned().collect();
    // rows of v_t are v^*
    let v_col = v_t.row(k).iter().map(|z| z.conj()).collect();
    (best, u_col, v_col)
}

/// Max absolute entry.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A subspace of `ℂ^ambient` stored as an orthonormal basis.
///
/// The whole space is kept symbolically (no stored vectors), so full
/// components of large degree cost nothing; its basis is the standard one.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    vectors: Vec<Vec<C64>>,
    full: bool,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            vectors: Vec::new(),
            full: false,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            vectors: Vec::new(),
            full: ambient > 0,
        }
    }

    /// Orthonormalizes `vectors` in order, dropping dependent ones.
    pub fn span<'a, I>(ambient: usize, vectors: I, tol: f64) -> Self
    where
        I: IntoIterator<Item = &'a [C64]>,
    {
        let mut s = Subspace::zero(ambient);
        for v in vectors {
            if s.is_full() {
                break;
            }
            s.try_insert(v, tol);
        }
        s.compact();
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        if self.full {
            self.ambient
        } else {
            self.vectors.len()
        }
    }

    pub fn is_full(&self) -> bool {
        self.full || (self.ambient > 0 && self.vectors.len() == self.ambient)
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Basis vector `k`.
    pub fn vector(&self, k: usize) -> Cow<'_, [C64]> {
        if self.full {
            Cow::Owned(unit_vector(self.ambient, k))
        } else {
            Cow::Borrowed(&self.vectors[k])
        }
    }

    pub fn vectors(&self) -> impl Iterator<Item = Cow<'_, [C64]>> + '_ {
        (0..self.dim()).map(move |k| self.vector(k))
    }

    /// Replaces an explicitly stored basis of the whole space by the symbolic form.
    pub fn compact(&mut self) {
        if !self.full && self.ambient > 0 && self.vectors.len() == self.ambient {
            self.vectors.clear();
            self.full = true;
        }
    }

    /// Appends a vector already known to be a unit vector orthogonal to the basis.
    pub(crate) fn push_orthonormal(&mut self, v: Vec<C64>) {
        debug_assert!(!self.full);
        debug_assert_eq!(v.len(), self.ambient);
        self.vectors.push(v);
    }

    /// Modified Gram–Schmidt with one reorthogonalization pass. The vector is
    /// dropped when its residual norm is at most `tol` times its original norm.
    pub fn try_insert(&mut self, v: &[C64], tol: f64) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        if self.is_full() {
            return false;
        }
        let original = norm(v);
        if original == 0.0 {
            return false;
        }
        let mut w = v.to_vec();
        for _pass in 0..2 {
            for b in &self.vectors {
                let c = inner(&w, b);
                sub_scaled(&mut w, c, b);
            }
        }
        let r = norm(&w);
        if r <= tol * original {
            return false;
        }
        let inv = 1.0 / r;
        w.iter_mut().for_each(|z| *z *= inv);
        self.vectors.push(w);
        true
    }

    /// Coordinates `⟨v, b_k⟩` of the orthogonal projection of `v`.
    pub fn coordinates(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        if self.full {
            return v.to_vec();
        }
        self.vectors.iter().map(|b| inner(v, b)).collect()
    }

    /// Inverse of [`Subspace::coordinates`]: `Σ c_k b_k`.
    pub fn embed(&self, coords: &[C64]) -> Vec<C64> {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        if self.full {
            return coords.to_vec();
        }
        let mut out = vec![ZERO; self.ambient];
        for (c, b) in coords.iter().zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        if self.full {
            return v.to_vec();
        }
        self.embed(&self.coordinates(v))
    }

    /// `‖v − P v‖`.
    pub fn residual(&self, v: &[C64]) -> f64 {
        if self.full {
            return 0.0;
        }
        let mut w = v.to_vec();
        for _pass in 0..2 {
            for b in &self.vectors {
                let c = inner(&w, b);
                sub_scaled(&mut w, c, b);
            }
        }
        norm(&w)
    }

    /// Orthonormal basis of the orthogonal complement.
    ///
    /// Pivoted: at each step the standard basis vector with the largest residual
    /// is orthonormalized, so the complement dimension is exactly
    /// `ambient − dim` and no rank decision is made here.
    pub fn complement(&self) -> Subspace {
        if self.full {
            return Subspace::zero(self.ambient);
        }
        if self.vectors.is_empty() {
            return Subspace::full(self.ambient);
        }
        let n = self.ambient;
        let target = n - self.vectors.len();
        // residual^2 of e_j against the current span
        let mut res: Vec<f64> = vec![1.0; n];
        for b in &self.vectors {
            for (r, x) in res.iter_mut().zip(b) {
                *r -= x.norm_sqr();
            }
        }
        let mut out = Subspace::zero(n);
        let mut used = vec![false; n];
        while out.vectors.len() < target {
            let (j, _) = res
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, (j, r)| {
                    if *r > acc.1 {
                        (j, *r)
                    } else {
                        acc
                    }
                });
            used[j] = true;
            let mut w = unit_vector(n, j);
            for _pass in 0..2 {
                for b in self.vectors.iter().chain(out.vectors.iter()) {
                    let c = inner(&w, b);
                    sub_scaled(&mut w, c, b);
                }
            }
            let r = norm(&w);
            let inv = 1.0 / r;
            w.iter_mut().for_each(|z| *z *= inv);
            for (rr, x) in res.iter_mut().zip(&w) {
                *rr -= x.norm_sqr();
            }
            out.vectors.push(w);
        }
        out.compact();
        out
    }

    /// `max |⟨b_i, b_j⟩ − δ_ij|`.
    pub fn gram_defect(&self) -> f64 {
        if self.full {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let g = inner(a, b);
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Sine of the largest principal angle between equal-dimensional subspaces,
    /// `1.0` when the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> f64 {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if self.dim() != other.dim() {
            return 1.0;
        }
        let a = self.vectors().map(|v| other.residual(&v)).fold(0.0, f64::max);
        let b = other.vectors().map(|v| self.residual(&v)).fold(0.0, f64::max);
        a.max(b)
    }

    /// `ambient × dim` matrix whose columns are the basis.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        if self.full {
            return DMatrix::identity(self.ambient, self.ambient);
        }
        DMatrix::from_fn(self.ambient, self.vectors.len(), |i, k| self.vectors[k][i])
    }

    /// Residual of `v ∈ ℂ^{left·right}` against `A ⊗ B`.
    pub fn tensor_residual(v: &[C64], left: &Subspace, right: &Subspace) -> f64 {
        let (p, q) = (left.ambient, right.ambient);
        assert_eq!(v.len(), p * q, "tensor length mismatch");
        let vm = DMatrix::from_fn(p, q, |i, j| v[i * q + j]);
        let a = left.to_matrix();
        let b = right.to_matrix();
        // (P_A ⊗ P_B) v  ↔  A A^* V conj(B) B^T
        let core = a.adjoint() * &vm * b.map(|z| z.conj());
        let proj = &a * core * b.transpose();
        (vm - proj).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}
