//! Subproduct systems `X_n ⊆ ℂ^{d^n}` and the correspondence with ideals.
//!
//! `X^J_n = J_n^⊥` and `J_X = ⊕ X_n^⊥`; fibers are stored as orthonormal
//! bases. Similarities between two systems are only *verified* here, from an
//! explicit certificate `(V_n)`; nothing searches for them.

use serde::Serialize;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::FockTruncation;
use crate::ideal::{GradedIdeal, IdealConfig};
use crate::linalg::{self, kron, min_singular, op_norm, Subspace, C64};
use crate::ncpoly::NcPoly;

#[derive(Debug, Clone, PartialEq)]
pub struct SubproductSystem {
    dim_vars: usize,
    fibers: Vec<Subspace>,
    config: IdealConfig,
}

/// Worst violation of `X_{m+n} ⊆ X_m ⊗ X_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub residual: f64,
    pub m: usize,
    pub n: usize,
}

impl SubproductSystem {
    /// `X_n = J_n^⊥` for `n ≤ max_degree`.
    pub fn from_ideal(ideal: &GradedIdeal, max_degree: usize) -> Result<Self> {
        let extended;
        let ideal = if ideal.max_degree() < max_degree {
            extended = ideal.extended(max_degree)?;
            &extended
        } else {
            ideal
        };
        if !ideal.graded_component(0)?.is_zero() {
            return Err(Error::TrivialQuotient);
        }
        let fibers = (0..=max_degree)
            .map(|n| ideal.components()[n].complement())
            .collect();
        Ok(SubproductSystem {
            dim_vars: ideal.dim_vars(),
            fibers,
            config: ideal.config(),
        })
    }

    /// The full system `X_n = H^{⊗n}`.
    pub fn full(dim_vars: usize, max_degree: usize) -> Result<Self> {
        SubproductSystem::from_ideal(&GradedIdeal::zero(dim_vars, max_degree)?, max_degree)
    }

    /// Wraps explicit fibers; only shapes and `X_0 = ℂ` are checked here,
    /// the axiom is checked by [`SubproductSystem::check_axiom`].
    pub fn from_fibers(dim_vars: usize, fibers: Vec<Subspace>, config: IdealConfig) -> Result<Self> {
        if fibers.is_empty() {
            return Err(Error::InvalidArgument("at least X_0 is required".into()));
        }
        for (n, x) in fibers.iter().enumerate() {
            let amb = crate::ideal::coords(dim_vars, n, config.dimension_cap)?;
            if x.ambient() != amb {
                return Err(Error::ShapeMismatch(format!(
                    "fiber {n} lives in dimension {}, expected {amb}",
                    x.ambient()
                )));
            }
        }
        if fibers[0].dim() != 1 {
            return Err(Error::ShapeMismatch("X_0 must be one-dimensional".into()));
        }
        Ok(SubproductSystem {
            dim_vars,
            fibers,
            config,
        })
    }

    pub fn dim_vars(&self) -> usize {
        self.dim_vars
    }

    pub fn max_degree(&self) -> usize {
        self.fibers.len() - 1
    }

    pub fn tol(&self) -> f64 {
        self.config.tol
    }

    pub fn config(&self) -> IdealConfig {
        self.config
    }

    pub fn fiber(&self, n: usize) -> &Subspace {
        &self.fibers[n]
    }

    pub fn fibers(&self) -> &[Subspace] {
        &self.fibers
    }

    pub fn dims(&self) -> Vec<usize> {
        self.fibers.iter().map(Subspace::dim).collect()
    }

    /// Some fiber at or below the truncation vanishes, hence so do all later
    /// ones and the truncated Fock space is the whole Fock space.
    pub fn is_finite(&self) -> bool {
        self.fibers.iter().any(Subspace::is_zero)
    }

    pub fn check_axiom(&self) -> AxiomCheck {
        let mut worst = AxiomCheck {
            residual: 0.0,
            m: 0,
            n: 0,
        };
        let top = self.max_degree();
        for total in 0..=top {
            for m in 0..=total {
                let n = total - m;
                for v in self.fibers[total].vectors() {
                    let r = Subspace::tensor_residual(&v, &self.fibers[m], &self.fibers[n]);
                    if r > worst.residual {
                        worst = AxiomCheck { residual: r, m, n };
                    }
                }
            }
        }
        worst
    }

    /// `J_X`: the ideal whose components are the fiber complements.
    pub fn to_ideal(&self) -> Result<GradedIdeal> {
        let check = self.check_axiom();
        if check.residual > self.config.tol {
            return Err(Error::AxiomViolation {
                m: check.m,
                n: check.n,
                residual: check.residual,
            });
        }
        let comps = self.fibers.iter().map(Subspace::complement).collect();
        GradedIdeal::from_components(self.dim_vars, comps, self.max_degree(), self.config)
    }

    /// Orthogonal projection `p_n` onto `X_n`.
    pub fn project_pn(&self, v: &[C64], n: usize) -> Result<Vec<C64>> {
        let x = self.fibers.get(n).ok_or(Error::DegreeOverflow {
            degree: n,
            max_degree: self.max_degree(),
        })?;
        if v.len() != x.ambient() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} is not in degree {n}",
                v.len()
            )));
        }
        Ok(x.project(v))
    }
}

/// Fiber maps `V_n : X_n → Y_n` in fiber-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityCertificate {
    pub maps: Vec<DMatrix<C64>>,
}

impl SimilarityCertificate {
    pub fn identity(x: &SubproductSystem) -> Self {
        SimilarityCertificate {
            maps: x.dims().iter().map(|&k| DMatrix::identity(k, k)).collect(),
        }
    }

    /// `V_n = λ^n I`.
    pub fn gauge(x: &SubproductSystem, lambda: C64) -> Self {
        SimilarityCertificate {
            maps: x
                .dims()
                .iter()
                .enumerate()
                .map(|(n, &k)| DMatrix::identity(k, k) * lambda.powu(n as u32))
                .collect(),
        }
    }

    /// `V_n = p^Y_n U^{⊗n}` restricted to `X_n`, for a `d × d` matrix `U`.
    pub fn tensor_power(
        x: &SubproductSystem,
        y: &SubproductSystem,
        u: &DMatrix<C64>,
    ) -> Result<Self> {
        let d = x.dim_vars();
        if u.shape() != (d, d) || y.dim_vars() != d || y.max_degree() != x.max_degree() {
            return Err(Error::ShapeMismatch(format!(
                "tensor power needs a {d}x{d} matrix and systems of equal shape"
            )));
        }
        let maps = (0..=x.max_degree())
            .map(|n| {
                let (src, dst) = (x.fiber(n), y.fiber(n));
                let mut v = DMatrix::zeros(dst.dim(), src.dim());
                for (c, b) in src.vectors().enumerate() {
                    let image = apply_tensor_power(u, &b, n);
                    for (r, z) in dst.coordinates(&image).into_iter().enumerate() {
                        v[(r, c)] = z;
                    }
                }
                v
            })
            .collect();
        Ok(SimilarityCertificate { maps })
    }

    /// `max_n max(‖V_n‖, ‖V_n^{-1}‖)` over the observed degrees.
    pub fn bound(&self) -> f64 {
        self.maps
            .iter()
            .filter(|v| v.nrows() > 0)
            .map(|v| op_norm(v).max(1.0 / min_singular(v)))
            .fold(0.0, f64::max)
    }

    /// Parses `V <n>` headers each followed by whitespace-separated matrix rows;
    /// entries are complex literals such as `0.5`, `-1i` or `0.3+0.4i`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut maps: Vec<Option<Vec<Vec<C64>>>> = Vec::new();
        let mut current: Option<usize> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| Error::Syntax {
                line: line_no,
                column: 1,
                message,
            };
            if let Some(rest) = line.strip_prefix('V') {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| syntax(format!("invalid header '{line}'")))?;
                if maps.len() <= n {
                    maps.resize(n + 1, None);
                }
                if maps[n].is_some() {
                    return Err(syntax(format!("duplicate map V {n}")));
                }
                maps[n] = Some(Vec::new());
                current = Some(n);
                continue;
            }
            let n = current.ok_or_else(|| syntax("matrix row before any 'V <n>' header".into()))?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<C64>()
                        .map_err(|_| syntax(format!("invalid complex entry '{tok}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            maps[n].as_mut().expect("header seen").push(row);
        }
        let mut out = Vec::with_capacity(maps.len());
        for (n, m) in maps.into_iter().enumerate() {
            let rows = m.ok_or_else(|| Error::ShapeMismatch(format!("map V {n} is missing")))?;
            let cols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != cols) {
                return Err(Error::ShapeMismatch(format!("ragged rows in V {n}")));
            }
            out.push(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]));
        }
        Ok(SimilarityCertificate { maps: out })
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        for (n, v) in self.maps.iter().enumerate() {
            s.push_str(&format!("V {n}\n"));
            for i in 0..v.nrows() {
                let row: Vec<String> = (0..v.ncols())
                    .map(|j| {
                        let z = v[(i, j)];
                        format!("{}{}{}i", z.re, if z.im.is_sign_negative() { '-' } else { '+' }, z.im.abs())
                    })
                    .collect();
                s.push_str(&row.join(" "));
                s.push('\n');
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub accepted: bool,
    /// `max ‖V_{m+n} p^X(x ⊗ y) − p^Y(V_m x ⊗ V_n y)‖` over basis pairs.
    pub defect: f64,
    pub worst: (usize, usize),
    pub invertible: bool,
    pub isometric: bool,
    pub bound: f64,
}

/// Checks the similarity identity on all basis pairs with `m + n ≤ N`.
pub fn verify_similarity(
    cert: &SimilarityCertificate,
    x: &SubproductSystem,
    y: &SubproductSystem,
) -> Result<SimilarityReport> {
    if x.dim_vars() != y.dim_vars() || x.max_degree() != y.max_degree() {
        return Err(Error::ShapeMismatch(format!(
            "systems differ: (d, N) = ({}, {}) vs ({}, {})",
            x.dim_vars(),
            x.max_degree(),
            y.dim_vars(),
            y.max_degree()
        )));
    }
    let top = x.max_degree();
    if cert.maps.len() != top + 1 {
        return Err(Error::ShapeMismatch(format!(
            "certificate has {} maps, expected {}",
            cert.maps.len(),
            top + 1
        )));
    }
    for (n, v) in cert.maps.iter().enumerate() {
        let (rows, cols) = (y.fiber(n).dim(), x.fiber(n).dim());
        if v.shape() != (rows, cols) {
            return Err(Error::ShapeMismatch(format!(
                "V_{n} is {}x{}, fibers need {rows}x{cols}",
                v.nrows(),
                v.ncols()
            )));
        }
    }
    let tol = x.tol();
    let invertible = cert
        .maps
        .iter()
        .all(|v| v.nrows() == 0 || min_singular(v) > tol);
    let isometric = cert.maps.iter().all(|v| {
        let k = v.ncols();
        linalg::max_abs(&(v.adjoint() * v - DMatrix::<C64>::identity(k, k))) <= tol
    });

    // images V_n b_a embedded in the ambient space of Y_n
    let images: Vec<Vec<Vec<C64>>> = (0..=top)
        .map(|n| {
            (0..x.fiber(n).dim())
                .map(|a| {
                    let col: Vec<C64> = cert.maps[n].column(a).iter().cloned().collect();
                    y.fiber(n).embed(&col)
                })
                .collect()
        })
        .collect();

    let mut defect: f64 = 0.0;
    let mut worst = (0, 0);
    for total in 0..=top {
        let (xt, yt) = (x.fiber(total), y.fiber(total));
        let vt = &cert.maps[total];
        for m in 0..=total {
            let n = total - m;
            for a in 0..x.fiber(m).dim() {
                let xa = x.fiber(m).vector(a);
                for b in 0..x.fiber(n).dim() {
                    let xb = x.fiber(n).vector(b);
                    let c = xt.coordinates(&kron(&xa, &xb));
                    let lhs = vt * nalgebra::DVector::from_vec(c);
                    let rhs = yt.coordinates(&kron(&images[m][a], &images[n][b]));
                    let diff: f64 = lhs
                        .iter()
                        .zip(&rhs)
                        .map(|(p, q)| (p - q).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    if diff > defect {
                        defect = diff;
                        worst = (m, n);
                    }
                }
            }
        }
    }
    Ok(SimilarityReport {
        accepted: invertible && defect <= tol,
        defect,
        worst,
        invertible,
        isometric,
        bound: cert.bound(),
    })
}

fn block_diag(blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(total, total);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// `U^{⊗n} v`, one tensor factor at a time.
fn apply_tensor_power(u: &DMatrix<C64>, v: &[C64], n: usize) -> Vec<C64> {
    let d = u.nrows();
    let mut cur = v.to_vec();
    for j in 0..n {
        let inner = d.pow((n - j - 1) as u32);
        let outer = d.pow(j as u32);
        let mut next = vec![C64::new(0.0, 0.0); cur.len()];
        for o in 0..outer {
            for a in 0..d {
                for b in 0..d {
                    let uab = u[(a, b)];
                    if uab == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let (dst, src) = ((o * d + a) * inner, (o * d + b) * inner);
                    for k in 0..inner {
                        next[dst + k] += uab * cur[src + k];
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// `W f(S^X) W^{-1}` on the truncated Fock space of `Y`, with `W = ⊕ V_n`.
pub fn induced_conjugation(
    cert: &SimilarityCertificate,
    x: &SubproductSystem,
    y: &SubproductSystem,
    f: &NcPoly,
) -> Result<DMatrix<C64>> {
    let report = verify_similarity(cert, x, y)?;
    if !report.accepted {
        return Err(Error::CertificateRejected {
            defect: report.defect,
        });
    }
    let fx = FockTruncation::new(x.clone());
    let a = fx.eval_on_fock(f)?.op.matrix;
    let inverses = cert
        .maps
        .iter()
        .map(|v| {
            if v.nrows() == 0 {
                Ok(v.clone())
            } else {
                v.clone().try_inverse().ok_or(Error::CertificateRejected {
                    defect: report.defect,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let w = block_diag(&cert.maps);
    let w_inv = block_diag(&inverses);
    Ok(w * a * w_inv)
}
