//! Matrix points, evaluation of polynomials at tuples, and the variety `V(J)`.
//!
//! A level-`n` point is a tuple `T = (T_1, …, T_d)` of `n × n` matrices; it is
//! in the (closed) nc ball when the row norm `‖Σ T_i T_i^*‖^{1/2}` is at most one.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockTruncation;
use crate::ideal::GradedIdeal;
use crate::linalg::{norm, op_norm, top_singular, Subspace, C64};
use crate::ncpoly::NcPoly;
use crate::subproduct::SubproductSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PointJson", try_from = "PointJson")]
pub struct MatrixPoint {
    mats: Vec<DMatrix<C64>>,
    level: usize,
}

/// Wire form: `{level, mats: [[rows of [re, im] pairs]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointJson {
    level: usize,
    mats: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<MatrixPoint> for PointJson {
    fn from(p: MatrixPoint) -> Self {
        PointJson {
            level: p.level,
            mats: p
                .mats
                .iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<PointJson> for MatrixPoint {
    type Error = Error;

    fn try_from(j: PointJson) -> Result<Self> {
        let n = j.level;
        let mut mats = Vec::with_capacity(j.mats.len());
        for rows in &j.mats {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::ShapeMismatch(format!("expected {n}x{n} matrices")));
            }
            mats.push(DMatrix::from_fn(n, n, |a, b| C64::new(rows[a][b][0], rows[a][b][1])));
        }
        MatrixPoint::new(mats)
    }
}

impl MatrixPoint {
    pub fn new(mats: Vec<DMatrix<C64>>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::InvalidArgument("a point needs at least one matrix".into()));
        };
        let level = first.nrows();
        if mats.iter().any(|m| m.shape() != (level, level)) {
            return Err(Error::ShapeMismatch(format!(
                "all matrices must be {level}x{level}"
            )));
        }
        Ok(MatrixPoint { mats, level })
    }

    pub fn zeros(dim_vars: usize, level: usize) -> Self {
        MatrixPoint {
            mats: vec![DMatrix::zeros(level, level); dim_vars],
            level,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim_vars(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[DMatrix<C64>] {
        &self.mats
    }

    /// `‖Σ T_i T_i^*‖^{1/2}` via the largest eigenvalue of the Hermitian sum.
    pub fn row_norm(&self) -> f64 {
        if self.level == 0 {
            return 0.0;
        }
        let mut gram = DMatrix::<C64>::zeros(self.level, self.level);
        for t in &self.mats {
            gram += t * t.adjoint();
        }
        let top = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        top.max(0.0).sqrt()
    }

    /// `T ⊕ U`.
    pub fn direct_sum(&self, other: &MatrixPoint) -> Result<MatrixPoint> {
        if self.dim_vars() != other.dim_vars() {
            return Err(Error::DimensionMismatch {
                left: self.dim_vars(),
                right: other.dim_vars(),
            });
        }
        let n = self.level + other.level;
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = DMatrix::zeros(n, n);
                m.view_mut((0, 0), (self.level, self.level)).copy_from(a);
                m.view_mut((self.level, self.level), (other.level, other.level))
                    .copy_from(b);
                m
            })
            .collect();
        Ok(MatrixPoint { mats, level: n })
    }

    /// `s^{-1} T s`.
    pub fn conjugate_by(&self, s: &DMatrix<C64>) -> Result<MatrixPoint> {
        if s.shape() != (self.level, self.level) {
            return Err(Error::ShapeMismatch("similarity has the wrong size".into()));
        }
        let inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("similarity is singular".into()))?;
        Ok(MatrixPoint {
            mats: self.mats.iter().map(|t| &inv * t * s).collect(),
            level: self.level,
        })
    }

    pub fn scaled(&self, s: f64) -> MatrixPoint {
        MatrixPoint {
            mats: self.mats.iter().map(|t| t * C64::new(s, 0.0)).collect(),
            level: self.level,
        }
    }
}

/// `f(T) = Σ_w f_w T_{w_1}⋯T_{w_k}`; the empty word evaluates to the identity.
pub fn eval_at_point(f: &NcPoly, t: &MatrixPoint) -> Result<DMatrix<C64>> {
    f.eval_matrices(&t.mats, t.level)
}

/// Appends zero matrices for the variables `d+1..=d_new`.
pub fn zero_pad_extend(t: &MatrixPoint, d_new: usize) -> Result<MatrixPoint> {
    if d_new < t.dim_vars() {
        return Err(Error::InvalidArgument(format!(
            "cannot pad {} variables down to {d_new}",
            t.dim_vars()
        )));
    }
    let mut mats = t.mats.clone();
    mats.resize(d_new, DMatrix::zeros(t.level, t.level));
    Ok(MatrixPoint {
        mats,
        level: t.level,
    })
}

fn eval_vector(v: &[C64], table: &[DMatrix<C64>], level: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(level, level);
    for (c, w) in v.iter().zip(table) {
        if *c != C64::new(0.0, 0.0) {
            out += w * *c;
        }
    }
    out
}

/// Largest `‖g(T)‖` over an orthonormal basis of a component.
fn component_residual(c: &Subspace, table: &[DMatrix<C64>], level: usize) -> f64 {
    if c.is_full() {
        return table.iter().map(op_norm).fold(0.0, f64::max);
    }
    c.vectors()
        .map(|v| op_norm(&eval_vector(&v, table, level)))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarietyCheck {
    pub member: bool,
    pub residual: f64,
    pub row_norm: f64,
    /// Highest ideal degree whose basis was evaluated.
    pub window: usize,
}

/// Degree window used by default: generator degree plus two.
pub fn default_window(ideal: &GradedIdeal) -> usize {
    ideal.max_generator_degree() + 2
}

/// Residual `max ‖g(T)‖` over the generators and over orthonormal bases of
/// `J_k`, `k ≤ window` (capped by the computed degrees).
pub fn in_variety(
    ideal: &GradedIdeal,
    t: &MatrixPoint,
    tol: f64,
    window: Option<usize>,
) -> Result<VarietyCheck> {
    if t.dim_vars() != ideal.dim_vars() {
        return Err(Error::DimensionMismatch {
            left: ideal.dim_vars(),
            right: t.dim_vars(),
        });
    }
    let window = window
        .unwrap_or_else(|| default_window(ideal))
        .min(ideal.max_degree());
    let mut residual: f64 = 0.0;
    for g in ideal.generators() {
        residual = residual.max(op_norm(&eval_at_point(g, t)?));
    }
    let mut table = vec![DMatrix::identity(t.level, t.level)];
    for k in 0..=window {
        if k > 0 {
            table = word_table_step(t, &table);
        }
        let comp = ideal.graded_component(k)?;
        if !comp.is_zero() {
            residual = residual.max(component_residual(comp, &table, t.level));
        }
    }
    let row_norm = t.row_norm();
    Ok(VarietyCheck {
        member: residual <= tol && row_norm <= 1.0 + tol,
        residual,
        row_norm,
        window,
    })
}

/// `T_w` for the words one letter longer than those of `table`, in word-index order.
fn word_table_step(t: &MatrixPoint, table: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
    let mut next = Vec::with_capacity(table.len() * t.dim_vars());
    for ti in &t.mats {
        for w in table {
            next.push(ti * w);
        }
    }
    next
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatingPoint {
    pub point: MatrixPoint,
    pub degree: usize,
    pub radius: f64,
    /// `‖f(Y) 1‖`.
    pub value: f64,
    /// `r^n ‖p_n f‖`.
    pub expected: f64,
    pub variety_residual: f64,
    pub row_norm: f64,
}

/// `Y_i = r S_i` compressed to `X_0 ⊕ ⋯ ⊕ X_n`, in fiber coordinates with
/// the vacuum as the first basis vector.
pub fn compressed_shift(
    ideal: &GradedIdeal,
    n: usize,
    r: f64,
) -> Result<(MatrixPoint, SubproductSystem)> {
    let system = SubproductSystem::from_ideal(ideal, n)?;
    let fock = FockTruncation::new(system);
    let mats: Vec<DMatrix<C64>> = fock
        .generator_shifts()
        .iter()
        .map(|s| s * C64::new(r, 0.0))
        .collect();
    Ok((MatrixPoint::new(mats)?, fock.system().clone()))
}

/// Compression of `r S_i` to `X_0 ⊕ ⋯ ⊕ X_n`, a point of `V(J)` at which the
/// homogeneous `f ∉ J` of degree `n` does not vanish.
pub fn separating_point(ideal: &GradedIdeal, f: &NcPoly, r: f64) -> Result<SeparatingPoint> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")));
    }
    if f.is_zero() {
        return Err(Error::MemberOfIdeal { residual: 0.0 });
    }
    if !f.is_homogeneous() {
        return Err(Error::NonHomogeneous);
    }
    let n = f.degree().expect("nonzero");
    let extended;
    let ideal = if ideal.max_degree() < n {
        extended = ideal.extended(n)?;
        &extended
    } else {
        ideal
    };
    let m = ideal.member(f)?;
    if m.is_member {
        return Err(Error::MemberOfIdeal {
            residual: m.residual,
        });
    }
    let (point, system) = compressed_shift(ideal, n, r)?;
    let expected = r.powi(n as i32) * norm(&system.fiber(n).project(&f.to_vector(n)));
    let fy = eval_at_point(f, &point)?;
    let value = fy.column(0).norm();
    let check = in_variety(ideal, &point, ideal.tol(), None)?;
    Ok(SeparatingPoint {
        degree: n,
        radius: r,
        value,
        expected,
        variety_residual: check.residual,
        row_norm: check.row_norm,
        point,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Largest generator residual `max_g ‖g(T)‖` accepted as a variety point.
    pub feasibility_tol: f64,
    pub penalty_start: f64,
    pub penalty_growth: f64,
    pub stages: usize,
    pub iterations: usize,
    /// Penalty-only descent steps applied when a restart ends infeasible.
    pub polish_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 32,
            seed: 0,
            feasibility_tol: 1e-8,
            penalty_start: 1.0,
            penalty_growth: 10.0,
            stages: 10,
            iterations: 150,
            polish_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarietyReport {
    pub point: MatrixPoint,
    /// `max_g ‖g(T)‖` over the generators.
    pub gen_residual: f64,
    /// `‖f(T)‖`.
    pub value: f64,
    pub row_norm: f64,
    pub restarts: usize,
    pub feasible_restarts: usize,
    pub best_restart: Option<usize>,
    pub iterations: usize,
    pub seed: u64,
    /// No restart was feasible and the zero tuple is reported.
    pub zero_fallback: bool,
}

/// Per-restart stream of the base seed.
fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, level: usize) -> MatrixPoint {
    let mut mats = Vec::with_capacity(d);
    for _ in 0..d {
        mats.push(DMatrix::from_fn(level, level, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        }));
    }
    let p = MatrixPoint { mats, level };
    let target = rng.random_range(0.3..1.0);
    let rn = p.row_norm();
    if rn > 0.0 {
        p.scaled(target / rn)
    } else {
        p
    }
}

/// `T / max(1, row_norm(T))`.
fn project_ball(t: MatrixPoint) -> MatrixPoint {
    let rn = t.row_norm();
    if rn > 1.0 {
        t.scaled(1.0 / rn)
    } else {
        t
    }
}

/// Adds `∇_T Re tr(C^* p(T))` to `grads`.
fn accumulate_gradient(
    p: &NcPoly,
    t: &MatrixPoint,
    cot: &DMatrix<C64>,
    weight: f64,
    grads: &mut [DMatrix<C64>],
) {
    let n = t.level;
    for (w, c) in p.terms() {
        let letters = w.letters();
        if letters.is_empty() {
            continue;
        }
        let k = letters.len();
        // prefix[j] = T_{w_1}⋯T_{w_j}, suffix[j] = T_{w_{j+1}}⋯T_{w_k}
        let mut prefix = Vec::with_capacity(k + 1);
        prefix.push(DMatrix::<C64>::identity(n, n));
        for &l in letters {
            let next = prefix.last().unwrap() * &t.mats[l - 1];
            prefix.push(next);
        }
        let mut suffix = vec![DMatrix::<C64>::identity(n, n); k + 1];
        for j in (0..k).rev() {
            suffix[j] = &t.mats[letters[j] - 1] * &suffix[j + 1];
        }
        let scale = c.conj() * weight;
        for j in 0..k {
            let g = prefix[j].adjoint() * cot * suffix[j + 1].adjoint();
            grads[letters[j] - 1] += g * scale;
        }
    }
}

struct Problem<'a> {
    f: &'a NcPoly,
    gens: &'a [NcPoly],
    d: usize,
    level: usize,
}

impl Problem<'_> {
    fn value(&self, t: &MatrixPoint) -> f64 {
        op_norm(&eval_at_point(self.f, t).expect("indices checked"))
    }

    fn penalty(&self, t: &MatrixPoint) -> f64 {
        self.gens
            .iter()
            .map(|g| {
                eval_at_point(g, t)
                    .expect("indices checked")
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }

    fn gen_residual(&self, t: &MatrixPoint) -> f64 {
        self.gens
            .iter()
            .map(|g| op_norm(&eval_at_point(g, t).expect("indices checked")))
            .fold(0.0, f64::max)
    }

    /// `‖f(T)‖² − μ Σ_g ‖g(T)‖_F²` (objective weight `alpha` on the first term).
    fn objective(&self, t: &MatrixPoint, mu: f64, alpha: f64) -> f64 {
        let v = if alpha == 0.0 { 0.0 } else { self.value(t) };
        alpha * v * v - mu * self.penalty(t)
    }

    fn gradient(&self, t: &MatrixPoint, mu: f64, alpha: f64) -> Vec<DMatrix<C64>> {
        let mut grads = vec![DMatrix::zeros(self.level, self.level); self.d];
        if alpha != 0.0 {
            let ft = eval_at_point(self.f, t).expect("indices checked");
            if ft.nrows() > 0 {
                let (sigma, u, v) = top_singular(&ft);
                let cot = DMatrix::from_fn(self.level, self.level, |i, j| u[i] * v[j].conj())
                    * C64::new(2.0 * sigma, 0.0);
                accumulate_gradient(self.f, t, &cot, alpha, &mut grads);
            }
        }
        for g in self.gens {
            let gt = eval_at_point(g, t).expect("indices checked");
            accumulate_gradient(g, t, &(gt * C64::new(2.0, 0.0)), -mu, &mut grads);
        }
        grads
    }

    /// Projected ascent with an adaptive step; returns the iterations used.
    fn ascend(&self, t: &mut MatrixPoint, mu: f64, alpha: f64, iters: usize, step: &mut f64) -> usize {
        let mut obj = self.objective(t, mu, alpha);
        for it in 0..iters {
            let grads = self.gradient(t, mu, alpha);
            let gnorm: f64 = grads.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
            if gnorm < 1e-300 {
                return it;
            }
            loop {
                let cand = MatrixPoint {
                    mats: t
                        .mats
                        .iter()
                        .zip(&grads)
                        .map(|(a, g)| a + g * C64::new(*step, 0.0))
                        .collect(),
                    level: t.level,
                };
                let cand = project_ball(cand);
                let cand_obj = self.objective(&cand, mu, alpha);
                if cand_obj >= obj {
                    *t = cand;
                    obj = cand_obj;
                    *step *= 1.5;
                    break;
                }
                *step *= 0.5;
                if *step < 1e-18 {
                    *step = 1e-18;
                    return it;
                }
            }
        }
        iters
    }

    fn run(&self, cfg: &SearchConfig, rng: &mut ChaCha8Rng, alpha: f64) -> (MatrixPoint, usize) {
        let mut t = random_point(rng, self.d, self.level);
        let mut mu = cfg.penalty_start;
        let mut step = 0.1;
        let mut used = 0;
        if !self.gens.is_empty() || alpha != 0.0 {
            for _ in 0..cfg.stages {
                used += self.ascend(&mut t, mu, alpha, cfg.iterations, &mut step);
                mu *= cfg.penalty_growth;
            }
        }
        if self.gen_residual(&t) > cfg.feasibility_tol && !self.gens.is_empty() {
            let mut step = 1.0 / mu.max(1.0);
            used += self.ascend(&mut t, 1.0, 0.0, cfg.polish_iterations, &mut step);
        }
        (t, used)
    }
}

fn check_inputs(ideal: &GradedIdeal, f: &NcPoly, level: usize) -> Result<()> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    if f.dim_vars() != ideal.dim_vars() {
        return Err(Error::DimensionMismatch {
            left: ideal.dim_vars(),
            right: f.dim_vars(),
        });
    }
    Ok(())
}

/// Best feasible `‖f(T)‖` found at level `n` by penalized projected ascent.
///
/// Every restart runs on its own ChaCha stream of `cfg.seed`, so the result is
/// independent of the thread count. The value is a lower bound for
/// `sup_{V_n(J)} ‖f‖`.
pub fn search_max_on_variety(
    ideal: &GradedIdeal,
    f: &NcPoly,
    level: usize,
    cfg: &SearchConfig,
) -> Result<VarietyReport> {
    check_inputs(ideal, f, level)?;
    let problem = Problem {
        f,
        gens: ideal.generators(),
        d: ideal.dim_vars(),
        level,
    };
    let runs: Vec<(MatrixPoint, usize, f64, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(cfg.seed, r);
            let (t, used) = problem.run(cfg, &mut rng, 1.0);
            let res = problem.gen_residual(&t);
            let val = problem.value(&t);
            (t, used, res, val)
        })
        .collect();
    let iterations = runs.iter().map(|r| r.1).sum();
    let feasible: Vec<usize> = (0..runs.len())
        .filter(|&k| runs[k].2 <= cfg.feasibility_tol)
        .collect();
    // max value, earliest restart on ties
    let best = feasible
        .iter()
        .copied()
        .fold(None::<usize>, |acc, k| match acc {
            Some(b) if runs[b].3 >= runs[k].3 => Some(b),
            _ => Some(k),
        });
    match best {
        Some(b) => {
            let (point, _, gen_residual, value) = runs[b].clone();
            Ok(VarietyReport {
                row_norm: point.row_norm(),
                point,
                gen_residual,
                value,
                restarts: cfg.restarts,
                feasible_restarts: feasible.len(),
                best_restart: Some(b),
                iterations,
                seed: cfg.seed,
                zero_fallback: false,
            })
        }
        None => {
            let zero = MatrixPoint::zeros(ideal.dim_vars(), level);
            let gen_residual = problem.gen_residual(&zero);
            if gen_residual > cfg.feasibility_tol {
                return Err(Error::NoFeasiblePoint {
                    restarts: cfg.restarts,
                });
            }
            Ok(VarietyReport {
                value: problem.value(&zero),
                row_norm: 0.0,
                point: zero,
                gen_residual,
                restarts: cfg.restarts,
                feasible_restarts: 0,
                best_restart: None,
                iterations,
                seed: cfg.seed,
                zero_fallback: true,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarietySample {
    pub restart: usize,
    pub point: MatrixPoint,
    pub gen_residual: f64,
    pub row_norm: f64,
    pub feasible: bool,
}

/// Random points of `V_n(J)`: random starts of the ball pushed onto the
/// generator zero set by penalty descent.
pub fn sample_variety(ideal: &GradedIdeal, level: usize, cfg: &SearchConfig) -> Result<Vec<VarietySample>> {
    let zero = NcPoly::zero(ideal.dim_vars());
    check_inputs(ideal, &zero, level)?;
    let problem = Problem {
        f: &zero,
        gens: ideal.generators(),
        d: ideal.dim_vars(),
        level,
    };
    Ok((0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(cfg.seed, r);
            let (t, _) = problem.run(cfg, &mut rng, 0.0);
            let gen_residual = problem.gen_residual(&t);
            VarietySample {
                restart: r,
                row_norm: t.row_norm(),
                feasible: gen_residual <= cfg.feasibility_tol,
                point: t,
                gen_residual,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::IdealConfig;
    use crate::linalg::{max_abs, ZERO};
    use crate::polyparse::parse_poly;

    fn m(rows: &[&[f64]]) -> DMatrix<C64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| C64::new(rows[i][j], 0.0))
    }

    fn ideal(d: usize, gens: &[&str], n: usize) -> GradedIdeal {
        let gens: Vec<NcPoly> = gens.iter().map(|g| parse_poly(g, d).unwrap()).collect();
        GradedIdeal::generated(d, &gens, n, IdealConfig::default()).unwrap()
    }

    #[test]
    fn row_norm_examples() {
        assert_eq!(MatrixPoint::zeros(3, 2).row_norm(), 0.0);
        let p = MatrixPoint::new(vec![m(&[&[0.0, 1.0], &[0.0, 0.0]])]).unwrap();
        assert!((p.row_norm() - 1.0).abs() < 1e-14);
        let s = 0.5f64.sqrt();
        let q = MatrixPoint::new(vec![m(&[&[s]]), m(&[&[s]])]).unwrap();
        assert!((q.row_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evaluation_examples() {
        let comm = parse_poly("z1*z2 - z2*z1", 2).unwrap();
        let p = MatrixPoint::new(vec![m(&[&[0.3]]), m(&[&[-0.7]])]).unwrap();
        assert_eq!(eval_at_point(&comm, &p).unwrap()[(0, 0)], ZERO);

        let f = parse_poly("0.5*z1^2 + 0.25*z2^2 + 0.125*z3^2", 3).unwrap();
        let nil = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let t = MatrixPoint::new(vec![
            &nil * C64::new(0.5, 0.0),
            &nil * C64::new(0.0, 0.5),
            &nil * C64::new(0.1, 0.0),
        ])
        .unwrap();
        assert_eq!(max_abs(&eval_at_point(&f, &t).unwrap()), 0.0);
        assert!(matches!(
            eval_at_point(&f, &MatrixPoint::zeros(2, 2)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn padding() {
        let t = MatrixPoint::new(vec![m(&[&[0.0, 0.5], &[0.25, 0.0]])]).unwrap();
        assert_eq!(zero_pad_extend(&t, 1).unwrap(), t);
        let padded = zero_pad_extend(&t, 3).unwrap();
        assert_eq!(padded.row_norm(), t.row_norm());
        let z3 = parse_poly("z3", 3).unwrap();
        assert_eq!(max_abs(&eval_at_point(&z3, &padded).unwrap()), 0.0);
        let z1sq = parse_poly("z1^2", 1).unwrap();
        assert_eq!(
            eval_at_point(&z1sq.with_dim_vars(3).unwrap(), &padded).unwrap(),
            eval_at_point(&z1sq, &t).unwrap()
        );
        assert!(zero_pad_extend(&padded, 2).is_err());
        // monomial ideal with a new-variable word: padded point stays inside
        let j = ideal(3, &["z1*z3", "z3^2"], 3);
        assert!(in_variety(&j, &padded, 1e-12, None).unwrap().member);
    }

    #[test]
    fn variety_membership_examples() {
        let zero = GradedIdeal::zero(2, 3).unwrap();
        let p = MatrixPoint::new(vec![m(&[&[0.6, 0.0], &[0.1, 0.2]]), m(&[&[0.0, 0.3], &[0.5, 0.1]])])
            .unwrap();
        assert!(in_variety(&zero, &p, 1e-12, None).unwrap().member);

        let comm = ideal(2, &["z1*z2 - z2*z1"], 4);
        let a = m(&[&[0.5, 0.2], &[0.0, 0.1]]);
        let b = &a * &a * C64::new(0.5, 0.0);
        let q = MatrixPoint::new(vec![a, b]).unwrap();
        let c = in_variety(&comm, &q, 1e-12, None).unwrap();
        assert!(c.member, "{c:?}");
        assert!(!in_variety(&comm, &p, 1e-12, None).unwrap().member);

        // outside the ball
        let big = MatrixPoint::new(vec![m(&[&[2.0]]), m(&[&[0.0]])]).unwrap();
        assert!(!in_variety(&zero, &big, 1e-12, None).unwrap().member);
    }

    #[test]
    fn separating_point_examples() {
        let comm = ideal(2, &["z1*z2 - z2*z1"], 4);
        let sp = separating_point(&comm, &parse_poly("z1*z2", 2).unwrap(), 0.5).unwrap();
        assert_eq!(sp.point.level(), 6);
        assert!((sp.value - 0.25 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((sp.value - 0.1767767).abs() < 1e-7);
        assert!(sp.variety_residual <= 1e-10);
        assert!(sp.row_norm <= 0.5 + 1e-12);

        let zero = GradedIdeal::zero(2, 2).unwrap();
        let sp = separating_point(&zero, &parse_poly("z1", 2).unwrap(), 0.5).unwrap();
        assert_eq!(sp.point.level(), 3);
        assert!((sp.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn separating_point_errors() {
        let comm = ideal(2, &["z1*z2 - z2*z1"], 3);
        assert!(matches!(
            separating_point(&comm, &parse_poly("z1*z2 - z2*z1", 2).unwrap(), 0.5),
            Err(Error::MemberOfIdeal { .. })
        ));
        assert!(matches!(
            separating_point(&comm, &parse_poly("z1 + z1*z2", 2).unwrap(), 0.5),
            Err(Error::NonHomogeneous)
        ));
        assert!(separating_point(&comm, &parse_poly("z1", 2).unwrap(), 1.0).is_err());
    }

    #[test]
    fn search_on_the_scalar_disc() {
        let zero = GradedIdeal::zero(1, 2).unwrap();
        let cfg = SearchConfig {
            restarts: 4,
            seed: 3,
            ..SearchConfig::default()
        };
        let r = search_max_on_variety(&zero, &parse_poly("z1", 1).unwrap(), 1, &cfg).unwrap();
        assert!(r.value > 1.0 - 1e-9, "{}", r.value);
        assert!(r.row_norm <= 1.0 + 1e-12);
    }

    #[test]
    fn search_commuting_pairs() {
        let comm = ideal(2, &["z1*z2 - z2*z1"], 3);
        let cfg = SearchConfig {
            restarts: 4,
            seed: 11,
            ..SearchConfig::default()
        };
        let r = search_max_on_variety(&comm, &parse_poly("z1", 2).unwrap(), 2, &cfg).unwrap();
        assert!(r.gen_residual <= cfg.feasibility_tol);
        assert!(r.value > 0.999, "{r:?}");
    }

    #[test]
    fn search_is_deterministic() {
        let comm = ideal(2, &["z1*z2 - z2*z1"], 3);
        let cfg = SearchConfig {
            restarts: 3,
            seed: 5,
            stages: 3,
            iterations: 20,
            ..SearchConfig::default()
        };
        let f = parse_poly("z1*z2 + z2", 2).unwrap();
        let a = search_max_on_variety(&comm, &f, 2, &cfg).unwrap();
        let b = search_max_on_variety(&comm, &f, 2, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_constants_are_reported() {
        let whole = ideal(1, &["1"], 1);
        let cfg = SearchConfig {
            restarts: 2,
            stages: 1,
            iterations: 2,
            polish_iterations: 2,
            ..SearchConfig::default()
        };
        assert!(matches!(
            search_max_on_variety(&whole, &parse_poly("z1", 1).unwrap(), 1, &cfg),
            Err(Error::NoFeasiblePoint { restarts: 2 })
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = parse_poly("z1*z2 - 0.5i*z2*z1*z1 + z2", 2).unwrap();
        let gens = vec![parse_poly("z1*z1 - z2*z2", 2).unwrap()];
        let mut rng = restart_rng(9, 0);
        let t = random_point(&mut rng, 2, 3);
        let problem = Problem {
            f: &f,
            gens: &gens,
            d: 2,
            level: 3,
        };
        let mu = 0.7;
        let grads = problem.gradient(&t, mu, 1.0);
        let h = 1e-6;
        for (i, grad) in grads.iter().enumerate() {
            for (a, b) in [(0, 0), (1, 2), (2, 1)] {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut plus = t.clone();
                    plus.mats[i][(a, b)] += dir * h;
                    let mut minus = t.clone();
                    minus.mats[i][(a, b)] -= dir * h;
                    let fd = (problem.objective(&plus, mu, 1.0) - problem.objective(&minus, mu, 1.0))
                        / (2.0 * h);
                    // dφ = Re(conj(G) · dir)
                    let an = (grad[(a, b)].conj() * dir).re;
                    assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "fd {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn point_json_roundtrip() {
        let p = MatrixPoint::new(vec![
            DMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, -(j as f64))),
            DMatrix::zeros(2, 2),
        ])
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with("{\"level\":2,\"mats\":[[[[0.0,-0.0],[0.0,-1.0]]"));
        let back: MatrixPoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<MatrixPoint>("{\"level\":2,\"mats\":[[[[0,0]]]]}").is_err());
    }
}
