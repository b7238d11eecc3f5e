//! Scripted scenarios: the truncated counterexample ideal, the gap between
//! the Fock norm and the bounded-level variety sup, and Nullstellensatz
//! witnesses.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockTruncation;
use crate::ideal::{GradedIdeal, IdealConfig};
use crate::linalg::{norm, op_norm, Subspace, C64};
use crate::ncpoly::{NcPoly, Word};
use crate::ncvariety::{
    compressed_shift, eval_at_point, sample_variety, search_max_on_variety, MatrixPoint,
    SearchConfig,
};
use crate::subproduct::SubproductSystem;
use crate::VERSION;

/// `f_d = Σ_{k ≤ d} 2^{-k} z_k²`.
pub fn counterexample_poly(d: usize) -> NcPoly {
    let terms = (1..=d).map(|k| (Word::new(vec![k, k]), C64::new(0.5f64.powi(k as i32), 0.0)));
    NcPoly::from_terms(d, terms).expect("letters are in range")
}

/// Closed form `‖f_d‖ = sqrt((1 − 4^{-d}) / 3)`.
pub fn counterexample_norm(d: usize) -> f64 {
    ((1.0 - 0.25f64.powi(d as i32)) / 3.0).sqrt()
}

/// The ideal with `J_0 = J_1 = 0` and `J_2 = (ℂ f_d)^⊥`.
pub fn counterexample_ideal(d: usize, max_degree: usize) -> Result<GradedIdeal> {
    if d < 2 {
        return Err(Error::InvalidArgument("the counterexample needs d >= 2".into()));
    }
    let cfg = IdealConfig::default();
    let f = counterexample_poly(d).to_vector(2);
    let j2 = Subspace::span(d * d, [f.as_slice()], cfg.tol).complement();
    let components = vec![Subspace::zero(1), Subspace::zero(d), j2];
    GradedIdeal::from_components(d, components, max_degree.max(2), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub residual: f64,
    pub member: bool,
}

/// Membership of `z_i z_j` (`i ≠ j`) and `2 z_{k+1}² − z_k²`.
pub fn relation_residuals(ideal: &GradedIdeal) -> Result<Vec<RelationCheck>> {
    let d = ideal.dim_vars();
    let mut out = Vec::new();
    let mut check = |p: NcPoly| -> Result<()> {
        let m = ideal.member(&p)?;
        out.push(RelationCheck {
            relation: p.to_string(),
            residual: m.residual,
            member: m.is_member,
        });
        Ok(())
    };
    for i in 1..=d {
        for j in 1..=d {
            if i != j {
                check(NcPoly::monomial(d, Word::new(vec![i, j]), C64::new(1.0, 0.0)))?;
            }
        }
    }
    for k in 1..d {
        let a = NcPoly::monomial(d, Word::new(vec![k + 1, k + 1]), C64::new(2.0, 0.0));
        let b = NcPoly::monomial(d, Word::new(vec![k, k]), C64::new(1.0, 0.0));
        check(a.checked_sub(&b)?)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub d: usize,
    pub level: usize,
    pub fock_value: f64,
    pub fock_exact: bool,
    pub variety_value: f64,
    pub gap: f64,
    pub gen_residual: f64,
    pub feasible_restarts: usize,
    pub zero_fallback: bool,
    pub seed: u64,
    pub config: SearchConfig,
    /// `d > level²`.
    pub regime_guaranteed: bool,
    pub version: String,
    pub runtime_ms: u128,
}

/// `‖f_d(S)‖` at truncation degree 3 against the best search value on
/// `V_level(J)`.
pub fn rfd_gap(d: usize, level: usize, cfg: &SearchConfig) -> Result<GapReport> {
    let start = Instant::now();
    let ideal = counterexample_ideal(d, 3)?;
    let f = counterexample_poly(d);
    let fock = FockTruncation::new(SubproductSystem::from_ideal(&ideal, 3)?);
    let fock_norm = fock.fock_norm_lower_bound(&f)?;
    let search = search_max_on_variety(&ideal, &f, level, cfg)?;
    Ok(GapReport {
        d,
        level,
        fock_value: fock_norm.value,
        fock_exact: fock_norm.exact,
        variety_value: search.value,
        gap: fock_norm.value - search.value,
        gen_residual: search.gen_residual,
        feasible_restarts: search.feasible_restarts,
        zero_fallback: search.zero_fallback,
        seed: cfg.seed,
        config: *cfg,
        regime_guaranteed: d > level * level,
        version: VERSION.to_string(),
        runtime_ms: start.elapsed().as_millis(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub f: NcPoly,
    /// `‖f(Y) 1‖`.
    pub value: f64,
    /// `r^n ‖p_n f‖`.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSet {
    pub degree: usize,
    pub radius: f64,
    /// The common compression point; it separates every listed `f`.
    pub point: MatrixPoint,
    pub variety_residual: f64,
    pub row_norm: f64,
    pub witnesses: Vec<Witness>,
}

/// A separating point for every basis element of `X_n`.
pub fn nullstellensatz_witnesses(ideal: &GradedIdeal, n: usize, r: f64) -> Result<WitnessSet> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")));
    }
    let ideal = ideal.extended(n.max(ideal.max_degree()))?;
    let (point, system) = compressed_shift(&ideal, n, r)?;
    let check = crate::ncvariety::in_variety(&ideal, &point, ideal.tol(), None)?;
    let d = ideal.dim_vars();
    let rn = r.powi(n as i32);
    let mut witnesses = Vec::with_capacity(system.fiber(n).dim());
    for b in system.fiber(n).vectors() {
        let f = NcPoly::from_vector(d, n, &b);
        let value = eval_at_point(&f, &point)?.column(0).norm();
        witnesses.push(Witness {
            expected: rn * norm(&b),
            value,
            f,
        });
    }
    Ok(WitnessSet {
        degree: n,
        radius: r,
        variety_residual: check.residual,
        row_norm: check.row_norm,
        point,
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeReport {
    pub d: usize,
    pub level: usize,
    pub samples: usize,
    /// Largest observed `max_k ‖T_k²‖ / δ` over samples with `δ > 0`.
    pub constant: f64,
    pub max_gen_residual: f64,
    pub max_square_norm: f64,
}

/// Empirical constant `C` in `max_k ‖T_k²‖ ≤ C δ` for approximate points of
/// the counterexample variety with generator residual `δ`.
pub fn nilpotency_cascade(d: usize, level: usize, cfg: &SearchConfig) -> Result<CascadeReport> {
    let ideal = counterexample_ideal(d, 2)?;
    let samples = sample_variety(&ideal, level, cfg)?;
    let mut constant: f64 = 0.0;
    let mut max_gen: f64 = 0.0;
    let mut max_sq: f64 = 0.0;
    for s in &samples {
        let sq = s
            .point
            .mats()
            .iter()
            .map(|t| op_norm(&(t * t)))
            .fold(0.0, f64::max);
        max_gen = max_gen.max(s.gen_residual);
        max_sq = max_sq.max(sq);
        if s.gen_residual > 0.0 {
            constant = constant.max(sq / s.gen_residual);
        }
    }
    Ok(CascadeReport {
        d,
        level,
        samples: samples.len(),
        constant,
        max_gen_residual: max_gen,
        max_square_norm: max_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_shapes() {
        let j = counterexample_ideal(2, 3).unwrap();
        assert_eq!(j.dims(), vec![0, 0, 3, 8]);
        let x = SubproductSystem::from_ideal(&counterexample_ideal(3, 3).unwrap(), 3).unwrap();
        assert_eq!(x.dims(), vec![1, 3, 1, 0]);
        assert!(counterexample_ideal(1, 3).is_err());
    }

    #[test]
    fn relations_hold() {
        let j = counterexample_ideal(5, 2).unwrap();
        let rel = relation_residuals(&j).unwrap();
        assert_eq!(rel.len(), 20 + 4);
        assert!(rel.iter().all(|r| r.member && r.residual <= 1e-12));
        // f itself is not a member
        assert!(!j.member(&counterexample_poly(5)).unwrap().is_member);
    }

    #[test]
    fn closed_form_norm() {
        for d in 2..=6 {
            assert!((counterexample_poly(d).fock_norm() - counterexample_norm(d)).abs() < 1e-15);
        }
        assert!((counterexample_norm(2) - 0.5590170).abs() < 1e-7);
        assert!((counterexample_norm(5) - 0.5770683).abs() < 1e-7);
    }

    #[test]
    fn witnesses_for_a_monomial_ideal() {
        let d = 2;
        let g = NcPoly::monomial(d, Word::new(vec![1, 2]), C64::new(1.0, 0.0));
        let j = GradedIdeal::generated(d, &[g], 3, IdealConfig::default()).unwrap();
        let w = nullstellensatz_witnesses(&j, 3, 0.8).unwrap();
        assert_eq!(w.witnesses.len(), 4);
        assert!(w.variety_residual <= 1e-10);
        for x in &w.witnesses {
            assert!((x.value - 0.512).abs() < 1e-10, "{}", x.value);
        }
    }

    #[test]
    fn witnesses_zero_ideal() {
        let j = GradedIdeal::zero(3, 1).unwrap();
        let w = nullstellensatz_witnesses(&j, 2, 0.5).unwrap();
        assert_eq!(w.witnesses.len(), 9);
        assert!(w.witnesses.iter().all(|x| (x.value - 0.25).abs() < 1e-12));
    }
}
