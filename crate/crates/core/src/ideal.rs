//! Graded components of two-sided homogeneous ideals.
//!
//! `J_n` is built from `J_{n-1}` by
//! `J_n = span(H ⊗ J_{n-1} ∪ J_{n-1} ⊗ H ∪ G_n)` where `G_n` are the
//! generators of degree `n`. In fixed degree these spans are finite
//! dimensional, so they are closed and coincide with the degree-`n` part of
//! the norm-closed ideal.

use serde::Serialize;
use crate::error::{Error, Result};
use crate::linalg::{kron, unit_vector, Subspace, C64};
use crate::ncpoly::NcPoly;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealConfig {
    /// Rank tolerance of the Gram–Schmidt drops and of membership decisions.
    pub tol: f64,
    /// Largest admissible `d^n`.
    pub dimension_cap: usize,
}

impl Default for IdealConfig {
    fn default() -> Self {
        IdealConfig {
            tol: DEFAULT_TOL,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

/// Result of an ideal-membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub is_member: bool,
    /// Fock norm of `f` minus its projection onto `⊕ J_n`.
    pub residual: f64,
}

/// Splits every polynomial into its nonzero homogeneous components.
pub fn homogenize_generators(gens: &[NcPoly]) -> Vec<NcPoly> {
    gens.iter()
        .flat_map(|g| g.homogeneous_decomposition().parts)
        .filter(|p| !p.is_zero())
        .collect()
}

pub(crate) fn coords(d: usize, n: usize, cap: usize) -> Result<usize> {
    let coords = (d as u128).pow(n as u32);
    if coords > cap as u128 {
        return Err(Error::DimensionCap {
            degree: n,
            coords: usize::try_from(coords).unwrap_or(usize::MAX),
            cap,
        });
    }
    Ok(coords as usize)
}

/// Homogeneous ideal truncated at `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedIdeal {
    dim_vars: usize,
    generators: Vec<NcPoly>,
    components: Vec<Subspace>,
    config: IdealConfig,
}

impl GradedIdeal {
    /// The ideal generated by `gens`, with components up to `max_degree`.
    /// Non-homogeneous generators are replaced by their homogeneous parts.
    pub fn generated(
        dim_vars: usize,
        gens: &[NcPoly],
        max_degree: usize,
        config: IdealConfig,
    ) -> Result<Self> {
        if dim_vars == 0 {
            return Err(Error::InvalidArgument("dim_vars must be positive".into()));
        }
        for g in gens {
            if g.dim_vars() != dim_vars {
                return Err(Error::DimensionMismatch {
                    left: dim_vars,
                    right: g.dim_vars(),
                });
            }
        }
        let mut ideal = GradedIdeal {
            dim_vars,
            generators: homogenize_generators(gens),
            components: Vec::new(),
            config,
        };
        ideal.extend_to(max_degree)?;
        Ok(ideal)
    }

    pub fn zero(dim_vars: usize, max_degree: usize) -> Result<Self> {
        GradedIdeal::generated(dim_vars, &[], max_degree, IdealConfig::default())
    }

    /// Ideal with prescribed low-degree components; the higher ones follow from
    /// the recurrence. `components[n]` must already be closed under the
    /// two-sided action from lower degrees. The generators are recovered as
    /// the parts of each component not produced from below.
    pub fn from_components(
        dim_vars: usize,
        components: Vec<Subspace>,
        max_degree: usize,
        config: IdealConfig,
    ) -> Result<Self> {
        for (n, c) in components.iter().enumerate() {
            let amb = coords(dim_vars, n, config.dimension_cap)?;
            if c.ambient() != amb {
                return Err(Error::ShapeMismatch(format!(
                    "component {n} lives in dimension {}, expected {amb}",
                    c.ambient()
                )));
            }
        }
        let mut generators = Vec::new();
        for n in 0..components.len() {
            let from_below = if n == 0 {
                Subspace::zero(1)
            } else {
                lift(dim_vars, &components[n - 1], config.tol)
            };
            // new directions: J_n ⊖ (H ⊗ J_{n-1} + J_{n-1} ⊗ H)
            let mut extended = from_below.clone();
            for v in components[n].vectors() {
                extended.try_insert(&v, config.tol);
            }
            for k in from_below.dim()..extended.dim() {
                generators.push(NcPoly::from_vector(dim_vars, n, &extended.vector(k)));
            }
        }
        let mut ideal = GradedIdeal {
            dim_vars,
            generators,
            components,
            config,
        };
        ideal.extend_to(max_degree)?;
        ideal.components.truncate(max_degree + 1);
        Ok(ideal)
    }

    /// Computes components up to degree `max_degree` (no-op if present).
    pub fn extend_to(&mut self, max_degree: usize) -> Result<()> {
        let d = self.dim_vars;
        for n in self.components.len()..=max_degree {
            let amb = coords(d, n, self.config.dimension_cap)?;
            let gens: Vec<Vec<C64>> = self
                .generators
                .iter()
                .filter(|g| g.degree() == Some(n))
                .map(|g| g.to_vector(n))
                .collect();
            let next = if n == 0 {
                let mut s = Subspace::zero(1);
                for g in &gens {
                    s.try_insert(g, self.config.tol);
                }
                s.compact();
                s
            } else {
                let mut s = lift(d, &self.components[n - 1], self.config.tol);
                for g in &gens {
                    if s.is_full() {
                        break;
                    }
                    s.try_insert(g, self.config.tol);
                }
                s.compact();
                s
            };
            debug_assert_eq!(next.ambient(), amb);
            self.components.push(next);
        }
        Ok(())
    }

    /// Copy with components up to `max_degree`.
    pub fn extended(&self, max_degree: usize) -> Result<Self> {
        let mut out = self.clone();
        if max_degree + 1 < out.components.len() {
            out.components.truncate(max_degree + 1);
        } else {
            out.extend_to(max_degree)?;
        }
        Ok(out)
    }

    pub fn dim_vars(&self) -> usize {
        self.dim_vars
    }

    pub fn max_degree(&self) -> usize {
        self.components.len() - 1
    }

    pub fn tol(&self) -> f64 {
        self.config.tol
    }

    pub fn config(&self) -> IdealConfig {
        self.config
    }

    /// Homogeneous generators.
    pub fn generators(&self) -> &[NcPoly] {
        &self.generators
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generators
            .iter()
            .filter_map(NcPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// Orthonormal basis of `J_n`.
    pub fn graded_component(&self, n: usize) -> Result<&Subspace> {
        self.components.get(n).ok_or(Error::DegreeOverflow {
            degree: n,
            max_degree: self.max_degree(),
        })
    }

    pub fn components(&self) -> &[Subspace] {
        &self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Subspace::dim).collect()
    }

    /// Projection residual of `f` against `⊕_n J_n`.
    pub fn member(&self, f: &NcPoly) -> Result<Membership> {
        if f.dim_vars() != self.dim_vars {
            return Err(Error::DimensionMismatch {
                left: self.dim_vars,
                right: f.dim_vars(),
            });
        }
        let top = f.degree().unwrap_or(0);
        if top > self.max_degree() {
            return Err(Error::DegreeOverflow {
                degree: top,
                max_degree: self.max_degree(),
            });
        }
        let mut res2 = 0.0;
        for n in 0..=top {
            let part = f.homogeneous_component(n);
            if part.is_zero() {
                continue;
            }
            res2 += self.components[n].residual(&part.to_vector(n)).powi(2);
        }
        let residual = res2.sqrt();
        Ok(Membership {
            is_member: residual <= self.config.tol * f.fock_norm().max(1.0),
            residual,
        })
    }

    /// Largest residual of `z_i J_n` and `J_n z_i` against `J_{n+1}`.
    pub fn ideal_property_defect(&self) -> f64 {
        let d = self.dim_vars;
        let mut worst: f64 = 0.0;
        for n in 0..self.max_degree() {
            let next = &self.components[n + 1];
            for v in self.components[n].vectors() {
                for i in 0..d {
                    let e = unit_vector(d, i);
                    worst = worst.max(next.residual(&kron(&e, &v)));
                    worst = worst.max(next.residual(&kron(&v, &e)));
                }
            }
        }
        worst
    }
}

/// `span(H ⊗ S ∪ S ⊗ H)` inside `ℂ^{d·ambient(S)}`.
///
/// The family `e_i ⊗ b` is already orthonormal and is stored without
/// Gram–Schmidt; only `b ⊗ e_i` go through the rank decision.
fn lift(d: usize, s: &Subspace, tol: f64) -> Subspace {
    let amb = s.ambient() * d;
    if s.is_full() {
        return Subspace::full(amb);
    }
    let mut out = Subspace::zero(amb);
    for i in 0..d {
        let e = unit_vector(d, i);
        for b in s.vectors() {
            out.push_orthonormal(kron(&e, &b));
        }
    }
    for b in s.vectors() {
        for i in 0..d {
            if out.is_full() {
                break;
            }
            let e = unit_vector(d, i);
            out.try_insert(&kron(&b, &e), tol);
        }
    }
    out.compact();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::parse_poly;

    fn ideal(d: usize, gens: &[&str], n: usize) -> GradedIdeal {
        let gens: Vec<NcPoly> = gens.iter().map(|g| parse_poly(g, d).unwrap()).collect();
        GradedIdeal::generated(d, &gens, n, IdealConfig::default()).unwrap()
    }

    #[test]
    fn homogenize_examples() {
        let f = parse_poly("z1 + z1*z2", 2).unwrap();
        let parts = homogenize_generators(&[f]);
        assert_eq!(
            parts,
            vec![parse_poly("z1", 2).unwrap(), parse_poly("z1*z2", 2).unwrap()]
        );
        let g = parse_poly("z1*z2 - z2*z1", 2).unwrap();
        assert_eq!(homogenize_generators(std::slice::from_ref(&g)), vec![g]);
        assert!(homogenize_generators(&[]).is_empty());
    }

    #[test]
    fn commutator_ideal_dims() {
        let j = ideal(2, &["z1*z2 - z2*z1"], 5);
        assert_eq!(j.dims(), vec![0, 0, 1, 4, 11, 26]);
        for c in j.components() {
            assert!(c.gram_defect() < 1e-12);
        }
        assert!(j.ideal_property_defect() < 1e-10);
    }

    #[test]
    fn zero_ideal_is_empty() {
        let j = GradedIdeal::zero(3, 4).unwrap();
        assert!(j.dims().iter().all(|&k| k == 0));
    }

    #[test]
    fn membership() {
        let j = ideal(2, &["z1*z2 - z2*z1"], 4);
        let f = parse_poly("z1*z2*z2 - z2*z2*z1", 2).unwrap();
        let m = j.member(&f).unwrap();
        assert!(m.is_member, "residual {}", m.residual);
        let g = parse_poly("z1*z2", 2).unwrap();
        let m = j.member(&g).unwrap();
        assert!(!m.is_member);
        // distance from e12 to span(e12 - e21) is 1/sqrt(2)
        assert!((m.residual - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            j.member(&parse_poly("z1^5", 2).unwrap()),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn constants_fill_everything() {
        let j = ideal(2, &["1 + z1"], 3);
        assert_eq!(j.dims(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let cfg = IdealConfig {
            dimension_cap: 100,
            ..IdealConfig::default()
        };
        let err = GradedIdeal::generated(3, &[], 5, cfg).unwrap_err();
        assert!(matches!(err, Error::DimensionCap { degree: 5, coords: 243, cap: 100 }));
    }

    #[test]
    fn generators_recovered_from_components() {
        let j = ideal(2, &["z1*z2"], 4);
        let rebuilt =
            GradedIdeal::from_components(2, j.components().to_vec(), 4, IdealConfig::default())
                .unwrap();
        assert_eq!(rebuilt.generators().len(), 1);
        assert_eq!(rebuilt.dims(), j.dims());
    }
}
