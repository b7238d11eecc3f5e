//! Free noncommutative polynomials in `z_1, …, z_d`.
//!
//! Words are ordered graded-lexicographically (length first, then letters),
//! which fixes every vectorization in the crate: the degree-`n` part of a
//! polynomial is a vector in `ℂ^{d^n}` whose coordinate for `z_{w_1}⋯z_{w_n}`
//! sits at index `Σ_j (w_j − 1) d^{n−j}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// A word in the letters `1..=d`; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        debug_assert!(letters.iter().all(|&l| l >= 1));
        Word(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Position of the word among the `d^n` words of its length.
    pub fn index(&self, d: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * d + (l - 1))
    }

    pub fn from_index(len: usize, mut index: usize, d: usize) -> Word {
        let mut letters = vec![0; len];
        for slot in letters.iter_mut().rev() {
            *slot = index % d + 1;
            index /= d;
        }
        Word(letters)
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == l {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if run == 1 {
                write!(f, "z{l}")?;
            } else {
                write!(f, "z{l}^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Sparse complex combination of words.
#[derive(Debug, Clone, PartialEq)]
pub struct NcPoly {
    dim_vars: usize,
    terms: BTreeMap<Word, C64>,
}

impl NcPoly {
    pub fn zero(dim_vars: usize) -> Self {
        NcPoly {
            dim_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim_vars: usize) -> Self {
        NcPoly::constant(dim_vars, ONE)
    }

    pub fn constant(dim_vars: usize, c: C64) -> Self {
        NcPoly::monomial(dim_vars, Word::empty(), c)
    }

    /// The variable `z_i` (1-based).
    pub fn var(dim_vars: usize, i: usize) -> Result<Self> {
        if i == 0 || i > dim_vars {
            return Err(Error::IndexOutOfRange { index: i, dim_vars });
        }
        Ok(NcPoly::monomial(dim_vars, Word(vec![i]), ONE))
    }

    /// Panics if a letter exceeds `dim_vars`; use [`NcPoly::from_terms`] for checked input.
    pub fn monomial(dim_vars: usize, word: Word, coeff: C64) -> Self {
        assert!(word.max_letter() <= dim_vars, "letter out of range");
        let mut terms = BTreeMap::new();
        if coeff != ZERO {
            terms.insert(word, coeff);
        }
        NcPoly { dim_vars, terms }
    }

    /// Sums repeated words and drops exact zeros.
    pub fn from_terms<I>(dim_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, C64)>,
    {
        let mut map: BTreeMap<Word, C64> = BTreeMap::new();
        for (w, c) in terms {
            if let Some(&bad) = w.letters().iter().find(|&&l| l == 0 || l > dim_vars) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    dim_vars,
                });
            }
            *map.entry(w).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        Ok(NcPoly {
            dim_vars,
            terms: map,
        })
    }

    /// The degree-`n` polynomial with coordinate vector `v ∈ ℂ^{d^n}`.
    pub fn from_vector(dim_vars: usize, n: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), dim_vars.pow(n as u32), "vector length is not d^n");
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| (Word::from_index(n, k, dim_vars), *c))
            .collect();
        NcPoly { dim_vars, terms }
    }

    pub fn dim_vars(&self) -> usize {
        self.dim_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or(ZERO)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn max_letter(&self) -> usize {
        self.terms.keys().map(Word::max_letter).max().unwrap_or(0)
    }

    fn check_dims(&self, other: &NcPoly) -> Result<()> {
        if self.dim_vars != other.dim_vars {
            return Err(Error::DimensionMismatch {
                left: self.dim_vars,
                right: other.dim_vars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_dims(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            *terms.entry(w.clone()).or_insert(ZERO) += c;
        }
        terms.retain(|_, c| *c != ZERO);
        Ok(NcPoly {
            dim_vars: self.dim_vars,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.checked_add(&other.scale(-ONE))
    }

    /// Concatenation product.
    pub fn checked_mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_dims(other)?;
        let mut terms: BTreeMap<Word, C64> = BTreeMap::new();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                *terms.entry(u.concat(v)).or_insert(ZERO) += a * b;
            }
        }
        terms.retain(|_, c| *c != ZERO);
        Ok(NcPoly {
            dim_vars: self.dim_vars,
            terms,
        })
    }

    pub fn scale(&self, s: C64) -> NcPoly {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            let v = c * s;
            if v != ZERO {
                terms.insert(w.clone(), v);
            }
        }
        NcPoly {
            dim_vars: self.dim_vars,
            terms,
        }
    }

    pub fn pow(&self, k: usize) -> NcPoly {
        let mut acc = NcPoly::one(self.dim_vars);
        for _ in 0..k {
            acc = acc.checked_mul(self).expect("same dimension");
        }
        acc
    }

    /// Reinterprets the polynomial over `d_new ≥ max letter` variables.
    pub fn with_dim_vars(&self, d_new: usize) -> Result<NcPoly> {
        if self.max_letter() > d_new {
            return Err(Error::IndexOutOfRange {
                index: self.max_letter(),
                dim_vars: d_new,
            });
        }
        Ok(NcPoly {
            dim_vars: d_new,
            terms: self.terms.clone(),
        })
    }

    pub fn homogeneous_component(&self, n: usize) -> NcPoly {
        NcPoly {
            dim_vars: self.dim_vars,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == n)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    pub fn homogeneous_decomposition(&self) -> HomDecomposition {
        let top = self.degree().unwrap_or(0);
        HomDecomposition {
            parts: (0..=top).map(|n| self.homogeneous_component(n)).collect(),
        }
    }

    /// `Σ_w a_w conj(b_w)`.
    pub fn fock_inner(&self, other: &NcPoly) -> Result<C64> {
        self.check_dims(other)?;
        let mut acc = ZERO;
        for (w, a) in &self.terms {
            if let Some(b) = other.terms.get(w) {
                acc += a * b.conj();
            }
        }
        Ok(acc)
    }

    pub fn fock_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coordinate vector of the degree-`n` component in `ℂ^{d^n}`.
    pub fn to_vector(&self, n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.dim_vars.pow(n as u32)];
        for (w, c) in self.terms.iter().filter(|(w, _)| w.len() == n) {
            v[w.index(self.dim_vars)] = *c;
        }
        v
    }

    /// `∂_i f`: the polynomial `g` with `f = c_∅ + Σ_i z_i ∂_i f`.
    pub fn left_quotient(&self, i: usize) -> NcPoly {
        NcPoly {
            dim_vars: self.dim_vars,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.letters().first() == Some(&i))
                .map(|(w, c)| (Word(w.letters()[1..].to_vec()), *c))
                .collect(),
        }
    }

    /// `f(A_1, …, A_d)` for square matrices of size `size`, evaluated by nested
    /// left factoring `f = c_∅ I + Σ_i A_i (∂_i f)(A)`.
    pub fn eval_matrices(&self, mats: &[DMatrix<C64>], size: usize) -> Result<DMatrix<C64>> {
        let top = self.max_letter();
        if top > mats.len() {
            return Err(Error::IndexOutOfRange {
                index: top,
                dim_vars: mats.len(),
            });
        }
        Ok(self.eval_rec(mats, size))
    }

    fn eval_rec(&self, mats: &[DMatrix<C64>], size: usize) -> DMatrix<C64> {
        let mut out = DMatrix::identity(size, size) * self.coeff(&Word::empty());
        let firsts: BTreeSet<usize> = self
            .terms
            .keys()
            .filter_map(|w| w.letters().first().copied())
            .collect();
        for i in firsts {
            let q = self.left_quotient(i);
            out += &mats[i - 1] * q.eval_rec(mats, size);
        }
        out
    }
}

impl std::ops::Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(-ONE)
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::polyparse::format_poly(self))
    }
}

/// Serialized in the textual polynomial syntax.
impl serde::Serialize for NcPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(f_0, …, f_N)` with `f_n` the degree-`n` part.
#[derive(Debug, Clone, PartialEq)]
pub struct HomDecomposition {
    pub parts: Vec<NcPoly>,
}

impl HomDecomposition {
    pub fn sum(&self, dim_vars: usize) -> NcPoly {
        self.parts.iter().fold(NcPoly::zero(dim_vars), |acc, p| {
            acc.checked_add(p).expect("parts share dimension")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(d: usize, i: usize) -> NcPoly {
        NcPoly::var(d, i).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn word(ls: &[usize]) -> Word {
        Word::new(ls.to_vec())
    }

    #[test]
    fn add_examples() {
        let z1 = z(2, 1);
        assert!(z1.checked_add(&-&z1).unwrap().is_zero());
        let s = z1.checked_add(&z(2, 2)).unwrap();
        assert_eq!(s.num_terms(), 2);
        let comm = z1
            .checked_mul(&z(2, 2))
            .unwrap()
            .checked_sub(&z(2, 2).checked_mul(&z1).unwrap())
            .unwrap();
        let back = comm.checked_add(&z(2, 2).checked_mul(&z1).unwrap()).unwrap();
        assert_eq!(back, NcPoly::monomial(2, word(&[1, 2]), ONE));
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            z(2, 1).checked_add(&z(3, 1)),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
        assert!(z(2, 1).checked_mul(&z(3, 1)).is_err());
        assert!(z(2, 1).fock_inner(&z(3, 1)).is_err());
        assert!(NcPoly::var(2, 3).is_err());
    }

    #[test]
    fn mul_examples() {
        let (z1, z2) = (z(2, 1), z(2, 2));
        let a = z1.checked_mul(&z2).unwrap();
        let b = z2.checked_mul(&z1).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.terms().next().unwrap().0, &word(&[1, 2]));
        assert_eq!(NcPoly::one(2).checked_mul(&a).unwrap(), a);
        let p = z1
            .checked_add(&z2)
            .unwrap()
            .checked_mul(&z1.checked_sub(&z2).unwrap())
            .unwrap();
        let expected = NcPoly::from_terms(
            2,
            [
                (word(&[1, 1]), c(1.0)),
                (word(&[1, 2]), c(-1.0)),
                (word(&[2, 1]), c(1.0)),
                (word(&[2, 2]), c(-1.0)),
            ],
        )
        .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn homogeneous_component_examples() {
        let f = z(2, 1)
            .checked_add(&z(2, 1).checked_mul(&z(2, 2)).unwrap())
            .unwrap();
        assert_eq!(f.homogeneous_component(1), z(2, 1));
        assert!(f.homogeneous_component(3).is_zero());
        let g = NcPoly::from_terms(
            3,
            (1..=3).map(|k| (word(&[k, k]), c(0.5f64.powi(k as i32)))),
        )
        .unwrap();
        assert_eq!(g.homogeneous_component(2), g);
    }

    #[test]
    fn fock_norm_examples() {
        assert_eq!(z(2, 1).fock_inner(&z(2, 2)).unwrap(), ZERO);
        let comm = NcPoly::from_terms(2, [(word(&[1, 2]), c(1.0)), (word(&[2, 1]), c(-1.0))])
            .unwrap();
        assert!((comm.fock_norm() - 2f64.sqrt()).abs() < 1e-15);
        let f = NcPoly::from_terms(
            5,
            (1..=5).map(|k| (word(&[k, k]), c(0.5f64.powi(k as i32)))),
        )
        .unwrap();
        // oracle: direct sum of 4^{-k}
        let expected: f64 = (1..=5).map(|k| 0.25f64.powi(k)).sum::<f64>().sqrt();
        assert!((f.fock_norm() - expected).abs() < 1e-15);
        assert!((f.fock_norm() - 0.5770683).abs() < 1e-7);
    }

    #[test]
    fn word_index_roundtrip_and_order() {
        for n in 0..4 {
            for k in 0..3usize.pow(n) {
                let w = Word::from_index(n as usize, k, 3);
                assert_eq!(w.index(3), k);
            }
        }
        assert!(word(&[2]) < word(&[1, 1]));
        assert!(word(&[1, 2]) < word(&[2, 1]));
        assert_eq!(format!("{}", word(&[1, 1, 2, 1])), "z1^2*z2*z1");
    }

    #[test]
    fn eval_matrices_unit_and_index_check() {
        let a = DMatrix::from_element(2, 2, c(1.0));
        let p = NcPoly::constant(1, c(3.0));
        assert_eq!(p.eval_matrices(std::slice::from_ref(&a), 2).unwrap(), DMatrix::identity(2, 2) * c(3.0));
        assert!(z(2, 2).eval_matrices(&[a], 2).is_err());
    }

    fn arb_poly(d: usize, max_deg: usize) -> impl Strategy<Value = NcPoly> {
        let term = (
            proptest::collection::vec(1..=d, 0..=max_deg),
            -3i32..=3,
            -3i32..=3,
        );
        proptest::collection::vec(term, 0..6).prop_map(move |ts| {
            NcPoly::from_terms(
                d,
                ts.into_iter()
                    .map(|(ls, re, im)| (Word::new(ls), C64::new(re as f64, im as f64))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn mul_is_associative_with_unit(a in arb_poly(3, 3), b in arb_poly(3, 3), e in arb_poly(3, 3)) {
            let left = a.checked_mul(&b).unwrap().checked_mul(&e).unwrap();
            let right = a.checked_mul(&b.checked_mul(&e).unwrap()).unwrap();
            // integer coefficients: exact
            prop_assert_eq!(left, right);
            prop_assert_eq!(a.checked_mul(&NcPoly::one(3)).unwrap(), a.clone());
        }

        #[test]
        fn degrees_add_for_homogeneous(a in arb_poly(2, 3), b in arb_poly(2, 3), m in 0usize..4, n in 0usize..4) {
            let am = a.homogeneous_component(m);
            let bn = b.homogeneous_component(n);
            let p = am.checked_mul(&bn).unwrap();
            prop_assert!(p.terms().all(|(w, _)| w.len() == m + n));
        }

        #[test]
        fn parseval_and_decomposition(f in arb_poly(3, 4)) {
            let dec = f.homogeneous_decomposition();
            prop_assert_eq!(dec.sum(3), f.clone());
            let parts: f64 = dec.parts.iter().map(|p| p.fock_norm().powi(2)).sum();
            prop_assert!((parts - f.fock_norm().powi(2)).abs() < 1e-9);
        }

        #[test]
        fn vectorization_is_isometric(f in arb_poly(3, 3), n in 0usize..4) {
            let fn_ = f.homogeneous_component(n);
            let v = fn_.to_vector(n);
            prop_assert_eq!(NcPoly::from_vector(3, n, &v), fn_.clone());
            let nv = crate::linalg::norm(&v);
            prop_assert!((nv - fn_.fock_norm()).abs() < 1e-12);
        }
    }
}
