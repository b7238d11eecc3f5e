//! Fixtures for the criterion benches.

use nclab::{parse_poly, GradedIdeal, IdealConfig, NcPoly};

/// Commuting-variables ideal in `d` variables, truncated at degree `n`.
pub fn commutator_ideal(d: usize, n: usize) -> GradedIdeal {
    let mut gens = Vec::new();
    for i in 1..=d {
        for j in i + 1..=d {
            gens.push(parse_poly(&format!("z{i}*z{j} - z{j}*z{i}"), d).unwrap());
        }
    }
    GradedIdeal::generated(d, &gens, n, IdealConfig::default()).unwrap()
}

/// Dense polynomial `Σ_{j ≤ k} (z_1 + ⋯ + z_d)^j`.
pub fn dense_poly(d: usize, k: usize) -> NcPoly {
    let sum = (1..=d).map(|i| format!("z{i}")).collect::<Vec<_>>().join(" + ");
    let text = (0..=k).map(|j| format!("({sum})^{j}")).collect::<Vec<_>>().join(" + ");
    parse_poly(&text, d).unwrap()
}
