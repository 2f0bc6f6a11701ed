//! Random admissible parameter sets.
//!
//! Ranges: `M ∈ (0.01, 0.9)`, `B ∈ (0.001, 1)`, `C ∈ (0.001, 1.5)`,
//! `S ∈ (0.01, 1)`, `Q ∈ (0.01, 3)`.

use rand::Rng;

use crate::equilibria::{delta_tolerance, discriminant};
use crate::model::NondimParams;

pub const M_RANGE: (f64, f64) = (0.01, 0.9);
pub const B_RANGE: (f64, f64) = (0.001, 1.0);
pub const C_RANGE: (f64, f64) = (0.001, 1.5);
pub const S_RANGE: (f64, f64) = (0.01, 1.0);
pub const Q_RANGE: (f64, f64) = (0.01, 3.0);

fn build(m: f64, b: f64, c: f64, s: f64, q: f64) -> NondimParams {
    NondimParams::new(m, b, c, s, q).expect("sample ranges are admissible")
}

/// Uniform sample from the admissible box.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> NondimParams {
    build(
        rng.gen_range(M_RANGE.0..M_RANGE.1),
        rng.gen_range(B_RANGE.0..B_RANGE.1),
        rng.gen_range(C_RANGE.0..C_RANGE.1),
        rng.gen_range(S_RANGE.0..S_RANGE.1),
        rng.gen_range(Q_RANGE.0..Q_RANGE.1),
    )
}

/// Whether `p` has two distinct positive equilibria.
pub fn is_bistable_candidate(p: &NondimParams) -> bool {
    let d = discriminant(p);
    d.value > delta_tolerance(p) && d.u1.is_some()
}

/// Rejection sample with two distinct positive equilibria.
pub fn random_bistable_params<R: Rng + ?Sized>(rng: &mut R) -> NondimParams {
    loop {
        let p = random_params(rng);
        if is_bistable_candidate(&p) {
            return p;
        }
    }
}

#[cfg(test)]
pub(crate) fn admissible_strategy() -> impl proptest::strategy::Strategy<Value = NondimParams> {
    use proptest::prelude::*;
    (
        M_RANGE.0..M_RANGE.1,
        B_RANGE.0..B_RANGE.1,
        C_RANGE.0..C_RANGE.1,
        S_RANGE.0..S_RANGE.1,
        Q_RANGE.0..Q_RANGE.1,
    )
        .prop_map(|(m, b, c, s, q)| build(m, b, c, s, q))
}

/// Admissible sets with two positive equilibria. Drawn from a sub-box where
/// they are common, then filtered.
#[cfg(test)]
pub(crate) fn bistable_strategy() -> impl proptest::strategy::Strategy<Value = NondimParams> {
    use proptest::prelude::*;
    (0.01..0.5f64, 0.001..0.5f64, 0.001..0.8f64, S_RANGE.0..S_RANGE.1, 0.01..1.5f64)
        .prop_map(|(m, b, c, s, q)| build(m, b, c, s, q))
        .prop_filter("needs two positive equilibria", is_bistable_candidate)
}
