#![allow(dead_code)]

use hankel_moments::extremal::DiscreteMeasure;
use hankel_moments::scalar::{rational_ratio, Rational};
use proptest::prelude::*;

pub fn q(p: i64, d: i64) -> Rational {
    rational_ratio(p, d)
}

/// Rationals `p/d` with `|p/d| < 1`.
pub fn unit_rational() -> impl Strategy<Value = Rational> {
    (2i64..=12).prop_flat_map(|d| (-(d - 1)..=d - 1).prop_map(move |p| q(p, d)))
}

pub fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=9).prop_map(|(p, d)| q(p, d))
}

/// Discrete measures with `1..=max_m` points in `(-1, 1)`.
pub fn measure(max_m: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::btree_map(-11i64..=11, 1i64..=9, 1..=max_m).prop_flat_map(|pts| {
        let n = pts.len();
        prop::collection::vec(1i64..=9, n).prop_map(move |dens| {
            let pairs = pts
                .iter()
                .zip(&dens)
                .map(|((&p, &w), &d)| (q(p, 12), q(w, d)))
                .collect();
            DiscreteMeasure::from_pairs(pairs).unwrap()
        })
    })
}
