//! Random exact forms for property tests.
#![allow(dead_code)]

use std::sync::Arc;

use dh_lab::exterior::{ratio, Chart, Form, Poly, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NVARS: usize = 5;

pub fn chart() -> Arc<Chart> {
    Arc::new(
        Chart::new(vec![
            Variable::periodic("a"),
            Variable::periodic("b"),
            Variable::periodic("c"),
            Variable::interval("u", -1.0, 1.0),
            Variable::periodic("v"),
        ])
        .unwrap(),
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_poly(rng: &mut impl Rng, nvars: usize) -> Poly {
    let terms = rng.random_range(1..=3);
    Poly::from_terms(
        nvars,
        (0..terms).map(|_| {
            let exps: Vec<u32> = (0..nvars).map(|_| rng.random_range(0..=2)).collect();
            (
                exps,
                ratio(rng.random_range(-5..=5), rng.random_range(1..=4)),
            )
        }),
    )
}

/// Random `degree`-form with up to three polynomial-coefficient terms.
pub fn random_form(rng: &mut impl Rng, chart: &Arc<Chart>, degree: usize) -> Form {
    let n = chart.dim();
    let mut f = Form::zero(chart, degree);
    for _ in 0..rng.random_range(1..=3) {
        let mut idx: Vec<usize> = (0..n).collect();
        // partial Fisher-Yates: first `degree` entries are a random subset in random order
        for i in 0..degree {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        let term = Form::monomial(chart, &idx[..degree], random_poly(rng, n));
        f = &f + &term;
    }
    f
}

pub fn random_degree(rng: &mut impl Rng) -> usize {
    rng.random_range(0..=3)
}

pub fn sign(p: usize) -> i64 {
    if p % 2 == 0 {
        1
    } else {
        -1
    }
}
