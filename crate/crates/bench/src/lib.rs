//! Seeded inputs shared by the criterion benches.

use involute_core::expr::{Expr, Symbol};
use involute_core::fgordon::{klein_gordon, KleinGordonInstance};
use involute_core::linalg::ExprMatrix;
use involute_core::random;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vars(n: usize) -> Vec<Symbol> {
    (0..n).map(|i| Symbol::new(&format!("x{i}"))).collect()
}

/// Two dense-ish polynomials in `n` variables.
pub fn polynomials(n: usize, degree: u32, terms: usize) -> (Expr, Expr) {
    let mut r = rng(1);
    let v = vars(n);
    (random::polynomial(&mut r, &v, degree, terms), random::polynomial(&mut r, &v, degree, terms))
}

/// `n x n` matrix of polynomial entries.
pub fn matrix(n: usize, degree: u32) -> ExprMatrix {
    let mut r = rng(2);
    let v = vars(3);
    let rows = (0..n).map(|_| (0..n).map(|_| random::polynomial(&mut r, &v, degree, 3)).collect()).collect();
    ExprMatrix::from_rows(rows).expect("square")
}

pub fn kg_symbolic() -> KleinGordonInstance {
    klein_gordon(&Expr::symbol("a"), &Expr::symbol("b")).expect("valid model")
}
