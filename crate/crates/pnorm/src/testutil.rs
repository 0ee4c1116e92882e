//! Random instance generators shared by tests and benches.

use num_complex::Complex64;
use rand::Rng;

use crate::matrix::ComplexMatrix;

/// Dense matrix with entries uniform in the complex square of half-side `scale`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    let entries = (0..rows * cols)
        .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    ComplexMatrix::new(rows, cols, entries).expect("finite entries")
}
