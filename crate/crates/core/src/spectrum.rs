//! Laplacian spectrum classification.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigenvalues, EigenError};
use crate::matrix::Matrix;

/// Default relative tolerance for classifying an eigenvalue as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// `(re, im)` pairs, in solver order.
    pub eigenvalues: Vec<(f64, f64)>,
    pub zero_count: usize,
    /// Smallest real part among the nonzero eigenvalues; `None` when every
    /// eigenvalue is classified as zero.
    pub lambda2_re: Option<f64>,
    /// Absolute threshold actually used: `zero_tol * max(1, ||L||_inf)`.
    pub zero_threshold: f64,
}

impl Spectrum {
    pub fn eigenvalues_complex(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().map(|&(re, im)| Complex64::new(re, im))
    }

    /// Eigenvalues not classified as zero.
    pub fn nonzero(&self) -> impl Iterator<Item = Complex64> + '_ {
        let thr = self.zero_threshold;
        self.eigenvalues_complex().filter(move |e| e.norm() >= thr)
    }
}

/// Eigenvalues of a Laplacian, with those of modulus below
/// `zero_tol * max(1, ||L||_inf)` counted as zero.
pub fn spectrum(l: &Matrix, zero_tol: f64) -> Result<Spectrum, EigenError> {
    let ev = eigenvalues(l)?;
    let zero_threshold = zero_tol * l.norm_inf().max(1.0);
    let zero_count = ev.iter().filter(|e| e.norm() < zero_threshold).count();
    let lambda2_re = ev
        .iter()
        .filter(|e| e.norm() >= zero_threshold)
        .map(|e| e.re)
        .reduce(f64::min);
    Ok(Spectrum {
        eigenvalues: ev.iter().map(|e| (e.re, e.im)).collect(),
        zero_count,
        lambda2_re,
        zero_threshold,
    })
}
