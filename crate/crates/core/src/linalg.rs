//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{CMatrix, C64};

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{-iφ}`.
pub(crate) fn phase_factor(phi: f64) -> C64 {
    C64::from_polar(1.0, -phi)
}

/// Reduce an angle into `[0, 2π)`.
pub(crate) fn reduce_angle(phi: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let r = phi % tau;
    let r = if r < 0.0 { r + tau } else { r };
    // `r + TAU` can round up to TAU for tiny negative inputs.
    if r >= tau {
        0.0
    } else {
        r
    }
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |(U U†)_{ij} - δ_{ij}|`.
pub(crate) fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u * u.adjoint() - CMatrix::identity(n, n)))
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order and eigenvector columns permuted to match.
pub(crate) fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
