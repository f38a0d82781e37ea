use alloc::vec::Vec;

use crate::linalg::{c, phase_factor, unitarity_defect};
use crate::network::BeamSplitter;
use crate::{CMatrix, Error, Result, C64};

/// One-level propagator of a regular network whose order `K` is fully
/// reflecting (`τ_K = 0`), restricted to the `K` channels a signal can occupy.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    matrix: CMatrix,
}

impl TransferMatrix {
    /// Build from the splitters of orders `1..K-1` and the phase of order `K`.
    pub fn from_orders(orders: &[BeamSplitter], last_phase: f64) -> Self {
        let k = orders.len() + 1;
        let phases: Vec<C64> = orders
            .iter()
            .map(BeamSplitter::phase)
            .chain(core::iter::once(last_phase))
            .map(phase_factor)
            .collect();
        // √τ_l and -i√(1-τ_l) for l = 0..=K, with the boundary terms fixed:
        // the l = 0 reflection is 1, order K reflects fully.
        let through = |l: usize| -> f64 {
            if l == 0 || l >= k {
                0.0
            } else {
                orders[l - 1].transmission_amplitude()
            }
        };
        let reflect = |l: usize| -> C64 {
            if l == 0 {
                c(1.0, 0.0)
            } else if l >= k {
                c(0.0, -1.0)
            } else {
                c(0.0, -orders[l - 1].reflection_amplitude())
            }
        };
        let matrix = CMatrix::from_fn(k, k, |r, col| {
            let (i, j) = (r + 1, col + 1);
            let e = phases[r];
            if j == i + 1 {
                e * through(i)
            } else if j == i {
                e * reflect(i) * reflect(i - 1)
            } else if j < i {
                let chain: f64 = (j..i).map(through).product();
                e * reflect(j - 1) * chain * reflect(i)
            } else {
                c(0.0, 0.0)
            }
        });
        Self { matrix }
    }

    /// Number of active channels `K`.
    pub fn channels(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `max |T T† - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// Transfer matrix from `τ_1..τ_{K-1}` and `φ_1..φ_K`.
pub fn transfer_matrix(taus: &[f64], phis: &[f64]) -> Result<TransferMatrix> {
    if phis.is_empty() {
        return Err(Error::EmptyTransfer);
    }
    if taus.len() + 1 != phis.len() {
        return Err(Error::TransferLength {
            expected: phis.len() - 1,
            phis: phis.len(),
            taus: taus.len(),
        });
    }
    let orders = taus
        .iter()
        .zip(phis)
        .enumerate()
        .map(|(i, (&t, &p))| BeamSplitter::new(t, p).map_err(|source| Error::OrderSplitter { k: i + 1, source }))
        .collect::<Result<Vec<_>>>()?;
    let last = phis[phis.len() - 1];
    if !last.is_finite() {
        return Err(Error::OrderSplitter {
            k: phis.len(),
            source: crate::SplitterError::Phase(last),
        });
    }
    Ok(TransferMatrix::from_orders(&orders, last))
}
