//! Translation-invariant networks.
//!
//! With `t_{m,m+k} = τ_k` and `φ_{m,m+k} = φ_k` the couplings depend only on
//! the site distance, `ζ_{m,m+k} = ξ_k`. This module evaluates the profile
//! `ξ_1, ξ_2, …` through the general engine, through the transfer matrix of a
//! network truncated by `τ_K = 0`, and through the two-channel analytic
//! formula. It also designs schedules that cancel every `ξ_k` except one.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

mod design;
mod threshold;
mod transfer;
mod xi;

pub use design::{design_pruned, pruning_reflectivities, DesignSchedule};
pub use threshold::{pruning_valid, threshold_refine, threshold_scan};
pub use transfer::{transfer_matrix, TransferMatrix};
pub use xi::{xi_k2_analytic, xi_profile, xi_profile_closed};

/// How a profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiMethod {
    /// Matrix products on the expanded network.
    Engine,
    /// Spectral decomposition of the transfer matrix.
    Spectral,
    /// Repeated multiplication by the transfer matrix.
    Powering,
    /// Two-channel closed formula.
    Analytic,
    /// Two-channel closed formula was degenerate; transfer-matrix result used.
    AnalyticFallback,
}

/// `ξ_1..ξ_kmax` for a regular network.
#[derive(Debug, Clone, PartialEq)]
pub struct XiProfile {
    pub xi: Vec<C64>,
    pub loss: f64,
    pub method: XiMethod,
}

impl XiProfile {
    /// `ξ_k`, 1-based.
    pub fn get(&self, k: usize) -> C64 {
        self.xi[k - 1]
    }

    pub fn kmax(&self) -> usize {
        self.xi.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.xi.iter().map(|z| z.norm()).collect()
    }

    /// Apply a per-hop loss `ν` on top of the current one: `ξ_k → (1-ν)^k ξ_k`.
    pub fn with_loss(mut self, loss: f64) -> Self {
        let keep = 1.0 - loss;
        for (i, z) in self.xi.iter_mut().enumerate() {
            *z *= keep.powi(i as i32 + 1);
        }
        self.loss = 1.0 - (1.0 - self.loss) * keep;
        self
    }
}
