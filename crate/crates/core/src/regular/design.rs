use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitudes::coupling_row;
use crate::linalg::{c, reduce_angle};
use crate::network::{BeamSplitter, RegularSpec};
use crate::{tol, Error, Result, C64};

/// Reflectivities `1 - τ_k`, `k = 1..=count`, of the first-neighbour pruning
/// recursion started at `τ_1 = tau_base`.
///
/// The recursion is run on `ε_k = 1 - τ_k` with `P_k = τ_1···τ_k` and its
/// complement tracked separately:
/// `ε_k = (1 - P_{k-1}) ε_{k-1} / (P_{k-1} (1 - ε_{k-1}))`.
/// Fails at the first `k` whose `τ_k` leaves `[0,1]`.
pub fn pruning_reflectivities(tau_base: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&tau_base) {
        return Err(Error::OrderSplitter {
            k: 1,
            source: crate::SplitterError::Transmissivity(tau_base),
        });
    }
    let mut eps = Vec::with_capacity(count);
    if count == 0 {
        return Ok(eps);
    }
    let first = 1.0 - tau_base;
    eps.push(first);
    let (mut kept, mut lost) = (tau_base, first);
    for k in 2..=count {
        let prev = eps[k - 2];
        let next = (lost / kept) * prev / (1.0 - prev);
        if !(0.0..=1.0).contains(&next) {
            return Err(Error::Recursion { k, tau: 1.0 - next });
        }
        lost += kept * next;
        kept *= 1.0 - next;
        eps.push(next);
    }
    Ok(eps)
}

/// A regular-network schedule that keeps only the `n`-th neighbour coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSchedule {
    pub n: usize,
    orders: Vec<BeamSplitter>,
    /// `|ξ_n| = √(1 - τ_base)`.
    pub retained_modulus: f64,
    /// Largest `|ξ_k|`, `k ≠ n`, found by the self-check.
    pub max_pruned: f64,
}

impl DesignSchedule {
    pub fn count(&self) -> usize {
        self.orders.len()
    }

    pub fn splitters(&self) -> &[BeamSplitter] {
        &self.orders
    }

    pub fn taus(&self) -> Vec<f64> {
        self.orders.iter().map(BeamSplitter::transmissivity).collect()
    }

    pub fn reflectivities(&self) -> Vec<f64> {
        self.orders.iter().map(BeamSplitter::reflectivity).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.orders.iter().map(BeamSplitter::phase).collect()
    }

    /// The schedule on `count + 1` sites, so that every designed order is used.
    pub fn to_regular(&self, loss: f64, gamma: f64) -> Result<RegularSpec> {
        RegularSpec::from_splitters(self.orders.len() + 1, self.orders.clone(), loss, gamma)
    }
}

/// `ξ_k` of a regular network given its first `k` orders.
fn xi_last(orders: &[BeamSplitter]) -> C64 {
    let k = orders.len();
    let spec = RegularSpec::from_splitters(k + 1, orders.to_vec(), 0.0, 1.0)
        .expect("orders are valid splitters");
    coupling_row(&spec.expand(), 1)[k]
}

/// Phase of order `k` that cancels `ξ_k`, given orders `1..k`.
///
/// `ξ_k` depends on `φ_k` only through the final hop into channel `k + 1`,
/// `ξ_k = a + e^{-iφ_k} b`, so two probes fix `a` and `b`.
fn cancelling_phase(orders: &mut [BeamSplitter]) -> f64 {
    let k = orders.len();
    let reflect = orders[k - 1].reflectivity();
    let mut probe = |phase: f64| {
        orders[k - 1] = BeamSplitter::from_reflectivity(reflect, phase).expect("valid reflectivity");
        xi_last(orders)
    };
    let x0 = probe(0.0);
    let x1 = probe(FRAC_PI_2);
    let b = (x0 - x1) / c(1.0, 1.0);
    let a = x0 - b;
    if b == C64::new(0.0, 0.0) {
        return 0.0;
    }
    reduce_angle(-(-a / b).arg())
}

/// Schedule that retains the `n`-th neighbour coupling and cancels the rest
/// up to order `count`.
///
/// The first-neighbour recursion is laid out on the multiples of `n`
/// (`τ_{jn} = τ^{(1)}_j`); all other orders are transparent. Order `n` gets
/// `phi_base` and each later multiple gets the phase that cancels its `ξ`.
/// The result is re-evaluated through the general engine before returning.
pub fn design_pruned(n: usize, tau_base: f64, phi_base: f64, count: usize) -> Result<DesignSchedule> {
    if n == 0 {
        return Err(Error::Order);
    }
    if count < n {
        return Err(Error::Count { order: n, count });
    }
    if !phi_base.is_finite() {
        return Err(Error::OrderSplitter {
            k: n,
            source: crate::SplitterError::Phase(phi_base),
        });
    }
    let eps = pruning_reflectivities(tau_base, count / n).map_err(|e| match e {
        Error::Recursion { k, tau } => Error::Recursion { k: k * n, tau },
        Error::OrderSplitter { source, .. } => Error::OrderSplitter { k: n, source },
        other => other,
    })?;
    let mut orders = vec![BeamSplitter::TRANSPARENT; count];
    for (j, &e) in eps.iter().enumerate() {
        let k = (j + 1) * n;
        let phase = if j == 0 { phi_base } else { 0.0 };
        orders[k - 1] = BeamSplitter::from_reflectivity(e, phase)
            .map_err(|source| Error::OrderSplitter { k, source })?;
    }
    for j in 2..=eps.len() {
        let k = j * n;
        let phase = cancelling_phase(&mut orders[..k]);
        orders[k - 1] = BeamSplitter::from_reflectivity(eps[j - 1], phase).expect("valid reflectivity");
    }

    let retained_modulus = (1.0 - tau_base).sqrt();
    let spec = RegularSpec::from_splitters(count + 1, orders.clone(), 0.0, 1.0)?;
    let row = coupling_row(&spec.expand(), 1);
    let mut max_pruned = 0.0f64;
    for k in 1..=count {
        let modulus = row[k].norm();
        if k == n {
            let residual = (modulus - retained_modulus).abs();
            if residual > tol::PRUNED {
                return Err(Error::DesignCheck { k, residual });
            }
        } else {
            if modulus > tol::PRUNED {
                return Err(Error::DesignCheck { k, residual: modulus });
            }
            max_pruned = max_pruned.max(modulus);
        }
    }
    Ok(DesignSchedule {
        n,
        orders,
        retained_modulus,
        max_pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::xi_profile;
    use core::f64::consts::{PI, TAU};
    use proptest::prelude::*;

    #[test]
    fn three_quarter_base_follows_closed_sequence() {
        let eps = pruning_reflectivities(0.75, 20).unwrap();
        for (i, e) in eps.iter().enumerate() {
            let k = (i + 1) as f64;
            let tau = k * (k + 2.0) / ((k + 1.0) * (k + 1.0));
            assert!((1.0 - e - tau).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn second_and_third_orders_match_closed_forms() {
        for t1 in [0.62, 0.7, 0.8, 0.95] {
            let eps = pruning_reflectivities(t1, 3).unwrap();
            let t2 = 1.0 - (1.0 - t1) * (1.0 - t1) / (t1 * t1);
            let t3 = 1.0 - (1.0 - t1).powi(3) / ((2.0 * t1 - 1.0) * (2.0 * t1 - 1.0));
            assert!((1.0 - eps[1] - t2).abs() < 1e-12);
            assert!((1.0 - eps[2] - t3).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_base_decouples_everything() {
        let d = design_pruned(1, 1.0, 0.3, 8).unwrap();
        assert!(d.taus().iter().all(|&t| t == 1.0));
        assert_eq!(d.retained_modulus, 0.0);
        let p = xi_profile(&d.to_regular(0.0, 1.0).unwrap(), 8).unwrap();
        assert!(p.xi.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn low_base_fails_at_third_order() {
        match design_pruned(1, 0.6, 0.0, 10) {
            Err(Error::Recursion { k, tau }) => {
                assert_eq!(k, 3);
                assert!((tau + 0.6).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        match design_pruned(2, 0.6, 0.0, 10) {
            Err(Error::Recursion { k, .. }) => assert_eq!(k, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn argument_checks() {
        assert_eq!(design_pruned(0, 0.8, 0.0, 4), Err(Error::Order));
        assert_eq!(design_pruned(3, 0.8, 0.0, 2), Err(Error::Count { order: 3, count: 2 }));
        assert!(matches!(design_pruned(1, 1.2, 0.0, 4), Err(Error::OrderSplitter { k: 1, .. })));
        assert!(matches!(design_pruned(2, -0.1, 0.0, 4), Err(Error::OrderSplitter { k: 2, .. })));
    }

    #[test]
    fn second_phase_is_quarter_turn_behind() {
        for phi1 in [0.0, 0.3, 2.0, 5.9] {
            let d = design_pruned(1, 0.8, phi1, 3).unwrap();
            let diff = reduce_angle(d.phis()[1] - phi1);
            assert!((diff - 1.5 * PI).abs() < 1e-9, "phi1 = {phi1}: {diff}");
        }
    }

    #[test]
    fn stride_layout_for_higher_orders() {
        let d = design_pruned(3, 0.8, 0.5, 9).unwrap();
        let taus = d.taus();
        for (i, t) in taus.iter().enumerate() {
            if (i + 1) % 3 != 0 {
                assert_eq!(*t, 1.0);
            }
        }
        assert!((taus[2] - 0.8).abs() < 1e-15);
        let p = xi_profile(&d.to_regular(0.0, 1.0).unwrap(), 9).unwrap();
        assert!((p.get(3).norm() - 0.2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn near_transparent_designs_stay_precise() {
        let d = design_pruned(1, 0.999_999, 0.3, 20).unwrap();
        assert!(d.max_pruned < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn pruned_designs_cancel_other_orders(
            n in 1usize..=2,
            tau in 0.75f64..=1.0,
            phi in 0.0f64..TAU,
        ) {
            let count = 10 * n;
            let d = design_pruned(n, tau, phi, count).unwrap();
            let p = xi_profile(&d.to_regular(0.0, 1.0).unwrap(), count).unwrap();
            for k in 1..=count {
                if k == n {
                    prop_assert!((p.get(k).norm() - (1.0 - tau).sqrt()).abs() < 1e-10);
                } else {
                    prop_assert!(p.get(k).norm() < 1e-10);
                }
            }
        }

        /// `1 - τ_{k+1}` and `1 - τ_{k-1}` never differ in sign.
        #[test]
        fn reflectivity_sign_rule(tau in 0.75f64..=1.0, count in 3usize..=30) {
            let eps = pruning_reflectivities(tau, count).unwrap();
            for k in 1..count - 1 {
                prop_assert!(eps[k + 1] * eps[k - 1] >= 0.0);
                prop_assert!((eps[k + 1] == 0.0) == (eps[k - 1] == 0.0));
            }
        }
    }
}
