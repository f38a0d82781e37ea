//! Cascade-network description: beam splitters, arbitrary networks and
//! translation-invariant (regular) networks.
//!
//! Channel `E(m)` meets every later channel `E(m')`, `m' > m`, at the splitter
//! `BS_{m,m'}`. In the Heisenberg picture the splitter maps
//!
//! ```text
//! b_m  -> √t b_m - i√(1-t) b_m'
//! b_m' -> e^{-iφ} (√t b_m' - i√(1-t) b_m)
//! ```
//!
//! so the phase is picked up by whatever leaves through the upper port `m'`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::SplitterError;
use crate::linalg::{c, phase_factor, reduce_angle};
use crate::{CMatrix, Error, Result};

/// A two-mode splitter with transmissivity `t`, reflectivity `1 - t` and
/// relative phase `φ`.
///
/// Both `t` and `1 - t` are stored: near-transparent splitters (the pruning
/// designs push `1 - t` far below machine epsilon relative to one) would
/// otherwise lose their reflection amplitude entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter {
    transmissivity: f64,
    reflectivity: f64,
    phase: f64,
}

impl BeamSplitter {
    /// Fully transmitting element with zero phase: a plain crossing.
    pub const TRANSPARENT: BeamSplitter = BeamSplitter {
        transmissivity: 1.0,
        reflectivity: 0.0,
        phase: 0.0,
    };

    pub fn new(transmissivity: f64, phase: f64) -> Result<Self, SplitterError> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(SplitterError::Transmissivity(transmissivity));
        }
        Self::build(transmissivity, 1.0 - transmissivity, phase)
    }

    /// Build from the reflectivity `1 - t`, keeping it at full precision.
    pub fn from_reflectivity(reflectivity: f64, phase: f64) -> Result<Self, SplitterError> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(SplitterError::Reflectivity(reflectivity));
        }
        Self::build(1.0 - reflectivity, reflectivity, phase)
    }

    /// Build from both `t` and `1 - t`; they must agree to 1e-12.
    pub fn from_parts(transmissivity: f64, reflectivity: f64, phase: f64) -> Result<Self, SplitterError> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(SplitterError::Transmissivity(transmissivity));
        }
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(SplitterError::Reflectivity(reflectivity));
        }
        if (transmissivity + reflectivity - 1.0).abs() > 1e-12 {
            return Err(SplitterError::Sum { t: transmissivity, r: reflectivity });
        }
        Self::build(transmissivity, reflectivity, phase)
    }

    fn build(transmissivity: f64, reflectivity: f64, phase: f64) -> Result<Self, SplitterError> {
        if !phase.is_finite() {
            return Err(SplitterError::Phase(phase));
        }
        Ok(Self {
            transmissivity,
            reflectivity,
            phase: reduce_angle(phase),
        })
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    /// Phase in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `√t`.
    pub fn transmission_amplitude(&self) -> f64 {
        self.transmissivity.sqrt()
    }

    /// `√(1-t)`.
    pub fn reflection_amplitude(&self) -> f64 {
        self.reflectivity.sqrt()
    }

    /// The 2×2 mode transformation acting on `(b_m, b_m')`.
    pub fn unitary(&self) -> CMatrix {
        let s = self.transmission_amplitude();
        let r = self.reflection_amplitude();
        let e = phase_factor(self.phase);
        CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -r), e * c(0.0, -r), e * s])
    }
}

impl Default for BeamSplitter {
    fn default() -> Self {
        Self::TRANSPARENT
    }
}

/// Free-function form of [`BeamSplitter::unitary`].
pub fn bs_unitary(bs: &BeamSplitter) -> CMatrix {
    bs.unitary()
}

fn check_rates(loss: f64, gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::Loss(loss));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Gamma(gamma));
    }
    Ok(())
}

/// An arbitrary cascade network on `M` sites.
///
/// Every pair `m < m'` carries exactly one splitter; pairs never set
/// explicitly hold [`BeamSplitter::TRANSPARENT`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    sites: usize,
    // Row-major M×M, only the strict upper triangle is meaningful.
    splitters: Vec<BeamSplitter>,
    loss: f64,
    gamma: f64,
}

impl NetworkSpec {
    /// A network of transparent crossings.
    pub fn new(sites: usize, gamma: f64, loss: f64) -> Result<Self> {
        if sites == 0 {
            return Err(Error::NoSites(sites));
        }
        check_rates(loss, gamma)?;
        Ok(Self {
            sites,
            splitters: vec![BeamSplitter::TRANSPARENT; sites * sites],
            loss,
            gamma,
        })
    }

    /// Build from an explicit element list; duplicates are rejected.
    pub fn from_elements<I>(sites: usize, gamma: f64, loss: f64, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BeamSplitter)>,
    {
        let mut net = Self::new(sites, gamma, loss)?;
        let mut seen = vec![false; sites * sites];
        for (m, mp, bs) in elements {
            let idx = net.index(m, mp)?;
            if seen[idx] {
                return Err(Error::DuplicatePair { m, mp });
            }
            seen[idx] = true;
            net.splitters[idx] = bs;
        }
        Ok(net)
    }

    pub fn with_element(mut self, m: usize, mp: usize, bs: BeamSplitter) -> Result<Self> {
        let idx = self.index(m, mp)?;
        self.splitters[idx] = bs;
        Ok(self)
    }

    /// Same splitters, different per-hop loss.
    pub fn with_loss(&self, loss: f64) -> Result<Self> {
        check_rates(loss, self.gamma)?;
        Ok(Self { loss, ..self.clone() })
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_rates(self.loss, gamma)?;
        Ok(Self { gamma, ..self.clone() })
    }

    fn index(&self, m: usize, mp: usize) -> Result<usize> {
        if m == 0 || m >= mp || mp > self.sites {
            return Err(Error::Pair { m, mp, sites: self.sites });
        }
        Ok((m - 1) * self.sites + (mp - 1))
    }

    /// Number of sites / channels `M`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Splitter at `(m, m')`, 1-based, `m < m'`.
    ///
    /// # Panics
    /// If the pair is not valid for this network.
    pub fn element(&self, m: usize, mp: usize) -> BeamSplitter {
        match self.index(m, mp) {
            Ok(i) => self.splitters[i],
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_element(&self, m: usize, mp: usize) -> Option<BeamSplitter> {
        self.index(m, mp).ok().map(|i| self.splitters[i])
    }

    /// All pairs `(m, m', splitter)` in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize, BeamSplitter)> + '_ {
        let n = self.sites;
        (1..=n).flat_map(move |m| ((m + 1)..=n).map(move |mp| (m, mp, self.element(m, mp))))
    }
}

/// Translation-invariant network: `t_{m,m+k} = τ_k`, `φ_{m,m+k} = φ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSpec {
    sites: usize,
    orders: Vec<BeamSplitter>,
    loss: f64,
    gamma: f64,
}

impl RegularSpec {
    /// `taus` and `phis` must both have length `M - 1`.
    pub fn new(sites: usize, taus: &[f64], phis: &[f64], loss: f64, gamma: f64) -> Result<Self> {
        if sites == 0 {
            return Err(Error::NoSites(sites));
        }
        if taus.len() != sites - 1 || phis.len() != sites - 1 {
            return Err(Error::RegularLength {
                expected: sites - 1,
                taus: taus.len(),
                phis: phis.len(),
            });
        }
        let orders = taus
            .iter()
            .zip(phis)
            .enumerate()
            .map(|(i, (&t, &p))| {
                BeamSplitter::new(t, p).map_err(|source| Error::OrderSplitter { k: i + 1, source })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_splitters(sites, orders, loss, gamma)
    }

    /// One splitter per neighbour order `k = 1..M-1`.
    pub fn from_splitters(sites: usize, orders: Vec<BeamSplitter>, loss: f64, gamma: f64) -> Result<Self> {
        if sites == 0 {
            return Err(Error::NoSites(sites));
        }
        if orders.len() != sites - 1 {
            return Err(Error::RegularLength {
                expected: sites - 1,
                taus: orders.len(),
                phis: orders.len(),
            });
        }
        check_rates(loss, gamma)?;
        Ok(Self { sites, orders, loss, gamma })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Splitter shared by all pairs at distance `k` (1-based).
    pub fn order(&self, k: usize) -> BeamSplitter {
        self.orders[k - 1]
    }

    pub fn splitters(&self) -> &[BeamSplitter] {
        &self.orders
    }

    pub fn taus(&self) -> Vec<f64> {
        self.orders.iter().map(BeamSplitter::transmissivity).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.orders.iter().map(BeamSplitter::phase).collect()
    }

    pub fn with_loss(&self, loss: f64) -> Result<Self> {
        check_rates(loss, self.gamma)?;
        Ok(Self { loss, ..self.clone() })
    }

    pub fn expand(&self) -> NetworkSpec {
        let n = self.sites;
        let mut splitters = vec![BeamSplitter::TRANSPARENT; n * n];
        for m in 1..=n {
            for mp in (m + 1)..=n {
                splitters[(m - 1) * n + (mp - 1)] = self.orders[mp - m - 1];
            }
        }
        NetworkSpec {
            sites: n,
            splitters,
            loss: self.loss,
            gamma: self.gamma,
        }
    }
}

/// Free-function form of [`RegularSpec::expand`].
pub fn expand_regular(spec: &RegularSpec) -> NetworkSpec {
    spec.expand()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
    use proptest::prelude::*;

    fn close(a: crate::C64, re: f64, im: f64) -> bool {
        (a - c(re, im)).norm() < 1e-15
    }

    #[test]
    fn transparent_splitter_is_identity() {
        let u = bs_unitary(&BeamSplitter::new(1.0, 0.0).unwrap());
        assert!(close(u[(0, 0)], 1.0, 0.0) && close(u[(1, 1)], 1.0, 0.0));
        assert!(close(u[(0, 1)], 0.0, 0.0) && close(u[(1, 0)], 0.0, 0.0));
    }

    #[test]
    fn full_reflection() {
        let u = bs_unitary(&BeamSplitter::new(0.0, 0.0).unwrap());
        assert!(close(u[(0, 0)], 0.0, 0.0));
        assert!(close(u[(0, 1)], 0.0, -1.0));
        assert!(close(u[(1, 0)], 0.0, -1.0));
        assert!(close(u[(1, 1)], 0.0, 0.0));
    }

    #[test]
    fn balanced_quarter_phase() {
        let u = bs_unitary(&BeamSplitter::new(0.5, FRAC_PI_2).unwrap());
        let h = FRAC_1_SQRT_2;
        assert!(close(u[(0, 0)], h, 0.0));
        assert!(close(u[(0, 1)], 0.0, -h));
        assert!(close(u[(1, 0)], -h, 0.0));
        assert!(close(u[(1, 1)], 0.0, -h));
    }

    #[test]
    fn phase_is_reduced() {
        let bs = BeamSplitter::new(0.3, -FRAC_PI_2).unwrap();
        assert!((bs.phase() - 3.0 * FRAC_PI_2).abs() < 1e-15);
        let bs = BeamSplitter::new(0.3, 5.0 * PI).unwrap();
        assert!((bs.phase() - PI).abs() < 1e-12);
        assert!(BeamSplitter::new(0.3, TAU).unwrap().phase() == 0.0);
    }

    #[test]
    fn splitter_validation() {
        assert_eq!(BeamSplitter::new(1.2, 0.0), Err(SplitterError::Transmissivity(1.2)));
        assert!(BeamSplitter::new(f64::NAN, 0.0).is_err());
        assert!(BeamSplitter::new(0.5, f64::INFINITY).is_err());
        assert!(BeamSplitter::from_reflectivity(-0.1, 0.0).is_err());
        assert!(BeamSplitter::from_parts(0.5, 0.6, 0.0).is_err());
        let bs = BeamSplitter::from_reflectivity(1e-20, 0.0).unwrap();
        assert_eq!(bs.transmissivity(), 1.0);
        assert_eq!(bs.reflection_amplitude(), 1e-10);
    }

    #[test]
    fn network_validation() {
        assert_eq!(NetworkSpec::new(0, 1.0, 0.0), Err(Error::NoSites(0)));
        assert_eq!(NetworkSpec::new(3, 0.0, 0.0), Err(Error::Gamma(0.0)));
        assert_eq!(NetworkSpec::new(3, 1.0, 1.5), Err(Error::Loss(1.5)));
        let bs = BeamSplitter::new(0.5, 0.0).unwrap();
        assert_eq!(
            NetworkSpec::from_elements(3, 1.0, 0.0, [(2, 2, bs)]),
            Err(Error::Pair { m: 2, mp: 2, sites: 3 })
        );
        assert_eq!(
            NetworkSpec::from_elements(3, 1.0, 0.0, [(1, 4, bs)]),
            Err(Error::Pair { m: 1, mp: 4, sites: 3 })
        );
        assert_eq!(
            NetworkSpec::from_elements(3, 1.0, 0.0, [(1, 2, bs), (1, 2, bs)]),
            Err(Error::DuplicatePair { m: 1, mp: 2 })
        );
    }

    #[test]
    fn missing_elements_are_transparent() {
        let bs = BeamSplitter::new(0.25, 1.0).unwrap();
        let net = NetworkSpec::from_elements(4, 1.0, 0.0, [(1, 3, bs)]).unwrap();
        assert_eq!(net.element(1, 3), bs);
        assert_eq!(net.element(1, 2), BeamSplitter::TRANSPARENT);
        assert_eq!(net.element(3, 4), BeamSplitter::TRANSPARENT);
        assert_eq!(net.elements().count(), 6);
    }

    #[test]
    fn expand_three_sites() {
        let spec = RegularSpec::new(3, &[0.5, 0.2], &[0.0, 1.0], 0.0, 1.0).unwrap();
        let net = spec.expand();
        assert_eq!(net.element(1, 2), BeamSplitter::new(0.5, 0.0).unwrap());
        assert_eq!(net.element(2, 3), BeamSplitter::new(0.5, 0.0).unwrap());
        assert_eq!(net.element(1, 3), BeamSplitter::new(0.2, 1.0).unwrap());
    }

    #[test]
    fn expand_two_sites() {
        let spec = RegularSpec::new(2, &[0.7], &[2.0], 0.1, 2.0).unwrap();
        let net = expand_regular(&spec);
        assert_eq!(net.element(1, 2), BeamSplitter::new(0.7, 2.0).unwrap());
        assert_eq!(net.loss(), 0.1);
        assert_eq!(net.gamma(), 2.0);
    }

    #[test]
    fn regular_length_mismatch() {
        assert_eq!(
            RegularSpec::new(4, &[0.1, 0.2], &[0.0, 0.0, 0.0], 0.0, 1.0),
            Err(Error::RegularLength { expected: 3, taus: 2, phis: 3 })
        );
        assert!(matches!(
            RegularSpec::new(3, &[0.1, 1.2], &[0.0, 0.0], 0.0, 1.0),
            Err(Error::OrderSplitter { k: 2, .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn splitter_is_unitary(t in 0.0f64..=1.0, phi in 0.0f64..TAU) {
            let u = bs_unitary(&BeamSplitter::new(t, phi).unwrap());
            prop_assert!(unitarity_defect(&u) < 1e-12);
        }
    }

    proptest! {

        #[test]
        fn expansion_is_translation_invariant(
            sites in 2usize..8,
            seed in proptest::collection::vec((0.0f64..=1.0, 0.0f64..TAU), 7),
        ) {
            let (taus, phis): (Vec<f64>, Vec<f64>) = seed[..sites - 1].iter().copied().unzip();
            let net = RegularSpec::new(sites, &taus, &phis, 0.0, 1.0).unwrap().expand();
            for k in 1..sites {
                for m in 1..=(sites - k) {
                    prop_assert_eq!(net.element(m, m + k), net.element(1, 1 + k));
                }
            }
        }
    }
}
