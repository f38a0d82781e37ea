use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{DimensionCap, FockSpace};
use crate::linalg::{c, hermiticity_defect, min_eigenvalue};
use crate::{tol, CMatrix, CVector, Error, Result, C64};

/// Density matrix on `M` sites truncated to `d` levels each.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    sites: usize,
    local_dim: usize,
    rho: CMatrix,
}

impl TruncatedState {
    fn space(sites: usize, d: usize) -> Result<FockSpace> {
        if sites == 0 {
            return Err(Error::NoSites(sites));
        }
        FockSpace::new(sites, d, DimensionCap::UNLIMITED)
    }

    fn index(space: &FockSpace, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != space.sites {
            return Err(Error::Site {
                site: occupations.len(),
                sites: space.sites,
            });
        }
        let mut idx = 0;
        for (m, &n) in occupations.iter().enumerate() {
            if n >= space.d {
                return Err(Error::Occupation {
                    site: m + 1,
                    n,
                    max: space.d - 1,
                });
            }
            idx = idx * space.d + n;
        }
        Ok(idx)
    }

    /// Fock state `|n_1 … n_M⟩`.
    pub fn fock(d: usize, occupations: &[usize]) -> Result<Self> {
        let space = Self::space(occupations.len(), d)?;
        let idx = Self::index(&space, occupations)?;
        let mut rho = CMatrix::zeros(space.dim, space.dim);
        rho[(idx, idx)] = c(1.0, 0.0);
        Ok(Self {
            sites: space.sites,
            local_dim: d,
            rho,
        })
    }

    /// Sites listed in `excited` (1-based) hold one quantum, the rest are empty.
    pub fn excited(d: usize, sites: usize, excited: &[usize]) -> Result<Self> {
        let mut occ = alloc::vec![0usize; sites];
        for &s in excited {
            if s == 0 || s > sites {
                return Err(Error::Site { site: s, sites });
            }
            occ[s - 1] = 1;
        }
        Self::fock(d, &occ)
    }

    /// Normalised superposition `Σ c_j |occupations_j⟩`.
    pub fn superposition(d: usize, sites: usize, parts: &[(C64, Vec<usize>)]) -> Result<Self> {
        let space = Self::space(sites, d)?;
        let mut psi = CVector::zeros(space.dim);
        for (amp, occ) in parts {
            psi[Self::index(&space, occ)?] += amp;
        }
        let norm = psi.norm();
        let psi = psi / c(norm, 0.0);
        Ok(Self {
            sites,
            local_dim: d,
            rho: &psi * psi.adjoint(),
        })
    }

    pub fn from_density(d: usize, sites: usize, rho: CMatrix) -> Result<Self> {
        let space = Self::space(sites, d)?;
        if rho.nrows() != space.dim || rho.ncols() != space.dim {
            return Err(Error::StateShape {
                found_d: d,
                found_m: sites,
                state_d: d,
                state_m: rho.nrows(),
            });
        }
        Ok(Self {
            sites,
            local_dim: d,
            rho,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub(crate) fn with_rho(&self, rho: CMatrix) -> Self {
        Self { rho, ..self.clone() }
    }

    fn fock_space(&self) -> FockSpace {
        FockSpace {
            sites: self.sites,
            d: self.local_dim,
            dim: self.rho.nrows(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// `⟨a_m† a_m⟩` for every site.
    pub fn populations(&self) -> Vec<f64> {
        let space = self.fock_space();
        (1..=self.sites)
            .map(|m| {
                (0..space.dim)
                    .map(|i| space.occupation(i, m) as f64 * self.rho[(i, i)].re)
                    .sum()
            })
            .collect()
    }

    /// `⟨a_m⟩ = Tr(a_m ρ)` for every site.
    pub fn moments(&self) -> Vec<C64> {
        let space = self.fock_space();
        (1..=self.sites)
            .map(|m| {
                let stride = space.stride(m);
                (0..space.dim)
                    .filter_map(|i| {
                        let n = space.occupation(i, m);
                        (n > 0).then(|| self.rho[(i, i - stride)] * (n as f64).sqrt())
                    })
                    .sum()
            })
            .collect()
    }

    /// Deviations `(|tr ρ - 1|, max|ρ - ρ†|, min eigenvalue)`.
    pub fn invariants(&self) -> (f64, f64, f64) {
        let trace = (self.trace() - 1.0).norm();
        let herm = hermiticity_defect(&self.rho);
        let hermitian_part = (&self.rho + self.rho.adjoint()) * c(0.5, 0.0);
        (trace, herm, min_eigenvalue(&hermitian_part))
    }

    /// Fails with the first violated invariant.
    pub fn check(&self, t: f64) -> Result<()> {
        let (trace, herm, min_eig) = self.invariants();
        if !(trace <= tol::TRACE) {
            return Err(Error::StateInvariant { t, what: "trace", value: trace });
        }
        if !(herm <= tol::STATE_HERMITIAN) {
            return Err(Error::StateInvariant { t, what: "hermiticity", value: herm });
        }
        if !(min_eig >= -tol::POSITIVITY) {
            return Err(Error::StateInvariant { t, what: "positivity", value: min_eig });
        }
        Ok(())
    }
}
