//! GKSL form of the cascade master equation.
//!
//! The jump part of the generator is `Σ_{m,n} Θ_{m,n} (a_m ρ a_n† - ½{a_n† a_m, ρ})`
//! with `Θ_{mm} = γ` and `Θ_{m,m'} = γ ζ_{m,m'}` above the diagonal.
//! Diagonalising `Θ = w·diag(γ_i)·w†` gives the collective jump operators
//! `L_i = Σ_m w_{m,i} a_m` with rates `γ_i`. What the cascade terms leave over
//! is the Hamiltonian
//!
//! ```text
//! H = Σ_{m≠m'} h_{m,m'} a_m a_{m'}†,   h_{m,m'} = -(iγ/2) ζ_{m,m'} (m < m'),   h_{m',m} = conj(h_{m,m'})
//! ```
//!
//! Eigenvectors are ordered by descending rate and each column is rotated so
//! that its first entry of modulus above [`tol::PHASE_PIVOT`] is real positive.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitudes::CouplingMatrix;
use crate::linalg::{c, frobenius, hermitian_eigen_desc};
use crate::network::RegularSpec;
use crate::{tol, CMatrix, CVector, Error, Result, C64};

/// `Θ`: `γ` on the diagonal, `γζ` above it, Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMatrix {
    matrix: CMatrix,
    gamma: f64,
}

impl ThetaMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_theta(zeta: &CouplingMatrix, gamma: f64) -> ThetaMatrix {
    let n = zeta.sites();
    let matrix = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(gamma, 0.0)
        } else if i < j {
            zeta.get(i + 1, j + 1) * gamma
        } else {
            (zeta.get(j + 1, i + 1) * gamma).conj()
        }
    });
    ThetaMatrix { matrix, gamma }
}

/// Rates, jump-operator coefficients and Hamiltonian coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslForm {
    /// `γ_i`, descending.
    pub rates: Vec<f64>,
    /// Column `i` holds the coefficients of `L_i` on `a_1..a_M`.
    pub lindblad: CMatrix,
    /// `h_{m,m'}`: coefficient of `a_m a_{m'}†` in `H`.
    pub heff: CMatrix,
}

impl GkslForm {
    pub fn sites(&self) -> usize {
        self.rates.len()
    }

    /// Coefficients of `L_i` (0-based `i`).
    pub fn jump_operator(&self, i: usize) -> CVector {
        self.lindblad.column(i).into_owned()
    }

    /// `w·diag(γ)·w†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.sites();
        let scaled = CMatrix::from_fn(n, n, |r, col| self.lindblad[(r, col)] * self.rates[col]);
        scaled * self.lindblad.adjoint()
    }

    /// Frobenius distance between `w·diag(γ)·w†` and `Θ`.
    pub fn reconstruction_error(&self, theta: &ThetaMatrix) -> f64 {
        frobenius(&(self.reconstruct() - theta.matrix()))
    }

    /// Projector onto the span of the jump operators whose rate lies within
    /// `window` of `rate`.
    pub fn spectral_projector(&self, rate: f64, window: f64) -> CMatrix {
        let n = self.sites();
        let mut p = CMatrix::zeros(n, n);
        for (i, &g) in self.rates.iter().enumerate() {
            if (g - rate).abs() <= window {
                let v = self.lindblad.column(i);
                p += v * v.adjoint();
            }
        }
        p
    }

    /// The same dynamics in the gauge `a_m → e^{imθ} a_m`: `w → G w`,
    /// `h → G h G†`, with `G = diag(e^{imθ})`.
    pub fn regauged(&self, theta: f64) -> GkslForm {
        let n = self.sites();
        let g: Vec<C64> = (1..=n).map(|m| C64::from_polar(1.0, m as f64 * theta)).collect();
        let mut lindblad = CMatrix::from_fn(n, n, |r, col| g[r] * self.lindblad[(r, col)]);
        fix_column_phases(&mut lindblad);
        let heff = CMatrix::from_fn(n, n, |r, col| g[r] * self.heff[(r, col)] * g[col].conj());
        GkslForm {
            rates: self.rates.clone(),
            lindblad,
            heff,
        }
    }
}

/// Hamiltonian coefficients `h` from the couplings.
pub fn heff_coefficients(zeta: &CouplingMatrix, gamma: f64) -> CMatrix {
    let n = zeta.sites();
    let scale = c(0.0, -gamma / 2.0);
    CMatrix::from_fn(n, n, |i, j| {
        if i < j {
            zeta.get(i + 1, j + 1) * scale
        } else if i > j {
            (zeta.get(j + 1, i + 1) * scale).conj()
        } else {
            c(0.0, 0.0)
        }
    })
}

fn fix_column_phases(w: &mut CMatrix) {
    for mut col in w.column_iter_mut() {
        if let Some(pivot) = col.iter().find(|z| z.norm() > tol::PHASE_PIVOT).copied() {
            let rot = pivot.conj() / pivot.norm();
            for z in col.iter_mut() {
                *z *= rot;
            }
        }
    }
}

/// Diagonalise `Θ` into rates and jump operators.
pub fn gksl_decompose(theta: &ThetaMatrix, zeta: &CouplingMatrix) -> Result<GkslForm> {
    if theta.sites() != zeta.sites() {
        return Err(Error::SizeMismatch {
            zeta: zeta.sites(),
            theta: theta.sites(),
        });
    }
    let (values, mut lindblad) = hermitian_eigen_desc(theta.matrix());
    let rates = values
        .into_iter()
        .map(|v| {
            if v >= 0.0 {
                Ok(v)
            } else if v >= -tol::PSD {
                Ok(0.0)
            } else {
                Err(Error::NotPositive {
                    eigenvalue: v,
                    tolerance: tol::PSD,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    fix_column_phases(&mut lindblad);
    Ok(GkslForm {
        rates,
        lindblad,
        heff: heff_coefficients(zeta, theta.gamma()),
    })
}

/// Regular network whose couplings split the sites into an odd and an even
/// species: `τ_1 = tau1`, `τ_2 = 0`, `φ_2 = φ_1 + π/2`. Orders above two are
/// never reached and are left transparent.
pub fn evenodd_spec(sites: usize, tau1: f64, phi1: f64, gamma: f64) -> Result<RegularSpec> {
    if sites < 2 {
        return Err(Error::EvenOddSites(sites));
    }
    let mut taus = alloc::vec![1.0; sites - 1];
    let mut phis = alloc::vec![0.0; sites - 1];
    taus[0] = tau1;
    phis[0] = phi1;
    if sites > 2 {
        taus[1] = 0.0;
        phis[1] = phi1 + FRAC_PI_2;
    }
    RegularSpec::new(sites, &taus, &phis, 0.0, gamma)
}

/// Couplings of the even/odd network in the gauge `φ_1 = -π/2`:
/// `√(1-τ_1)` at odd distance, 1 at even distance.
fn evenodd_real_couplings(sites: usize, tau1: f64) -> CouplingMatrix {
    let s = (1.0 - tau1).sqrt();
    CouplingMatrix::from_upper(CMatrix::from_fn(sites, sites, |i, j| {
        if j <= i {
            c(0.0, 0.0)
        } else if (j - i) % 2 == 1 {
            c(s, 0.0)
        } else {
            c(1.0, 0.0)
        }
    }))
}

/// Extend orthonormal columns to a full orthonormal basis.
fn complete_basis(columns: &[CVector], n: usize) -> CMatrix {
    let mut basis: Vec<CVector> = columns.to_vec();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVector::from_fn(n, |r, _| if r == e { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / c(norm, 0.0));
        }
    }
    CMatrix::from_columns(&basis)
}

fn normalised(v: CVector) -> CVector {
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Site-parity vector: `odd` on odd sites, `even` on even sites.
fn parity_vector(n: usize, odd: f64, even: f64) -> CVector {
    CVector::from_fn(n, |r, _| c(if r % 2 == 0 { odd } else { even }, 0.0))
}

/// Closed-form GKSL data of the even/odd network, in the gauge `φ_1 = -π/2`.
///
/// Only two rates are nonzero. For even `M`:
/// `γ_± = Mγ(1 ± √(1-τ_1))/2` with `L_+ ∝ Σ a_m` and `L_- ∝ Σ (-1)^m a_m`.
/// For odd `M`: `γ_± = (γ/2)(M ± R)`, `R = √(M² - (M²-1)τ_1)`, with
/// `L_± ∝ Σ_{odd} a_m + c_± Σ_{even} a_m`. At `τ_1 = 1` the operators become
/// the odd-site and even-site sums. The remaining columns of `w` complete an
/// orthonormal basis with zero rate. Use [`GkslForm::regauged`] with
/// `θ = φ_1 + π/2` for other first-order phases.
pub fn lindblad_closed_form_evenodd(sites: usize, tau1: f64, gamma: f64) -> Result<GkslForm> {
    if sites < 2 {
        return Err(Error::EvenOddSites(sites));
    }
    if !(0.0..=1.0).contains(&tau1) {
        return Err(Error::OrderSplitter {
            k: 1,
            source: crate::SplitterError::Transmissivity(tau1),
        });
    }
    let n = sites;
    let mf = n as f64;
    let s = (1.0 - tau1).sqrt();
    let (rates2, vectors): ([f64; 2], [CVector; 2]) = if n % 2 == 0 {
        let rates = [mf * gamma * (1.0 + s) / 2.0, mf * gamma * (1.0 - s) / 2.0];
        if s == 0.0 {
            let odd = normalised(parity_vector(n, 1.0, 0.0));
            let even = normalised(parity_vector(n, 0.0, 1.0));
            (rates, [odd, even])
        } else {
            let uniform = normalised(parity_vector(n, 1.0, 1.0));
            let alternating = normalised(parity_vector(n, -1.0, 1.0));
            (rates, [uniform, alternating])
        }
    } else {
        let r = (mf * mf - (mf * mf - 1.0) * tau1).sqrt();
        let rates = [gamma * (mf + r) / 2.0, gamma * (mf - r) / 2.0];
        // c_+ = (R - 1)/((M-1)s) = (M+1)s/(R+1); L_- is scaled by 1/|c_-|.
        let upper = normalised(parity_vector(n, 1.0, (mf + 1.0) * s / (r + 1.0)));
        let lower = normalised(parity_vector(n, (mf - 1.0) * s / (1.0 + r), -1.0));
        (rates, [upper, lower])
    };
    let mut kept: Vec<CVector> = Vec::new();
    let mut rates = Vec::with_capacity(n);
    for (rate, v) in rates2.into_iter().zip(vectors) {
        if rate > 0.0 {
            rates.push(rate);
            kept.push(v);
        }
    }
    let mut lindblad = complete_basis(&kept, n);
    rates.resize(n, 0.0);
    fix_column_phases(&mut lindblad);
    let zeta = evenodd_real_couplings(n, tau1);
    Ok(GkslForm {
        rates,
        lindblad,
        heff: heff_coefficients(&zeta, gamma),
    })
}
