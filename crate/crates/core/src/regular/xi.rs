use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{TransferMatrix, XiMethod, XiProfile};
use crate::amplitudes::coupling_row;
use crate::linalg::{c, max_abs, phase_factor};
use crate::network::RegularSpec;
use crate::{CMatrix, Error, Result, C64};

/// Largest Schur off-diagonal entry still treated as a diagonal form.
const SCHUR_OFF_DIAGONAL: f64 = 1e-10;

/// `|u₊ - u₋|` below which the two-channel formula is abandoned.
const K2_DEGENERATE: f64 = 1e-6;

/// `ξ_1..ξ_kmax` from the general engine, including the `(1-ν)^k` loss.
pub fn xi_profile(spec: &RegularSpec, kmax: usize) -> Result<XiProfile> {
    let max = spec.sites() - 1;
    if kmax == 0 || kmax > max {
        return Err(Error::Kmax { kmax, max });
    }
    let row = coupling_row(&spec.expand(), 1);
    Ok(XiProfile {
        xi: row[1..=kmax].to_vec(),
        loss: spec.loss(),
        method: XiMethod::Engine,
    })
}

fn xi_by_powering(t: &CMatrix, kmax: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(kmax);
    let mut col = t.column(0).into_owned();
    for _ in 0..kmax {
        out.push(col[0]);
        col = t * col;
    }
    out
}

/// `ξ_k = (T^k)_{11}`, through the spectral form of `T`.
///
/// `T` is unitary, so its Schur form is diagonal up to rounding and
/// `ξ_k = Σ_j |U_{1j}|² λ_j^k`. If the Schur iteration does not settle on a
/// diagonal form the powers are taken directly.
pub fn xi_profile_closed(t: &TransferMatrix, kmax: usize) -> Result<XiProfile> {
    if kmax == 0 {
        return Err(Error::Kmax { kmax, max: usize::MAX });
    }
    let m = t.matrix();
    let n = m.nrows();
    let spectral = m.clone().try_schur(f64::EPSILON, 10_000).and_then(|schur| {
        let (q, s) = schur.unpack();
        let mut off = s.clone();
        off.fill_diagonal(c(0.0, 0.0));
        (max_abs(&off) <= SCHUR_OFF_DIAGONAL).then_some((q, s))
    });
    let (xi, method) = match spectral {
        Some((q, s)) => {
            let weights: Vec<f64> = (0..n).map(|j| q[(0, j)].norm_sqr()).collect();
            let lambdas: Vec<C64> = (0..n).map(|j| s[(j, j)]).collect();
            let xi = (1..=kmax)
                .map(|k| {
                    weights
                        .iter()
                        .zip(&lambdas)
                        .map(|(w, l)| l.powi(k as i32) * *w)
                        .sum()
                })
                .collect();
            (xi, XiMethod::Spectral)
        }
        None => (xi_by_powering(m, kmax), XiMethod::Powering),
    };
    Ok(XiProfile { xi, loss: 0.0, method })
}

/// Two-channel network (`τ_2 = 0`): `ξ_k = (u₊ e^{ikθ₊} - u₋ e^{ikθ₋}) / (u₊ - u₋)`.
///
/// `e^{iθ±}` are the eigenvalues of the 2×2 transfer matrix and `u±` the
/// matching ratios of its eigenvector components; both use the same square
/// root so the pairing is consistent. When `u₊ ≈ u₋` the eigenvalues merge
/// and the result comes from [`xi_profile_closed`] instead, flagged as
/// [`XiMethod::AnalyticFallback`].
pub fn xi_k2_analytic(tau1: f64, phi1: f64, phi2: f64, kmax: usize) -> Result<XiProfile> {
    let t = TransferMatrix::from_orders(
        &[crate::BeamSplitter::new(tau1, phi1).map_err(|source| Error::OrderSplitter { k: 1, source })?],
        phi2,
    );
    if kmax == 0 {
        return Err(Error::Kmax { kmax, max: usize::MAX });
    }
    let (e1, e2) = (phase_factor(phi1), phase_factor(phi2));
    let s = (1.0 - tau1).sqrt();
    let i = c(0.0, 1.0);
    let sum = i * e1 + e2;
    let diff = e2 - i * e1;
    let root = (diff * diff - sum * sum * tau1).sqrt();
    let lam_p = (-sum * s + root) * 0.5;
    let lam_m = (-sum * s - root) * 0.5;
    let base = (phase_factor(phi1 - phi2) + i) * s;
    let twist = i * phase_factor(-phi2) * root;
    let (u_p, u_m) = (base + twist, base - twist);
    if (u_p - u_m).norm() < K2_DEGENERATE {
        let mut fallback = xi_profile_closed(&t, kmax)?;
        fallback.method = XiMethod::AnalyticFallback;
        return Ok(fallback);
    }
    let denom = u_p - u_m;
    let xi = (1..=kmax as i32)
        .map(|k| (u_p * lam_p.powi(k) - u_m * lam_m.powi(k)) / denom)
        .collect();
    Ok(XiProfile {
        xi,
        loss: 0.0,
        method: XiMethod::Analytic,
    })
}
