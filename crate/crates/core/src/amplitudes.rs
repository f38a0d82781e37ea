//! Propagation amplitudes and coupling constants.
//!
//! Everything here lives in the single-excitation sector: a product of
//! splitters acting on `M` channel modes is an `M×M` matrix. With vacuum
//! inputs the coupling constant between sites `m < m'` is the amplitude for a
//! signal injected into channel `m` at level `m` to sit in channel `m'` when
//! it reaches level `m'`, times `(1-ν)` per level crossed.
//!
//! [`coupling_matrix_oracle`] computes the same numbers by summing over every
//! directed path through the lattice, one splitter decision at a time. It
//! shares no code with the matrix-product route and exists to check it.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{c, phase_factor};
use crate::network::{BeamSplitter, NetworkSpec};
use crate::{CMatrix, Error, Result, C64};

/// Largest network accepted by the path-enumeration oracle.
pub const ORACLE_MAX_SITES: usize = 12;

/// Coefficients of a propagated channel operator: entry `k` (0-based here,
/// channel `k + 1`) is the amplitude `A^{(k+1)}` on input channel `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    /// Level (1-based) the amplitudes are evaluated at.
    pub level: usize,
    pub entries: Vec<C64>,
}

impl AmplitudeVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Strictly upper-triangular matrix of coupling constants `ζ_{m,m'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    zeta: CMatrix,
}

impl CouplingMatrix {
    /// Wrap a matrix, discarding anything on or below the diagonal.
    pub fn from_upper(mut zeta: CMatrix) -> Self {
        let n = zeta.nrows();
        for i in 0..n {
            for j in 0..=i.min(zeta.ncols().saturating_sub(1)) {
                zeta[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Self { zeta }
    }

    pub fn zeros(sites: usize) -> Self {
        Self {
            zeta: CMatrix::zeros(sites, sites),
        }
    }

    pub fn sites(&self) -> usize {
        self.zeta.nrows()
    }

    /// `ζ_{m,m'}` for `m < m'` (1-based); zero otherwise.
    pub fn get(&self, m: usize, mp: usize) -> C64 {
        self.zeta[(m - 1, mp - 1)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.zeta
    }

    pub fn max_abs_diff(&self, other: &CouplingMatrix) -> f64 {
        self.zeta
            .iter()
            .zip(other.zeta.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Apply the splitter between channels `lo < hi` (0-based) to a column.
fn mix_column(v: &mut [C64], lo: usize, hi: usize, bs: &BeamSplitter) {
    let s = bs.transmission_amplitude();
    let r = c(0.0, -bs.reflection_amplitude());
    let e = phase_factor(bs.phase());
    let (x, y) = (v[lo], v[hi]);
    v[lo] = x * s + y * r;
    v[hi] = e * (x * r + y * s);
}

/// Left-multiply by the splitter embedded at rows `lo`, `hi`.
fn mix_rows(mat: &mut CMatrix, lo: usize, hi: usize, bs: &BeamSplitter) {
    let s = bs.transmission_amplitude();
    let r = c(0.0, -bs.reflection_amplitude());
    let e = phase_factor(bs.phase());
    for col in 0..mat.ncols() {
        let (x, y) = (mat[(lo, col)], mat[(hi, col)]);
        mat[(lo, col)] = x * s + y * r;
        mat[(hi, col)] = e * (x * r + y * s);
    }
}

fn check_level(net: &NetworkSpec, level: usize) -> Result<()> {
    let max = net.sites().saturating_sub(1);
    if level == 0 || level > max {
        return Err(Error::Level { level, max });
    }
    Ok(())
}

fn apply_level_rows(net: &NetworkSpec, level: usize, mat: &mut CMatrix) {
    for mp in (level + 1)..=net.sites() {
        mix_rows(mat, level - 1, mp - 1, &net.element(level, mp));
    }
}

fn apply_level_column(net: &NetworkSpec, level: usize, v: &mut [C64]) {
    for mp in (level + 1)..=net.sites() {
        mix_column(v, level - 1, mp - 1, &net.element(level, mp));
    }
}

/// Matrix of `V_m = ··· U_{m,m+2} U_{m,m+1}` in the single-mode sector.
pub fn level_unitary(net: &NetworkSpec, m: usize) -> Result<CMatrix> {
    check_level(net, m)?;
    let n = net.sites();
    let mut mat = CMatrix::identity(n, n);
    apply_level_rows(net, m, &mut mat);
    Ok(mat)
}

/// `V_{to-1} ··· V_{from}`; the identity when `from == to`.
///
/// Entry `(m', m)` (1-based) is the amplitude for channel `m` at level `from`
/// to end up in channel `m'` at level `to`.
pub fn propagate(net: &NetworkSpec, from_level: usize, to_level: usize) -> Result<CMatrix> {
    let n = net.sites();
    for level in [from_level, to_level] {
        if level == 0 || level > n {
            return Err(Error::Level { level, max: n });
        }
    }
    if from_level > to_level {
        return Err(Error::LevelOrder {
            from: from_level,
            to: to_level,
        });
    }
    let mut mat = CMatrix::identity(n, n);
    for level in from_level..to_level {
        apply_level_rows(net, level, &mut mat);
    }
    Ok(mat)
}

/// Coefficients of `c_{E(to)} = V†_{to-1←from} b_{to} V_{to-1←from}` on the
/// input channels at level `from`, including the `(1-ν)` per-level loss.
pub fn amplitude_vector(net: &NetworkSpec, from_level: usize, to_level: usize) -> Result<AmplitudeVector> {
    let p = propagate(net, from_level, to_level)?;
    let damp = (1.0 - net.loss()).powi((to_level - from_level) as i32);
    Ok(AmplitudeVector {
        level: to_level,
        entries: p.row(to_level - 1).iter().map(|z| z * damp).collect(),
    })
}

/// Lossless `A^{(m)}_{m'←m}` for all `m' > m` (0-based index `m' - 1`).
fn lossless_row(net: &NetworkSpec, m: usize) -> Vec<C64> {
    let n = net.sites();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[m - 1] = C64::new(1.0, 0.0);
    for level in m..n {
        apply_level_column(net, level, &mut v);
        out[level] = v[level];
    }
    out
}

/// `ζ_{m,m'}` for one source site `m` and every `m' > m`, indexed by `m' - 1`.
pub fn coupling_row(net: &NetworkSpec, m: usize) -> Vec<C64> {
    let keep = 1.0 - net.loss();
    let mut row = lossless_row(net, m);
    for (idx, z) in row.iter_mut().enumerate().skip(m) {
        *z *= keep.powi((idx + 1 - m) as i32);
    }
    row
}

/// `ζ_{m,m'} = (1-ν)^{m'-m} A^{(m)}_{m'←m}` via matrix products.
pub fn coupling_matrix(net: &NetworkSpec) -> CouplingMatrix {
    let n = net.sites();
    let mut zeta = CMatrix::zeros(n, n);
    for m in 1..=n {
        for (idx, z) in coupling_row(net, m).into_iter().enumerate().skip(m) {
            zeta[(m - 1, idx)] = z;
        }
    }
    CouplingMatrix { zeta }
}

/// Per-splitter factors in the forward (signal) direction.
///
/// The lower channel keeps `√t` on transmission and jumps up with
/// `-i e^{-iφ} √(1-t)`; the upper channel keeps `e^{-iφ} √t` and drops down
/// with `-i √(1-t)`.
struct Hop {
    stay_low: C64,
    low_to_high: C64,
    stay_high: C64,
    high_to_low: C64,
}

impl Hop {
    fn new(bs: &BeamSplitter) -> Self {
        let (sin_p, cos_p) = bs.phase().sin_cos();
        let phase = C64::new(cos_p, -sin_p);
        let t = bs.transmissivity().sqrt();
        let r = bs.reflectivity().sqrt();
        Hop {
            stay_low: C64::new(t, 0.0),
            low_to_high: phase * C64::new(0.0, -r),
            stay_high: phase * t,
            high_to_low: C64::new(0.0, -r),
        }
    }
}

struct Walker<'a> {
    sites: usize,
    hops: &'a [Hop],
    keep: f64,
    // Accumulated ζ_{source, ·}, 0-based target index.
    sums: Vec<C64>,
}

impl Walker<'_> {
    fn hop(&self, m: usize, mp: usize) -> &Hop {
        &self.hops[(m - 1) * self.sites + (mp - 1)]
    }

    /// Signal in `channel` just before splitter `(level, partner)`.
    fn walk(&mut self, level: usize, partner: usize, channel: usize, amp: C64) {
        if amp == C64::new(0.0, 0.0) {
            return;
        }
        if partner > self.sites {
            // Level finished; a signal left in channel `level` or below is gone.
            let next = level + 1;
            if channel < next || next > self.sites {
                return;
            }
            let amp = amp * self.keep;
            if channel == next {
                self.sums[next - 1] += amp;
            }
            self.walk(next, next + 1, channel, amp);
            return;
        }
        if channel == level {
            let h = self.hop(level, partner);
            let (stay, jump) = (h.stay_low, h.low_to_high);
            self.walk(level, partner + 1, channel, amp * stay);
            self.walk(level, partner + 1, partner, amp * jump);
        } else if channel == partner {
            let h = self.hop(level, partner);
            let (stay, drop) = (h.stay_high, h.high_to_low);
            self.walk(level, partner + 1, channel, amp * stay);
            self.walk(level, partner + 1, level, amp * drop);
        } else {
            self.walk(level, partner + 1, channel, amp);
        }
    }
}

/// `ζ_{m,m'}` by brute-force enumeration of lattice paths (`M <= 12`).
pub fn coupling_matrix_oracle(net: &NetworkSpec) -> Result<CouplingMatrix> {
    let n = net.sites();
    if n > ORACLE_MAX_SITES {
        return Err(Error::OracleSize {
            sites: n,
            max: ORACLE_MAX_SITES,
        });
    }
    let mut hops = Vec::with_capacity(n * n);
    for m in 1..=n {
        for mp in 1..=n {
            let bs = net.try_element(m, mp).unwrap_or(BeamSplitter::TRANSPARENT);
            hops.push(Hop::new(&bs));
        }
    }
    let mut zeta = CMatrix::zeros(n, n);
    for m in 1..n {
        let mut walker = Walker {
            sites: n,
            hops: &hops,
            keep: 1.0 - net.loss(),
            sums: vec![C64::new(0.0, 0.0); n],
        };
        walker.walk(m, m + 1, m, C64::new(1.0, 0.0));
        for (idx, z) in walker.sums.into_iter().enumerate().skip(m) {
            zeta[(m - 1, idx)] = z;
        }
    }
    Ok(CouplingMatrix { zeta })
}
