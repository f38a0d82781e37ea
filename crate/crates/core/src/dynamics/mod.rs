//! Master-equation dynamics on truncated Fock spaces.
//!
//! Each site carries a `d`-level truncated mode; site 1 is the leftmost tensor
//! factor, so basis state `|n_1 … n_M⟩` has index `Σ n_m d^{M-m}`.
//!
//! A [`Superoperator`] is a sum of terms `c·A ρ B` with sparse `A`, `B`. It is
//! applied to dense density matrices directly, and can be expanded into its
//! matrix on column-stacked `vec(ρ)` (index `i + D j` for `ρ_{ij}`), where the
//! term `A ρ B` has entry `A_{ik} B_{lj}` at `(i + D j, k + D l)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitudes::{coupling_matrix, CouplingMatrix};
use crate::gksl::GkslForm;
use crate::linalg::c;
use crate::network::NetworkSpec;
use crate::{CMatrix, Error, Result, C64};

mod integrate;
mod sparse;
mod state;

pub use integrate::{evolve, evolve_with, EvolveOptions, Trajectory};
pub use sparse::CsrMatrix;
pub use state::TruncatedState;

/// Truncated bosonic lowering operator: `√j` at `(j-1, j)`.
pub fn lowering_operator(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    let mut a = CMatrix::zeros(d, d);
    for j in 1..d {
        a[(j - 1, j)] = c((j as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Upper bound on the vectorised dimension `d^{2M}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionCap(pub usize);

impl Default for DimensionCap {
    fn default() -> Self {
        DimensionCap(1 << 24)
    }
}

impl DimensionCap {
    pub const UNLIMITED: DimensionCap = DimensionCap(usize::MAX);

    /// Hilbert-space dimension `d^M`, if `d^{2M}` is within the cap.
    pub fn check(self, d: usize, sites: usize) -> Result<usize> {
        if d < 2 {
            return Err(Error::LocalDimension(d));
        }
        let exp = u32::try_from(sites).unwrap_or(u32::MAX);
        let hilbert = d.checked_pow(exp);
        let vec_dim = hilbert.and_then(|h| h.checked_mul(h));
        match (hilbert, vec_dim) {
            (Some(h), Some(v)) if v <= self.0 => Ok(h),
            _ => Err(Error::DimensionCap {
                dim: vec_dim.unwrap_or(usize::MAX),
                cap: self.0,
            }),
        }
    }
}

/// Shape of a truncated many-site space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct FockSpace {
    pub sites: usize,
    pub d: usize,
    pub dim: usize,
}

impl FockSpace {
    pub fn new(sites: usize, d: usize, cap: DimensionCap) -> Result<Self> {
        let dim = cap.check(d, sites)?;
        Ok(Self { sites, d, dim })
    }

    /// Index stride of site `m` (1-based).
    pub fn stride(&self, m: usize) -> usize {
        self.d.pow((self.sites - m) as u32)
    }

    /// Occupation of site `m` in basis state `idx`.
    pub fn occupation(&self, idx: usize, m: usize) -> usize {
        (idx / self.stride(m)) % self.d
    }

    /// `a_m` on the full space.
    pub fn lowering(&self, m: usize) -> CsrMatrix {
        let stride = self.stride(m);
        let t = (0..self.dim)
            .filter_map(|idx| {
                let n = self.occupation(idx, m);
                (n > 0).then(|| (idx - stride, idx, c((n as f64).sqrt(), 0.0)))
            })
            .collect();
        CsrMatrix::from_triplets(self.dim, self.dim, t)
    }

    /// `Σ_m coeffs[m] a_m`.
    pub fn combination(&self, coeffs: impl IntoIterator<Item = C64>) -> CsrMatrix {
        let mut t = Vec::new();
        for (m0, w) in coeffs.into_iter().enumerate() {
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            t.extend(self.lowering(m0 + 1).triplets().map(|(r, col, v)| (r, col, v * w)));
        }
        CsrMatrix::from_triplets(self.dim, self.dim, t)
    }
}

/// One term `coef · A ρ B`; `None` stands for the identity.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coef: C64,
    left: Option<CsrMatrix>,
    right: Option<CsrMatrix>,
}

/// A linear map on density matrices of a truncated `M`-site space.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    sites: usize,
    local_dim: usize,
    dim: usize,
    terms: Vec<Term>,
}

impl Superoperator {
    fn empty(space: FockSpace) -> Self {
        Self {
            sites: space.sites,
            local_dim: space.d,
            dim: space.dim,
            terms: Vec::new(),
        }
    }

    /// The zero generator on `M` sites of dimension `d`.
    pub fn zero(sites: usize, d: usize, cap: DimensionCap) -> Result<Self> {
        Ok(Self::empty(FockSpace::new(sites, d, cap)?))
    }

    fn push(&mut self, coef: C64, left: Option<CsrMatrix>, right: Option<CsrMatrix>) {
        if coef != C64::new(0.0, 0.0) {
            self.terms.push(Term { coef, left, right });
        }
    }

    /// `coef · (2 L ρ L† - L†L ρ - ρ L†L) / 2`.
    fn push_dissipator(&mut self, coef: f64, l: &CsrMatrix) {
        let ld = l.adjoint();
        let ldl = ld.matmul(l);
        self.push(c(coef, 0.0), Some(l.clone()), Some(ld));
        self.push(c(-coef / 2.0, 0.0), Some(ldl.clone()), None);
        self.push(c(-coef / 2.0, 0.0), None, Some(ldl));
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Hilbert-space dimension `d^M`.
    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    /// `L(ρ)`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for term in &self.terms {
            let left = match &term.left {
                Some(a) => a.mul_dense(rho),
                None => rho.clone(),
            };
            let both = match &term.right {
                Some(b) => b.left_mul_dense(&left),
                None => left,
            };
            out.zip_apply(&both, |o, x| *o += x * term.coef);
        }
        out
    }

    /// Matrix on column-stacked `vec(ρ)`.
    pub fn to_matrix(&self) -> CsrMatrix {
        let n = self.dim;
        let identity = CsrMatrix::identity(n);
        let mut t = Vec::new();
        for term in &self.terms {
            let a = term.left.as_ref().unwrap_or(&identity);
            let b = term.right.as_ref().unwrap_or(&identity);
            for (i, k, av) in a.triplets() {
                for (l, j, bv) in b.triplets() {
                    t.push((i + n * j, k + n * l, term.coef * av * bv));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, t)
    }

    /// `‖self - other‖_F` of the vectorised matrices.
    pub fn frobenius_distance(&self, other: &Superoperator) -> f64 {
        self.to_matrix().frobenius_distance(&other.to_matrix())
    }

    /// `max |Tr L(E_{kl})|` over matrix units: zero iff the map is trace
    /// preserving. Uses `Tr(A ρ B) = Tr(B A ρ)`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let n = self.dim;
        let mut t = Vec::new();
        for term in &self.terms {
            let product = match (&term.right, &term.left) {
                (Some(b), Some(a)) => b.matmul(a),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => CsrMatrix::identity(n),
            };
            t.extend(product.triplets().map(|(r, col, v)| (r, col, v * term.coef)));
        }
        CsrMatrix::from_triplets(n, n, t).max_abs()
    }
}

/// Cascade generator: local damping at rate `γ` on every site plus the
/// directed terms `γ(ζ a_m [ρ, a_{m'}†] + ζ* [a_{m'}, ρ] a_m†)` for `m < m'`.
pub fn cascade_generator(net: &NetworkSpec, d: usize, cap: DimensionCap) -> Result<Superoperator> {
    let space = FockSpace::new(net.sites(), d, cap)?;
    let zeta = coupling_matrix(net);
    Ok(cascade_from_couplings(space, &zeta, net.gamma()))
}

fn cascade_from_couplings(space: FockSpace, zeta: &CouplingMatrix, gamma: f64) -> Superoperator {
    let n = space.sites;
    let lowering: Vec<CsrMatrix> = (1..=n).map(|m| space.lowering(m)).collect();
    let raising: Vec<CsrMatrix> = lowering.iter().map(CsrMatrix::adjoint).collect();
    let mut gen = Superoperator::empty(space);
    for a in &lowering {
        gen.push_dissipator(gamma, a);
    }
    for m in 0..n {
        for mp in (m + 1)..n {
            let z = zeta.get(m + 1, mp + 1) * gamma;
            if z == C64::new(0.0, 0.0) {
                continue;
            }
            // z a_m ρ a_{m'}† - z a_m a_{m'}† ρ
            gen.push(z, Some(lowering[m].clone()), Some(raising[mp].clone()));
            gen.push(-z, Some(lowering[m].matmul(&raising[mp])), None);
            // z* a_{m'} ρ a_m† - z* ρ a_{m'} a_m†
            gen.push(z.conj(), Some(lowering[mp].clone()), Some(raising[m].clone()));
            gen.push(-z.conj(), None, Some(lowering[mp].matmul(&raising[m])));
        }
    }
    gen
}

/// GKSL generator `-i[H, ρ] + Σ_i γ_i (L_i ρ L_i† - ½{L_i†L_i, ρ})`.
pub fn gksl_generator(form: &GkslForm, d: usize, cap: DimensionCap) -> Result<Superoperator> {
    let n = form.sites();
    let space = FockSpace::new(n, d, cap)?;
    let mut gen = Superoperator::empty(space);
    for (i, &rate) in form.rates.iter().enumerate() {
        if rate == 0.0 {
            continue;
        }
        let l = space.combination(form.lindblad.column(i).iter().copied());
        gen.push_dissipator(rate, &l);
    }
    let lowering: Vec<CsrMatrix> = (1..=n).map(|m| space.lowering(m)).collect();
    let mut h = CsrMatrix::zeros(space.dim, space.dim);
    for m in 0..n {
        for mp in 0..n {
            let coef = form.heff[(m, mp)];
            if m == mp || coef == C64::new(0.0, 0.0) {
                continue;
            }
            let term = lowering[m].matmul(&lowering[mp].adjoint()).scale(coef);
            h = h.add(&term);
        }
    }
    if h.nnz() > 0 {
        gen.push(c(0.0, -1.0), Some(h.clone()), None);
        gen.push(c(0.0, 1.0), None, Some(h));
    }
    Ok(gen)
}

/// Drift matrix of the first moments: `d⟨a⟩/dt = G ⟨a⟩`, with
/// `G_{mm} = -γ/2` and `G_{m'm} = -γ ζ_{m,m'}` for `m' > m`.
pub fn first_moment_drift(zeta: &CouplingMatrix, gamma: f64) -> CMatrix {
    let n = zeta.sites();
    CMatrix::from_fn(n, n, |r, col| {
        if r == col {
            c(-gamma / 2.0, 0.0)
        } else if r > col {
            -zeta.get(col + 1, r + 1) * gamma
        } else {
            c(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gksl::{build_theta, evenodd_spec, gksl_decompose, lindblad_closed_form_evenodd};
    use crate::network::BeamSplitter;
    use core::f64::consts::{FRAC_PI_2, TAU};
    use proptest::prelude::*;

    #[test]
    fn ladder_operators() {
        assert_eq!(
            lowering_operator(2).unwrap(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
        );
        let a = lowering_operator(3).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert!((a[(1, 2)] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        let number = a.adjoint() * &a;
        for j in 0..3 {
            assert!((number[(j, j)] - c(j as f64, 0.0)).norm() < 1e-15);
        }
        assert_eq!(lowering_operator(1), Err(Error::LocalDimension(1)));
    }

    #[test]
    fn full_space_lowering_matches_kron() {
        let space = FockSpace::new(2, 3, DimensionCap::default()).unwrap();
        let a = lowering_operator(3).unwrap();
        let id = CMatrix::identity(3, 3);
        assert_eq!(space.lowering(1).to_dense(), a.kronecker(&id));
        assert_eq!(space.lowering(2).to_dense(), id.kronecker(&a));
    }

    #[test]
    fn dimension_cap() {
        let cap = DimensionCap::default();
        assert_eq!(cap.check(2, 12).unwrap(), 4096);
        assert_eq!(cap.check(2, 13), Err(Error::DimensionCap { dim: 1 << 26, cap: 1 << 24 }));
        assert!(DimensionCap::UNLIMITED.check(2, 13).is_ok());
        assert!(cap.check(7, 40).is_err());
        let net = NetworkSpec::new(13, 1.0, 0.0).unwrap();
        let err = cascade_generator(&net, 2, cap).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Resource);
    }

    #[test]
    fn vectorisation_convention() {
        let space = FockSpace::new(1, 3, DimensionCap::default()).unwrap();
        let a = space.lowering(1);
        let b = CsrMatrix::from_triplets(3, 3, alloc::vec![(0, 2, c(0.5, 1.0)), (2, 1, c(-1.0, 0.0))]);
        let mut s = Superoperator::empty(space);
        s.push(c(0.3, -0.2), Some(a.clone()), Some(b.clone()));
        let rho = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let direct = s.apply(&rho);
        let vec_rho: Vec<C64> = rho.iter().copied().collect();
        let mut out = alloc::vec![c(0.0, 0.0); 9];
        s.to_matrix().mul_vec(&vec_rho, &mut out);
        let dense = CMatrix::from_column_slice(3, 3, &out);
        assert!((direct.clone() - dense).iter().all(|z| z.norm() < 1e-14));
        let expected = (a.to_dense() * &rho * b.to_dense()) * c(0.3, -0.2);
        assert!((direct - expected).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn drift_examples() {
        let zeta = CouplingMatrix::zeros(1);
        assert_eq!(first_moment_drift(&zeta, 2.0), CMatrix::from_element(1, 1, c(-1.0, 0.0)));
        let bs = BeamSplitter::new(0.75, 0.0).unwrap();
        let net = NetworkSpec::from_elements(2, 1.0, 0.0, [(1, 2, bs)]).unwrap();
        let g = first_moment_drift(&coupling_matrix(&net), 1.0);
        let want = CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.5), c(-0.5, 0.0)]);
        assert!((g - want).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn single_site_generator_is_plain_damping() {
        let net = NetworkSpec::new(1, 1.5, 0.0).unwrap();
        let gen = cascade_generator(&net, 2, DimensionCap::default()).unwrap();
        let mut vacuum = CMatrix::zeros(2, 2);
        vacuum[(0, 0)] = c(1.0, 0.0);
        assert_eq!(gen.apply(&vacuum), CMatrix::zeros(2, 2));
        let mut excited = CMatrix::zeros(2, 2);
        excited[(1, 1)] = c(1.0, 0.0);
        let rate = gen.apply(&excited);
        assert!((rate[(1, 1)] - c(-1.5, 0.0)).norm() < 1e-15);
        assert!((rate[(0, 0)] - c(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_site_generators_agree() {
        let bs = BeamSplitter::new(0.75, 0.0).unwrap();
        let net = NetworkSpec::from_elements(2, 1.0, 0.0, [(1, 2, bs)]).unwrap();
        let zeta = coupling_matrix(&net);
        let form = gksl_decompose(&build_theta(&zeta, 1.0), &zeta).unwrap();
        for d in [2, 3] {
            let cascade = cascade_generator(&net, d, DimensionCap::default()).unwrap();
            let gksl = gksl_generator(&form, d, DimensionCap::default()).unwrap();
            assert!(cascade.frobenius_distance(&gksl) < 1e-10);
            assert!(cascade.trace_preservation_defect() < 1e-12);
            assert!(gksl.trace_preservation_defect() < 1e-12);
        }
    }

    #[test]
    fn closed_form_generator_matches_numeric() {
        let (t1, phi1, gamma) = (0.45, 0.3, 1.0);
        let spec = evenodd_spec(4, t1, phi1, gamma).unwrap();
        let zeta = coupling_matrix(&spec.expand());
        let numeric = gksl_decompose(&build_theta(&zeta, gamma), &zeta).unwrap();
        let closed = lindblad_closed_form_evenodd(4, t1, gamma).unwrap().regauged(phi1 + FRAC_PI_2);
        let cap = DimensionCap::default();
        let a = gksl_generator(&numeric, 2, cap).unwrap();
        let b = gksl_generator(&closed, 2, cap).unwrap();
        assert!(a.frobenius_distance(&b) < 1e-10);
    }

    #[test]
    fn zero_couplings_reduce_to_local_dampers() {
        let zeta = CouplingMatrix::zeros(2);
        let form = GkslForm {
            rates: alloc::vec![1.0, 1.0],
            lindblad: CMatrix::identity(2, 2),
            heff: CMatrix::zeros(2, 2),
        };
        let net = NetworkSpec::new(2, 1.0, 0.0).unwrap();
        let cap = DimensionCap::default();
        let local = cascade_from_couplings(FockSpace::new(2, 2, cap).unwrap(), &zeta, 1.0);
        let gksl = gksl_generator(&form, 2, cap).unwrap();
        assert!(local.frobenius_distance(&gksl) < 1e-15);
        assert!(cascade_generator(&net, 2, cap).unwrap().frobenius_distance(&gksl) < 1e-15);
    }

    fn arb_network() -> impl Strategy<Value = NetworkSpec> {
        (1usize..=4, prop_oneof![Just(0.0), 0.0f64..0.5]).prop_flat_map(|(n, loss)| {
            proptest::collection::vec((0.0f64..=1.0, 0.0f64..TAU), n * (n - 1) / 2).prop_map(move |params| {
                let mut it = params.into_iter();
                let mut elems = Vec::new();
                for m in 1..=n {
                    for mp in (m + 1)..=n {
                        let (t, p) = it.next().unwrap();
                        elems.push((m, mp, BeamSplitter::new(t, p).unwrap()));
                    }
                }
                NetworkSpec::from_elements(n, 1.0, loss, elems).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn cascade_and_gksl_generators_coincide(net in arb_network()) {
            let zeta = coupling_matrix(&net);
            let form = gksl_decompose(&build_theta(&zeta, net.gamma()), &zeta).unwrap();
            let cap = DimensionCap::default();
            let cascade = cascade_generator(&net, 2, cap).unwrap();
            let gksl = gksl_generator(&form, 2, cap).unwrap();
            prop_assert!(cascade.frobenius_distance(&gksl) < 1e-10);
            prop_assert!(cascade.trace_preservation_defect() < crate::tol::TRACE_PRESERVATION);
        }
    }
}
