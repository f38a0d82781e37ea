use thiserror::Error;

/// Problems with a single beam splitter's parameters.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SplitterError {
    #[error("transmissivity {0} is outside [0,1]")]
    Transmissivity(f64),
    #[error("reflectivity {0} is outside [0,1]")]
    Reflectivity(f64),
    #[error("transmissivity {t} and reflectivity {r} do not sum to 1")]
    Sum { t: f64, r: f64 },
    #[error("phase {0} is not finite")]
    Phase(f64),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad error classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-range input.
    Validation,
    /// Input is well formed but describes something unphysical or infeasible.
    Physicality,
    /// A size limit was hit.
    Resource,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("network must have at least one site (got M = {0})")]
    NoSites(usize),
    #[error("element ({m},{mp}): {source}")]
    Element { m: usize, mp: usize, source: SplitterError },
    #[error("order k = {k}: {source}")]
    OrderSplitter { k: usize, source: SplitterError },
    #[error("element ({m},{mp}) is not a valid pair 1 <= m < m' <= {sites}")]
    Pair { m: usize, mp: usize, sites: usize },
    #[error("element ({m},{mp}) is given more than once")]
    DuplicatePair { m: usize, mp: usize },
    #[error("loss {0} is outside [0,1]")]
    Loss(f64),
    #[error("gamma must be positive and finite (got {0})")]
    Gamma(f64),
    #[error("regular spec needs {expected} transmissivities and phases, got {taus} and {phis}")]
    RegularLength { expected: usize, taus: usize, phis: usize },
    #[error("level {level} is out of range 1..={max}")]
    Level { level: usize, max: usize },
    #[error("levels out of order: from {from} > to {to}")]
    LevelOrder { from: usize, to: usize },
    #[error("path enumeration is limited to M <= {max} (got {sites})")]
    OracleSize { sites: usize, max: usize },
    #[error("Theta has eigenvalue {eigenvalue:e} below -{tolerance:e}; the coupling matrix is unphysical")]
    NotPositive { eigenvalue: f64, tolerance: f64 },
    #[error("coupling matrix size {zeta} does not match Theta size {theta}")]
    SizeMismatch { zeta: usize, theta: usize },
    #[error("evenodd closed form needs M >= 2 (got {0})")]
    EvenOddSites(usize),
    #[error("transfer matrix needs at least one active channel")]
    EmptyTransfer,
    #[error("transfer matrix needs {expected} transmissivities for {phis} phases, got {taus}")]
    TransferLength { expected: usize, phis: usize, taus: usize },
    #[error("kmax = {kmax} is out of range 1..={max}")]
    Kmax { kmax: usize, max: usize },
    #[error("neighbour order must be >= 1")]
    Order,
    #[error("count must be at least the neighbour order {order} (got {count})")]
    Count { order: usize, count: usize },
    #[error("pruning recursion leaves [0,1] at k = {k}: tau_{k} = {tau}")]
    Recursion { k: usize, tau: f64 },
    #[error("design self-check failed at k = {k}: |xi_k| = {residual:e}")]
    DesignCheck { k: usize, residual: f64 },
    #[error("threshold scan needs k >= 2 (got {0})")]
    ThresholdOrder(usize),
    #[error("grid step must lie in (0, 0.5] (got {0})")]
    GridStep(f64),
    #[error("local dimension must be >= 2 (got {0})")]
    LocalDimension(usize),
    #[error("vectorised dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("generator acts on d = {found_d}, M = {found_m} but the state has d = {state_d}, M = {state_m}")]
    StateShape { found_d: usize, found_m: usize, state_d: usize, state_m: usize },
    #[error("site {site} is out of range 1..={sites}")]
    Site { site: usize, sites: usize },
    #[error("occupation {n} at site {site} exceeds truncation d - 1 = {max}")]
    Occupation { site: usize, n: usize, max: usize },
    #[error("time step must be positive and t_final non-negative (dt = {dt}, t_final = {t_final})")]
    TimeGrid { dt: f64, t_final: f64 },
    #[error("state at t = {t} violates {what}: {value:e}; reduce dt")]
    StateInvariant { t: f64, what: &'static str, value: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotPositive { .. } | Recursion { .. } | DesignCheck { .. } | StateInvariant { .. } => {
                ErrorKind::Physicality
            }
            OracleSize { .. } | DimensionCap { .. } => ErrorKind::Resource,
            _ => ErrorKind::Validation,
        }
    }
}
