//! Joint system-environment evolution under piecewise-constant Hamiltonians,
//! the reduced dynamical map `B_{t,τ}(ρS) = Tr_E[U (ρS ⊗ ρE) U†]`, exact
//! reduced-state derivatives and a Choi-matrix complete-positivity check.
//!
//! Units: `ħ = 1`, time is dimensionless.

use crate::error::{Error, Result};
use crate::matrix::{
    commutator, expm_skew, hermitian_eig, partial_trace, tensor_product, ComplexMatrix, Subsystem, I, ONE,
};
use crate::state::{BipartiteState, DensityMatrix};

/// Midpoint steps per segment used when a caller does not choose.
pub const DEFAULT_N_STEPS: usize = 200;

/// Choi eigenvalues at or above this count as non-negative.
pub const CP_TOL: f64 = 1e-9;

/// A time interval on which `H^{SE}` is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub hamiltonian: ComplexMatrix,
}

/// Piecewise-constant `H^{SE}(t)` over contiguous, non-overlapping segments.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSchedule {
    d_s: usize,
    d_e: usize,
    segments: Vec<Segment>,
}

impl HamiltonianSchedule {
    pub fn new(d_s: usize, d_e: usize, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Schedule("at least one segment is required".into()));
        }
        for (k, seg) in segments.iter().enumerate() {
            if seg.hamiltonian.dim() != d_s * d_e {
                return Err(Error::Dimension(format!(
                    "segment {k} Hamiltonian has dimension {}, expected {}",
                    seg.hamiltonian.dim(),
                    d_s * d_e
                )));
            }
            if seg.t_start.is_nan() || seg.t_end.is_nan() || seg.t_start >= seg.t_end {
                return Err(Error::Schedule(format!(
                    "segment {k} has empty or invalid span [{}, {}]",
                    seg.t_start, seg.t_end
                )));
            }
            seg.hamiltonian.ensure_hermitian()?;
        }
        for (k, pair) in segments.windows(2).enumerate() {
            if pair[0].t_end != pair[1].t_start {
                return Err(Error::Schedule(format!(
                    "segments {k} and {} are not contiguous ({} vs {})",
                    k + 1,
                    pair[0].t_end,
                    pair[1].t_start
                )));
            }
        }
        Ok(Self { d_s, d_e, segments })
    }

    /// A time-independent Hamiltonian valid for all times.
    pub fn constant(d_s: usize, d_e: usize, hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(
            d_s,
            d_e,
            vec![Segment { t_start: f64::NEG_INFINITY, t_end: f64::INFINITY, hamiltonian }],
        )
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].t_start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_end
    }

    pub fn covers(&self, t: f64, tau: f64) -> bool {
        t >= self.start() && tau <= self.end()
    }

    /// `H(t)`, right-continuous at segment boundaries; the final endpoint
    /// belongs to the last segment.
    pub fn hamiltonian_at(&self, t: f64) -> Result<&ComplexMatrix> {
        if let Some(seg) = self.segments.iter().find(|s| s.t_start <= t && t < s.t_end) {
            return Ok(&seg.hamiltonian);
        }
        let last = &self.segments[self.segments.len() - 1];
        if t == last.t_end {
            return Ok(&last.hamiltonian);
        }
        Err(Error::ScheduleCoverage { from: t, to: t })
    }
}

/// `U_{t,τ}` acting on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub t: f64,
    pub tau: f64,
    pub u: ComplexMatrix,
}

impl Propagator {
    pub fn identity(dim: usize, t: f64) -> Self {
        Self { t, tau: t, u: ComplexMatrix::identity(dim) }
    }

    /// Wraps an arbitrary unitary, checking `U†U = I` within `1e-9`.
    pub fn from_unitary(u: ComplexMatrix, t: f64, tau: f64) -> Result<Self> {
        let deviation = u.unitarity_defect();
        if deviation > 1e-9 {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { t, tau, u })
    }

    /// `U_{t1,t2} · U_{t0,t1} = U_{t0,t2}` when `self` ends where `later` starts.
    pub fn then(&self, later: &Propagator) -> Result<Propagator> {
        if self.tau != later.t {
            return Err(Error::InvalidArgument(format!(
                "cannot compose [{}, {}] with [{}, {}]",
                self.t, self.tau, later.t, later.tau
            )));
        }
        Ok(Propagator { t: self.t, tau: later.tau, u: later.u.checked_mul(&self.u)? })
    }
}

/// Time-ordered `U_{t,τ}` as a midpoint product of `n_steps` factors per
/// segment, later factors multiplied on the left.
///
/// Steps never straddle a segment boundary, so the midpoint Hamiltonian of
/// every step within a segment is that segment's `H`. The `n_steps` identical
/// factors then multiply to `exp(−iH(b − a))`, which is evaluated directly to
/// avoid accumulating rounding.
pub fn propagator(sched: &HamiltonianSchedule, t: f64, tau: f64, n_steps: usize) -> Result<Propagator> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    if !(t <= tau) || !t.is_finite() || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("need finite t ≤ tau, got [{t}, {tau}]")));
    }
    if !sched.covers(t, tau) {
        return Err(Error::ScheduleCoverage { from: t, to: tau });
    }
    let dim = sched.d_s * sched.d_e;
    let mut u = ComplexMatrix::identity(dim);
    for seg in &sched.segments {
        let a = t.max(seg.t_start);
        let b = tau.min(seg.t_end);
        if b <= a {
            continue;
        }
        u = &expm_skew(&seg.hamiltonian, b - a)? * &u;
    }
    Ok(Propagator { t, tau, u })
}

fn ensure_dim(found: usize, expected: usize, what: &str) -> Result<()> {
    if found != expected {
        return Err(Error::Dimension(format!("{what}: dimension {found}, expected {expected}")));
    }
    Ok(())
}

/// `U ρ^{SE} U†`.
pub fn evolve_total(rho: &BipartiteState, u: &Propagator) -> Result<BipartiteState> {
    ensure_dim(u.u.dim(), rho.dim(), "propagator")?;
    let evolved = rho.matrix().conjugate_by(&u.u)?;
    BipartiteState::new(evolved, rho.d_s(), rho.d_e())
}

/// Linear extension of the dynamical map to any system operator `X`:
/// `Tr_E[U (X ⊗ ρE) U†]`.
pub fn reduced_map(x: &ComplexMatrix, rho_e: &DensityMatrix, u: &Propagator) -> Result<ComplexMatrix> {
    let (d_s, d_e) = (x.dim(), rho_e.dim());
    ensure_dim(u.u.dim(), d_s * d_e, "propagator")?;
    let joint = tensor_product(x, rho_e.matrix())?;
    partial_trace(&joint.conjugate_by(&u.u)?, d_s, d_e, Subsystem::E)
}

/// `B_{t,τ}(ρS) = Tr_E[U (ρS ⊗ ρE) U†]`.
pub fn dynamical_map(rho_s: &DensityMatrix, rho_e: &DensityMatrix, u: &Propagator) -> Result<DensityMatrix> {
    DensityMatrix::new(reduced_map(rho_s.matrix(), rho_e, u)?)
}

/// `Tr_E(−i[H, X])` for any joint operator `X`.
pub fn reduced_derivative_of(x: &ComplexMatrix, h: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    ensure_dim(h.dim(), x.dim(), "Hamiltonian")?;
    let k = commutator(h, x)?.scale(-I);
    partial_trace(&k, d_s, d_e, Subsystem::E)
}

/// `dρS/dt = Tr_E(−i[H, ρ^{SE}])` at the instant where `H` acts.
pub fn reduced_derivative(rho: &BipartiteState, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.ensure_hermitian()?;
    reduced_derivative_of(rho.matrix(), h, rho.d_s(), rho.d_e())
}

/// Normalized Choi matrix `(1/d) Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` of a linear map
/// on `d × d` matrices.
pub fn choi_matrix<F>(d_in: usize, map: F) -> Result<ComplexMatrix>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let mut blocks = Vec::with_capacity(d_in * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            let mut unit = ComplexMatrix::zeros(d_in);
            unit[(i, j)] = ONE;
            blocks.push(map(&unit)?);
        }
    }
    let d_out = blocks[0].dim();
    let mut choi = ComplexMatrix::zeros(d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let block = &blocks[i * d_in + j];
            ensure_dim(block.dim(), d_out, "map output")?;
            for k in 0..d_out {
                for l in 0..d_out {
                    choi[(i * d_out + k, j * d_out + l)] = block[(k, l)] / d_in as f64;
                }
            }
        }
    }
    Ok(choi)
}

/// Outcome of a complete-positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpCheck {
    pub min_choi_eigenvalue: f64,
    pub is_cp: bool,
}

/// CP test for an arbitrary Hermiticity-preserving linear map on `d × d`
/// matrices. Exposed so that known non-CP maps can be fed to the checker.
pub fn cp_check_map<F>(d_in: usize, map: F) -> Result<CpCheck>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let choi = choi_matrix(d_in, map)?;
    let min_choi_eigenvalue = hermitian_eig(&choi)?.min();
    Ok(CpCheck { min_choi_eigenvalue, is_cp: min_choi_eigenvalue >= -CP_TOL })
}

/// CP test of the dynamical map built from the product state `· ⊗ ρE`.
pub fn cp_check(rho_e: &DensityMatrix, u: &Propagator) -> Result<CpCheck> {
    let d_e = rho_e.dim();
    if d_e == 0 || !u.u.dim().is_multiple_of(d_e) {
        return Err(Error::Dimension("propagator does not factor over the environment".into()));
    }
    let d_s = u.u.dim() / d_e;
    cp_check_map(d_s, |x| reduced_map(x, rho_e, u))
}
