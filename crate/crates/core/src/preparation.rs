//! Trace-preserving preparations applied to the system factor of a joint
//! state, and the post-preparation correlation matrices `μ_j` defined by
//! `(P_j ⊗ id)(ρ^{SE}) = ρ_j^S ⊗ ρ^E + μ_j`.

use crate::error::{Error, Result};
use crate::matrix::{expm_skew, partial_trace, pauli, tensor_product, ComplexMatrix, Subsystem};
use crate::state::{BipartiteState, CorrelationMatrix, DensityMatrix};

/// Tolerance on `Σ A_k†A_k = I`.
pub const TP_TOL: f64 = 1e-10;

/// A trace-preserving CP map acting on the system.
#[derive(Debug, Clone, PartialEq)]
pub enum PreparationProcedure {
    /// `ρ ↦ V ρ V†`.
    Unitary(ComplexMatrix),
    /// `ρ ↦ Tr(ρ) σ`: discards the system and replaces it by `σ`.
    Pin(DensityMatrix),
    /// `ρ ↦ Σ_k A_k ρ A_k†`.
    Kraus(Vec<ComplexMatrix>),
}

impl PreparationProcedure {
    pub fn identity(d_s: usize) -> Self {
        Self::Unitary(ComplexMatrix::identity(d_s))
    }

    pub fn unitary(v: ComplexMatrix) -> Result<Self> {
        let deviation = v.unitarity_defect();
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self::Unitary(v))
    }

    pub fn pin(target: DensityMatrix) -> Self {
        Self::Pin(target)
    }

    pub fn kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let p = Self::Kraus(ops);
        p.validate()?;
        Ok(p)
    }

    /// Qubit rotation `exp(−i θ n·σ / 2)` about the (normalized) axis `n`.
    pub fn qubit_rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        Ok(Self::Unitary(qubit_rotation(axis, angle)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Unitary(v) => v.dim(),
            Self::Pin(s) => s.dim(),
            Self::Kraus(ops) => ops.first().map_or(0, ComplexMatrix::dim),
        }
    }

    /// Kraus-sum representation. A pin to `σ = Σ_l p_l |ψ_l⟩⟨ψ_l|` uses
    /// `A_{k,l} = √p_l |ψ_l⟩⟨k|`, dropping zero-weight terms.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        match self {
            Self::Unitary(v) => vec![v.clone()],
            Self::Kraus(ops) => ops.clone(),
            Self::Pin(target) => {
                let eig = crate::matrix::hermitian_eig(target.matrix()).expect("validated state");
                let d = target.dim();
                let mut ops = Vec::new();
                for (l, &p) in eig.values.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    let psi = eig.vector(l);
                    for k in 0..d {
                        ops.push(ComplexMatrix::from_fn(d, |i, j| if j == k { psi[i] * p.sqrt() } else { 0.0.into() }));
                    }
                }
                ops
            }
        }
    }

    /// Checks `Σ A_k†A_k = I` within [`TP_TOL`].
    pub fn validate(&self) -> Result<()> {
        let ops = self.kraus_operators();
        let d = self.dim();
        if d == 0 || ops.iter().any(|a| a.dim() != d) {
            return Err(Error::Dimension("Kraus operators must be non-empty and share one dimension".into()));
        }
        let mut sum = ComplexMatrix::zeros(d);
        for a in &ops {
            sum = &sum + &(&a.adjoint() * a);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(())
    }

    /// Action on a system operator.
    pub fn apply_to_system(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "preparation acts on dimension {}, operator has {}",
                self.dim(),
                x.dim()
            )));
        }
        match self {
            Self::Pin(target) => Ok(target.matrix().scale(x.trace())),
            _ => {
                let mut out = ComplexMatrix::zeros(x.dim());
                for a in self.kraus_operators() {
                    out = &out + &x.conjugate_by(&a)?;
                }
                Ok(out)
            }
        }
    }

    /// `(P ⊗ id_E)(X)` on a joint operator.
    pub fn apply_to_joint(&self, x: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
        if self.dim() != d_s || x.dim() != d_s * d_e {
            return Err(Error::Dimension(format!(
                "preparation on dimension {} cannot act on a {d_s}x{d_e} joint operator",
                self.dim()
            )));
        }
        match self {
            Self::Pin(target) => {
                let env = partial_trace(x, d_s, d_e, Subsystem::S)?;
                tensor_product(target.matrix(), &env)
            }
            _ => {
                let id_e = ComplexMatrix::identity(d_e);
                let mut out = ComplexMatrix::zeros(x.dim());
                for a in self.kraus_operators() {
                    out = &out + &x.conjugate_by(&tensor_product(&a, &id_e)?)?;
                }
                Ok(out)
            }
        }
    }
}

/// `exp(−i θ n·σ / 2)`.
pub fn qubit_rotation(axis: [f64; 3], angle: f64) -> Result<ComplexMatrix> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() || !angle.is_finite() {
        return Err(Error::InvalidArgument("rotation axis must be a finite non-zero vector".into()));
    }
    let mut generator = ComplexMatrix::zeros(2);
    for (p, a) in pauli().iter().zip(axis) {
        generator = &generator + &p.scale_real(a / norm / 2.0);
    }
    expm_skew(&generator, angle)
}

/// `(P ⊗ id_E)(ρ^{SE})`.
pub fn apply_preparation(p: &PreparationProcedure, rho: &BipartiteState) -> Result<BipartiteState> {
    p.validate()?;
    let out = p.apply_to_joint(rho.matrix(), rho.d_s(), rho.d_e())?;
    BipartiteState::new(out, rho.d_s(), rho.d_e())
}

/// Two branches of the same joint state, each after its own preparation,
/// together with the split `ρ_j^{SE} = ρ_j^S ⊗ ρ^E + μ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPair {
    pub rho1_se: BipartiteState,
    pub rho2_se: BipartiteState,
    pub mu1: CorrelationMatrix,
    pub mu2: CorrelationMatrix,
    pub rho_e: DensityMatrix,
    pub rho1_s: DensityMatrix,
    pub rho2_s: DensityMatrix,
}

/// Agreement required between the two branches' environment marginals.
pub const MARGINAL_TOL: f64 = 1e-9;

impl PreparedPair {
    /// Builds the pair directly from two joint states that share an
    /// environment marginal.
    pub fn from_states(rho1_se: BipartiteState, rho2_se: BipartiteState) -> Result<Self> {
        if rho1_se.d_s() != rho2_se.d_s() || rho1_se.d_e() != rho2_se.d_e() {
            return Err(Error::Dimension("branches have different factor dimensions".into()));
        }
        let rho_e = rho1_se.reduced_e()?;
        let rho_e2 = rho2_se.reduced_e()?;
        let gap = rho_e.matrix().max_abs_diff(rho_e2.matrix());
        if gap > MARGINAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "branches disagree on the environment marginal by {gap:.3e}"
            )));
        }
        let rho1_s = rho1_se.reduced_s()?;
        let rho2_s = rho2_se.reduced_s()?;
        let mu1 = rho1_se.correlation_matrix()?;
        let mu2 = rho2_se.correlation_matrix()?;
        Ok(Self { rho1_se, rho2_se, mu1, mu2, rho_e, rho1_s, rho2_s })
    }

    pub fn d_s(&self) -> usize {
        self.rho1_se.d_s()
    }

    pub fn d_e(&self) -> usize {
        self.rho1_se.d_e()
    }

    /// `Δ^{SE} = ρ1^{SE} − ρ2^{SE}`.
    pub fn joint_difference(&self) -> ComplexMatrix {
        self.rho1_se.matrix() - self.rho2_se.matrix()
    }

    /// `Δ^S = ρ1^S − ρ2^S`.
    pub fn system_difference(&self) -> ComplexMatrix {
        self.rho1_s.matrix() - self.rho2_s.matrix()
    }

    /// `μ1 − μ2`.
    pub fn mu_difference(&self) -> ComplexMatrix {
        self.mu1.matrix() - self.mu2.matrix()
    }

    /// Replaces both `μ_j` by zero without touching the joint states.
    /// The result is inconsistent on purpose; it exists for negative controls.
    pub fn with_erased_mu(&self) -> Self {
        let mut broken = self.clone();
        broken.mu1 = CorrelationMatrix::new_unchecked(ComplexMatrix::zeros(self.rho1_se.dim()), self.d_s(), self.d_e());
        broken.mu2 = broken.mu1.clone();
        broken
    }

    /// Largest entry of `ρ_j^{SE} − (ρ_j^S ⊗ ρ^E + μ_j)` over both branches.
    pub fn reconstruction_error(&self) -> f64 {
        let err = |rho: &BipartiteState, rho_s: &DensityMatrix, mu: &CorrelationMatrix| {
            let prod = tensor_product(rho_s.matrix(), self.rho_e.matrix()).expect("dimensions agree");
            rho.matrix().max_abs_diff(&(&prod + mu.matrix()))
        };
        err(&self.rho1_se, &self.rho1_s, &self.mu1).max(err(&self.rho2_se, &self.rho2_s, &self.mu2))
    }
}

/// Applies `P1` and `P2` to two copies of `ρ^{SE}`.
pub fn prepare_pair(
    p1: &PreparationProcedure,
    p2: &PreparationProcedure,
    rho: &BipartiteState,
) -> Result<PreparedPair> {
    let rho1 = apply_preparation(p1, rho)?;
    let rho2 = apply_preparation(p2, rho)?;
    PreparedPair::from_states(rho1, rho2)
}

/// `|ψ⟩⟨ψ|` as a pin target, e.g. for pinning to `|0⟩`.
pub fn pin_to_basis(d_s: usize, k: usize) -> Result<PreparationProcedure> {
    Ok(PreparationProcedure::Pin(DensityMatrix::basis(d_s, k)?))
}
