//! Validated quantum states, joint system-environment states, their
//! correlation matrices and the trace distance.
//!
//! Construction never repairs its input. A matrix that is slightly
//! non-Hermitian or mis-normalized is rejected; callers who want a repair
//! must ask for it (see [`ComplexMatrix::hermitian_part`] and
//! [`DensityMatrix::normalized`]).

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_eig, partial_trace, pauli, tensor_product, trace_norm, ComplexMatrix, Subsystem, C64,
    HERMITIAN_TOL, ONE,
};

/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue accepted as eigensolver noise on a PSD input.
pub const PSD_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` as a state. Same as [`make_density`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_hermitian()?;
        let trace = matrix.trace();
        if (trace - ONE).norm() > TRACE_TOL {
            return Err(Error::Normalization { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eig(&matrix)?.min();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::Positivity { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Explicit repair: Hermitian part divided by its trace, then validated.
    pub fn normalized(matrix: &ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if tr.abs() < f64::MIN_POSITIVE {
            return Err(Error::Normalization { trace: tr });
        }
        Self::new(h.scale_real(1.0 / tr))
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi))
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut m = ComplexMatrix::zeros(dim);
        m[(k, k)] = ONE;
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).expect("validated Hermitian").values
    }
}

/// Validates a candidate density matrix.
pub fn make_density(matrix: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix)
}

/// `(I + r·σ)/2` for `|r| ≤ 1`.
pub fn qubit_from_bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(Error::BlochBall { norm });
    }
    let [x, y, z] = pauli();
    let mut m = ComplexMatrix::identity(2);
    for (p, &ri) in [x, y, z].iter().zip(&r) {
        m = &m + &p.scale_real(ri);
    }
    DensityMatrix::new(m.scale_real(0.5))
}

/// A state on `C^{d_s} ⊗ C^{d_e}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_s: usize,
    d_e: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(matrix: ComplexMatrix, d_s: usize, d_e: usize) -> Result<Self> {
        if d_s == 0 || d_e == 0 || d_s * d_e != matrix.dim() {
            return Err(Error::Dimension(format!(
                "joint matrix of dimension {} does not factor as {d_s}x{d_e}",
                matrix.dim()
            )));
        }
        let state = DensityMatrix::new(matrix)?;
        let joint = Self { d_s, d_e, state };
        // marginals of a PSD matrix are PSD; still checked so the invariant is explicit
        joint.reduced_s()?;
        joint.reduced_e()?;
        Ok(joint)
    }

    pub fn product(rho_s: &DensityMatrix, rho_e: &DensityMatrix) -> Result<Self> {
        let m = tensor_product(rho_s.matrix(), rho_e.matrix())?;
        Self::new(m, rho_s.dim(), rho_e.dim())
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn dim(&self) -> usize {
        self.d_s * self.d_e
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.state
    }

    /// `Tr_E ρ^{SE}`.
    pub fn reduced_s(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(partial_trace(self.matrix(), self.d_s, self.d_e, Subsystem::E)?)
    }

    /// `Tr_S ρ^{SE}`.
    pub fn reduced_e(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(partial_trace(self.matrix(), self.d_s, self.d_e, Subsystem::S)?)
    }

    /// `χ = ρ^{SE} − Tr_E ρ^{SE} ⊗ Tr_S ρ^{SE}`.
    pub fn correlation_matrix(&self) -> Result<CorrelationMatrix> {
        correlation_matrix(self)
    }

    /// Product of the two marginals, i.e. the state with its correlations removed.
    pub fn decorrelated(&self) -> Result<Self> {
        Self::product(&self.reduced_s()?, &self.reduced_e()?)
    }
}

/// The part of a joint operator that is not captured by the product of its
/// marginals. Both partial traces vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    d_s: usize,
    d_e: usize,
    matrix: ComplexMatrix,
}

impl CorrelationMatrix {
    /// Validates the four invariants: Hermitian, traceless, and zero partial
    /// traces over both factors, each within `1e-10`.
    pub fn new(matrix: ComplexMatrix, d_s: usize, d_e: usize) -> Result<Self> {
        let m = Self { d_s, d_e, matrix };
        m.check(HERMITIAN_TOL)?;
        Ok(m)
    }

    /// Skips validation. Used by test hooks that need a deliberately broken value.
    pub fn new_unchecked(matrix: ComplexMatrix, d_s: usize, d_e: usize) -> Self {
        Self { d_s, d_e, matrix }
    }

    pub fn zero(d_s: usize, d_e: usize) -> Self {
        Self { d_s, d_e, matrix: ComplexMatrix::zeros(d_s * d_e) }
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        if self.d_s * self.d_e != self.matrix.dim() {
            return Err(Error::Dimension("correlation matrix does not factor".into()));
        }
        let herm = self.matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::Correlation(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.matrix.trace().norm();
        if tr > tol {
            return Err(Error::Correlation(format!("trace {tr:.3e} is not zero")));
        }
        for (sub, name) in [(Subsystem::E, "Tr_E"), (Subsystem::S, "Tr_S")] {
            let r = partial_trace(&self.matrix, self.d_s, self.d_e, sub)?.max_abs();
            if r > tol {
                return Err(Error::Correlation(format!("{name} has entry of size {r:.3e}")));
            }
        }
        Ok(())
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrix.max_abs() <= tol
    }
}

pub fn correlation_matrix(rho: &BipartiteState) -> Result<CorrelationMatrix> {
    let product = tensor_product(rho.reduced_s()?.matrix(), rho.reduced_e()?.matrix())?;
    CorrelationMatrix::new(rho.matrix() - &product, rho.d_s(), rho.d_e())
}

/// `D(ρ1, ρ2) = ‖ρ1 − ρ2‖₁ / 2`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let diff = rho1.matrix().checked_sub(rho2.matrix())?;
    Ok(0.5 * trace_norm(&diff)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZERO;
    use crate::random::{random_bipartite, random_unitary, seeded_rng};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> ComplexMatrix {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        ComplexMatrix::outer(&[s, ZERO, ZERO, s])
    }

    #[test]
    fn make_density_accepts_and_rejects() {
        assert!(make_density(ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
        assert!(make_density(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).is_ok());
        assert!(matches!(
            make_density(ComplexMatrix::from_real_diagonal(&[1.1, -0.1])),
            Err(Error::Positivity { .. })
        ));
        assert!(matches!(
            make_density(ComplexMatrix::from_real_diagonal(&[0.6, 0.6])),
            Err(Error::Normalization { .. })
        ));
        let skew = ComplexMatrix::from_rows(&[&[C64::new(0.5, 0.0), ONE], &[ZERO, C64::new(0.5, 0.0)]]).unwrap();
        assert!(matches!(make_density(skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn normalization_is_never_silent() {
        let m = ComplexMatrix::from_real_diagonal(&[2.0, 2.0]);
        assert!(make_density(m.clone()).is_err());
        let repaired = DensityMatrix::normalized(&m).unwrap();
        assert!(repaired.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let mixed = qubit_from_bloch([0.0; 3]).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed(2));
        let north = qubit_from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert!(north.matrix().max_abs_diff(DensityMatrix::basis(2, 0).unwrap().matrix()) < 1e-15);
        let plus = qubit_from_bloch([1.0, 0.0, 0.0]).unwrap();
        let ev = plus.eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(matches!(qubit_from_bloch([0.8, 0.8, 0.0]), Err(Error::BlochBall { .. })));
    }

    #[test]
    fn bloch_purity() {
        let r = [0.3, -0.4, 0.5];
        let rho = qubit_from_bloch(r).unwrap();
        let r2: f64 = r.iter().map(|x| x * x).sum();
        assert!((rho.purity() - (1.0 + r2) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn correlation_of_product_is_zero() {
        let mut rng = seeded_rng(2);
        let rho = crate::random::random_product(2, 3, &mut rng).unwrap();
        assert!(rho.correlation_matrix().unwrap().is_zero(1e-14));
    }

    #[test]
    fn correlation_of_bell_state() {
        let rho = BipartiteState::new(bell(), 2, 2).unwrap();
        let chi = rho.correlation_matrix().unwrap();
        let expected = &bell() - &ComplexMatrix::identity(4).scale_real(0.25);
        assert!(chi.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn correlation_of_classical_mixture() {
        let m = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        let chi = BipartiteState::new(m.clone(), 2, 2).unwrap().correlation_matrix().unwrap();
        let expected = &m - &ComplexMatrix::identity(4).scale_real(0.25);
        assert!(chi.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn correlation_invariants_on_random_states() {
        let mut rng = seeded_rng(100);
        for k in 0..100 {
            let (d_s, d_e) = (2 + k % 2, 2 + (k / 2) % 2);
            let rho = random_bipartite(d_s, d_e, 1 + k % (d_s * d_e), &mut rng).unwrap();
            let chi = rho.correlation_matrix().unwrap();
            chi.check(1e-10).unwrap();
        }
    }

    #[test]
    fn correlation_matrix_rejects_nonzero_marginal() {
        let m = ComplexMatrix::from_real_diagonal(&[0.1, -0.1, 0.0, 0.0]);
        assert!(matches!(CorrelationMatrix::new(m, 2, 2), Err(Error::Correlation(_))));
    }

    #[test]
    fn trace_distance_examples() {
        let rho = qubit_from_bloch([0.1, 0.2, 0.3]).unwrap();
        assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-15);
        let d = trace_distance(&DensityMatrix::basis(2, 0).unwrap(), &DensityMatrix::basis(2, 1).unwrap()).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let a = make_density(ComplexMatrix::from_real_diagonal(&[0.75, 0.25])).unwrap();
        let b = make_density(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&a, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn bloch_trace_distance_identity() {
        let mut rng = seeded_rng(77);
        for _ in 0..100 {
            let r1 = crate::random::random_bloch(&mut rng);
            let r2 = crate::random::random_bloch(&mut rng);
            let d = trace_distance(&qubit_from_bloch(r1).unwrap(), &qubit_from_bloch(r2).unwrap()).unwrap();
            let euclid = r1.iter().zip(&r2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!((d - euclid / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_distance_unitary_invariance() {
        let mut rng = seeded_rng(4);
        let a = crate::random::random_density(3, 3, &mut rng).unwrap();
        let b = crate::random::random_density(3, 2, &mut rng).unwrap();
        let u = random_unitary(3, &mut rng);
        let a2 = make_density(a.matrix().conjugate_by(&u).unwrap().hermitian_part()).unwrap();
        let b2 = make_density(b.matrix().conjugate_by(&u).unwrap().hermitian_part()).unwrap();
        let d1 = trace_distance(&a, &b).unwrap();
        let d2 = trace_distance(&a2, &b2).unwrap();
        assert!((d1 - d2).abs() < 1e-10);
        assert!((0.0..=1.0).contains(&d1));
    }

    #[test]
    fn partial_trace_contracts_trace_distance() {
        let mut rng = seeded_rng(31);
        for _ in 0..100 {
            let r1 = random_bipartite(2, 2, 4, &mut rng).unwrap();
            let r2 = random_bipartite(2, 2, 2, &mut rng).unwrap();
            let joint = trace_distance(r1.density(), r2.density()).unwrap();
            let reduced = trace_distance(&r1.reduced_s().unwrap(), &r2.reduced_s().unwrap()).unwrap();
            assert!(reduced <= joint + 1e-10);
        }
    }
}
