//! Contractivity witnesses evaluated at a preparation time `t`.
//!
//! For a prepared pair with joint difference `Δ^{SE} = ρ1^{SE} − ρ2^{SE}`,
//! reduced difference `Δ^S = Tr_E Δ^{SE}`, and correlation difference
//! `Δμ = μ1 − μ2`:
//!
//! * `D = ‖Δ^S‖₁/2`, the trace distance of the two system states.
//! * `N = dD/dt`, evaluated as a forward difference along the true joint
//!   evolution (`N_fd`) and, when `Δ^S` has no eigenvalue near zero, exactly
//!   as `½ Tr[sgn(Δ^S) Tr_E(−i[H, Δ^{SE}])]` (`N_analytic`).
//! * `M`, the same derivative for the product-state branch `Δ^S ⊗ ρ^E`.
//!   It comes from a completely positive map and is never positive.
//! * `C = ½‖Tr_E(−i[H, Δμ])‖₁ = ½‖Tr_E[H, Δμ]‖₁`, which vanishes unless the
//!   preparations leave system-environment correlations behind.
//!
//! Because `Δ^{SE} = Δ^S ⊗ ρ^E + Δμ`, the triangle inequality gives
//! `N ≤ M + C`, and with `M ≤ 0` also `N ≤ C`. [`inequality_report`]
//! records all of these together with the slack `M + C − N_fd`.

use rand::Rng;
use rayon::prelude::*;

use crate::catalog::ModelInstance;
use crate::dynamics::{evolve_total, propagator, reduced_derivative_of, HamiltonianSchedule, Propagator, DEFAULT_N_STEPS};
use crate::error::{Error, Result};
use crate::matrix::{expm_skew, hermitian_eig, partial_trace, tensor_product, trace_norm, ComplexMatrix, Subsystem, C64};
use crate::preparation::{prepare_pair, PreparationProcedure, PreparedPair};
use crate::random::{random_direction, seeded_rng};
use crate::state::{trace_distance, BipartiteState};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DETECTION_THRESHOLD: f64 = 1e-6;
/// Eigenvalues of `Δ^S` with modulus at or below this are treated as zero.
pub const DEGENERACY_GUARD: f64 = 1e-8;
/// Tolerance on `M + C − N_fd ≥ 0`, absorbing forward-difference truncation.
pub const SLACK_TOL: f64 = 1e-6;
/// Tolerance on inequalities between analytic quantities only.
pub const ANALYTIC_TOL: f64 = 1e-9;

/// Numerical settings shared by every witness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    /// Forward-difference step `h`.
    pub h: f64,
    /// Midpoint steps per schedule segment.
    pub n_steps: usize,
    pub threshold: f64,
    pub guard: f64,
    pub slack_tol: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            h: DEFAULT_FD_STEP,
            n_steps: DEFAULT_N_STEPS,
            threshold: DETECTION_THRESHOLD,
            guard: DEGENERACY_GUARD,
            slack_tol: SLACK_TOL,
        }
    }
}

impl WitnessOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {}", self.h)));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidArgument("n_steps must be positive".into()));
        }
        if !(self.threshold >= 0.0) || !(self.guard >= 0.0) || !(self.slack_tol >= 0.0) {
            return Err(Error::InvalidArgument("thresholds and tolerances must be non-negative".into()));
        }
        Ok(())
    }

    /// The three steps `100h, 10h, h` recorded in every report.
    pub fn sweep_steps(&self) -> [f64; 3] {
        [100.0 * self.h, 10.0 * self.h, self.h]
    }
}

/// An exact derivative, or a flag saying `Δ^S` is too close to singular for
/// the trace norm to be differentiable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analytic {
    Value(f64),
    Degenerate,
}

impl Analytic {
    pub fn value(self) -> Option<f64> {
        match self {
            Analytic::Value(v) => Some(v),
            Analytic::Degenerate => None,
        }
    }
}

/// Forward derivative of `½‖A + sB‖₁` at `s = 0⁺` for Hermitian `A`, `B`:
/// `½(Tr[(P₊ − P₋) B] + ‖P₀ B P₀‖₁)`, where `P₀` projects onto eigenvalues
/// of `A` within `guard` of zero. The flag reports whether `P₀ ≠ 0`.
fn half_norm_forward_derivative(a: &ComplexMatrix, b: &ComplexMatrix, guard: f64) -> Result<(f64, bool)> {
    let eig = hermitian_eig(a)?;
    let n = eig.values.len();
    let v = &eig.vectors;
    let mut signed = 0.0;
    let mut kernel = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda.abs() <= guard {
            kernel.push(k);
            continue;
        }
        // ⟨v_k| B |v_k⟩
        let mut expect = C64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..n {
                row += b[(i, j)] * v[(j, k)];
            }
            expect += v[(i, k)].conj() * row;
        }
        signed += lambda.signum() * expect.re;
    }
    let mut kernel_norm = 0.0;
    if !kernel.is_empty() {
        let compressed = ComplexMatrix::from_fn(kernel.len(), |p, q| {
            let (kp, kq) = (kernel[p], kernel[q]);
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += v[(i, kp)].conj() * b[(i, j)] * v[(j, kq)];
                }
            }
            acc
        });
        kernel_norm = trace_norm(&compressed.hermitian_part())?;
    }
    Ok((0.5 * (signed + kernel_norm), !kernel.is_empty()))
}

fn reduce(x: &ComplexMatrix, d_s: usize, d_e: usize) -> Result<ComplexMatrix> {
    partial_trace(x, d_s, d_e, Subsystem::E)
}

/// `‖Tr_E[U X U†]‖₁` for a Hermitian joint operator `X`.
fn evolved_reduced_norm(x: &ComplexMatrix, u: &Propagator, d_s: usize, d_e: usize) -> Result<f64> {
    let evolved = x.conjugate_by(&u.u)?;
    trace_norm(&reduce(&evolved, d_s, d_e)?.hermitian_part())
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
    }
    Ok(())
}

fn check_hamiltonian(pair: &PreparedPair, h: &ComplexMatrix) -> Result<()> {
    if h.dim() != pair.rho1_se.dim() {
        return Err(Error::Dimension(format!(
            "Hamiltonian has dimension {}, joint space has {}",
            h.dim(),
            pair.rho1_se.dim()
        )));
    }
    h.ensure_hermitian()
}

/// Finite-difference values of `N`, `M` and the forward-difference form of
/// `C` for one step `h`, all sharing one propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdPoint {
    pub h: f64,
    pub n_fd: f64,
    pub m_fd: f64,
    pub c_fd: f64,
}

fn fd_point(pair: &PreparedPair, u: &Propagator, h: f64) -> Result<FdPoint> {
    let (d_s, d_e) = (pair.d_s(), pair.d_e());
    let delta_s = pair.system_difference();
    let norm_now = trace_norm(&delta_s)?;
    let markov_branch = tensor_product(&delta_s, pair.rho_e.matrix())?;
    let n_later = evolved_reduced_norm(&pair.joint_difference(), u, d_s, d_e)?;
    let m_later = evolved_reduced_norm(&markov_branch, u, d_s, d_e)?;
    let c_later = evolved_reduced_norm(&pair.mu_difference(), u, d_s, d_e)?;
    Ok(FdPoint {
        h,
        n_fd: (n_later - norm_now) / (2.0 * h),
        m_fd: (m_later - norm_now) / (2.0 * h),
        c_fd: c_later / (2.0 * h),
    })
}

/// `[D(ρ1^S(t+h), ρ2^S(t+h)) − D(ρ1^S(t), ρ2^S(t))]/h` with
/// `ρ_j^S(t+h) = Tr_E[U_{t,t+h} ρ_j^{SE} U†]`.
pub fn witness_n_fd(pair: &PreparedPair, sched: &HamiltonianSchedule, t: f64, h: f64, n_steps: usize) -> Result<f64> {
    check_step(h)?;
    let u = propagator(sched, t, t + h, n_steps)?;
    let (d_s, d_e) = (pair.d_s(), pair.d_e());
    let later = evolved_reduced_norm(&pair.joint_difference(), &u, d_s, d_e)?;
    let now = trace_norm(&pair.system_difference())?;
    Ok((later - now) / (2.0 * h))
}

/// `½ Tr[sgn(Δ^S) Tr_E(−i[H, Δ^{SE}])]`, withheld when `Δ^S` has an
/// eigenvalue within `guard` of zero. Identical branches give exactly zero.
pub fn witness_n_analytic(pair: &PreparedPair, h_at_t: &ComplexMatrix, guard: f64) -> Result<Analytic> {
    check_hamiltonian(pair, h_at_t)?;
    let delta = pair.joint_difference();
    if delta.max_abs() == 0.0 {
        return Ok(Analytic::Value(0.0));
    }
    let deriv = reduced_derivative_of(&delta, h_at_t, pair.d_s(), pair.d_e())?.hermitian_part();
    let (value, degenerate) = half_norm_forward_derivative(&pair.system_difference(), &deriv, guard)?;
    Ok(if degenerate { Analytic::Degenerate } else { Analytic::Value(value) })
}

/// The product-state (Markovian) term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovTerm {
    /// Exact forward derivative. Where `Δ^S` is singular the kernel
    /// contribution `½‖P₀ Ḃ P₀‖₁` is included, so the value stays a true
    /// one-sided derivative.
    pub analytic: f64,
    pub fd: f64,
    /// `Δ^S` had an eigenvalue within the guard of zero.
    pub degenerate: bool,
}

/// `M` from the branch `Δ^S ⊗ ρ^E`, analytically at `H(t)` and by a forward
/// difference over `[t, t+h]`.
pub fn witness_m(
    pair: &PreparedPair,
    sched: &HamiltonianSchedule,
    t: f64,
    h: f64,
    opts: &WitnessOptions,
) -> Result<MarkovTerm> {
    check_step(h)?;
    let h_at_t = sched.hamiltonian_at(t)?;
    check_hamiltonian(pair, h_at_t)?;
    let delta_s = pair.system_difference();
    let branch = tensor_product(&delta_s, pair.rho_e.matrix())?;
    let deriv = reduced_derivative_of(&branch, h_at_t, pair.d_s(), pair.d_e())?.hermitian_part();
    let (analytic, degenerate) = half_norm_forward_derivative(&delta_s, &deriv, opts.guard)?;
    let u = propagator(sched, t, t + h, opts.n_steps)?;
    let later = evolved_reduced_norm(&branch, &u, pair.d_s(), pair.d_e())?;
    let fd = (later - trace_norm(&delta_s)?) / (2.0 * h);
    Ok(MarkovTerm { analytic, fd, degenerate })
}

/// `C = ½‖Tr_E(−i[H, μ1 − μ2])‖₁`.
pub fn witness_c(pair: &PreparedPair, h_at_t: &ComplexMatrix) -> Result<f64> {
    check_hamiltonian(pair, h_at_t)?;
    let deriv = reduced_derivative_of(&pair.mu_difference(), h_at_t, pair.d_s(), pair.d_e())?;
    Ok(0.5 * trace_norm(&deriv.hermitian_part())?)
}

/// Forward-difference form of `C`: `‖Tr_E[U_{t,t+h}(μ1 − μ2)U†]‖₁ / (2h)`.
pub fn witness_c_fd(pair: &PreparedPair, sched: &HamiltonianSchedule, t: f64, h: f64, n_steps: usize) -> Result<f64> {
    check_step(h)?;
    let u = propagator(sched, t, t + h, n_steps)?;
    Ok(evolved_reduced_norm(&pair.mu_difference(), &u, pair.d_s(), pair.d_e())? / (2.0 * h))
}

/// Every witness quantity at one preparation time.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub t: f64,
    /// Trace distance of the prepared system states.
    pub d: f64,
    pub n_fd: f64,
    /// `None` when the degeneracy guard fails.
    pub n_analytic: Option<f64>,
    pub m_analytic: f64,
    pub m_fd: f64,
    pub c: f64,
    pub c_fd: f64,
    /// `M_analytic + C − N_fd`.
    pub slack: f64,
    /// `M_fd + C_fd − N_fd`; non-negative up to rounding at every step.
    pub slack_fd: f64,
    pub degenerate: bool,
    pub fd_step: f64,
    /// Finite differences at `100h`, `10h`, `h`.
    pub sweep: [FdPoint; 3],
}

impl WitnessReport {
    pub fn slack_holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }

    /// `N_fd ≤ C + tol`.
    pub fn n_below_c(&self, tol: f64) -> bool {
        self.n_fd <= self.c + tol
    }
}

/// Evaluates `D`, `N`, `M`, `C` and the slacks at time `t`.
pub fn inequality_report(
    pair: &PreparedPair,
    sched: &HamiltonianSchedule,
    t: f64,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    opts.validate()?;
    let h_at_t = sched.hamiltonian_at(t)?;
    check_hamiltonian(pair, h_at_t)?;
    let d = trace_distance(&pair.rho1_s, &pair.rho2_s)?;

    let mut sweep = [FdPoint { h: 0.0, n_fd: 0.0, m_fd: 0.0, c_fd: 0.0 }; 3];
    for (slot, step) in sweep.iter_mut().zip(opts.sweep_steps()) {
        let u = propagator(sched, t, t + step, opts.n_steps)?;
        *slot = fd_point(pair, &u, step)?;
    }
    let main = sweep[2];

    let n_analytic = witness_n_analytic(pair, h_at_t, opts.guard)?;
    let delta_s = pair.system_difference();
    let branch = tensor_product(&delta_s, pair.rho_e.matrix())?;
    let m_deriv = reduced_derivative_of(&branch, h_at_t, pair.d_s(), pair.d_e())?.hermitian_part();
    let (m_analytic, degenerate) = half_norm_forward_derivative(&delta_s, &m_deriv, opts.guard)?;
    let c = witness_c(pair, h_at_t)?;

    Ok(WitnessReport {
        t,
        d,
        n_fd: main.n_fd,
        n_analytic: n_analytic.value(),
        m_analytic,
        m_fd: main.m_fd,
        c,
        c_fd: main.c_fd,
        slack: m_analytic + c - main.n_fd,
        slack_fd: main.m_fd + main.c_fd - main.n_fd,
        degenerate,
        fd_step: opts.h,
        sweep,
    })
}

/// `‖ρ1^{SE} − ρ2^{SE}‖₁ − ‖ρ1^S − ρ2^S‖₁ ≤ ‖μ1 − μ2‖₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn laine_bound_check(pair: &PreparedPair) -> Result<BoundCheck> {
    let lhs = trace_norm(&pair.joint_difference())? - trace_norm(&pair.system_difference())?;
    let rhs = trace_norm(&pair.mu_difference())?;
    Ok(BoundCheck { lhs, rhs, holds: lhs <= rhs + 1e-10 })
}

/// Evolves the model's initial state (defined at `t = 0`) to time `t`.
pub fn state_at(model: &ModelInstance, t: f64, n_steps: usize) -> Result<BipartiteState> {
    if t == 0.0 {
        return Ok(model.rho_se0.clone());
    }
    let u = if t > 0.0 {
        propagator(&model.schedule, 0.0, t, n_steps)?
    } else {
        let back = propagator(&model.schedule, t, 0.0, n_steps)?;
        Propagator { t: 0.0, tau: t, u: back.u.adjoint() }
    };
    evolve_total(&model.rho_se0, &u)
}

/// Reports over a time grid. At each grid time the model is evolved freely
/// from `t = 0`, both preparations are applied there, and the witnesses are
/// evaluated with that time as the initial time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: Vec<f64>,
    pub reports: Vec<WitnessReport>,
    pub max_n: f64,
    pub argmax_t: f64,
    pub detected_nonmarkovian: bool,
    pub detected_correlations: bool,
    /// `Σ_k max(N_fd(t_k), 0) (t_{k+1} − t_k)`: a convenience grid sum, not a measure.
    pub blp_grid_sum: f64,
}

pub fn time_scan(
    model: &ModelInstance,
    p1: &PreparationProcedure,
    p2: &PreparationProcedure,
    grid: &[f64],
    opts: &WitnessOptions,
) -> Result<ScanResult> {
    opts.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    let reports: Vec<WitnessReport> = grid
        .par_iter()
        .map(|&t| {
            let rho_t = state_at(model, t, opts.n_steps)?;
            let pair = prepare_pair(p1, p2, &rho_t)?;
            inequality_report(&pair, &model.schedule, t, opts)
        })
        .collect::<Result<_>>()?;

    let (mut max_n, mut argmax_t) = (reports[0].n_fd, reports[0].t);
    for r in &reports[1..] {
        if r.n_fd > max_n {
            max_n = r.n_fd;
            argmax_t = r.t;
        }
    }
    let blp_grid_sum = grid
        .windows(2)
        .zip(&reports)
        .map(|(w, r)| r.n_fd.max(0.0) * (w[1] - w[0]))
        .sum();
    Ok(ScanResult {
        grid: grid.to_vec(),
        detected_nonmarkovian: reports.iter().any(|r| r.n_fd > opts.threshold),
        detected_correlations: reports.iter().any(|r| r.c > opts.threshold),
        reports,
        max_n,
        argmax_t,
        blp_grid_sum,
    })
}

/// Evenly spaced grid including both endpoints (a single point when `n_points = 1`).
pub fn linear_grid(t_start: f64, t_end: f64, n_points: usize) -> Vec<f64> {
    match n_points {
        0 => Vec::new(),
        1 => vec![t_start],
        n => (0..n).map(|k| t_start + (t_end - t_start) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Orthonormal Hermitian basis of traceless `d × d` matrices (generalized
/// Gell-Mann matrices, `Tr(λ_a λ_b) = 2δ_ab`). For `d = 2` these are the Pauli
/// matrices in the order x, y, z.
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d);
            sym[(j, k)] = C64::new(1.0, 0.0);
            sym[(k, j)] = C64::new(1.0, 0.0);
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(d);
            anti[(j, k)] = C64::new(0.0, -1.0);
            anti[(k, j)] = C64::new(0.0, 1.0);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        basis.push(ComplexMatrix::from_real_diagonal(&diag));
    }
    basis
}

/// `exp(−i Σ_k x_k λ_k / 2)`; for qubits `x = θ n` is the axis-angle rotation.
pub fn unitary_from_params(params: &[f64], generators: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if params.len() != generators.len() || generators.is_empty() {
        return Err(Error::Dimension("parameter count does not match generator count".into()));
    }
    let d = generators[0].dim();
    let mut gen = ComplexMatrix::zeros(d);
    for (x, g) in params.iter().zip(generators) {
        gen = &gen + &g.scale_real(x / 2.0);
    }
    expm_skew(&gen, 1.0)
}

/// Axis and angle of a qubit rotation parameter vector `x = θ n`.
pub fn axis_angle(params: &[f64]) -> Option<([f64; 3], f64)> {
    if params.len() != 3 {
        return None;
    }
    let angle = params.iter().map(|x| x * x).sum::<f64>().sqrt();
    if angle == 0.0 {
        return Some(([0.0, 0.0, 1.0], 0.0));
    }
    Some(([params[0] / angle, params[1] / angle, params[2] / angle], angle))
}

/// Best pair of unitary preparations found by [`state_pair_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub t: f64,
    pub best_p1: PreparationProcedure,
    pub best_p2: PreparationProcedure,
    pub params1: Vec<f64>,
    pub params2: Vec<f64>,
    pub best_n: f64,
    /// `C` for the best pair at the same time.
    pub c_at_best: f64,
    pub evaluations: usize,
}

struct PairObjective<'a> {
    rho_t: BipartiteState,
    u: Propagator,
    h: f64,
    generators: &'a [ComplexMatrix],
}

impl PairObjective<'_> {
    fn pair(&self, x1: &[f64], x2: &[f64]) -> Result<PreparedPair> {
        let p1 = PreparationProcedure::Unitary(unitary_from_params(x1, self.generators)?);
        let p2 = PreparationProcedure::Unitary(unitary_from_params(x2, self.generators)?);
        prepare_pair(&p1, &p2, &self.rho_t)
    }

    fn n_fd(&self, x: &[f64]) -> Result<f64> {
        let k = x.len() / 2;
        let pair = self.pair(&x[..k], &x[k..])?;
        let (d_s, d_e) = (pair.d_s(), pair.d_e());
        let later = evolved_reduced_norm(&pair.joint_difference(), &self.u, d_s, d_e)?;
        Ok((later - trace_norm(&pair.system_difference())?) / (2.0 * self.h))
    }
}

/// Maximizes `N_fd` at time `t` over pairs of unitary preparations.
///
/// Half the budget (at least one evaluation) goes to random samples: a
/// uniformly random direction in generator space scaled by an angle drawn
/// from `[0, 2π)`. The rest refines the best sample one coordinate at a
/// time, halving the step whenever a full pass brings no improvement.
/// Ties keep the first value found, so results depend only on `seed`.
pub fn state_pair_search(
    model: &ModelInstance,
    t: f64,
    budget: usize,
    seed: u64,
    opts: &WitnessOptions,
) -> Result<SearchResult> {
    opts.validate()?;
    if budget == 0 {
        return Err(Error::InvalidArgument("search budget must be at least 1".into()));
    }
    let generators = gell_mann(model.d_s);
    let n_gen = generators.len();
    if n_gen == 0 {
        return Err(Error::InvalidArgument("system dimension must be at least 2 to search preparations".into()));
    }
    let objective = PairObjective {
        rho_t: state_at(model, t, opts.n_steps)?,
        u: propagator(&model.schedule, t, t + opts.h, opts.n_steps)?,
        h: opts.h,
        generators: &generators,
    };

    let n_random = if budget == 1 { 1 } else { budget / 2 };
    let mut rng = seeded_rng(seed);
    let samples: Vec<Vec<f64>> = (0..n_random)
        .map(|_| {
            let mut x = Vec::with_capacity(2 * n_gen);
            for _ in 0..2 {
                let angle = rng.random::<f64>() * std::f64::consts::TAU;
                x.extend(random_direction(n_gen, &mut rng).into_iter().map(|c| c * angle));
            }
            x
        })
        .collect();
    let values: Vec<f64> = samples.par_iter().map(|x| objective.n_fd(x)).collect::<Result<_>>()?;

    let mut best_idx = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best_idx] {
            best_idx = k;
        }
    }
    let mut best_x = samples[best_idx].clone();
    let mut best_n = values[best_idx];
    let mut evaluations = n_random;

    let mut step = 0.5;
    'refine: while evaluations < budget && step > 1e-7 {
        let mut improved = false;
        for coord in 0..best_x.len() {
            for sign in [1.0, -1.0] {
                if evaluations >= budget {
                    break 'refine;
                }
                let mut candidate = best_x.clone();
                candidate[coord] += sign * step;
                let value = objective.n_fd(&candidate)?;
                evaluations += 1;
                if value > best_n {
                    best_n = value;
                    best_x = candidate;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let (x1, x2) = best_x.split_at(n_gen);
    let pair = objective.pair(x1, x2)?;
    let c_at_best = witness_c(&pair, model.schedule.hamiltonian_at(t)?)?;
    Ok(SearchResult {
        t,
        best_p1: PreparationProcedure::Unitary(unitary_from_params(x1, &generators)?),
        best_p2: PreparationProcedure::Unitary(unitary_from_params(x2, &generators)?),
        params1: x1.to_vec(),
        params2: x2.to_vec(),
        best_n,
        c_at_best,
        evaluations,
    })
}
