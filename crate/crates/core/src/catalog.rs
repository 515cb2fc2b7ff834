//! Named system-environment models.
//!
//! * `dephasing`: two qubits with `H = (g/2) σz⊗σz` and an initial state
//!   interpolating between a product state and the Bell state `|Φ+⟩`.
//! * `random`: seeded random joint state and random constant Hamiltonian.
//! * uncorrelated controls: any model with its initial correlations removed.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::matrix::{pauli, tensor_product, ComplexMatrix, C64, DEFAULT_MAX_DIM, ZERO};
use crate::preparation::PreparationProcedure;
use crate::random::{random_bipartite, random_hermitian, seeded_rng};
use crate::state::{qubit_from_bloch, BipartiteState};

/// A joint initial state at `t = 0` together with the Hamiltonian that drives it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub name: String,
    pub d_s: usize,
    pub d_e: usize,
    pub rho_se0: BipartiteState,
    pub schedule: HamiltonianSchedule,
    pub params: BTreeMap<String, f64>,
}

impl ModelInstance {
    /// Wraps a user-supplied state and schedule, checking that their factor
    /// dimensions agree.
    pub fn custom(name: impl Into<String>, rho_se0: BipartiteState, schedule: HamiltonianSchedule) -> Result<Self> {
        if rho_se0.d_s() != schedule.d_s() || rho_se0.d_e() != schedule.d_e() {
            return Err(Error::Dimension(format!(
                "state is {}x{} but schedule is {}x{}",
                rho_se0.d_s(),
                rho_se0.d_e(),
                schedule.d_s(),
                schedule.d_e()
            )));
        }
        Ok(Self {
            name: name.into(),
            d_s: rho_se0.d_s(),
            d_e: rho_se0.d_e(),
            rho_se0,
            schedule,
            params: BTreeMap::new(),
        })
    }
}

/// `|Φ+⟩⟨Φ+|` with `|Φ+⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> ComplexMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::outer(&[s, ZERO, ZERO, s])
}

/// Dephasing model: `H = (g/2) σz⊗σz`, `ρ(0) = (1−a) ρ(rS)⊗ρ(rE) + a |Φ+⟩⟨Φ+|`.
pub fn model_dephasing(g: f64, a: f64, r_s: [f64; 3], r_e: [f64; 3]) -> Result<ModelInstance> {
    if !g.is_finite() {
        return Err(Error::InvalidArgument("coupling g must be finite".into()));
    }
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!("mixing parameter a = {a} is outside [0, 1]")));
    }
    let product = tensor_product(qubit_from_bloch(r_s)?.matrix(), qubit_from_bloch(r_e)?.matrix())?;
    let rho = &product.scale_real(1.0 - a) + &bell_phi_plus().scale_real(a);
    let z = &pauli()[2];
    let h = tensor_product(z, z)?.scale_real(g / 2.0);
    let mut params = BTreeMap::new();
    params.insert("g".into(), g);
    params.insert("a".into(), a);
    for (k, axis) in ["x", "y", "z"].iter().enumerate() {
        params.insert(format!("r_s_{axis}"), r_s[k]);
        params.insert(format!("r_e_{axis}"), r_e[k]);
    }
    Ok(ModelInstance {
        name: "dephasing".into(),
        d_s: 2,
        d_e: 2,
        rho_se0: BipartiteState::new(rho, 2, 2)?,
        schedule: HamiltonianSchedule::constant(2, 2, h)?,
        params,
    })
}

/// The preparation pair used with the dephasing model: identity and a quarter turn about x.
///
/// A half turn (`σx` itself) maps `|Φ+⟩` to `|Ψ+⟩`; both are eigenstates of
/// `σz⊗σz`, so that pair gives `N = C = 0` on the Bell state.
pub fn dephasing_preparations() -> (PreparationProcedure, PreparationProcedure) {
    (
        PreparationProcedure::identity(2),
        PreparationProcedure::qubit_rotation([1.0, 0.0, 0.0], FRAC_PI_2).expect("valid axis"),
    )
}

/// Seeded random model: joint state `GG†/Tr` of the given rank and a constant
/// Hamiltonian `(G + G†)/2` with standard-Gaussian entries.
pub fn model_random(d_s: usize, d_e: usize, rank: usize, seed: u64) -> Result<ModelInstance> {
    let dim = d_s.saturating_mul(d_e);
    if dim > DEFAULT_MAX_DIM {
        return Err(Error::Size { dim, max: DEFAULT_MAX_DIM });
    }
    if d_s == 0 || d_e == 0 || rank == 0 {
        return Err(Error::InvalidArgument("dimensions and rank must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    let rho = random_bipartite(d_s, d_e, rank, &mut rng)?;
    let h = random_hermitian(dim, &mut rng);
    let mut params = BTreeMap::new();
    params.insert("d_s".into(), d_s as f64);
    params.insert("d_e".into(), d_e as f64);
    params.insert("rank".into(), rank as f64);
    params.insert("seed".into(), seed as f64);
    Ok(ModelInstance {
        name: "random".into(),
        d_s,
        d_e,
        rho_se0: rho,
        schedule: HamiltonianSchedule::constant(d_s, d_e, h)?,
        params,
    })
}

/// Same schedule, initial state replaced by the product of its marginals.
pub fn model_uncorrelated_control(base: &ModelInstance) -> Result<ModelInstance> {
    let mut control = base.clone();
    control.rho_se0 = base.rho_se0.decorrelated()?;
    control.name = format!("{}-uncorrelated", base.name);
    Ok(control)
}
