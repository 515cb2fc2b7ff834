//! Seeded property suites over random two-qubit instances.
//!
//! Each instance is a random joint state (a product state for the
//! uncorrelated ensemble), a random constant Hamiltonian, and two random
//! trace-preserving preparations. Instance seeds are drawn in order from a
//! generator keyed by the run seed and the suite, so results do not depend on
//! how the instances are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::dynamics::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::preparation::{prepare_pair, PreparationProcedure, PreparedPair};
use crate::random::{random_bipartite, random_hermitian, random_ket, random_kraus, random_product, random_unitary, seeded_rng};
use crate::state::{BipartiteState, DensityMatrix};
use crate::witness::{inequality_report, laine_bound_check, WitnessOptions, WitnessReport, ANALYTIC_TOL};

/// Whether an instance's joint state carries initial correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Uncorrelated,
    Correlated,
    /// Alternates between the two, starting with correlated.
    Mixed,
}

/// One random instance, evaluated at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstance {
    pub seed: u64,
    pub rho_se: BipartiteState,
    pub schedule: HamiltonianSchedule,
    pub p1: PreparationProcedure,
    pub p2: PreparationProcedure,
}

impl RandomInstance {
    pub fn pair(&self) -> Result<PreparedPair> {
        prepare_pair(&self.p1, &self.p2, &self.rho_se)
    }

    pub fn report(&self, opts: &WitnessOptions) -> Result<WitnessReport> {
        inequality_report(&self.pair()?, &self.schedule, 0.0, opts)
    }
}

/// A unitary, a two-operator Kraus map, or a pin to a random pure state.
pub fn random_preparation<R: Rng + ?Sized>(d_s: usize, rng: &mut R) -> Result<PreparationProcedure> {
    match rng.random_range(0..3) {
        0 => PreparationProcedure::unitary(random_unitary(d_s, rng)),
        1 => PreparationProcedure::kraus(random_kraus(d_s, 2, rng)),
        _ => Ok(PreparationProcedure::Pin(DensityMatrix::pure(&random_ket(d_s, rng))?)),
    }
}

pub fn random_instance(d_s: usize, d_e: usize, correlated: bool, seed: u64) -> Result<RandomInstance> {
    let mut rng = seeded_rng(seed);
    let rho_se = if correlated {
        random_bipartite(d_s, d_e, d_s * d_e, &mut rng)?
    } else {
        random_product(d_s, d_e, &mut rng)?
    };
    let schedule = HamiltonianSchedule::constant(d_s, d_e, random_hermitian(d_s * d_e, &mut rng))?;
    let p1 = random_preparation(d_s, &mut rng)?;
    let p2 = random_preparation(d_s, &mut rng)?;
    Ok(RandomInstance { seed, rho_se, schedule, p1, p2 })
}

/// `n` two-qubit instances from the given ensemble.
pub fn random_instances(ensemble: Ensemble, n: usize, seed: u64) -> Result<Vec<RandomInstance>> {
    let mut rng = seeded_rng(seed);
    let seeds: Vec<u64> = (0..n).map(|_| rng.next_u64()).collect();
    seeds
        .par_iter()
        .enumerate()
        .map(|(k, &s)| {
            let correlated = match ensemble {
                Ensemble::Uncorrelated => false,
                Ensemble::Correlated => true,
                Ensemble::Mixed => k % 2 == 0,
            };
            random_instance(2, 2, correlated, s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Uncorrelated inputs: `N_fd ≤ threshold`.
    Contractivity,
    /// Any inputs: `M_analytic ≤ 1e-9` and `M_fd ≤ threshold`.
    MNegativity,
    /// Correlated inputs: `M_analytic + C − N_fd ≥ −slack_tol` and `N_fd ≤ C + slack_tol`.
    Inequality,
    /// Any inputs: `C ≥ 0` and the joint/system/μ trace-norm bound.
    LaineBound,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Contractivity, Suite::MNegativity, Suite::Inequality, Suite::LaineBound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Contractivity => "contractivity",
            Suite::MNegativity => "m-negativity",
            Suite::Inequality => "inequality",
            Suite::LaineBound => "laine-bound",
        }
    }

    pub fn ensemble(self) -> Ensemble {
        match self {
            Suite::Contractivity => Ensemble::Uncorrelated,
            Suite::Inequality => Ensemble::Correlated,
            Suite::MNegativity | Suite::LaineBound => Ensemble::Mixed,
        }
    }

    fn seed_offset(self) -> u64 {
        match self {
            Suite::Contractivity => 0x1000,
            Suite::MNegativity => 0x2000,
            Suite::Inequality => 0x3000,
            Suite::LaineBound => 0x4000,
        }
    }

    /// Parses a suite name; `"all"` expands to every suite.
    pub fn parse_selection(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Ok(vec![name.parse()?])
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Test hooks that deliberately break an invariant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckHooks {
    /// Zero `μ1` and `μ2` after preparation, so `C` is computed from nothing.
    pub erase_mu: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub total: usize,
    pub passed: usize,
    /// Smallest margin by which a check passed (negative for a failure);
    /// `None` when the suite ran no instances.
    pub worst_margin: Option<f64>,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// Margin of each check on one instance; the instance passes when the
/// minimum is non-negative.
fn margins(suite: Suite, inst: &RandomInstance, opts: &WitnessOptions, hooks: CheckHooks) -> Result<f64> {
    let mut pair = inst.pair()?;
    if hooks.erase_mu {
        pair = pair.with_erased_mu();
    }
    let margin = match suite {
        Suite::Contractivity => {
            let r = inequality_report(&pair, &inst.schedule, 0.0, opts)?;
            opts.threshold - r.n_fd
        }
        Suite::MNegativity => {
            let r = inequality_report(&pair, &inst.schedule, 0.0, opts)?;
            (ANALYTIC_TOL - r.m_analytic).min(opts.threshold - r.m_fd)
        }
        Suite::Inequality => {
            let r = inequality_report(&pair, &inst.schedule, 0.0, opts)?;
            (r.slack + opts.slack_tol).min(r.c + opts.slack_tol - r.n_fd)
        }
        Suite::LaineBound => {
            let r = inequality_report(&pair, &inst.schedule, 0.0, opts)?;
            let b = laine_bound_check(&pair)?;
            (b.rhs + 1e-10 - b.lhs).min(r.c)
        }
    };
    Ok(margin)
}

/// Runs `n` instances of one suite.
pub fn run_suite(suite: Suite, n: usize, seed: u64, opts: &WitnessOptions, hooks: CheckHooks) -> Result<SuiteOutcome> {
    opts.validate()?;
    let instances = random_instances(suite.ensemble(), n, seed ^ suite.seed_offset())?;
    let margins: Vec<f64> = instances
        .par_iter()
        .map(|inst| margins(suite, inst, opts, hooks))
        .collect::<Result<_>>()?;
    Ok(SuiteOutcome {
        suite,
        total: n,
        passed: margins.iter().filter(|&&m| m >= 0.0).count(),
        worst_margin: margins.iter().copied().reduce(f64::min),
    })
}
