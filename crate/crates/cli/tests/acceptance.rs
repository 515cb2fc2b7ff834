//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nmwitness::catalog::{dephasing_preparations, model_dephasing};
use nmwitness::dynamics::{cp_check, cp_check_map, HamiltonianSchedule, Propagator};
use nmwitness::matrix::{tensor_product, ComplexMatrix};
use nmwitness::preparation::{prepare_pair, PreparationProcedure};
use nmwitness::random::{random_density, random_hermitian, random_product, random_unitary, seeded_rng};
use nmwitness::suites::{random_instances, run_suite, CheckHooks, Ensemble, Suite, SuiteOutcome};
use nmwitness::witness::{laine_bound_check, linear_grid, time_scan, witness_c, WitnessOptions};

const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn suite_verdict(outcome: SuiteOutcome) -> Verdict {
    Verdict {
        pass: outcome.all_passed(),
        detail: format!(
            "{}/{} pass, worst margin {:.3e}",
            outcome.passed,
            outcome.total,
            outcome.worst_margin.unwrap_or(0.0)
        ),
    }
}

fn suite(s: Suite, n: usize) -> Verdict {
    match run_suite(s, n, SEED, &WitnessOptions::default(), CheckHooks::default()) {
        Ok(o) => suite_verdict(o),
        Err(e) => Verdict { pass: false, detail: e.to_string() },
    }
}

fn contractivity() -> Verdict {
    suite(Suite::Contractivity, 200)
}

fn m_negativity() -> Verdict {
    suite(Suite::MNegativity, 200)
}

fn main_inequality() -> Verdict {
    suite(Suite::Inequality, 200)
}

fn c_soundness() -> Verdict {
    let mut worst = [0.0f64; 3];
    let mut rng = seeded_rng(SEED);
    for _ in 0..50 {
        // (i) uncorrelated input
        let rho = random_product(2, 2, &mut rng).unwrap();
        let p1 = PreparationProcedure::unitary(random_unitary(2, &mut rng)).unwrap();
        let p2 = PreparationProcedure::kraus(nmwitness::random::random_kraus(2, 2, &mut rng)).unwrap();
        let h = random_hermitian(4, &mut rng);
        let pair = prepare_pair(&p1, &p2, &rho).unwrap();
        worst[0] = worst[0].max(witness_c(&pair, &h).unwrap());

        // (ii) identical preparations on a correlated input
        let rho = nmwitness::random::random_bipartite(2, 2, 4, &mut rng).unwrap();
        let pair = prepare_pair(&p1, &p1, &rho).unwrap();
        worst[1] = worst[1].max(witness_c(&pair, &h).unwrap());

        // (iii) uncoupled Hamiltonian on a correlated input
        let hs = random_hermitian(2, &mut rng);
        let he = random_hermitian(2, &mut rng);
        let uncoupled = &tensor_product(&hs, &ComplexMatrix::identity(2)).unwrap()
            + &tensor_product(&ComplexMatrix::identity(2), &he).unwrap();
        let pair = prepare_pair(&p1, &p2, &rho).unwrap();
        worst[2] = worst[2].max(witness_c(&pair, &uncoupled).unwrap());
    }
    Verdict {
        pass: worst.iter().all(|&c| c <= 1e-10),
        detail: format!(
            "max C: uncorrelated {:.1e}, identical {:.1e}, uncoupled {:.1e} (50 each)",
            worst[0], worst[1], worst[2]
        ),
    }
}

fn footnote_bound() -> Verdict {
    let instances = random_instances(Ensemble::Mixed, 200, SEED).unwrap();
    let mut worst = f64::INFINITY;
    let mut passed = 0;
    for inst in &instances {
        let b = laine_bound_check(&inst.pair().unwrap()).unwrap();
        let margin = b.rhs + 1e-10 - b.lhs;
        worst = worst.min(margin);
        passed += usize::from(margin >= 0.0);
    }
    Verdict { pass: passed == 200, detail: format!("{passed}/200 pass, worst margin {worst:.3e}") }
}

fn detection() -> Verdict {
    let m = model_dephasing(1.0, 1.0, [0.0; 3], [0.0; 3]).unwrap();
    let (p1, p2) = dephasing_preparations();
    let opts = WitnessOptions::default();
    let scan = time_scan(&m, &p1, &p2, &linear_grid(0.0, TAU, 200), &opts).unwrap();
    // Reference: the Bell state is stationary and the reduced difference after
    // a step h is sin(h)/2 times a Pauli matrix, so N_fd = sin(h)/(2h) everywhere.
    let reference = opts.h.sin() / (2.0 * opts.h);
    let firing: Vec<_> = scan.reports.iter().filter(|r| r.n_fd > 1e-3).collect();
    let consistent = firing.iter().all(|r| r.c > 0.0);
    let max_dev = scan.reports.iter().map(|r| (r.n_fd - reference).abs()).fold(0.0, f64::max);
    Verdict {
        pass: !firing.is_empty() && consistent && max_dev < 1e-9,
        detail: format!(
            "{} of 200 points with N_fd > 1e-3, max N_fd {:.6}, C > 0 at all of them: {consistent}, deviation from reference {max_dev:.1e}",
            firing.len(),
            scan.max_n
        ),
    }
}

fn convergence() -> Verdict {
    let opts = WitnessOptions::default();
    let threshold = opts.threshold;
    let instances = random_instances(Ensemble::Correlated, 400, SEED).unwrap();
    let mut used = 0;
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 3];
    for inst in &instances {
        if used == 50 {
            break;
        }
        let r = inst.report(&opts).unwrap();
        // guarded, and with a nonzero correlation witness to converge to
        let Some(n_an) = r.n_analytic else { continue };
        if r.degenerate || r.c <= threshold {
            continue;
        }
        used += 1;
        let errors = [
            r.sweep.map(|p| (p.n_fd - n_an).abs()),
            r.sweep.map(|p| (p.m_fd - r.m_analytic).abs()),
            r.sweep.map(|p| (p.c_fd - r.c).abs()),
        ];
        for (k, e) in errors.iter().enumerate() {
            worst[k] = worst[k].max(e[2]);
            if !(e[0] > e[1] && e[1] > e[2] && e[2] <= 1e-4) {
                failures.push((inst.seed, ["N", "M", "C"][k], *e));
            }
        }
    }
    Verdict {
        pass: used == 50 && failures.is_empty(),
        detail: format!(
            "{used} instances, worst error at h = 1e-5: N {:.1e}, M {:.1e}, C {:.1e}; {} non-monotone or too large{}",
            worst[0],
            worst[1],
            worst[2],
            failures.len(),
            failures.first().map(|f| format!(" (first: seed {} {} {:?})", f.0, f.1, f.2)).unwrap_or_default()
        ),
    }
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("nmwitness-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 3\n[model]\nkind = \"random\"\n[preparation1]\ntype = \"identity\"\n[preparation2]\ntype = \"rotation\"\naxis = [0.0, 1.0, 1.0]\nangle = 1.0\n[grid]\nt_start = 0.0\nt_end = 6.283185307179586\nn_points = 200\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out_path = dir.join(format!("scan{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_nmwitness"))
            .args(["scan", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out_path.to_str().unwrap()])
            .output()
            .unwrap();
        outputs.push((status.status.code(), std::fs::read(&out_path).unwrap_or_default()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs[0].1 == outputs[1].1 && !outputs[0].1.is_empty();
    Verdict {
        pass: same && outputs[0].0 == Some(0),
        detail: format!("{} bytes, identical: {same}, exit {:?}", outputs[0].1.len(), outputs[0].0),
    }
}

fn cp_sanity() -> Verdict {
    let mut rng = seeded_rng(SEED);
    let mut worst = f64::INFINITY;
    for k in 0..100 {
        let rho_e = random_density(2, 2, &mut rng).unwrap();
        // half from Hamiltonian evolution, half from Haar-random unitaries
        let u = if k % 2 == 0 {
            let sched = HamiltonianSchedule::constant(2, 2, random_hermitian(4, &mut rng)).unwrap();
            nmwitness::dynamics::propagator(&sched, 0.0, 1.3, 200).unwrap()
        } else {
            Propagator::from_unitary(random_unitary(4, &mut rng), 0.0, 1.0).unwrap()
        };
        worst = worst.min(cp_check(&rho_e, &u).unwrap().min_choi_eigenvalue);
    }
    let transpose = cp_check_map(2, |x| Ok(x.transpose())).unwrap();
    Verdict {
        pass: worst >= -1e-9 && transpose.min_choi_eigenvalue <= -0.4 && !transpose.is_cp,
        detail: format!(
            "min Choi eigenvalue over 100 product-state maps {worst:.3e}, transpose control {:.3}",
            transpose.min_choi_eigenvalue
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("contractivity of uncorrelated instances", contractivity),
        ("M never positive", m_negativity),
        ("N_fd <= M + C and N_fd <= C on correlated instances", main_inequality),
        ("C vanishes without usable correlations", c_soundness),
        ("joint minus system distance bounded by the mu difference", footnote_bound),
        ("dephasing model detection", detection),
        ("finite differences converge to analytic values", convergence),
        ("byte-identical scan output", determinism),
        ("Choi positivity and transpose control", cp_sanity),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        all &= v.pass;
        println!(
            "criterion {}: {} | {name}: {} [{:.1}s]",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
