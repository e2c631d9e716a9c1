//! Acceptance run: one PASS/FAIL line per criterion, with the individual
//! checks and wall times underneath. Exits nonzero if any criterion fails.
//!
//! Criterion 6 runs the full epsilon ladder and dominates the runtime
//! (about ten minutes on a single core).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rarefy::config::RunConfig;
use rarefy::solver_checks;
use rarefy::sweep;
use rarefy::verify::{self, Check, SuiteParams};
use rarefy_core::harness::{fit_rate, theoretical_rate};

const BUDGET: [(u8, u64); 8] = [
    (1, 5),
    (2, 30),
    (3, 10),
    (4, 5),
    (5, 300),
    (6, 1800),
    (7, 5),
    (8, 5),
];

fn budget(criterion: u8) -> Duration {
    Duration::from_secs(BUDGET.iter().find(|b| b.0 == criterion).unwrap().1)
}

/// Checks for the zero-dissipation sweep on the default ladder.
fn sweep_checks(cfg: &RunConfig) -> Vec<Check> {
    let spec = cfg.sweep_spec().expect("default sweep spec");
    let eps = cfg.sweep.eps.clone();
    let records = sweep::run_sweep(&spec, &eps, cfg.workers).expect("sweep runs");
    let a = theoretical_rate(spec.setup.gas());
    let flag = |b: bool| f64::from(u8::from(b));

    let mut out = Vec::new();
    let aborted = records.iter().filter(|r| r.aborted.is_some()).count();
    out.push(Check::at_most(
        6,
        "sweep: aborted runs",
        aborted as f64,
        0.0,
    ));
    for r in &records {
        println!(
            "    eps {:.0e}: rho {:.4} m {:.4} n {:.4} E1 {:.3e} E2 {:.3e} E3 {:.3e} t {} ({:.0} s){}",
            r.eps,
            r.errors.rho,
            r.errors.m,
            r.errors.n,
            r.energy.e1,
            r.energy.e2,
            r.energy.e3,
            r.t_measure,
            r.wall_seconds,
            r.aborted.as_deref().map(|m| format!(" ABORTED: {m}")).unwrap_or_default(),
        );
    }
    let in_window = records.iter().all(|r| (0.5..=1.0).contains(&r.t_measure));
    out.push(Check::at_least(
        6,
        "sweep: t_measure in [0.5, 1]",
        flag(in_window),
        1.0,
    ));
    let fine_enough = records.iter().all(|r| {
        r.n_cells > 0
            && spec
                .grid_for(r.eps)
                .is_ok_and(|g| g.dx() <= r.eps / 8.0 * (1.0 + 1e-12))
    });
    out.push(Check::at_least(
        6,
        "sweep: dx <= eps / 8",
        flag(fine_enough),
        1.0,
    ));

    for name in ["rho", "m", "n", "E1", "E2", "E3"] {
        out.push(Check::at_least(
            6,
            format!("sweep: {name} strictly decreasing"),
            flag(sweep::strictly_decreasing(&records, name)),
            1.0,
        ));
    }
    let done: Vec<_> = records.iter().filter(|r| r.aborted.is_none()).collect();
    let e: Vec<f64> = done.iter().map(|r| r.eps).collect();
    for name in ["rho", "m", "n"] {
        let v: Vec<f64> = done.iter().map(|r| sweep::field(r, name)).collect();
        match fit_rate(&e, &v, true) {
            Ok(f) => out.push(Check::at_least(
                6,
                format!("sweep: log-corrected order {name} >= a"),
                f.b,
                a,
            )),
            Err(err) => {
                println!("    fit {name}: {err}");
                out.push(Check::at_least(
                    6,
                    format!("sweep: log-corrected order {name} >= a"),
                    f64::NAN,
                    a,
                ));
            }
        }
        if let Ok(f) = fit_rate(&e, &v, false) {
            out.push(Check::info(6, format!("sweep: plain order {name}"), f.b));
        }
    }
    let drift = done
        .iter()
        .map(|r| r.conservation_drift)
        .fold(0.0, f64::max);
    out.push(Check::info(6, "sweep: max conservation drift", drift));
    out
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let params = SuiteParams {
        setup: cfg.setup().expect("default setup"),
        seed: cfg.seed,
        random_states: cfg.verify.states,
        burgers_queries: cfg.verify.burgers_queries,
    };

    type Suite<'a> = Box<dyn Fn() -> Vec<Check> + 'a>;
    let suites: Vec<(u8, &str, Suite)> = vec![
        (
            1,
            "Riemann invariants across the exact fan",
            Box::new(|| verify::riemann_suite(&params).unwrap()),
        ),
        (
            2,
            "smoothed Burgers profile",
            Box::new(|| verify::burgers_suite(&params).unwrap()),
        ),
        (
            3,
            "approximate profile derivatives and residual",
            Box::new(|| verify::profile_suite(&params, cfg.profile.nu, cfg.profile.delta).unwrap()),
        ),
        (
            4,
            "cut-off wave error slopes",
            Box::new(|| verify::cutoff_suite(&params).unwrap()),
        ),
        (
            5,
            "solver verification",
            Box::new(|| solver_checks::solver_suite().unwrap()),
        ),
        (6, "zero-dissipation sweep", Box::new(|| sweep_checks(&cfg))),
        (
            7,
            "theoretical rate formula",
            Box::new(|| verify::rate_suite().unwrap()),
        ),
        (
            8,
            "relative entropy machinery",
            Box::new(|| verify::entropy_suite(&params).unwrap()),
        ),
    ];

    let mut failed = Vec::new();
    for (criterion, title, suite) in &suites {
        let start = Instant::now();
        let mut checks = suite();
        let elapsed = start.elapsed();
        let limit = budget(*criterion);
        checks.push(Check::at_most(
            *criterion,
            format!("runtime seconds (budget {})", limit.as_secs()),
            elapsed.as_secs_f64(),
            limit.as_secs_f64(),
        ));
        let ok = verify::all_pass(&checks);
        println!(
            "{} criterion {criterion}: {title} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for line in verify::render(&checks).lines() {
            println!("    {line}");
        }
        if !ok {
            failed.push(*criterion);
        }
    }

    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", suites.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
