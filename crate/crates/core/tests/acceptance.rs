//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;

use interp_select::dataset::{generate_toy, generative_reference, ToyConfig};
use interp_select::metrics::{cosine, dominates, pareto_front, scalarize, CandidateEvaluation, MetricConfig};
use interp_select::perturbation::make_replicates;
use interp_select::selection::{select, GridSpec};
use interp_select::solver::{fit_lasso, kkt_violation_scaled, lasso_coordinate_descent, LassoSpec};
use interp_select::{Dataset, SelectionReport};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Run {
    data: Dataset,
    report: SelectionReport,
}

fn candidate(report: &SelectionReport, lambda: f64) -> &CandidateEvaluation {
    report.candidates.iter().find(|c| c.lambda == lambda).expect("lambda on grid")
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn endpoint(run: &Run) -> Outcome {
    let c = candidate(&run.report, 1000.0);
    let mbm = c.full_fit_mbm.as_ref().ok_or("full fit at lambda=1000 is all zero")?;
    check(
        (c.eta - 1.0).abs() <= 1e-6 && mbm.direction() == [1.0, 0.0],
        format!("eta(1000) = {:.9}, full-fit map = {:?}", c.eta, mbm.direction()),
    )
}

fn performance_level(run: &Run) -> Outcome {
    let d = candidate(&run.report, 10.0).delta;
    check((d - 0.988).abs() <= 0.010, format!("delta(10) = {d:.4}"))
}

fn unregularised_direction(run: &Run) -> Outcome {
    let c = candidate(&run.report, 0.0);
    let mbm = c.full_fit_mbm.as_ref().ok_or("full fit at lambda=0 is all zero")?;
    let s5 = 5f64.sqrt();
    let cos = cosine(mbm.direction(), &[1.0 / s5, 2.0 / s5]).map_err(|e| e.to_string())?;
    check(
        cos >= 0.995 && (c.eta - 0.447).abs() <= 0.03,
        format!("cos(map(0), [1,2]/sqrt5) = {cos:.5}, eta(0) = {:.4}", c.eta),
    )
}

fn dilemma(run: &Run) -> Outcome {
    let cands = &run.report.candidates;
    let argmax = |f: &dyn Fn(&CandidateEvaluation) -> f64| {
        (0..cands.len()).fold(0, |b, i| if f(&cands[i]) > f(&cands[b]) { i } else { b })
    };
    let best_delta = &cands[argmax(&|c| c.delta)];
    let best_eta = &cands[argmax(&|c| c.eta)];
    let sacrifice = best_delta.delta - run.report.selected().delta;
    check(
        best_delta.lambda <= 50.0 && best_eta.lambda >= 500.0 && sacrifice <= 0.07,
        format!(
            "argmax delta at lambda = {}, argmax eta at lambda = {}, delta given up = {sacrifice:.4}",
            best_delta.lambda, best_eta.lambda
        ),
    )
}

fn scalarization_exactness() -> Outcome {
    // Reference (eta, delta, zeta) triples for lambda = 0 .. 1000.
    let table = [
        (0.4391, 0.9883, 0.7137),
        (0.4391, 0.9883, 0.7137),
        (0.4391, 0.9883, 0.7137),
        (0.4392, 0.9883, 0.7137),
        (0.4400, 0.9883, 0.7142),
        (0.4484, 0.9884, 0.7184),
        (0.4921, 0.9880, 0.7400),
        (0.5845, 0.9840, 0.7842),
        (0.9968, 0.9310, 0.9639),
        (1.0, 0.9292, 0.9646),
        (1.0, 0.9292, 0.9646),
    ];
    let cfg = MetricConfig::default();
    let worst = table
        .iter()
        .map(|&(eta, delta, zeta)| (scalarize(eta, delta, &cfg) - zeta).abs())
        .fold(0.0, f64::max);
    check(worst <= 5e-4, format!("max |zeta - tabulated| = {worst:.2e} over 11 columns"))
}

fn solver_oracle(run: &Run) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut solved = 0;
    while solved < 100 {
        let a: DMatrix<f64> = DMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
        let qr = a.qr();
        if qr.r().diagonal().iter().any(|d| d.abs() < 1e-3) {
            continue;
        }
        let q = qr.q();
        let y: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lambda = rng.random_range(0.0..4.0);
        let w = lasso_coordinate_descent(&q, &y, &LassoSpec::default().with_lambda(lambda), None)
            .map_err(|e| e.to_string())?;
        let yv = DVector::from_column_slice(&y);
        for (j, col) in q.column_iter().enumerate() {
            let z = col.dot(&yv);
            let closed = z.signum() * (z.abs() - lambda / 2.0).max(0.0);
            worst = worst.max((w.theta[j] - closed).abs());
        }
        solved += 1;
    }

    let spec = LassoSpec::default();
    let grid = GridSpec::default();
    let replicates = make_replicates(run.data.y(), &grid.plan).map_err(|e| e.to_string())?;
    let mut kkt = 0.0_f64;
    let mut fits = 0;
    for &lambda in &grid.lambdas {
        let spec = spec.with_lambda(lambda);
        let sets = std::iter::once(run.data.clone()).chain(replicates.iter().map(|r| run.data.select_rows(&r.in_bag)));
        for d in sets {
            let w = fit_lasso(&d, &spec).map_err(|e| e.to_string())?;
            kkt = kkt.max(kkt_violation_scaled(d.x(), d.y(), &w, lambda));
            fits += 1;
        }
    }
    check(
        worst < 1e-8 && kkt < 10.0 * spec.tol,
        format!("max |cd - closed form| = {worst:.1e} over 100 problems; max KKT residual = {kkt:.1e} over {fits} toy fits"),
    )
}

fn pareto_property(run: &Run) -> Outcome {
    let cfg = MetricConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let len = rng.random_range(1..=15);
        let points: Vec<(f64, f64)> = (0..len)
            .map(|_| (rng.random_range(-1.0..=1.0), rng.random_range(cfg.kappa..=1.0)))
            .collect();
        let best = (0..len)
            .max_by(|&a, &b| {
                let za = scalarize(points[a].0, points[a].1, &cfg);
                let zb = scalarize(points[b].0, points[b].1, &cfg);
                za.total_cmp(&zb)
            })
            .unwrap();
        if points.iter().any(|&q| dominates(q, points[best])) {
            return Err(format!("trial {trial}: maximiser {:?} is dominated", points[best]));
        }
    }
    let front = pareto_front(&run.report.candidates);
    check(
        front.contains(&run.report.selected_index) && front == run.report.pareto_indices,
        format!("1000 random lists ok; toy front = {front:?}, selected index {}", run.report.selected_index),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_interp-select");
    let run_in = |dir: &Path, extra: &[&str]| -> Result<(Vec<u8>, Vec<u8>), String> {
        let status = Command::new(bin)
            .current_dir(dir)
            .args(["select", "--generate", "--out-dir", "out"])
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        let read = |f: &str| fs::read(dir.join("out").join(f)).map_err(|e| e.to_string());
        Ok((read("report.json")?, read("table.csv")?))
    };
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let first = run_in(dirs[0].path(), &[])?;
    let second = run_in(dirs[1].path(), &[])?;
    let parallel = run_in(dirs[2].path(), &["--parallel", "--threads", "4"])?;
    check(
        first == second && first == parallel,
        format!("report.json {} bytes, table.csv {} bytes, sequential x2 + parallel", first.0.len(), first.1.len()),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let cfg = ToyConfig::default();
    let data = generate_toy(&cfg).expect("toy data");
    let reference = generative_reference(&cfg).expect("reference");
    let report = select(&data, &GridSpec::default(), &reference).expect("selection");
    let run = Run { data, report };

    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("1 endpoint reproduction", Box::new(|| endpoint(&run))),
        ("2 performance level", Box::new(|| performance_level(&run))),
        ("3 unregularised direction", Box::new(|| unregularised_direction(&run))),
        ("4 performance-interpretability dilemma", Box::new(|| dilemma(&run))),
        ("5 scalarization exactness", Box::new(scalarization_exactness)),
        ("6 solver oracle equivalence + KKT", Box::new(|| solver_oracle(&run))),
        ("7 Pareto property", Box::new(|| pareto_property(&run))),
        ("8 determinism", Box::new(determinism)),
    ];

    let mut failed = 0;
    for (name, f) in &criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
