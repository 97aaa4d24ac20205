//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use l0peel::dual::{conjugate_box_const, conjugate_box_linear, dual_objective};
use l0peel::instance::{calibrate_big_m, default_m0, generate_instance, ExperimentConfig};
use l0peel::oracle::{brute_force_global, brute_force_node, HalfLine};
use l0peel::peel::{psi_lower, psi_upper, Side};
use l0peel::relax::{relax_objective, solve_relaxation, RelaxSettings};
use l0peel::sweep::{run_sweep_to_csv, AggregateRow, SweepSpec, SweepVariable};
use l0peel::{solve, Fixing, NodePartition, SolverConfig};
use rand::Rng;

const EXACT_TOL: f64 = 1e-8;
const CERT_MARGIN: f64 = -1e-9;
const DUALITY_TOL: f64 = 1e-9;
const GRID_STEP: f64 = 1e-4;
const RELAX_TOL: f64 = 1e-6;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: u32, name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let o = Outcome {
        id,
        name,
        pass,
        detail,
        elapsed: start.elapsed(),
    };
    println!(
        "{} [{:2}] {}: {} ({:.1}s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.name,
        o.detail,
        o.elapsed.as_secs_f64()
    );
    o
}

struct SuiteCase {
    seed: u64,
    gamma: f64,
    oracle_value: f64,
    oracle_support: Vec<usize>,
    oracle_x: Vec<f64>,
    calib_x: Vec<f64>,
    calib_value: f64,
    big_m: f64,
    peel: (f64, Vec<usize>),
    no_peel: (f64, Vec<usize>),
    optimal: bool,
}

/// 100 instances with (m, n) ∈ {(8,10), (10,12)}, k ∈ {1,2,3}, γ ∈ {1,3}.
fn small_suite() -> Vec<SuiteCase> {
    (0..100u64)
        .map(|i| {
            let (m, n) = if i % 2 == 0 { (8, 10) } else { (10, 12) };
            let k = 1 + (i as usize / 2) % 3;
            let gamma = if (i / 6) % 2 == 0 { 1.0 } else { 3.0 };
            let cfg = ExperimentConfig {
                m,
                n,
                k,
                snr_db: 15.0,
                gamma,
                seed: 1000 + i,
                ..ExperimentConfig::default()
            };
            let (inst, _) = generate_instance(&cfg).unwrap();
            let oracle = brute_force_global(&inst, n).unwrap();
            let calib = calibrate_big_m(
                &inst,
                gamma,
                1.1,
                default_m0(&inst),
                &SolverConfig::default(),
            )
            .unwrap();
            let bounds = calib.bounds(n);
            let mut optimal = true;
            let mut run = |peeling: bool| {
                let rep = solve(
                    &inst,
                    &bounds,
                    &SolverConfig {
                        peeling,
                        ..SolverConfig::default()
                    },
                )
                .unwrap();
                optimal &= rep.valid();
                (rep.p_star, rep.support())
            };
            let peel = run(true);
            let no_peel = run(false);
            SuiteCase {
                seed: cfg.seed,
                gamma,
                oracle_value: oracle.value,
                oracle_support: oracle.support,
                oracle_x: oracle.x,
                calib_x: calib.x_star,
                calib_value: calib.p_star,
                big_m: calib.big_m,
                peel,
                no_peel,
                optimal,
            }
        })
        .collect()
}

fn exactness(suite: &[SuiteCase]) -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for c in suite {
        let d = (c.peel.0 - c.oracle_value)
            .abs()
            .max((c.no_peel.0 - c.oracle_value).abs());
        worst = worst.max(d);
        if d > EXACT_TOL || !c.optimal {
            bad.push(c.seed);
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} instances, max |p* - oracle| = {worst:.2e}, failing seeds {bad:?}",
            suite.len()
        ),
    )
}

fn peel_safety(suite: &[SuiteCase]) -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut support_mismatch = 0;
    let mut oracle_mismatch = 0;
    for c in suite {
        worst = worst.max((c.peel.0 - c.no_peel.0).abs());
        support_mismatch += usize::from(c.peel.1 != c.no_peel.1);
        oracle_mismatch += usize::from(c.peel.1 != c.oracle_support);
    }
    (
        worst <= EXACT_TOL && support_mismatch == 0 && oracle_mismatch == 0,
        format!(
            "max |p*_peel - p*_nopeel| = {worst:.2e}, support mismatches {support_mismatch}, vs oracle {oracle_mismatch}"
        ),
    )
}

fn calibration(suite: &[SuiteCase]) -> (bool, String) {
    let mut bad = Vec::new();
    let mut worst_x: f64 = 0.0;
    let mut checked_gamma = 0;
    for c in suite {
        let dx = c
            .calib_x
            .iter()
            .zip(&c.oracle_x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_x = worst_x.max(dx);
        let norm = c.calib_x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let mut ok = (c.calib_value - c.oracle_value).abs() <= EXACT_TOL && dx <= 1e-6;
        if c.gamma > 1.0 {
            checked_gamma += 1;
            ok &= c.big_m > norm;
        }
        if !ok {
            bad.push(c.seed);
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} instances ({checked_gamma} with γ > 1), max ‖x_cal - x_oracle‖∞ = {worst_x:.2e}, failing seeds {bad:?}",
            suite.len()
        ),
    )
}

fn certificates() -> (bool, String) {
    let mut r = rng(31);
    let mut worst = f64::INFINITY;
    let (mut upper, mut lower) = (0, 0);
    while upper < 200 || lower < 200 {
        let inst = random_instance(&mut r, 3, 4);
        let mut node = random_node(&mut r, 4);
        let j = r.random_range(0..4);
        node.set(j, Fixing::Free);
        let bounds = random_box(&mut r, &node);
        let w = random_w(&mut r, 3);
        let d = dual_objective(&w, None, &node, &bounds, &inst);
        let c = d.corr[j];
        let lambda = inst.lambda();
        if upper < 200 && bounds.upper_at(j) > 0.0 {
            let alpha = r.random_range(0.0..bounds.upper_at(j));
            let bound = d.value + psi_upper(j, c, &bounds, lambda) + alpha * (-c).max(0.0);
            let extra = HalfLine {
                j,
                side: Side::Upper,
                alpha,
            };
            let exact = brute_force_node(&inst, &node, &bounds, Some(extra))
                .unwrap()
                .value;
            if exact.is_finite() {
                worst = worst.min(exact - bound);
            }
            upper += 1;
        }
        if lower < 200 && bounds.lower_at(j) < 0.0 {
            let alpha = r.random_range(0.0..-bounds.lower_at(j));
            let bound = d.value + psi_lower(j, c, &bounds, lambda) + alpha * c.max(0.0);
            let extra = HalfLine {
                j,
                side: Side::Lower,
                alpha,
            };
            let exact = brute_force_node(&inst, &node, &bounds, Some(extra))
                .unwrap()
                .value;
            if exact.is_finite() {
                worst = worst.min(exact - bound);
            }
            lower += 1;
        }
    }
    (
        worst >= CERT_MARGIN,
        format!("{upper} upper + {lower} lower certificates, min margin {worst:.3e}"),
    )
}

fn weak_duality() -> (bool, String) {
    let mut r = rng(41);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let (m, n) = (r.random_range(1..8), r.random_range(1..9));
        let inst = random_instance(&mut r, m, n);
        let node = random_node(&mut r, n);
        let bounds = random_box(&mut r, &node);
        let x = random_feasible(&mut r, &bounds);
        let w = random_w(&mut r, m);
        let d = dual_objective(&w, None, &node, &bounds, &inst).value;
        worst = worst.max(d - relax_objective(&x, &node, &bounds, &inst));
    }
    (
        worst <= DUALITY_TOL,
        format!("1000 draws, max D(w) - R(x) = {worst:.3e}"),
    )
}

fn conjugates() -> (bool, String) {
    let mut r = rng(51);
    let (mut worst_const, mut worst_lin): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let l = -r.random_range(0.0..2.0);
        let u = r.random_range(0.0..2.0);
        let b = r.random_range(0.0..1.5);
        for t in 0..201 {
            let v = -3.0 + 6.0 * t as f64 / 200.0;
            let g = grid_sup(l, u, GRID_STEP, v, |_| b);
            worst_const = worst_const.max((conjugate_box_const(b, l, u, v) - g).abs());
            let f = |x: f64| {
                if x > 0.0 {
                    b * x / u
                } else if x < 0.0 {
                    b * x / l
                } else {
                    0.0
                }
            };
            let g = grid_sup(l, u, GRID_STEP, v, f);
            worst_lin = worst_lin.max((conjugate_box_linear(b, l, u, v) - g).abs());
        }
    }
    let tol = 2.0 * GRID_STEP;
    (
        worst_const <= tol && worst_lin <= tol,
        format!("100 draws × 201 points each, max error {worst_const:.2e} (const) {worst_lin:.2e} (linear), tol {tol:.0e}"),
    )
}

fn relaxation() -> (bool, String) {
    let mut r = rng(61);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let inst = random_instance(&mut r, 3, 4);
        let node = NodePartition::root(4);
        let bounds = random_box(&mut r, &node);
        let mut b = bounds.clone();
        let cd = solve_relaxation(&node, &mut b, &inst, &RelaxSettings::default(), None, None);
        let reference = (0..20)
            .map(|_| {
                let x0 = random_feasible(&mut r, &bounds);
                let x = prox_grad_relaxation(&inst, &node, &bounds, &x0, 1e-10);
                relax_objective(&x, &node, &bounds, &inst)
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((cd.value - reference).abs());
    }
    (
        worst <= RELAX_TOL,
        format!("50 root relaxations, max |CD - PG| = {worst:.2e}"),
    )
}

fn desk_base() -> ExperimentConfig {
    ExperimentConfig {
        m: 30,
        n: 40,
        k: 3,
        rho: 0.1,
        seed: 2024,
        ..ExperimentConfig::default()
    }
}

fn sweep(spec: &SweepSpec) -> Vec<AggregateRow> {
    let dir = tempfile::tempdir().unwrap();
    run_sweep_to_csv(spec, &dir.path().join("runs.csv")).unwrap()
}

fn node_direction() -> (bool, String) {
    let start = Instant::now();
    let spec = SweepSpec::new(
        desk_base(),
        SweepVariable::Gamma,
        vec![1.0, 2.0, 3.0, 5.0],
        20,
    );
    let agg = sweep(&spec);
    let mut all_le = true;
    let mut some_lt = false;
    let mut parts = Vec::new();
    for a in &agg {
        let off = a.variant("no_peel").unwrap().mean_nodes;
        let on = a.variant("peel").unwrap().mean_nodes;
        all_le &= on <= off;
        some_lt |= on < off;
        parts.push(format!("γ={}: {on:.1}/{off:.1}", a.value));
    }
    let fast = start.elapsed() < Duration::from_secs(600);
    (
        all_le && some_lt && fast,
        format!("mean nodes peel/no-peel {}", parts.join(", ")),
    )
}

fn hardness_trend() -> (bool, String) {
    let spec = SweepSpec::new(desk_base(), SweepVariable::Rho, vec![0.1, 0.6], 20);
    let agg = sweep(&spec);
    let gain = |a: &AggregateRow| {
        a.variant("no_peel").unwrap().mean_nodes / a.variant("peel").unwrap().mean_nodes
    };
    let easy = gain(&agg[0]);
    let hard = gain(&agg[1]);
    (
        hard >= easy,
        format!(
            "node gain (no-peel/peel) ρ=0.1: {easy:.3}, ρ=0.6: {hard:.3} (peel/no-peel {:.3} vs {:.3})",
            1.0 / easy,
            1.0 / hard
        ),
    )
}

fn determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_l0peel"))
            .args([
                "sweep",
                "--m",
                "20",
                "--n",
                "25",
                "--seed",
                "77",
                "--variable",
                "sigma",
            ])
            .args(["--values", "0.5,1", "--trials", "4", "--out"])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return (false, format!("sweep exited with {status}"));
        }
        files.push(std::fs::read(&out).unwrap());
        files.push(std::fs::read(l0peel::sweep::aggregate_path(&out)).unwrap());
    }
    let same = files[0] == files[2] && files[1] == files[3];
    (
        same,
        format!(
            "two CLI sweeps, {} + {} bytes, identical: {same}",
            files[0].len(),
            files[1].len()
        ),
    )
}

fn main() {
    let mut outcomes = Vec::new();
    let start = Instant::now();
    let suite = small_suite();
    let suite_time = start.elapsed();
    let mut o = run(1, "exactness vs brute force", || exactness(&suite));
    o.pass &= suite_time < Duration::from_secs(120);
    o.elapsed += suite_time;
    println!(
        "       suite solved in {:.1}s (limit 120s)",
        suite_time.as_secs_f64()
    );
    outcomes.push(o);
    outcomes.push(run(2, "peeling safety", || peel_safety(&suite)));
    outcomes.push(run(3, "certificate validity", certificates));
    outcomes.push(run(4, "weak duality", weak_duality));
    outcomes.push(run(5, "conjugates vs grid search", conjugates));
    outcomes.push(run(6, "relaxation vs proximal gradient", relaxation));
    outcomes.push(run(7, "node-count direction", node_direction));
    outcomes.push(run(8, "hardness trend", hardness_trend));
    outcomes.push(run(9, "Big-M calibration", || calibration(&suite)));
    outcomes.push(run(10, "sweep determinism", determinism));

    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{} passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
