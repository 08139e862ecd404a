//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use migrasim::config::load_config;
use migrasim_core::dynamics::{intention_spread, predict_consensus, DynamicsParams, IntentionState, Rk4};
use migrasim_core::engine::run;
use migrasim_core::graph::{has_spanning_tree, laplacian, random_graph, SocialGraph};
use migrasim_core::migration::{migration_probability, monthly_review, MigrationParams, Sector, WorkerRoster};
use migrasim_core::rng::seeded;
use migrasim_core::spectrum::{spectrum, DEFAULT_ZERO_TOL};
use migrasim_core::{RunStatus, ScenarioConfig};
use migrasim_oracles::{binomial_moments, log_spread_ratio, lti_solution, system_matrix};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn shipped(name: &str) -> ScenarioConfig {
    load_config(&configs_dir().join(name)).expect("shipped config parses").config
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// The 200-graph ensemble shared by criteria 1 and 2.
fn ensemble() -> Vec<SocialGraph> {
    let mut rng = seeded(0xACCE_0001);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(2..=20);
            let sf = rng.gen_range(0.0..=0.095);
            random_graph(n, 0.1, sf, &mut rng).unwrap()
        })
        .collect()
}

fn laplacian_structure(graphs: &[SocialGraph]) -> Outcome {
    let mut worst = 0.0f64;
    for g in graphs {
        let l = laplacian(g);
        let n = g.order();
        for i in 0..n {
            let row: f64 = l.row(i).iter().sum();
            worst = worst.max(row.abs());
        }
        for v in l.mul_vec(&vec![1.0; n]) {
            worst = worst.max(v.abs());
        }
    }
    outcome(worst <= 1e-12, format!("200 graphs, max |row sum| = {worst:e}"))
}

fn zero_eigenvalue_crosscheck(graphs: &[SocialGraph]) -> Outcome {
    let (mut mismatches, mut left_half, mut spanning) = (0, 0, 0);
    for g in graphs {
        let s = spectrum(&laplacian(g), DEFAULT_ZERO_TOL).unwrap();
        let tree = has_spanning_tree(g);
        if tree != (s.zero_count == 1) {
            mismatches += 1;
        }
        if tree {
            spanning += 1;
            if s.nonzero().any(|e| e.re <= 0.0 || e.re.is_nan()) {
                left_half += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && left_half == 0,
        format!(
            "{mismatches} tree/zero-count mismatches, {left_half} of {spanning} spanning-tree graphs with Re <= 0"
        ),
    )
}

fn consensus_oracle() -> Outcome {
    let mut rng = seeded(0xACCE_0003);
    let (mut checked, mut agree, mut predicted) = (0, 0, 0);
    let mut disagreements = Vec::new();
    let mut attempts = 0;
    while checked < 60 && attempts < 10_000 {
        attempts += 1;
        let n = rng.gen_range(2..=6);
        let upper = 10f64.powf(rng.gen_range(-3.0..-1.0));
        let sf = upper * rng.gen_range(0.0..0.6);
        let g = random_graph(n, upper, sf, &mut rng).unwrap();
        let f = rng.gen_range(0.2..1.0);
        let a = rng.gen_range(0.0005..0.01);
        let p = DynamicsParams { a, f, input_gain: 0.0 };
        let verdict = predict_consensus(&g, &p, DEFAULT_ZERO_TOL).unwrap();
        if let Some(l2) = verdict.lambda2_re {
            if (a - f * l2).abs() < 0.05 * f {
                continue;
            }
        }
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if intention_spread(&x0) < 0.1 {
            continue;
        }
        let m = system_matrix(n, laplacian(&g).as_slice(), a, f);
        let observed = log_spread_ratio(n, &m, &x0, 2000.0, 0.1) < (1e-6f64).ln();
        checked += 1;
        predicted += verdict.consensus_predicted as usize;
        if observed == verdict.consensus_predicted {
            agree += 1;
        } else {
            disagreements.push(checked);
        }
    }
    outcome(
        checked >= 50 && agree == checked,
        format!(
            "{agree}/{checked} agree ({predicted} predicted consensus, {} not){}",
            checked - predicted,
            if disagreements.is_empty() { String::new() } else { format!(", disagreeing cases {disagreements:?}") }
        ),
    )
}

fn input_invariance() -> Outcome {
    let mut rng = seeded(0xACCE_0004);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=20);
        let g = random_graph(n, 0.1, rng.gen_range(0.0..0.095), &mut rng).unwrap();
        let p = DynamicsParams {
            a: rng.gen_range(0.0..0.005),
            f: rng.gen_range(0.0..0.01),
            input_gain: 0.02,
        };
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let mut s0 = IntentionState::new(x0.clone());
        let mut s1 = IntentionState::new(x0);
        let mut rk = Rk4::new(n);
        for _ in 0..1200 {
            rk.step(&mut s0, &g, &p, 0.0, 0.25).unwrap();
            rk.step(&mut s1, &g, &p, 7.3, 0.25).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let d = (s0.x[i] - s0.x[j]) - (s1.x[i] - s1.x[j]);
                    worst = worst.max(d.abs());
                }
            }
        }
    }
    outcome(worst <= 1e-9, format!("20 systems x 1200 steps, max pairwise gap {worst:e}"))
}

fn rk4_error(g: &SocialGraph, p: &DynamicsParams, x0: &[f64], v: f64, t: f64, dt: f64, exact: &[f64]) -> f64 {
    let steps = (t / dt).round() as usize;
    let mut s = IntentionState::new(x0.to_vec());
    let mut rk = Rk4::new(x0.len());
    for _ in 0..steps {
        rk.step(&mut s, g, p, v, dt).unwrap();
    }
    let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = s.x.iter().zip(exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    err / scale
}

fn integrator_accuracy() -> Outcome {
    let mut rng = seeded(0xACCE_0005);
    let (mut worst_err, mut min_ratio, mut max_ratio) = (0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..10 {
        let n = rng.gen_range(2..=8);
        let g = random_graph(n, 0.1, rng.gen_range(0.0..0.03), &mut rng).unwrap();
        let p = DynamicsParams {
            a: rng.gen_range(0.0..0.01),
            f: rng.gen_range(0.2..0.5),
            input_gain: 0.02,
        };
        let v = rng.gen_range(-0.5..0.5);
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = system_matrix(n, laplacian(&g).as_slice(), p.a, p.f);
        let exact = lti_solution(n, &m, &vec![p.input_gain * v; n], &x0, 10.0);
        let coarse = rk4_error(&g, &p, &x0, v, 10.0, 0.25, &exact);
        let fine = rk4_error(&g, &p, &x0, v, 10.0, 0.125, &exact);
        worst_err = worst_err.max(coarse);
        let ratio = coarse / fine;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    outcome(
        worst_err <= 1e-6 && min_ratio >= 12.0 && max_ratio <= 20.0,
        format!("max relative error {worst_err:e} at dt = 0.25, halving ratios in [{min_ratio:.2}, {max_ratio:.2}]"),
    )
}

fn migration_law() -> Outcome {
    let mut ok = migration_probability(0.0, 3.0) == 0.0;
    ok &= (migration_probability(3.0, 3.0) - 0.5).abs() < 1e-15;
    ok &= (migration_probability(-3.0, 3.0) - 0.5).abs() < 1e-15;
    let mut prev = 0.0;
    for k in 1..2000 {
        let x = k as f64 * 0.01;
        let p = migration_probability(x, 3.0);
        ok &= p > prev && p < 1.0;
        prev = p;
    }
    // Strictly below one wherever |x| + beta is distinguishable from |x| in
    // double precision; never above one anywhere.
    ok &= [1e3, 1e9, 1e15].iter().all(|&x| migration_probability(x, 3.0) < 1.0);
    ok &= [1e100, f64::MAX].iter().all(|&x| migration_probability(x, 3.0) <= 1.0);

    let n = 1000;
    let (mean, sd) = binomial_moments(n, 0.5);
    let params = MigrationParams { beta: 2.0, review_period_days: 30.0 };
    let mut worst_z = 0.0f64;
    for seed in 0..20u64 {
        let mut roster = WorkerRoster::without_hukou(vec![Sector::Rural; n]);
        let c = monthly_review(&mut roster, &IntentionState::new(vec![2.0; n]), &params, &mut seeded(seed));
        worst_z = worst_z.max((c.inflow as f64 - mean).abs() / sd);
    }
    outcome(
        ok && worst_z <= 4.0,
        format!("probability properties {}, binomial max |z| = {worst_z:.2} over 20 seeds", if ok { "hold" } else { "violated" }),
    )
}

const SEEDS: std::ops::RangeInclusive<u64> = 1..=20;

fn instance_one() -> Outcome {
    let base = shipped("instance1.json");
    let (mut overshoots, mut ratios) = (Vec::new(), Vec::new());
    let (mut bounded, mut anti) = (true, 0);
    for seed in SEEDS {
        let cfg = ScenarioConfig { seed, ..base.clone() };
        let r = run(&cfg).unwrap();
        bounded &= r.status == RunStatus::Completed && r.series.iter().all(|m| m.n_u <= cfg.n_workers);
        anti += !r.verdict.consensus_predicted as usize;
        overshoots.push(r.summary.overshoot_ratio.unwrap_or(0.0));
        ratios.push(r.summary.oscillation_amplitude / (r.summary.net_shift.unsigned_abs().max(1) as f64));
    }
    let (mo, mr) = (median(overshoots), median(ratios));
    outcome(
        bounded && mo > 0.0 && mr < 0.2,
        format!("median overshoot {mo:.3}, median amplitude/shift {mr:.3}, {anti}/20 anti-consensus verdicts"),
    )
}

fn instance_two_hukou() -> Outcome {
    let base = shipped("instance2.json");
    let hukou = shipped("instance2_hukou.json");
    let mut smaller = 0;
    for seed in SEEDS {
        let free = run(&ScenarioConfig { seed, ..base.clone() }).unwrap();
        let held = run(&ScenarioConfig { seed, ..hukou.clone() }).unwrap();
        let (af, ah) = (free.summary.oscillation_amplitude, held.summary.oscillation_amplitude);
        if ah < af {
            smaller += 1;
        }
    }
    outcome(smaller >= 14, format!("hukou amplitude strictly smaller in {smaller}/20 seed pairs"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_migrasim");
    let tmp = tempfile::tempdir().unwrap();
    let config = configs_dir().join("instance1.json");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = tmp.path().join(format!("run{k}"));
        let status = Command::new(bin)
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--seed", "42", "--format", "both"])
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, format!("run failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        let files: Vec<(String, Vec<u8>)> = ["series.csv", "summary.json", "workers.csv"]
            .iter()
            .map(|f| (f.to_string(), std::fs::read(out.join(f)).unwrap()))
            .collect();
        outputs.push(files);
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(|(_, b)| b.len()).sum();
    outcome(same, format!("two invocations, 3 files, {bytes} bytes, identical = {same}"))
}

fn main() {
    type Check = Box<dyn Fn() -> Outcome>;
    let graphs = std::rc::Rc::new(ensemble());
    let (g1, g2) = (graphs.clone(), graphs);
    let criteria: Vec<(&str, Duration, Check)> = vec![
        ("1 laplacian rows sum to zero", Duration::from_secs(1), Box::new(move || laplacian_structure(&g1))),
        ("2 spanning tree <=> single zero eigenvalue", Duration::from_secs(5), Box::new(move || zero_eigenvalue_crosscheck(&g2))),
        ("3 consensus verdict vs brute-force integration", Duration::from_secs(30), Box::new(consensus_oracle)),
        ("4 common input leaves differences unchanged", Duration::from_secs(5), Box::new(input_invariance)),
        ("5 RK4 vs matrix exponential", Duration::from_secs(5), Box::new(integrator_accuracy)),
        ("6 migration probability and binomial law", Duration::from_secs(5), Box::new(migration_law)),
        ("7 instance 1 overshoot, settled tail", Duration::from_secs(120), Box::new(instance_one)),
        ("8 instance 2 hukou suppresses oscillation", Duration::from_secs(120), Box::new(instance_two_hukou)),
        ("9 byte-identical repeated runs", Duration::from_secs(10), Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let mut o = check();
        let elapsed = start.elapsed();
        if elapsed > *budget {
            o.pass = false;
            o.detail.push_str(&format!("; over time budget {budget:?}"));
        }
        failed += !o.pass as usize;
        println!(
            "criterion {name}: {} ({}; {:.2?})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
