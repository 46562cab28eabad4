//! Acceptance suite: one test per criterion, each printing its measured
//! values (run with `--nocapture` to see them).
//!
//! Criteria 1, 6, 7, 8 and 11 assert catalogued reference values verbatim.
//! Several of those reference values are inconsistent with the definitional
//! quantities this toolkit computes (details in each test); the affected
//! assertions fail by measurement, not by omission — the measured numbers
//! are printed and the remaining clauses are still enforced.

use std::process::Command;
use std::time::Instant;

use symtest_cli::fixture::REPAIR_TIMES;
use symtest_core::characterization::asymptotic_variance;
use symtest_core::distributions::{parse_spec, DistributionSpec, RandomStream};
use symtest_core::estimator::{delta_hat, delta_hat_naive, SortedSample};
use symtest_core::jel::{
    ajel_statistic, ajel_test, jel_statistic, jel_test, pseudo_values, solve_lambda, Method,
};
use symtest_core::scr_bootstrap::scr_test;
use symtest_core::simulation::{estimate_rejection_rate, run_study, HullPolicy, SimulationConfig};
use symtest_core::Error;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symtest"))
}

fn study_config(seed: u64) -> SimulationConfig {
    SimulationConfig {
        families: Vec::new(),
        sample_sizes: Vec::new(),
        methods: Vec::new(),
        reps: 10_000,
        alpha: 0.05,
        master_seed: seed,
        scr_b: 10_000,
        calibration_null: parse_spec("normal(0,1)").unwrap(),
        hull_policy: HullPolicy::RejectOnHullViolation,
    }
}

fn sample_from(spec: &DistributionSpec, seed: u64, id: u64, n: usize) -> SortedSample {
    let mut stream = RandomStream::new(seed, id);
    SortedSample::new(spec.sample(&mut stream, n).unwrap()).unwrap()
}

// -------------------------------------------------------------------------
// 1. Characterization fixtures via the CLI.
// -------------------------------------------------------------------------
#[test]
fn criterion_01_characterization_fixtures() {
    let start = Instant::now();
    let mut measured = Vec::new();
    for dist in ["uniform(-1,1)", "logistic(0,1)", "exp(1)"] {
        let out = binary()
            .args(["characterize", "--dist", dist])
            .output()
            .unwrap();
        assert!(out.status.success(), "characterize {dist} failed");
        let text = String::from_utf8(out.stdout).unwrap();
        let grab = |key: &str| -> f64 {
            text.lines()
                .find(|l| l.starts_with(key))
                .and_then(|l| l.split_whitespace().nth(1))
                .unwrap_or_else(|| panic!("no {key} line in: {text}"))
                .parse()
                .unwrap()
        };
        measured.push((dist, grab("gcre"), grab("gce")));
    }
    let elapsed = start.elapsed();

    let expected = [
        ("uniform(-1,1)", 1.0 / 12.0, 1.0 / 12.0),
        ("logistic(0,1)", 0.75, 0.75),
        ("exp(1)", 5.0 / 12.0, 1.0 / 3.0),
    ];
    let mut failures = Vec::new();
    for ((dist, gcre, gce), (_, want_gcre, want_gce)) in measured.iter().zip(expected) {
        println!(
            "ACCEPTANCE 1: {dist}: gcre {gcre} (reference {want_gcre:.6}), gce {gce} (reference {want_gce:.6})"
        );
        if (gcre - want_gcre).abs() > 1e-6 {
            failures.push(format!("{dist}: gcre {gcre} vs {want_gcre}"));
        }
        if (gce - want_gce).abs() > 1e-6 {
            failures.push(format!("{dist}: gce {gce} vs {want_gce}"));
        }
    }
    println!("ACCEPTANCE 1: runtime {elapsed:.2?} (budget 1 s)");
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "characterization runtime {elapsed:.2?}"
    );
    // The logistic and exponential reference values above come from worked
    // examples whose integrands attach the weight to the inner variable;
    // the definitional integrals (what this library computes, and what the
    // uniform example uses) give 1/4, 1/4 and 1/6, 1/12 instead. The
    // difference Δ₁ − Δ₂ is identical either way.
    assert!(failures.is_empty(), "ACCEPTANCE 1 FAIL: {failures:?}");
}

// -------------------------------------------------------------------------
// 2. Closed form vs naive U-statistic.
// -------------------------------------------------------------------------
#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let generators = [
        parse_spec("normal(0,1)").unwrap(),
        parse_spec("laplace(0,1)").unwrap(),
        parse_spec("exp(1)").unwrap(),
        parse_spec("uniform(-1,1)").unwrap(),
    ];
    let mut stream = RandomStream::new(20_001, 0);
    let mut worst = 0.0f64;
    for trial in 0..200u64 {
        let spec = &generators[(trial % 4) as usize];
        let n = 3 + (trial as usize * 13) % 28;
        let s = SortedSample::new(spec.sample(&mut stream, n).unwrap()).unwrap();
        let fast = delta_hat(&s);
        let slow = delta_hat_naive(&s);
        let err = (fast - slow).abs() / slow.abs().max(1.0);
        worst = worst.max(err);
        assert!(
            err < 1e-12,
            "trial {trial} (n={n}, {spec}): closed {fast} vs naive {slow}"
        );
    }
    let elapsed = start.elapsed();
    println!("ACCEPTANCE 2: worst relative deviation {worst:.2e} over 200 samples, runtime {elapsed:.2?} (budget 5 s)");
    assert!(elapsed.as_secs_f64() < 5.0);
}

// -------------------------------------------------------------------------
// 3. Jackknife identity.
// -------------------------------------------------------------------------
#[test]
fn criterion_03_jackknife_identity() {
    let fixture = SortedSample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let pv = pseudo_values(&fixture).unwrap();
    for (got, want) in pv.v().iter().zip([0.0, 0.5, -0.5, 0.0]) {
        assert!(
            (got - want).abs() < 1e-12,
            "fixture pseudo-values {:?}",
            pv.v()
        );
    }

    let spec = parse_spec("laplace(0,2)").unwrap();
    let mut stream = RandomStream::new(20_003, 0);
    let mut worst = 0.0f64;
    for trial in 0..120 {
        let n = 4 + (trial * 7) % 97;
        let s = SortedSample::new(spec.sample(&mut stream, n).unwrap()).unwrap();
        let pv = pseudo_values(&s).unwrap();
        let gap = (pv.mean() - delta_hat(&s)).abs();
        worst = worst.max(gap);
        assert!(gap < 1e-10, "trial {trial}, n={n}: gap {gap}");
    }
    println!("ACCEPTANCE 3: fixture exact, worst identity gap {worst:.2e} over 120 samples");
}

// -------------------------------------------------------------------------
// 4. Empirical-likelihood solver.
// -------------------------------------------------------------------------
#[test]
fn criterion_04_el_solver() {
    let sol = solve_lambda(&[-1.0, 2.0]).unwrap();
    assert!((sol.lambda - 0.25).abs() < 1e-10, "lambda {}", sol.lambda);

    for one_sided in [&[1.0, 2.0, 3.0][..], &[-0.5, -4.0][..], &[0.0, 3.0][..]] {
        assert!(
            matches!(solve_lambda(one_sided), Err(Error::HullViolation { .. })),
            "expected hull error for {one_sided:?}"
        );
    }

    let mut stream = RandomStream::new(20_004, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = 2 + (stream.uniform_open01() * 30.0) as usize;
        let mut v: Vec<f64> = (0..m)
            .map(|_| stream.uniform_open01() * 6.0 - 2.0)
            .collect();
        v[0] = -v[0].abs() - 1e-3;
        v[m - 1] = v[m - 1].abs() + 1e-3;
        let sol = solve_lambda(&v).unwrap();
        let mut total = 0.0;
        for &vi in &v {
            let p = 1.0 / (m as f64 * (1.0 + sol.lambda * vi));
            assert!(p > 0.0, "weight {p} <= 0");
            total += p;
        }
        worst = worst.max((total - 1.0).abs());
        assert!((total - 1.0).abs() < 1e-10, "weights sum {total}");
    }
    println!("ACCEPTANCE 4: lambda fixture exact, worst weight-sum deviation {worst:.2e} over 1000 solves");
}

// -------------------------------------------------------------------------
// 5. Wilks calibration: empirical size at n=200.
// -------------------------------------------------------------------------
#[test]
fn criterion_05_wilks_calibration() {
    let nulls = [
        "normal(0,1)",
        "laplace(0,1)",
        "logistic(0,1)",
        "mixnormal(0.5,-1,1,1,1)",
    ];
    let mut failures = Vec::new();
    for (idx, family) in nulls.iter().enumerate() {
        let spec = parse_spec(family).unwrap();
        let mut config = study_config(50_000 + idx as u64);
        config.families = vec![spec.clone()];
        config.sample_sizes = vec![200];
        config.methods = vec![Method::Jel, Method::Ajel, Method::Scr];
        // size tables calibrate SCR against the family under test
        config.calibration_null = spec;
        let table = run_study(&config).unwrap();
        assert!(table.failures.is_empty(), "{:?}", table.failures);
        for row in &table.rows {
            println!(
                "ACCEPTANCE 5: {family} n=200 {}: size {:.4} (se {:.4})",
                row.method, row.rejection_rate, row.mc_stderr
            );
            if !(0.04..=0.06).contains(&row.rejection_rate) {
                failures.push(format!(
                    "{family} {}: {:.4}",
                    row.method, row.rejection_rate
                ));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "ACCEPTANCE 5 FAIL: sizes outside [0.04,0.06]: {failures:?}"
    );
}

// -------------------------------------------------------------------------
// 6. Power against Fernandez-Steel alternatives.
// -------------------------------------------------------------------------
#[test]
fn criterion_06_power_fernandez_steel() {
    let mut config = study_config(60_000);
    config.methods = vec![Method::Jel];

    let theta1 = parse_spec("fs(normal,1)").unwrap();
    config.families = vec![theta1.clone()];
    let (p25, se25, _) = estimate_rejection_rate(&theta1, 25, Method::Jel, &config).unwrap();
    let (p100, se100, _) = estimate_rejection_rate(&theta1, 100, Method::Jel, &config).unwrap();

    let theta05 = parse_spec("fs(normal,0.5)").unwrap();
    config.families = vec![theta05.clone()];
    let (p05, se05, _) = estimate_rejection_rate(&theta05, 100, Method::Jel, &config).unwrap();

    println!("ACCEPTANCE 6: fs(normal,1) JEL power: n=25 {p25:.4} (se {se25:.4}, reference 0.820), n=100 {p100:.4} (se {se100:.4}, reference 1.000)");
    println!(
        "ACCEPTANCE 6: fs(normal,0.5) JEL power: n=100 {p05:.4} (se {se05:.4}, reference 0.984)"
    );

    // Reference powers correspond to substantially stronger alternatives
    // than the printed θ values generate; under the contracted two-branch
    // sampler (KS-validated against the density) the attainable powers are
    // ≈0.37, ≈0.93 and ≈0.68. Asserted as catalogued regardless.
    let mut failures = Vec::new();
    if p25 < 0.80 {
        failures.push(format!("fs(normal,1) n=25: {p25:.4} < 0.80"));
    }
    if p100 < 0.99 {
        failures.push(format!("fs(normal,1) n=100: {p100:.4} < 0.99"));
    }
    if !(0.95..=1.0).contains(&p05) {
        failures.push(format!("fs(normal,0.5) n=100: {p05:.4} outside [0.95,1]"));
    }
    assert!(failures.is_empty(), "ACCEPTANCE 6 FAIL: {failures:?}");
}

// -------------------------------------------------------------------------
// 7. Power against the Azzalini alternative.
// -------------------------------------------------------------------------
#[test]
fn criterion_07_power_azzalini() {
    let spec = parse_spec("azzalini(normal,0.5)").unwrap();
    let mut config = study_config(70_000);
    config.methods = vec![Method::Jel];
    config.families = vec![spec.clone()];
    let (p, se, _) = estimate_rejection_rate(&spec, 100, Method::Jel, &config).unwrap();
    println!("ACCEPTANCE 7: azzalini(normal,0.5) JEL power at n=100: {p:.4} (se {se:.4}, reference 0.979)");
    // The population departure of this alternative is Δ ≈ 0.001, about 8%
    // of one standard error of the statistic at n=100, so power near the
    // size is the attainable value for any Δ̂ₙ-based test.
    assert!(
        (0.93..=1.0).contains(&p),
        "ACCEPTANCE 7 FAIL: azzalini(normal,0.5) n=100 power {p:.4} outside [0.93,1]"
    );
}

// -------------------------------------------------------------------------
// 8. Contamination alternative property substitute.
// -------------------------------------------------------------------------
#[test]
fn criterion_08_contamination_property() {
    let spec = parse_spec("contam(normal,0.5,2)").unwrap();
    let mut config = study_config(80_000);
    config.methods = vec![Method::Jel];
    config.families = vec![spec.clone()];

    let sizes = [25usize, 50, 100, 200];
    let mut rates = Vec::new();
    for &n in &sizes {
        let (p, se, _) = estimate_rejection_rate(&spec, n, Method::Jel, &config).unwrap();
        println!("ACCEPTANCE 8: contam(normal,0.5,2) JEL at n={n}: {p:.4} (se {se:.4})");
        rates.push((p, se));
    }
    let mut failures = Vec::new();
    for w in rates.windows(2) {
        let ((lo, se_lo), (hi, se_hi)) = (w[0], w[1]);
        if hi <= lo - 2.0 * (se_lo + se_hi) {
            failures.push(format!("power dropped: {lo:.4} -> {hi:.4}"));
        }
    }
    // 0.5·Φ(x) + 0.5·Φ(x−2) is exactly symmetric about 1 (equal-weight
    // mixture of mirror components), so the rejection rate stays at the
    // size for every n and cannot clear three times the nominal level.
    if rates[2].0 <= 3.0 * config.alpha {
        failures.push(format!(
            "n=100 rate {:.4} does not exceed 3x the size {:.2}",
            rates[2].0,
            3.0 * config.alpha
        ));
    }
    assert!(failures.is_empty(), "ACCEPTANCE 8 FAIL: {failures:?}");
}

// -------------------------------------------------------------------------
// 9. Real-data fixture: all three tests reject.
// -------------------------------------------------------------------------
#[test]
fn criterion_09_repair_times_fixture() {
    let sample = SortedSample::new(REPAIR_TIMES.to_vec()).unwrap();

    let jel = jel_test(&sample, 0.05).unwrap();
    println!(
        "ACCEPTANCE 9: JEL statistic {:.4} (catalogued real-data value 51.785, diagnostic only), reject {}",
        jel.statistic, jel.reject
    );
    let ajel = ajel_test(&sample, 0.05).unwrap();
    println!(
        "ACCEPTANCE 9: AJEL statistic {:.4} (catalogued 19.3561, diagnostic only), reject {}",
        ajel.statistic, ajel.reject
    );
    let scr = scr_test(&sample, 10_000, 0.05, &RandomStream::new(90_000, 0)).unwrap();
    println!(
        "ACCEPTANCE 9: SCR statistic {:.4}, bounds [{:.4}, {:.4}], reject {}",
        scr.statistic,
        scr.critical_lower.unwrap(),
        scr.critical_upper.unwrap(),
        scr.reject
    );

    assert!(jel.reject, "JEL must reject the repair-times data");
    assert!(ajel.reject, "AJEL must reject the repair-times data");
    assert!(scr.reject, "SCR must reject the repair-times data");
}

// -------------------------------------------------------------------------
// 10. Invariances and determinism.
// -------------------------------------------------------------------------
#[test]
fn criterion_10_invariance_suite() {
    let spec = parse_spec("exp(1)").unwrap();

    // statistic invariances at 1e-12
    let mut stream = RandomStream::new(100_001, 0);
    for trial in 0..50 {
        let n = 5 + (trial * 11) % 60;
        let values = spec.sample(&mut stream, n).unwrap();
        let base = delta_hat(&SortedSample::new(values.clone()).unwrap());
        let shifted: Vec<f64> = values.iter().map(|x| x - 17.25).collect();
        let scaled: Vec<f64> = values.iter().map(|x| 3.5 * x).collect();
        let negated: Vec<f64> = values.iter().map(|x| -x).collect();
        assert!(
            (delta_hat(&SortedSample::new(shifted).unwrap()) - base).abs() < 1e-12,
            "shift invariance"
        );
        assert!(
            (delta_hat(&SortedSample::new(scaled).unwrap()) - 3.5 * base).abs() < 1e-12,
            "scale equivariance"
        );
        assert!(
            (delta_hat(&SortedSample::new(negated).unwrap()) + base).abs() < 1e-12,
            "antisymmetry"
        );
    }

    // JEL/AJEL affine invariance at 1e-8
    for trial in 0..10 {
        let s = sample_from(&spec, 100_002, trial, 40);
        let jel = jel_statistic(&s).unwrap().neg2_log_ratio;
        let ajel = ajel_statistic(&s).unwrap().neg2_log_ratio;
        for (a, b) in [(3.7, -10.0), (0.25, 5.0)] {
            let mapped: Vec<f64> = s.values().iter().map(|x| a * x + b).collect();
            let m = SortedSample::new(mapped).unwrap();
            assert!(
                (jel_statistic(&m).unwrap().neg2_log_ratio - jel).abs() < 1e-8,
                "JEL affine invariance"
            );
            assert!(
                (ajel_statistic(&m).unwrap().neg2_log_ratio - ajel).abs() < 1e-8,
                "AJEL affine invariance"
            );
        }
    }

    // determinism of seeded operations across runs and worker counts
    let mut config = study_config(100_003);
    config.families = vec![parse_spec("normal(0,1)").unwrap()];
    config.sample_sizes = vec![30];
    config.methods = vec![Method::Jel, Method::Scr, Method::Cm];
    config.reps = 400;
    config.scr_b = 2000;
    let reference = run_study(&config).unwrap();
    assert_eq!(reference, run_study(&config).unwrap(), "identical rerun");
    for workers in [1usize, 2, 4] {
        let pooled = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap()
            .install(|| run_study(&config))
            .unwrap();
        assert_eq!(
            reference, pooled,
            "schedule independence at {workers} workers"
        );
    }

    let a = spec.sample(&mut RandomStream::new(9, 9), 100).unwrap();
    let b = spec.sample(&mut RandomStream::new(9, 9), 100).unwrap();
    assert_eq!(a, b, "seeded sampling reproducibility");

    println!("ACCEPTANCE 10: invariances at 1e-12/1e-8 and determinism across 1/2/4 workers hold");
}

// -------------------------------------------------------------------------
// 11. Asymptotic-normality self-consistency under exp(1).
// -------------------------------------------------------------------------
#[test]
fn criterion_11_normality_self_consistency() {
    let spec = parse_spec("exp(1)").unwrap();
    let reps = 10_000u64;

    let moments = |n: usize, seed: u64| -> (f64, f64) {
        let stats: Vec<f64> = (0..reps)
            .map(|rep| {
                let s = sample_from(&spec, seed, rep, n);
                (n as f64).sqrt() * delta_hat(&s)
            })
            .collect();
        let mean = stats.iter().sum::<f64>() / reps as f64;
        let var = stats.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        let sd = var.sqrt();
        let skew = stats.iter().map(|x| ((x - mean) / sd).powi(3)).sum::<f64>() / reps as f64;
        (var, skew)
    };

    let (var100, _) = moments(100, 110_000);
    let (var400, skew400) = moments(400, 110_001);
    let ratio = var100 / var400;
    let var_k = asymptotic_variance(&spec, 1e-8).unwrap();

    println!(
        "ACCEPTANCE 11: Var(sqrt(n) stat): n=100 {var100:.5}, n=400 {var400:.5}, ratio {ratio:.4}"
    );
    println!(
        "ACCEPTANCE 11: quadrature Var(K) = {var_k:.5}; diagnostic ratios Var(K)/MC: {:.3} (n=100), {:.3} (n=400)",
        var_k / var100,
        var_k / var400
    );
    println!("ACCEPTANCE 11: skewness of standardized statistic at n=400: {skew400:.4}");

    assert!(
        (ratio - 1.0).abs() < 0.15,
        "ACCEPTANCE 11 FAIL: variance ratio {ratio:.4} outside 15%"
    );
    // The skewness of the statistic decays like ~3.7/√n and is ≈0.19 at
    // n=400 (it crosses 0.15 only near n≈650); asserted at the catalogued
    // threshold regardless.
    assert!(
        skew400.abs() < 0.15,
        "ACCEPTANCE 11 FAIL: skewness {skew400:.4} at n=400 exceeds 0.15"
    );
}
