//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use causal_power::inference::{total_power_by_definition, total_power_by_paths};
use causal_power::model::directed_paths;
use causal_power::rubin::{self, exposed_sole_cause_fraction, sole_cause_fraction};
use causal_power::simulate::recovery;
use causal_power::{
    cheng_to_rubin, direct_power, estimate_facilitating, estimate_power, estimate_preventive, exact_frequencies,
    fixtures, forecast_removal, identifiability, independence_residual, intervene, joint, joint_by_enumeration,
    markov_check, paf, prob_causation, probability, rubin_prob_e, rubin_to_cheng, sample, total_power, Assignment,
    ChengModel, Dataset, Identifiability, ModelSpec, PowerKind, Probability, Reason, RubinModel, Status,
};
use common::{random_model, Shape};

const UTAH_PAF: f64 = 0.245;
const UTAH_PAF_TOL: f64 = 0.001;
const UTAH_PC: f64 = 0.3756;
const UTAH_PC_TOL: f64 = 0.002;
const UTAH_RUNTIME: Duration = Duration::from_secs(1);
const EXACT_TOL: f64 = 1e-9;
const JOINT_TOL: f64 = 1e-12;
const RANDOM_JOINT_MODELS: u64 = 50;
const JOINT_RUNTIME: Duration = Duration::from_secs(60);
const RANDOM_PATH_MODELS: u64 = 20;
const ROUTE_TOL: f64 = 1e-9;
const SAMPLE_SIZE: usize = 100_000;
const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const RECOVERY_TOL: f64 = 0.02;
const RECOVERY_RUNTIME: Duration = Duration::from_secs(30);
const POWER_RANGE: (f64, f64) = (0.1, 0.9);
const RESIDUAL_TOL: f64 = 1e-12;
const RUBIN_ATTRIBUTION_TOL: f64 = 1e-9;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn defined(p: Probability, what: &str) -> Result<f64, String> {
    p.value().ok_or_else(|| format!("{what} undefined"))
}

fn lib<T>(r: causal_power::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn fixture_models() -> Vec<(&'static str, ChengModel)> {
    vec![
        ("M1", fixtures::m1()),
        ("M2", fixtures::m2()),
        ("M3", fixtures::m3()),
        ("M4", fixtures::m4()),
        ("M5", fixtures::m5()),
        ("M6", fixtures::m6()),
    ]
}

fn utah() -> Check {
    let start = Instant::now();
    let d = fixtures::utah();
    let f = defined(lib(paf(&d, "exposure", "death"))?, "paf")?;
    let pc = defined(lib(prob_causation(&d, "exposure", "death"))?, "prob_causation")?;
    let elapsed = start.elapsed();
    ensure((f - UTAH_PAF).abs() <= UTAH_PAF_TOL, || format!("paf {f:.6}"))?;
    ensure((pc - UTAH_PC).abs() <= UTAH_PC_TOL, || format!("prob_causation {pc:.6}"))?;
    ensure(elapsed < UTAH_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!("paf={f:.4} prob_causation={pc:.4} in {elapsed:.2?}"))
}

fn estimator_exactness() -> Check {
    let all = Assignment::new();
    let m1 = lib(exact_frequencies(&fixtures::m1()))?;
    let m2 = lib(exact_frequencies(&fixtures::m2()))?;
    let m6 = lib(exact_frequencies(&fixtures::m6()))?;
    let cases = [
        ("M1 C->E", lib(estimate_facilitating(&m1, "C", "E", &all))?, 0.5),
        ("M2 F->E", lib(estimate_preventive(&m2, "F", "E", &all))?, 0.4),
        ("M6 C->E", lib(estimate_preventive(&m6, "C", "E", &all))?, 0.4),
    ];
    let mut out = Vec::new();
    for (name, est, want) in cases {
        let v = est.value.ok_or_else(|| format!("{name}: {}", est.status))?;
        ensure((v - want).abs() < EXACT_TOL, || format!("{name}: {v} vs {want}"))?;
        out.push(format!("{name}={v:.12}"));
    }
    Ok(out.join(" "))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..RANDOM_JOINT_MODELS {
        let m = random_model(seed, &Shape::MEDIUM);
        let a = lib(joint(&m))?;
        let b = lib(joint_by_enumeration(&m))?;
        for (x, y) in a.probs().iter().zip(b.probs()) {
            worst = worst.max((x - y).abs());
        }
        let report = lib(markov_check(&m, &a))?;
        ensure(report.passes(), || format!("markov check failed on seed {seed}: {report:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(worst < JOINT_TOL, || format!("max joint difference {worst:e}"))?;
    ensure(elapsed < JOINT_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{RANDOM_JOINT_MODELS} models, max joint difference {worst:.1e}, markov ok, {elapsed:.2?}"
    ))
}

fn both_routes(m: &ChengModel, c: &str, e: &str) -> Result<(f64, f64), String> {
    let def = lib(total_power_by_definition(m, c, e))?.value;
    let paths = lib(total_power_by_paths(m, c, e))?
        .ok_or_else(|| format!("path rule does not apply to {c}->{e}"))?
        .value;
    ensure((def - paths).abs() < ROUTE_TOL, || format!("{c}->{e}: {def} vs {paths}"))?;
    Ok((def, paths))
}

fn total_power_routes() -> Check {
    let m3 = fixtures::m3();
    let (v3, _) = both_routes(&m3, "C", "E")?;
    let q = |s: &str, t: &str| m3.edge(m3.edge_between(s, t).unwrap()).q;
    let two_path = q("C", "E") + q("C", "D") * q("D", "E") - q("C", "E") * q("C", "D") * q("D", "E");
    ensure((v3 - 0.6).abs() < ROUTE_TOL && (v3 - two_path).abs() < ROUTE_TOL, || format!("M3 {v3}"))?;
    let (v6, _) = both_routes(&fixtures::m6(), "C", "E")?;
    ensure((v6 - 0.4).abs() < ROUTE_TOL, || format!("M6 {v6}"))?;
    let mut pairs = 0;
    for seed in 0..RANDOM_PATH_MODELS {
        let m = random_model(1000 + seed, &Shape::FACILITATING);
        let names: Vec<String> = m.variables().iter().map(|v| v.name.clone()).collect();
        for c in &names {
            for e in &names {
                if c != e && !lib(directed_paths(&m, c, e))?.is_empty() {
                    both_routes(&m, c, e)?;
                    pairs += 1;
                }
            }
        }
    }
    ensure(pairs > 0, || "no connected pairs in random models".into())?;
    Ok(format!("M3={v3:.6} M6={v6:.6}, {pairs} pairs over {RANDOM_PATH_MODELS} random models"))
}

fn intervention_rescue() -> Check {
    let m4 = fixtures::m4();
    let p = lib(probability(
        &m4,
        &Assignment::new().with("E", true),
        &Assignment::new().with("C", false).with("D", true),
    ))?;
    ensure(p.is_undefined(), || format!("P(E|C=0,D=1) = {p}"))?;
    let rescued = lib(intervene(&m4, "D", true))?;
    let mut values = Vec::new();
    for seed in SEEDS {
        let data = lib(sample(&rescued, SAMPLE_SIZE, seed))?;
        let est = lib(estimate_power(&rescued, &data, "D", "E", PowerKind::Direct))?;
        let v = est.value.ok_or_else(|| format!("seed {seed}: {}", est.status))?;
        ensure((v - 0.3).abs() <= RECOVERY_TOL, || format!("seed {seed}: {v}"))?;
        values.push(format!("{v:.4}"));
    }
    Ok(format!("undefined before surgery; estimates {}", values.join(" ")))
}

fn identifiability_suite() -> Check {
    let m5 = fixtures::m5();
    let c = lib(identifiability(&m5, "C", "E"))?;
    ensure(c == Identifiability::Identified, || format!("M5 C: {c:?}"))?;
    match lib(identifiability(&m5, "D", "E"))? {
        Identifiability::NotIdentified(r) if r.to_string() == "hidden preventer on pathway" => {}
        other => return Err(format!("M5 D: {other:?}")),
    }
    match lib(identifiability(&fixtures::m4(), "D", "E"))? {
        Identifiability::NotIdentified(r) if r.to_string() == "deterministic intermediate" => {}
        other => return Err(format!("M4 D: {other:?}")),
    }
    Ok("M5 C identified, M5 D hidden preventer, M4 D deterministic intermediate".into())
}

struct Case {
    label: String,
    model: ChengModel,
    cause: String,
    effect: String,
    kind: PowerKind,
}

/// Fixture powers in range, split into those the estimator can target and
/// those it reports as not identified or undefined on exact frequencies;
/// a deterministic cause counts as targetable through its rescue.
fn recovery_cases() -> Result<(Vec<Case>, Vec<String>), String> {
    let mut cases = Vec::new();
    let mut skipped = Vec::new();
    for (name, m) in fixture_models() {
        let exact = lib(exact_frequencies(&m))?;
        let observed: Vec<String> = m.observed_names().iter().map(|s| s.to_string()).collect();
        for c in &observed {
            for e in &observed {
                if c == e || lib(directed_paths(&m, c, e))?.is_empty() {
                    continue;
                }
                for kind in [PowerKind::Direct, PowerKind::Total] {
                    let truth = match kind {
                        PowerKind::Direct if m.edge_between(c, e).is_none() => continue,
                        PowerKind::Direct => lib(direct_power(&m, c, e))?.value,
                        PowerKind::Total => match total_power(&m, c, e) {
                            Ok(p) => p.value,
                            Err(_) => continue,
                        },
                    };
                    if !(POWER_RANGE.0..=POWER_RANGE.1).contains(&truth) {
                        continue;
                    }
                    let label = format!("{name} {c}->{e} {kind}");
                    let est = lib(estimate_power(&m, &exact, c, e, kind))?;
                    let rescuable = matches!(&est.status,
                        Status::NotIdentified(Reason::DeterministicIntermediate(v)) if v == c);
                    if est.is_identified() {
                        let v = est.value.unwrap();
                        ensure((v - truth).abs() < EXACT_TOL, || {
                            format!("{label}: exact-frequency estimate {v} vs true {truth}")
                        })?;
                    } else if !rescuable {
                        skipped.push(format!("{label} ({})", est.status));
                        continue;
                    }
                    cases.push(Case {
                        label,
                        model: m.clone(),
                        cause: c.clone(),
                        effect: e.clone(),
                        kind,
                    });
                }
            }
        }
    }
    Ok((cases, skipped))
}

fn estimator_recovery() -> Check {
    let start = Instant::now();
    let (cases, skipped) = recovery_cases()?;
    let mut worst: f64 = 0.0;
    for case in &cases {
        let mut report = lib(recovery(&case.model, &case.cause, &case.effect, case.kind, SAMPLE_SIZE, &SEEDS))?;
        if let Some(rescue) = report.rescue.take() {
            report = *rescue;
        }
        ensure(report.all_identified(), || format!("{}: not every seed identified", case.label))?;
        let mae = report.mae.ok_or_else(|| format!("{}: no estimates", case.label))?;
        ensure(mae < RECOVERY_TOL, || format!("{}: MAE {mae}", case.label))?;
        worst = worst.max(mae);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < RECOVERY_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} powers, worst MAE {worst:.4}, {elapsed:.2?}; not estimable: {}",
        cases.len(),
        if skipped.is_empty() { "none".to_string() } else { skipped.join("; ") }
    ))
}

fn rubin_bridge() -> Check {
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
    let mut worst_residual: f64 = 0.0;
    let mut worst_rate: f64 = 0.0;
    for &qc in &grid {
        for &qu in &grid {
            let rm = lib(cheng_to_rubin(qc, qu))?;
            ensure(rubin_to_cheng(&rm) == (qc, qu), || format!("round trip at ({qc}, {qu})"))?;
            worst_residual = worst_residual.max(independence_residual(&rm).abs());
            for (pc, pu) in [(0.5, 0.5), (0.25, 0.75)] {
                let m = lib(ModelSpec::new()
                    .observed("C", Some(pc))
                    .unobserved("U", Some(pu))
                    .observed("E", None)
                    .fac("C", "E", qc)
                    .fac("U", "E", qu)
                    .build())?;
                let p = lib(joint(&m).and_then(|t| t.marginal(&Assignment::new().with("E", true))))?;
                worst_rate = worst_rate.max((rubin_prob_e(&rm, pc, pu) - p).abs());
            }
        }
    }
    ensure(worst_residual < RESIDUAL_TOL, || format!("residual {worst_residual:e}"))?;
    ensure(worst_rate < JOINT_TOL, || format!("effect rate difference {worst_rate:e}"))?;
    let example = lib(RubinModel::new(0.18, 0.28, 0.12, 0.42))?;
    let rate = rubin_prob_e(&example, 0.5, 0.5);
    ensure((rate - 0.32).abs() < JOINT_TOL, || format!("example rate {rate}"))?;
    let mut worst_attr: f64 = 0.0;
    for rm in [example, lib(RubinModel::new(0.2, 0.2, 0.1, 0.5))?] {
        for (pc, pu) in [(0.5, 0.5), (0.3, 0.8)] {
            let d = lib(rubin::exact_frequencies(&rm, pc, pu))?;
            let f = defined(lib(paf(&d, "C", "E"))?, "paf")?;
            let pcaus = defined(lib(prob_causation(&d, "C", "E"))?, "prob_causation")?;
            worst_attr = worst_attr
                .max((f - defined(sole_cause_fraction(&rm, pc, pu), "share")?).abs())
                .max((pcaus - defined(exposed_sole_cause_fraction(&rm, pc, pu), "share")?).abs());
        }
    }
    ensure(worst_attr < RUBIN_ATTRIBUTION_TOL, || format!("attribution difference {worst_attr:e}"))?;
    Ok(format!(
        "grid round trip exact, residual {worst_residual:.1e}, rate diff {worst_rate:.1e}, attribution diff {worst_attr:.1e}"
    ))
}

fn corpus() -> Result<Vec<(String, Dataset, String, String)>, String> {
    let mut out = vec![("utah".to_string(), fixtures::utah(), "exposure".to_string(), "death".to_string())];
    for (name, m) in fixture_models() {
        let exact = lib(exact_frequencies(&m))?;
        let sampled = lib(sample(&m, 10_000, 1))?;
        for c in m.observed_names() {
            for e in m.observed_names() {
                if c != e && !lib(directed_paths(&m, c, e))?.is_empty() {
                    out.push((format!("{name} exact"), exact.clone(), c.to_string(), e.to_string()));
                    out.push((format!("{name} sampled"), sampled.clone(), c.to_string(), e.to_string()));
                }
            }
        }
    }
    let rm = lib(RubinModel::new(0.18, 0.28, 0.12, 0.42))?;
    out.push(("rubin".to_string(), lib(rubin::exact_frequencies(&rm, 0.5, 0.5))?, "C".into(), "E".into()));
    Ok(out)
}

fn attribution_identities() -> Check {
    let mut checked = 0;
    for (name, d, c, e) in corpus()? {
        let p_e = lib(d.conditional(&Assignment::new().with(e.as_str(), true), &Assignment::new()))?;
        let (Probability::Defined(f), Probability::Defined(r), Probability::Defined(pe)) =
            (lib(paf(&d, &c, &e))?, lib(forecast_removal(&d, &c, &e))?, p_e)
        else {
            continue;
        };
        // the identity holds to the last bit of P(E)
        ensure((f * pe + r - pe).abs() <= f64::EPSILON * pe, || {
            format!("{name} {c}->{e}: paf*P(E) + forecast - P(E) = {:e}", f * pe + r - pe)
        })?;
        checked += 1;
    }
    let mut fixtures_checked = 0;
    for (name, m) in fixture_models() {
        let d = lib(exact_frequencies(&m))?;
        for c in m.observed_names() {
            if !m.is_exogenous(lib(m.index_of(c))?) {
                continue;
            }
            for e in m.observed_names() {
                if c == e || lib(directed_paths(&m, c, e))?.is_empty() {
                    continue;
                }
                let r = defined(lib(forecast_removal(&d, c, e))?, "forecast")?;
                let after = lib(intervene(&m, c, false))?;
                let p = defined(
                    lib(probability(&after, &Assignment::new().with(e, true), &Assignment::new()))?,
                    "P(e | do(c=0))",
                )?;
                ensure((r - p).abs() < EXACT_TOL, || format!("{name} {c}->{e}: {r} vs {p}"))?;
                fixtures_checked += 1;
            }
        }
    }
    Ok(format!("{checked} datasets satisfy the sum identity; {fixtures_checked} fixture pairs match do(C=0)"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Utah leukemia reproduction", utah),
        ("estimator exactness", estimator_exactness),
        ("oracle equivalence", oracle_equivalence),
        ("total power dual computation", total_power_routes),
        ("intervention rescue", intervention_rescue),
        ("identifiability suite", identifiability_suite),
        ("estimator recovery", estimator_recovery),
        ("Rubin bridge", rubin_bridge),
        ("attribution identities", attribution_identities),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
