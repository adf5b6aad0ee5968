//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use latmed::lattice::{make_chain, make_divisor, make_m3, make_n5, make_powerset};
use latmed::maps::{
    all_table_maps, check_diagonal_identities, is_n_homomorphism, is_symmetric, HomFilter,
};
use latmed::median::{median_k_direct, median_k_dual, median_k_fast};
use latmed::theorems::{
    default_median_matrix, verify_charsoftoi, verify_diags, verify_fast_path, verify_kusraev,
    verify_lemma_extend, verify_lemma_swap, verify_median_duality, verify_multihom_toi,
    verify_prop_medians, weighted_geomean_example, FastPathSample, Hypothesis, MapSource, Target,
    VerificationRun,
};
use latmed::toi::{check_toi_cond3, cross_check};
use latmed::{Codomain, Element, Error, FiniteLattice, Lattice, SamplePlan, Value, Verdict};

const N_MAX: usize = 4;
const DUALITY_BUDGET: Duration = Duration::from_secs(60);
const FAST_MEDIAN_BUDGET: Duration = Duration::from_secs(1);
const REAL_TOL: f64 = 1e-9;
const GEOMEAN_SAMPLES: usize = 100_000;
const FAST_SAMPLE_COUNT: usize = 10_000;
const C3_BIHOMS: u64 = 175;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn all_pass(runs: &[VerificationRun]) -> Result<u64, String> {
    let mut instances = 0;
    for r in runs {
        if !r.passed() {
            return Err(format!("{r}"));
        }
        instances += r.instances;
    }
    Ok(instances)
}

fn matrix() -> Vec<Arc<FiniteLattice>> {
    default_median_matrix().expect("default matrix builds")
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
        .install(f)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let runs = single_threaded(|| {
        matrix()
            .iter()
            .map(|l| verify_median_duality(l, N_MAX, Hypothesis::Checked))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(e)?;
    let elapsed = start.elapsed();
    let n = all_pass(&runs)?;
    ensure(elapsed < DUALITY_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("{n} instances, 0 violations, {elapsed:.2?} single-threaded"))
}

fn criterion_2() -> Outcome {
    let runs = matrix()
        .iter()
        .map(|l| verify_prop_medians(l, N_MAX))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let n = all_pass(&runs)?;
    Ok(format!("{n} instances, 0 violations"))
}

fn criterion_3() -> Outcome {
    let mut runs = Vec::new();
    for l in matrix() {
        runs.push(verify_lemma_swap(&l, N_MAX).map_err(e)?);
        runs.push(verify_lemma_extend(&l, N_MAX).map_err(e)?);
    }
    let n = all_pass(&runs)?;

    let d = make_divisor(36).map_err(e)?;
    let el = |s: &str| d.parse_element(s).map_err(e);
    let x = [el("4")?, el("6")?, el("9")?];
    let swapped = [d.meet(x[0], x[1]), d.join(x[0], x[1]), x[2]];
    let lhs = median_k_direct(&d, &x, 2).map_err(e)?;
    let rhs = median_k_direct(&d, &swapped, 2).map_err(e)?;
    ensure(
        d.label(lhs) == "6" && d.label(rhs) == "6",
        format!("M_2(4,6,9) = {}, swapped side = {}", d.label(lhs), d.label(rhs)),
    )?;
    Ok(format!("{n} instances, 0 violations; divisor(36) M_2(4,6,9) = 6 on both sides"))
}

fn criterion_4() -> Outcome {
    let mut runs = Vec::new();
    for l in matrix() {
        runs.push(verify_fast_path(&l, N_MAX, None).map_err(e)?);
    }
    let p3 = make_powerset(&["a", "b", "c"]).map_err(e)?;
    let sample = FastPathSample {
        n: 100,
        count: FAST_SAMPLE_COUNT,
        seed: 0,
    };
    let sampled = verify_fast_path(&p3, 0, Some(sample)).map_err(e)?;
    ensure(
        sampled.counts.get("sampled_tuples") == Some(&(FAST_SAMPLE_COUNT as u64)),
        "sample size differs",
    )?;
    runs.push(sampled);
    let n = all_pass(&runs)?;

    let ground: Vec<String> = (0..16).map(|i| format!("g{i}")).collect();
    let p16 = make_powerset(&ground).map_err(e)?;
    let xs: Vec<Element> = (0..1000u32).map(|i| Element(i.wrapping_mul(2_654_435_761) >> 16)).collect();
    let start = Instant::now();
    let m = median_k_fast(&p16, &xs, 500).map_err(e)?;
    let elapsed = start.elapsed();
    ensure(elapsed < FAST_MEDIAN_BUDGET, format!("M_500 took {elapsed:?}"))?;
    // bit j of M_500 is set iff at least 501 of the 1000 inputs have it
    for bit in 0..16 {
        let ones = xs.iter().filter(|x| x.0 >> bit & 1 == 1).count();
        ensure((m.0 >> bit & 1 == 1) == (ones >= 501), format!("bit {bit} of M_500 is wrong"))?;
    }
    let refused = median_k_direct(&p16, &xs[..26], 13);
    ensure(matches!(refused, Err(Error::Capacity(_))), format!("direct n=26 gave {refused:?}"))?;
    ensure(median_k_dual(&p16, &xs[..26], 13).is_err(), "dual n=26 not refused")?;
    Ok(format!(
        "{n} instances agree; powerset(16) n=1000 M_500 in {elapsed:.2?}; direct refused at n=26"
    ))
}

fn criterion_5() -> Outcome {
    let c2 = Arc::new(make_chain(2).map_err(e)?);
    let c3 = Arc::new(make_chain(3).map_err(e)?);
    let plan = SamplePlan::default();
    let cod = Codomain::Lattice(c2.clone());
    let mut toi = BTreeSet::new();
    for m in all_table_maps(&c2, &cod, 2).map_err(e)? {
        let cc = cross_check(&m, &plan).map_err(e)?;
        ensure(cc.agree(), format!("conditions disagree on {m}"))?;
        if cc.is_toi() {
            toi.insert(m.table_values().unwrap().to_vec());
        }
    }
    let random = [
        verify_charsoftoi(
            &Target::finite(&c3, &c3, 2),
            &MapSource::RandomTables { count: 500, seed: 0 },
            &plan,
        )
        .map_err(e)?,
        verify_charsoftoi(
            &Target::finite(&c2, &c2, 3),
            &MapSource::RandomTables { count: 200, seed: 0 },
            &plan,
        )
        .map_err(e)?,
    ];
    all_pass(&random)?;
    let expected: BTreeSet<Vec<u32>> = [vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![0, 0, 0, 1], vec![0, 1, 1, 1]]
        .into_iter()
        .collect();
    ensure(
        toi == expected,
        format!(
            "the four conditions agree on all 16 tables and on the 700 random tables, but {} C2^2->C2 tables are TOI, not 4: {:?}",
            toi.len(),
            toi
        ),
    )?;
    Ok("16 tables agree, exactly {const0, const1, meet, join} are TOI; 700 random tables agree".into())
}

fn criterion_6() -> Outcome {
    let c2 = Arc::new(make_chain(2).map_err(e)?);
    let c3 = Arc::new(make_chain(3).map_err(e)?);
    let plan = SamplePlan::default();
    let all = MapSource::Enumerated(HomFilter::All);
    let r2 = verify_multihom_toi(&Target::finite(&c2, &c2, 2), &all, &plan).map_err(e)?;
    let r3 = verify_multihom_toi(&Target::finite(&c3, &c3, 2), &all, &plan).map_err(e)?;
    all_pass(&[r2.clone(), r3.clone()])?;
    let get = |r: &VerificationRun, k: &str| r.counts.get(k).copied().unwrap_or(0);
    ensure(get(&r2, "homs") == 6, format!("C2 homs = {}", get(&r2, "homs")))?;
    ensure(get(&r2, "symmetric") == 4, format!("C2 symmetric = {}", get(&r2, "symmetric")))?;
    ensure(get(&r2, "toi") == 4, format!("C2 toi = {}", get(&r2, "toi")))?;
    ensure(get(&r3, "homs") == C3_BIHOMS, format!("C3 homs = {}", get(&r3, "homs")))?;
    ensure(get(&r3, "symmetric") == get(&r3, "toi"), "C3 TOI and symmetric counts differ")?;
    Ok(format!(
        "C2: 6 bi-homs, 4 symmetric = 4 TOI; C3: {C3_BIHOMS} bi-homs, {} symmetric = TOI",
        get(&r3, "symmetric")
    ))
}

fn criterion_7() -> Outcome {
    let c2 = Arc::new(make_chain(2).map_err(e)?);
    let c3 = Arc::new(make_chain(3).map_err(e)?);
    let plan = SamplePlan::default();
    let sym = MapSource::Enumerated(HomFilter::SymmetricOnly);
    let mut runs = Vec::new();
    for t in [
        Target::finite(&c2, &c2, 2),
        Target::finite(&c3, &c3, 2),
        Target::finite(&c2, &c2, 3),
    ] {
        runs.push(verify_diags(&t, &sym, &plan).map_err(e)?);
        runs.push(verify_kusraev(&t, &sym, &plan).map_err(e)?);
    }
    let n = all_pass(&runs)?;
    let maps: u64 = runs.iter().step_by(2).map(|r| r.counts.get("maps").copied().unwrap_or(0)).sum();
    Ok(format!("{maps} symmetric n-homs, {n} instances, 0 violations"))
}

fn criterion_8() -> Outcome {
    let b = weighted_geomean_example();
    let eval = |x: f64, y: f64| -> Result<f64, String> {
        b.eval(&[Value::Real(x), Value::Real(y)])
            .map_err(e)?
            .as_real()
            .ok_or_else(|| "non-real value".to_string())
    };
    let (b18, b81) = (eval(1.0, 8.0)?, eval(8.0, 1.0)?);
    ensure((b18 - 4.0).abs() <= REAL_TOL, format!("b(1,8) = {b18}"))?;
    ensure((b81 - 2.0).abs() <= REAL_TOL, format!("b(8,1) = {b81}"))?;

    let plan = SamplePlan::with_seed(0).samples(GEOMEAN_SAMPLES).probe(vec![1.0, 8.0]);
    let sym = is_symmetric(&b, &plan).map_err(e)?;
    let w = sym.witness.as_ref().ok_or("is_symmetric passed")?;
    ensure(
        w.inputs[0] == [Value::Real(1.0), Value::Real(8.0)],
        format!("symmetry witness is {w}"),
    )?;
    let hom = is_n_homomorphism(&b, &plan).map_err(e)?;
    ensure(hom.verdict == Verdict::SampledPass, format!("bi-hom laws: {hom}"))?;
    let diag = check_diagonal_identities(&b, &plan).map_err(e)?;
    ensure(diag.verdict == Verdict::SampledPass, format!("diagonal identities: {diag}"))?;
    let c3 = check_toi_cond3(&b, &plan).map_err(e)?;
    ensure(!c3.passed(), "check_toi_cond3 passed")?;
    Ok(format!(
        "b(1,8) = {b18:.9}, b(8,1) = {b81:.9}; symmetry witness (1,8); hom and diagonal laws pass on {GEOMEAN_SAMPLES} samples; cond3 fails"
    ))
}

fn criterion_9() -> Outcome {
    for l in [make_m3(), make_n5()] {
        let r = l.check_distributive().map_err(e)?;
        let w = r.witness.ok_or_else(|| format!("{} passed distributivity", l.name()))?;
        ensure(w.inputs[0].len() == 3, "witness is not a triple")?;
    }
    let run = verify_median_duality(&make_m3(), 3, Hypothesis::Unchecked).map_err(e)?;
    ensure(!run.passed() && !run.witnesses.is_empty(), "duality held on M3")?;
    Ok(format!("M3 and N5 fail with triples; M3 duality witness {}", run.witnesses[0]))
}

fn verify_all_json(parallelism: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_latmed"))
        .args(["verify", "all", "--seed", "0", "--parallelism", parallelism, "--format", "json"])
        .output()
        .map_err(|err| err.to_string())?;
    ensure(out.status.code() == Some(0), format!("exit status {:?}", out.status.code()))?;
    String::from_utf8(out.stdout).map_err(|err| err.to_string())
}

fn criterion_10() -> Outcome {
    let one = verify_all_json("1")?;
    let eight = verify_all_json("8")?;
    ensure(one.lines().count() == 1, "report is not a single line")?;
    ensure(one == eight, "reports differ between parallelism 1 and 8")?;
    let v: serde_json::Value = serde_json::from_str(&one).map_err(|err| err.to_string())?;
    ensure(v["verdict"] != "fail", "verify all failed")?;
    Ok(format!("identical {}-byte reports", one.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("median duality", criterion_1),
        ("median properties", criterion_2),
        ("swap and extension lemmas", criterion_3),
        ("fast path", criterion_4),
        ("TOI characterisations", criterion_5),
        ("TOI of multi-homomorphisms", criterion_6),
        ("diagonals and Kusraev forms", criterion_7),
        ("weighted geometric mean", criterion_8),
        ("non-distributive controls", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
