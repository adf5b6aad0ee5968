use super::multihom::{check_alg, check_kusraev_bound, check_kusraev_two_variable, check_sandwich};
use super::*;
use crate::lattice::make_m3;
use crate::maps::all_table_maps;
use crate::Value;

fn c(n: usize) -> Arc<FiniteLattice> {
    Arc::new(make_chain(n).unwrap())
}

fn quick() -> VerifyConfig {
    VerifyConfig {
        samples: 2000,
        ..VerifyConfig::default()
    }
}

#[test]
fn prop_medians_pass_and_refuse_m3() {
    let run = verify_prop_medians(&make_chain(4).unwrap(), 3).unwrap();
    assert_eq!(run.verdict, Verdict::Pass);
    assert_eq!(run.counts["tuples"], 4 + 16 + 64);
    // n * n! instances per n-tuple
    assert_eq!(run.instances, 4 + 16 * 4 + 64 * 18);
    assert!(verify_prop_medians(&make_powerset(&["a", "b"]).unwrap(), 3).unwrap().passed());
    assert!(matches!(verify_prop_medians(&make_m3(), 3), Err(Error::Precondition(_))));
}

#[test]
fn lemma_swap_and_extend() {
    let d = make_divisor(36).unwrap();
    assert!(verify_lemma_swap(&d, 3).unwrap().passed());
    assert!(verify_lemma_swap(&make_chain(3).unwrap(), 4).unwrap().passed());
    let run = verify_lemma_extend(&make_chain(2).unwrap(), 4).unwrap();
    assert!(run.passed());
    // n=3: one skipped k per tuple; n=4: two
    assert_eq!(run.counts["skipped_k1"], 8 + 16 * 2);
}

#[test]
fn duality_negative_control() {
    let m3 = make_m3();
    assert!(matches!(verify_median_duality(&m3, 3, Hypothesis::Checked), Err(Error::Precondition(_))));
    let run = verify_median_duality(&m3, 3, Hypothesis::Unchecked).unwrap();
    assert_eq!(run.verdict, Verdict::Fail);
    let w = &run.witnesses[0];
    let (lhs, rhs) = replay_median(&m3, w).unwrap();
    assert_eq!((Value::from(lhs), Value::from(rhs)), (w.lhs, w.rhs));
    assert_ne!(lhs, rhs);
}

#[test]
fn fast_path_sampled() {
    let p3 = make_powerset(&["a", "b", "c"]).unwrap();
    let sample = FastPathSample {
        n: 100,
        count: 500,
        seed: 1,
    };
    let run = verify_fast_path(&p3, 3, Some(sample)).unwrap();
    assert_eq!(run.verdict, Verdict::SampledPass);
    assert_eq!(run.counts["sampled_tuples"], 500);
}

#[test]
fn charsoftoi_on_all_c2_tables() {
    let run = verify_charsoftoi(&Target::finite(&c(2), &c(2), 2), &MapSource::AllTables, &SamplePlan::default()).unwrap();
    assert!(run.passed());
    assert_eq!(run.counts["maps"], 16);
    // on a chain TOI only forces T(1,0) = T(0,1): the 8 symmetric tables
    assert_eq!(run.counts["toi"], 8);
    assert_eq!(run.counts["not_toi"], 8);
    assert!(!run.counts.contains_key("disagreements"));
}

#[test]
fn multihom_toi_counts() {
    let plan = SamplePlan::default();
    let run = verify_multihom_toi(&Target::finite(&c(2), &c(2), 2), &MapSource::Enumerated(HomFilter::All), &plan).unwrap();
    assert!(run.passed());
    assert_eq!((run.counts["homs"], run.counts["symmetric"], run.counts["toi"]), (6, 4, 4));
    assert_eq!(run.counts["table_space"], 16);

    let run = verify_multihom_toi(&Target::finite(&c(3), &c(3), 2), &MapSource::Enumerated(HomFilter::All), &plan).unwrap();
    assert!(run.passed());
    assert_eq!(run.counts["homs"], 175);
    assert_eq!(run.counts["symmetric"], run.counts["toi"]);
}

#[test]
fn weighted_geomean_is_consistent_with_the_theorem() {
    let b = weighted_geomean_example();
    let target = Target {
        domain: b.domain().clone(),
        codomain: b.codomain().clone(),
        arity: 2,
    };
    let plan = quick().plan();
    let run = verify_multihom_toi(&target, &MapSource::Given(vec![b.clone()]), &plan).unwrap();
    assert_eq!(run.verdict, Verdict::SampledPass);
    assert_eq!(run.counts["homs"], 1);
    assert!(!run.counts.contains_key("symmetric"));
    assert!(!run.counts.contains_key("toi"));

    let diags = verify_diags(&target, &MapSource::Given(vec![b]), &plan).unwrap();
    assert_eq!(diags.counts["nonsymmetric_with_hom_diagonal"], 1);
}

#[test]
fn default_matrices_pass() {
    let cfg = quick();
    for id in [TheoremId::Sandwich, TheoremId::Kusraev, TheoremId::Alg, TheoremId::Diags] {
        for run in verify_default(id, &cfg).unwrap() {
            assert!(run.passed(), "{run}");
        }
    }
}

#[test]
fn kusraev_counts_all_three_forms() {
    let run = verify_kusraev(&Target::finite(&c(2), &c(2), 3), &MapSource::Enumerated(HomFilter::SymmetricOnly), &SamplePlan::default()).unwrap();
    assert!(run.passed());
    let maps = run.counts["maps"];
    assert!(maps > 0);
    for key in ["diagonal_hom", "bound", "two_variable"] {
        assert_eq!(run.counts[key], maps, "{key}");
    }
}

#[test]
fn sandwich_on_median_builtin() {
    let run = verify_sandwich(&Target::finite(&c(3), &c(3), 3), &MapSource::Builtins, &SamplePlan::default()).unwrap();
    assert!(run.passed());
    // medians and constants are symmetric homs, projections are not symmetric
    assert_eq!(run.counts["symmetric"], 5);
}

#[test]
fn alg_collapses_when_x_equals_y() {
    let l = c(3);
    let m = MultiMap::median(Domain::Finite(l), 3, 2).unwrap();
    for e in 0..3 {
        let x = Value::Elem(e);
        let (lhs, rhs) = alg_instance(&m, x, x, 0, 1, 2).unwrap();
        assert_eq!((lhs, rhs), (x, x));
    }
    assert!(matches!(alg_instance(&m, Value::Elem(0), Value::Elem(0), 1, 1, 2), Err(Error::Index(_))));
}

#[test]
fn theorem_witnesses_replay_on_non_homs() {
    // xor on C2 is symmetric but not a homomorphism
    let l = c(2);
    let cod = Codomain::Lattice(l.clone());
    let xor = MultiMap::table(l.clone(), cod.clone(), 2, vec![0, 1, 1, 0]).unwrap();
    let plan = SamplePlan::default();
    let mut seen = 0;
    for r in [
        check_sandwich(&xor, &plan).unwrap(),
        check_kusraev_bound(&xor, &plan).unwrap(),
        check_kusraev_two_variable(&xor, &plan).unwrap(),
    ] {
        let w = r.witness.expect("xor breaks the bounds");
        assert_eq!(replay_map(&xor, &w).unwrap(), (w.lhs, w.rhs));
        seen += 1;
    }
    assert_eq!(seen, 3);

    let mut failures = 0;
    for t in all_table_maps(&l, &cod, 3).unwrap() {
        if let Some(w) = check_alg(&t, &plan).unwrap().witness {
            assert_eq!(replay_map(&t, &w).unwrap(), (w.lhs, w.rhs));
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn median_witness_replay_rejects_bad_params() {
    let c3 = make_chain(3).unwrap();
    let run = verify_median_duality(&make_m3(), 3, Hypothesis::Unchecked).unwrap();
    let mut w = run.witnesses[0].clone();
    w.params.insert("k".into(), 9);
    assert!(replay_median(&make_m3(), &w).is_err());
    w.inputs = vec![vec![Value::Elem(7)]];
    assert!(replay_median(&c3, &w).is_err());
}

#[test]
fn runs_are_deterministic_across_pool_sizes() {
    let cfg = quick();
    let run_in = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let mut runs = verify_default(TheoremId::Charsoftoi, &cfg).unwrap();
                runs.extend(verify_median_duality(&make_m3(), 3, Hypothesis::Unchecked));
                serde_json::to_string(&runs).unwrap()
            })
    };
    assert_eq!(run_in(1), run_in(8));
}

#[test]
fn theorem_ids_round_trip() {
    for id in TheoremId::ALL {
        assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
        assert_eq!(serde_json::to_value(id).unwrap(), id.name());
    }
    assert!("everything".parse::<TheoremId>().is_err());
}
