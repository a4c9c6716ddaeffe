use graph_sampler::{exact_distribution, l1_distance, GadgetSpec};
use pauli_core::NoiseSpec;
use pipeline::*;
use proptest::prelude::*;

fn exact_small(n: usize, k: usize) -> PipelineConfig {
    PipelineConfig::new(Mode::ExactSmall, n, k)
}

fn error_model(n: usize, k: usize, p_f: f64, eps_out: f64) -> PipelineConfig {
    PipelineConfig { p_f: Some(p_f), eps_out, ..PipelineConfig::new(Mode::ErrorModel, n, k) }
}

fn readout(p: f64) -> Option<NoiseSpec> {
    Some(NoiseSpec { p_prep: 0.0, p_layer: Vec::new(), p_out: p })
}

#[test]
fn assembled_pattern_matches_the_exact_distribution() {
    let gb = GadgetSpec::default_gb();
    for (n, k, choice) in [(1, 2, GadgetChoice::Gb), (1, 3, GadgetChoice::Gb), (2, 2, GadgetChoice::Gb), (2, 3, GadgetChoice::Gb), (1, 2, GadgetChoice::GbPrime)] {
        let spec = pipeline_graph(n, k, &gb, choice).unwrap();
        let ideal: Vec<_> = spec.vertices().iter().map(|v| msd::magic_state(v.role.angle().unwrap_or(0.0))).collect();
        let a = assembled_distribution(&spec, &ideal, 20).unwrap();
        let b = exact_distribution(&spec).unwrap();
        assert!(l1_distance(&a, &b).unwrap() < 1e-12, "{n} {k} {choice:?}");
    }
}

#[test]
fn single_wire_keeps_the_tile_magic_vertices() {
    let spec = pipeline_graph(1, 2, &GadgetSpec::default_gb(), GadgetChoice::Gb).unwrap();
    assert_eq!(spec.num_vertices(), 3);
    assert_eq!(magic_vertices(&spec), vec![1]);
    assert_eq!(y_vertices(&spec), vec![0]);
    let prime = pipeline_graph(1, 2, &GadgetSpec::default_gb(), GadgetChoice::GbPrime).unwrap();
    assert!(y_vertices(&prime).is_empty());
    assert_eq!(magic_vertices(&prime).len(), 3);
}

#[test]
fn noiseless_exact_small_reproduces_the_distribution() {
    for distance in [1, 3] {
        let cfg = PipelineConfig { distance, seed: 11, ..exact_small(1, 2) };
        let shots = 40_000;
        let r = run_exact_small_batch(&cfg, shots).unwrap();
        assert_eq!(r.aborted, 0);
        assert_eq!(r.completed, shots);
        let outcomes = r.exact.probabilities().len() as f64;
        let coarse = 4.0 * (outcomes / shots as f64).sqrt();
        assert!(r.l1_decoded <= r.envelope && r.l1_decoded <= coarse, "d={distance}: {} vs {}", r.l1_decoded, r.envelope);
        assert_eq!(r.l1_decoded, r.l1_raw);
        assert!(r.records.iter().all(|rec| rec.tallies_consistent() && rec.routing.iter().all(|m| m.min_fidelity > 1.0 - 1e-9)));
    }
}

#[test]
fn one_run_has_one_feedback_point_in_4d_and_two_in_3d() {
    let four = run_exact_small(&PipelineConfig { eps_t: 0.01, seed: 3, ..exact_small(1, 2) }).unwrap();
    assert_eq!(four.feedback.len(), 1);
    assert_eq!(four.feedback[0].after, "t distillation");
    let three_cfg = PipelineConfig {
        architecture: Architecture::ThreeD,
        gadget: GadgetChoice::GbPrime,
        eps_t: 0.01,
        eps_y: 0.01,
        seed: 3,
        ..exact_small(1, 2)
    };
    let r = run_exact_small_batch(&three_cfg, 200).unwrap();
    assert_eq!(interaction_audit(&r.records).unwrap(), 2);
    assert_eq!(r.records[0].feedback.iter().map(|f| f.after.as_str()).collect::<Vec<_>>(), ["y distillation", "t distillation"]);
    let direct = run_exact_small_batch(&PipelineConfig { distill: false, eps_t: 0.05, ..exact_small(1, 2) }, 200).unwrap();
    assert_eq!(interaction_audit(&direct.records).unwrap(), 0);
    let four_batch = run_exact_small_batch(&PipelineConfig { eps_t: 0.05, ..exact_small(1, 2) }, 200).unwrap();
    assert_eq!(four_batch.feedback_layers, Some(1));
}

#[test]
fn distilled_inputs_beat_raw_inputs() {
    let shots = 100_000;
    let base = PipelineConfig { eps_t: 0.05, seed: 21, t_copies: Some(2), ..exact_small(1, 2) };
    let distilled = run_exact_small_batch(&base, shots).unwrap();
    let raw = run_exact_small_batch(&PipelineConfig { distill: false, ..base.clone() }, shots).unwrap();
    assert!(distilled.l1_decoded < raw.l1_decoded, "{} vs {}", distilled.l1_decoded, raw.l1_decoded);
    // Raw errors are far outside the sampling envelope; distilled ones are not.
    assert!(raw.l1_decoded > raw.envelope);
    assert!(distilled.l1_decoded <= distilled.envelope);
}

#[test]
fn decoding_beats_raw_readout() {
    let cfg = PipelineConfig { distance: 3, noise: readout(0.005), seed: 5, ..exact_small(1, 2) };
    let r = run_exact_small_batch(&cfg, 100_000).unwrap();
    assert!(r.l1_decoded < r.l1_raw, "{} vs {}", r.l1_decoded, r.l1_raw);
    let corrections: usize = r.records.iter().map(|x| x.decode.corrections).sum();
    assert!(corrections > 0);
}

#[test]
fn too_few_successes_abort_the_run_with_a_tally() {
    let cfg = PipelineConfig { eps_t: 0.2, t_copies: Some(1), seed: 9, ..exact_small(1, 2) };
    let r = run_exact_small_batch(&cfg, 2_000).unwrap();
    assert!(r.aborted > 0 && r.completed > 0);
    assert_eq!(r.aborted + r.completed, 2_000);
    assert!(r.l1_unconditional >= r.aborted as f64 / 2_000.0);
    let failing = (0..200).map(|s| run_exact_small(&PipelineConfig { seed: s, ..cfg.clone() })).find(|r| r.is_err()).expect("some run aborts");
    assert!(matches!(failing, Err(PipelineError::InsufficientSuccesses { needed: 1, found: 0, .. })));
}

#[test]
fn wide_instances_hit_the_cap() {
    let err = run_exact_small(&PipelineConfig { cap: 2, ..exact_small(1, 2) }).unwrap_err();
    assert!(matches!(err, PipelineError::Cap { qubits: 3, cap: 2, .. }));
    assert!(err.is_config());
}

#[test]
fn wide_routing_falls_back_to_the_tableau() {
    // Three targets need 4 + 7·6 = 46 routing qubits.
    let cfg = PipelineConfig { architecture: Architecture::ThreeD, gadget: GadgetChoice::GbPrime, ..exact_small(1, 2) };
    let r = run_exact_small_batch(&cfg, 300).unwrap();
    assert_eq!(r.routing_qubits, vec![46, 46]);
    assert!(r.l1_decoded <= r.envelope);
}

#[test]
fn identical_seeds_give_identical_runs() {
    let cfg = PipelineConfig { eps_t: 0.05, distance: 3, noise: readout(0.01), seed: 77, ..exact_small(1, 2) };
    let strip = |mut v: Vec<RunRecord>| {
        v.iter_mut().for_each(|r| r.elapsed_us = 0);
        v
    };
    let a = strip(run_exact_small_batch(&cfg, 500).unwrap().records);
    let b = strip(run_exact_small_batch(&cfg, 500).unwrap().records);
    assert_eq!(a, b);
    let e = error_model(2, 2, 0.01, 0.01);
    let x = strip(run_error_model(&e, 500).unwrap().records);
    let y = strip(run_error_model(&e, 500).unwrap().records);
    assert_eq!(x, y);
}

#[test]
fn error_model_without_errors_matches_the_distribution() {
    let r = run_error_model(&PipelineConfig { seed: 1, ..error_model(2, 2, 0.0, 0.0) }, 100_000).unwrap();
    assert!(r.l1_model.unwrap() < 1e-12);
    assert!(r.l1_empirical <= r.envelope, "{} {}", r.l1_empirical, r.envelope);
    assert_eq!(r.bound, 0.0);
    assert!(r.within_bound);
}

#[test]
fn decode_failures_stay_within_the_decode_bound() {
    let r = run_error_model(&PipelineConfig { seed: 2, ..error_model(2, 2, 0.01, 0.0) }, 100_000).unwrap();
    let expected = 2.0 * (1.0 - 0.99f64.powi(r.num_logical as i32));
    assert!((r.decode_bound - expected).abs() < 1e-12);
    assert!(r.l1_model.unwrap() <= r.decode_bound);
    assert!(r.l1_empirical <= r.decode_bound + r.envelope, "{} > {} + {}", r.l1_empirical, r.decode_bound, r.envelope);
    assert!(r.within_bound);
}

#[test]
fn magic_errors_stay_within_the_fidelity_bound() {
    let r = run_error_model(&PipelineConfig { seed: 3, ..error_model(2, 2, 0.0, 1e-3) }, 100_000).unwrap();
    let expected = 2.0 * (1.0 - (1.0f64 - 1e-3).powi(2 * r.num_t as i32)).sqrt();
    assert!((r.fidelity_bound - expected).abs() < 1e-12);
    assert!(r.l1_model.unwrap() <= r.fidelity_bound);
    assert!(r.within_bound, "{} > {} + {}", r.l1_empirical, r.bound, r.envelope);
}

#[test]
fn exact_noisy_tables_respect_the_bounds_on_a_grid() {
    for noise in [MagicNoise::Dephasing, MagicNoise::Depolarizing] {
        for model in [DecodeModel::Independent, DecodeModel::UnionBound] {
            for p_f in [0.0, 0.001, 0.01, 0.05] {
                for eps in [0.0, 1e-3, 1e-2, 0.1] {
                    let cfg = PipelineConfig { magic_noise: noise, decode_model: model, ..error_model(2, 2, p_f, eps) };
                    let r = run_error_model(&cfg, 2_000).unwrap();
                    assert!(r.l1_model.unwrap() <= r.bound + 1e-12, "{noise:?} {model:?} {p_f} {eps}: {:?} > {}", r.l1_model, r.bound);
                    assert!(r.within_bound);
                }
            }
        }
    }
}

#[test]
fn p_f_must_be_calibrated() {
    let cfg = PipelineConfig { p_f: None, ..error_model(1, 2, 0.0, 0.0) };
    assert!(matches!(run_error_model(&cfg, 10), Err(PipelineError::NotCalibrated)));
    let calibrated = PipelineConfig { calibration: Some(Calibration { distance: 3, flip_rate: 0.05, trials: 20_000 }), ..cfg };
    let p = calibrated.resolve_p_f().unwrap();
    assert!(p > 0.0 && p < 0.05, "{p}");
    assert!(run_error_model(&calibrated, 100).is_ok());
}

#[test]
fn depth_is_constant_across_sizes() {
    for (arch, gadget) in [(Architecture::FourD, GadgetChoice::Gb), (Architecture::ThreeD, GadgetChoice::GbPrime)] {
        for distance in [1, 3] {
            let mut totals = Vec::new();
            for n in 1..=3 {
                for k in 2..=4 {
                    let cfg = PipelineConfig { architecture: arch, gadget, distance, ..exact_small(n, k) };
                    totals.push(quantum_depth_audit(&cfg).unwrap().total);
                }
            }
            assert!(totals.windows(2).all(|w| w[0] == w[1]), "{arch:?} d={distance}: {totals:?}");
        }
    }
    let d1 = quantum_depth_audit(&exact_small(2, 3)).unwrap();
    let d3 = quantum_depth_audit(&PipelineConfig { distance: 3, ..exact_small(2, 3) }).unwrap();
    assert!(d3.total > d1.total);
    let direct = quantum_depth_audit(&PipelineConfig { distill: false, ..exact_small(2, 3) }).unwrap();
    assert!(direct.stages.iter().all(|s| !s.name.contains("routing")));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn every_size_fits_the_fixed_schedule(n in 1usize..9, k in 2usize..8) {
        let base = quantum_depth_audit(&exact_small(2, 2)).unwrap();
        let r = quantum_depth_audit(&exact_small(n, k)).unwrap();
        prop_assert_eq!(r.total, base.total);
        prop_assert!(r.stages.iter().all(|s| s.used <= s.layers));
    }
}

#[test]
fn configs_reject_unknown_keys_and_bad_values() {
    assert!(PipelineConfig::from_json(r#"{"mode":"exact_small","n":1,"k":2,"shots":5}"#).is_ok());
    assert!(matches!(PipelineConfig::from_json(r#"{"mode":"exact_small","n":1,"k":2,"bogus":1}"#), Err(PipelineError::Config(_))));
    assert!(PipelineConfig::from_json(r#"{"mode":"exact_small","n":1,"k":2,"distance":5}"#).is_err());
    assert!(PipelineConfig::from_json(r#"{"mode":"exact_small","n":1,"k":2,"architecture":"3d"}"#).is_err());
    assert!(PipelineConfig::from_json(r#"{"mode":"error_model","n":1,"k":2,"noise":{"p_prep":0.1,"p_layer":[],"p_out":0}}"#).is_err());
    let cfg = PipelineConfig::new(Mode::ErrorModel, 2, 3);
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(PipelineConfig::from_json(&text).unwrap(), cfg);
    for key in PIPELINE_KEYS {
        assert!(text.contains(&format!("\"{key}\"")), "{key}");
    }
}
