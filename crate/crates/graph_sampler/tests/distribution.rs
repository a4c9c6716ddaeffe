use graph_sampler::*;
use num_complex::Complex64 as C;
use pauli_core::seed;

fn output_vertex(row: usize, col: usize) -> Vertex {
    Vertex { row, col, sub: 0, kind: VertexKind::Output, role: MeasurementRole::OutputZ }
}

fn single_output() -> GraphSpec {
    GraphSpec::new(1, 1, vec![output_vertex(0, 0)], vec![]).unwrap()
}

fn two_path() -> GraphSpec {
    build_brickwork_graph(1, 2, &GadgetSpec::single_wire()).unwrap()
}

fn gb(n: usize, k: usize) -> GraphSpec {
    build_brickwork_graph(n, k, &GadgetSpec::default_gb()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn lone_output_vertex_is_read_in_the_computational_basis() {
    // Outputs are not rotated, so |+⟩ read in Z is a fair coin.
    let d = exact_distribution(&single_output()).unwrap();
    assert_eq!((d.num_s(), d.num_x()), (0, 1));
    assert!(close(d.prob(0, 0), 0.5, 1e-12));
    assert!(close(d.prob(0, 1), 0.5, 1e-12));
}

#[test]
fn two_vertex_path_amplitudes() {
    let state = graph_statevector(&two_path()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [C::new(h, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(h, 0.0)];
    for (a, e) in state.amplitudes().iter().zip(expected) {
        assert!((a - e).norm() < 1e-12, "{:?}", state.amplitudes());
    }
}

#[test]
fn two_vertex_path_table() {
    let d = exact_distribution(&two_path()).unwrap();
    assert!(close(d.prob(0, 0), 0.5, 1e-12));
    assert!(close(d.prob(0, 1), 0.0, 1e-12));
    assert!(close(d.prob(1, 0), 0.0, 1e-12));
    assert!(close(d.prob(1, 1), 0.5, 1e-12));
}

#[test]
fn states_are_normalised() {
    let specs = vec![single_output(), two_path(), gb(1, 2), gb(2, 2), gb(2, 3), gb(2, 4), gb(3, 3), gb(2, 5)];
    for s in specs {
        let psi = graph_statevector(&s).unwrap();
        assert!(close(psi.norm_sqr(), 1.0, 1e-10));
        let d = exact_distribution(&s).unwrap();
        assert!(close(d.total(), 1.0, 1e-9));
        assert!(d.probabilities().iter().all(|&p| p >= 0.0));
    }
}

#[test]
fn size_cap_enforced() {
    let big = gb(2, 7);
    assert!(big.num_vertices() > DEFAULT_QUBIT_CAP);
    assert!(matches!(graph_statevector(&big), Err(GraphError::SizeCap { .. })));
    assert!(matches!(exact_distribution(&big), Err(GraphError::SizeCap { .. })));
    assert!(matches!(graph_statevector_with_cap(&gb(2, 2), 5), Err(GraphError::SizeCap { .. })));
    assert!(matches!(Sampler::with_cap(&gb(2, 3), 2), Err(GraphError::SizeCap { .. })));
}

#[test]
fn uniform_s_marginal_examples() {
    assert!(uniform_s_marginal_check(&two_path()).unwrap() < 1e-10);
    assert!(uniform_s_marginal_check(&single_output()).unwrap() < 1e-10);
    assert!(uniform_s_marginal_check(&gb(2, 2)).unwrap() <= 1e-9);
    for s in [gb(2, 3), gb(3, 3), gb(2, 5)] {
        assert!(uniform_s_marginal_check(&s).unwrap() <= 1e-9);
    }
}

#[test]
fn anticoncentration_examples() {
    assert_eq!(anticoncentration_stats(&OutcomeDistribution::uniform(2, 2), 1.0), 1.0);
    assert_eq!(anticoncentration_stats(&OutcomeDistribution::point_mass(2, 2, 5), 1.0), 1.0 / 16.0);
    let beta = anticoncentration_stats(&exact_distribution(&gb(2, 4)).unwrap(), 1.0);
    assert!(beta >= 0.2, "{beta}");
}

#[test]
fn beta_grows_with_depth_at_two_wires() {
    let betas: Vec<f64> = (3..=5)
        .map(|k| anticoncentration_stats(&exact_distribution(&gb(2, k)).unwrap(), 1.0))
        .collect();
    for w in betas.windows(2) {
        assert!(w[1] >= w[0] - 0.05, "{betas:?}");
    }
    assert!(betas.iter().all(|&b| b >= 0.2), "{betas:?}");
}

#[test]
fn l1_examples() {
    let d = exact_distribution(&two_path()).unwrap();
    assert_eq!(l1_distance(&d, &d).unwrap(), 0.0);
    let a = OutcomeDistribution::point_mass(1, 1, 0);
    let b = OutcomeDistribution::point_mass(1, 1, 3);
    assert_eq!(l1_distance(&a, &b).unwrap(), 2.0);
    assert!(close(l1_distance(&d, &OutcomeDistribution::uniform(1, 1)).unwrap(), 1.0, 1e-12));
    assert!(matches!(
        l1_distance(&d, &OutcomeDistribution::uniform(2, 1)),
        Err(GraphError::Mismatch(_))
    ));
}

#[test]
fn distribution_validation() {
    assert!(OutcomeDistribution::new(1, 0, vec![0.5, 0.5]).is_ok());
    assert!(OutcomeDistribution::new(1, 0, vec![0.6, 0.5]).is_err());
    assert!(OutcomeDistribution::new(1, 0, vec![1.5, -0.5]).is_err());
    assert!(OutcomeDistribution::new(1, 1, vec![0.5, 0.5]).is_err());
}

#[test]
fn csv_export_lists_every_outcome() {
    let d = exact_distribution(&gb(1, 2)).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "s,x,probability");
    assert_eq!(rows.len(), 1 + d.probabilities().len());
    let total: f64 = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!(close(total, 1.0, 1e-12));
}

#[test]
fn two_vertex_path_sampling_frequencies() {
    let sampler = Sampler::new(&two_path()).unwrap();
    let shots = 20_000;
    let samples = sample_batch(&sampler, shots, 11);
    let emp = OutcomeDistribution::empirical(1, 1, &samples).unwrap();
    let sigma = (0.25f64 / shots as f64).sqrt();
    assert!(close(emp.prob(0, 0), 0.5, 3.0 * sigma));
    assert!(close(emp.prob(1, 1), 0.5, 3.0 * sigma));
    assert_eq!(emp.prob(0, 1), 0.0);
    assert_eq!(emp.prob(1, 0), 0.0);
}

#[test]
fn lone_output_vertex_sampling_is_a_fair_coin() {
    let mut rng = seed::rng_from_seed(4);
    let shots = 20_000;
    let ones = (0..shots).filter(|_| sample_outcome(&single_output(), &mut rng).unwrap().x[0]).count();
    let sigma = (0.25f64 / shots as f64).sqrt();
    assert!(close(ones as f64 / shots as f64, 0.5, 3.0 * sigma));
}

#[test]
fn sampler_matches_exact_tables_within_envelope() {
    let shots = 100_000;
    let gbp = substitute_gbprime(&gb(2, 2)).unwrap();
    for (i, spec) in [two_path(), gb(1, 2), gb(2, 2), gbp, gb(2, 3), gb(2, 4)].iter().enumerate() {
        let exact = exact_distribution(spec).unwrap();
        let sampler = Sampler::new(spec).unwrap();
        let emp = OutcomeDistribution::empirical(exact.num_s(), exact.num_x(), &sample_batch(&sampler, shots, 100 + i as u64))
            .unwrap();
        let l1 = l1_distance(&emp, &exact).unwrap();
        let env = sampling_envelope(&exact, shots, 5.0);
        assert!(l1 <= env, "spec {i}: l1 {l1} above envelope {env}");
    }
}

#[test]
fn sampler_handles_wraparound_links() {
    let spec = build_brickwork_graph_with(4, 3, &GadgetSpec::default_gb(), BrickworkOptions { link_length: 2 }).unwrap();
    assert!(spec.num_vertices() <= DEFAULT_QUBIT_CAP);
    let exact = exact_distribution(&spec).unwrap();
    let mut x_exact = vec![0.0; 1 << exact.num_x()];
    for (i, p) in exact.probabilities().iter().enumerate() {
        x_exact[i >> exact.num_s()] += p;
    }
    let shots = 40_000;
    let samples = sample_batch(&Sampler::new(&spec).unwrap(), shots, 9);
    let mut x_emp = vec![0.0; 1 << exact.num_x()];
    for s in &samples {
        let x = s.x.iter().enumerate().fold(0, |acc, (j, &b)| acc | ((b as usize) << j));
        x_emp[x] += 1.0 / shots as f64;
    }
    let l1: f64 = x_exact.iter().zip(&x_emp).map(|(a, b)| (a - b).abs()).sum();
    let env: f64 = x_exact.iter().map(|p| (p * (1.0 - p) / shots as f64).sqrt()).sum::<f64>() + 5.0 / (shots as f64).sqrt();
    assert!(l1 <= env, "{l1} > {env}");
    let s_ones: Vec<f64> = (0..exact.num_s())
        .map(|j| samples.iter().filter(|s| s.s[j]).count() as f64 / shots as f64)
        .collect();
    let sigma = (0.25f64 / shots as f64).sqrt();
    assert!(s_ones.iter().all(|f| close(*f, 0.5, 5.0 * sigma)), "{s_ones:?}");
}

#[test]
fn full_size_links_sample_beyond_the_table_cap() {
    let spec = gb(4, 4);
    assert!(spec.num_vertices() > DEFAULT_QUBIT_CAP);
    let sampler = Sampler::new(&spec).unwrap();
    assert!(sampler.peak_width() <= DEFAULT_QUBIT_CAP);
    let s = sampler.sample(&mut seed::rng_from_seed(1));
    assert_eq!(s.x.len(), 4);
    assert_eq!(s.s.len(), spec.num_vertices() - 4);
}

#[test]
fn same_seed_same_stream() {
    let sampler = Sampler::new(&gb(2, 3)).unwrap();
    assert_eq!(sample_batch(&sampler, 200, 5), sample_batch(&sampler, 200, 5));
    assert_ne!(sample_batch(&sampler, 200, 5), sample_batch(&sampler, 200, 6));
    let serial: Vec<Sample> = (0..200).map(|i| sampler.sample(&mut seed::trial_rng(5, i))).collect();
    assert_eq!(serial, sample_batch(&sampler, 200, 5));
}
