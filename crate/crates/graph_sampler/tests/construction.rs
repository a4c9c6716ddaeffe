use std::collections::BTreeMap;

use graph_sampler::*;
use proptest::prelude::*;

fn gb(n: usize, k: usize) -> GraphSpec {
    build_brickwork_graph(n, k, &GadgetSpec::default_gb()).unwrap()
}

/// Wrap-around couplings: every odd column of an even register with n ≥ 4.
fn wraps(n: usize, k: usize) -> usize {
    if n % 2 == 0 && n >= 4 {
        (k - 1) / 2
    } else {
        0
    }
}

#[test]
fn vertex_count_and_degree() {
    for n in [1, 2, 4, 5, 6] {
        for k in 2..=6 {
            let Ok(spec) = build_brickwork_graph(n, k, &GadgetSpec::default_gb()) else {
                // A single gadget column leaves some wire pairs uncoupled.
                assert!(k == 2 && n >= 3);
                continue;
            };
            let expected = n * (k - 1) * 2 + n + 12 * wraps(n, k);
            assert_eq!(spec.num_vertices(), expected, "n={n} k={k}");
            assert_eq!(brickwork_vertex_count(n, k, 2, 1, 12), expected);
            for (v, vert) in spec.vertices().iter().enumerate() {
                if !vert.role.is_output() {
                    assert!(spec.degree(v) <= 4, "n={n} k={k} vertex {v}");
                }
            }
            assert_eq!(spec.count_role(MeasurementRole::OutputZ), n);
        }
    }
}

#[test]
fn two_by_three_is_connected_with_two_outputs() {
    let spec = gb(2, 3);
    assert_eq!(spec.output_vertices().len(), 2);
    assert!(spec.output_vertices().iter().all(|&v| spec.vertices()[v].col == 2));
}

#[test]
fn links_are_angle_zero_chains() {
    let spec = gb(4, 3);
    let links: Vec<_> = spec.vertices().iter().filter(|v| v.kind == VertexKind::Link).collect();
    assert_eq!(links.len(), 12);
    assert!(links.iter().all(|v| v.role == MeasurementRole::Xy0));
    // Only nearest neighbours along each wire, across a pair, or along a link.
    for &(a, b) in spec.edges() {
        let (va, vb) = (spec.vertices()[a], spec.vertices()[b]);
        let chain = va.row == vb.row;
        let vertical = va.col == vb.col && va.sub == vb.sub;
        let link = va.kind == VertexKind::Link || vb.kind == VertexKind::Link;
        assert!(chain || vertical || link, "{va:?} {vb:?}");
    }
}

#[test]
fn gadget_file_errors_surface() {
    let err = GadgetSpec::load(std::path::Path::new("/nonexistent/gadget.json")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/gadget.json"));
    let mut g = GadgetSpec::default_gb();
    g.vertices[0].row = 3;
    assert!(matches!(build_brickwork_graph(2, 3, &g), Err(GraphError::Gadget(_))));
}

#[test]
fn substitution_without_half_turns_is_identity() {
    let mut gadget = GadgetSpec::default_gb();
    for v in &mut gadget.vertices {
        if v.role == MeasurementRole::XyPi2 {
            v.role = MeasurementRole::XyPi4;
        }
    }
    let spec = build_brickwork_graph(3, 4, &gadget).unwrap();
    assert_eq!(substitute_gbprime(&spec).unwrap(), spec);
    let path = build_brickwork_graph(1, 4, &GadgetSpec::single_wire()).unwrap();
    assert_eq!(substitute_gbprime(&path).unwrap(), path);
}

#[test]
fn substitution_on_one_gadget() {
    let spec = gb(2, 2);
    let out = substitute_gbprime(&spec).unwrap();
    assert_eq!(out.count_role(MeasurementRole::XyPi2), 0);
    assert_eq!(out.output_vertices().len(), 2);
    assert_eq!(out.num_vertices(), spec.num_vertices() + 4);
    // The π/2 vertex on wire 0 became a π/4, 0, π/4 path.
    let wire0: Vec<_> = out.vertices().iter().filter(|v| v.row == 0 && v.kind == VertexKind::Gadget).collect();
    let roles: Vec<_> = wire0.iter().map(|v| v.role).collect();
    assert_eq!(
        &roles[..3],
        &[MeasurementRole::XyPi4, MeasurementRole::Xy0, MeasurementRole::XyPi4]
    );
    let ids: Vec<usize> = (0..out.num_vertices()).filter(|&i| out.vertices()[i].row == 0 && out.vertices()[i].sub < 3).collect();
    assert!(out.edges().contains(&(ids[0], ids[1])));
    assert!(out.edges().contains(&(ids[1], ids[2])));
}

#[test]
fn substitution_keeps_columns_regular() {
    for (n, k) in [(2, 3), (2, 5), (4, 3), (5, 4)] {
        let out = substitute_gbprime(&gb(n, k)).unwrap();
        assert_eq!(out.count_role(MeasurementRole::XyPi2), 0);
        assert!(out.num_vertices() > gb(n, k).num_vertices());
        let mut lengths: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for v in out.vertices() {
            if matches!(v.kind, VertexKind::Gadget | VertexKind::Idle) {
                *lengths.entry((v.col, v.row)).or_default() += 1;
            }
        }
        for col in 0..k - 1 {
            let per_row: Vec<_> = (0..n).map(|r| lengths[&(col, r)]).collect();
            assert!(per_row.windows(2).all(|w| w[0] == w[1]), "n={n} k={k} col={col}: {per_row:?}");
        }
    }
}

#[test]
fn substitution_preserves_outcome_structure() {
    let spec = gb(2, 3);
    let out = substitute_gbprime(&spec).unwrap();
    assert_eq!(out.output_vertices().len(), spec.output_vertices().len());
    assert!(uniform_s_marginal_check(&out).unwrap() <= 1e-9);
}

#[test]
fn substitution_rejects_foreign_layouts() {
    let v = |col, role| Vertex { row: 0, col, sub: 0, kind: VertexKind::Gadget, role };
    let spec = GraphSpec::new(
        1,
        2,
        vec![v(0, MeasurementRole::XyPi2), v(5, MeasurementRole::Xy0), Vertex { col: 1, kind: VertexKind::Output, ..v(1, MeasurementRole::OutputZ) }],
        vec![(0, 1), (1, 2)],
    )
    .unwrap();
    assert!(matches!(substitute_gbprime(&spec), Err(GraphError::NotTiling(_))));
}

fn amplitude_under_permutation(spec: &GraphSpec, perm: &[usize]) -> f64 {
    let a = graph_statevector(spec).unwrap();
    let b = graph_statevector(&spec.relabeled(perm).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for (i, amp) in a.amplitudes().iter().enumerate() {
        let j = perm.iter().enumerate().fold(0, |acc, (old, &new)| acc | (((i >> old) & 1) << new));
        worst = worst.max((amp - b.amplitudes()[j]).norm());
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn relabeling_permutes_amplitudes(perm in Just((0..10).collect::<Vec<usize>>()).prop_shuffle()) {
        prop_assert!(amplitude_under_permutation(&gb(2, 3), &perm) < 1e-12);
    }

    #[test]
    fn edge_order_is_irrelevant(order in Just((0..gb(2, 3).edges().len()).collect::<Vec<usize>>()).prop_shuffle()) {
        let spec = gb(2, 3);
        let a = graph_statevector(&spec).unwrap();
        let b = graph_statevector(&spec.with_edge_order(&order).unwrap()).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn every_constructible_small_spec_is_valid(n in 1usize..4, k in 2usize..6, prime in any::<bool>()) {
        if let Ok(spec) = build_brickwork_graph(n, k, &GadgetSpec::default_gb()) {
            let spec = if prime { substitute_gbprime(&spec).unwrap() } else { spec };
            if spec.num_vertices() <= 20 {
                let d = exact_distribution(&spec).unwrap();
                prop_assert!((d.total() - 1.0).abs() <= 1e-9);
                prop_assert!(uniform_s_deviation(&d) <= 1e-9);
            }
        }
    }
}
