use infoflow::simgen::{
    oscillator_panel, pearson, simulate_var, sweep_epsilon, Preset, RosslerSpec, VarSpec,
    VAR6_EDGES,
};
use infoflow::{estimate_flow_matrix, reconstruct, AnalysisConfig, CausalGraph, TimeSeriesPanel};
use nalgebra::DMatrix;
use rayon::prelude::*;

fn independent_ar1(d: usize, n: usize, seed: u64) -> TimeSeriesPanel {
    let coeffs: Vec<f64> = (0..d).map(|i| 0.2 + 0.6 * i as f64 / d as f64).collect();
    let spec = VarSpec {
        transition: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(coeffs)),
        intercept: vec![0.0; d],
        noise: vec![1.0; d],
        n,
        burn_in: 200,
        seed,
    };
    simulate_var(&spec).unwrap()
}

#[test]
fn var6_recovers_designed_edges() {
    let panel = Preset::Var6B1.analysis_panel(42, None).unwrap();
    let graph = reconstruct(&panel, &AnalysisConfig::default()).unwrap();
    let pairs = graph.edge_pairs();
    for edge in VAR6_EDGES {
        assert!(pairs.contains(&edge), "missing {edge:?} in {pairs:?}");
    }
    assert!(graph.nodes.iter().all(|n| n.is_self_loop));
    let t62 = graph.flow_matrix[5][1].as_ref().unwrap().t;
    assert!((t62.abs() - 0.19).abs() < 0.02, "{t62}");
}

#[test]
fn heavy_noise_leaves_flows_unchanged() {
    // Same seed: the b = 100 panel is the b = 1 panel rescaled up to the intercept.
    let cfg = AnalysisConfig::default();
    let a = estimate_flow_matrix(&Preset::Var6B1.analysis_panel(3, None).unwrap(), &cfg).unwrap();
    let b = estimate_flow_matrix(&Preset::Var6B100.analysis_panel(3, None).unwrap(), &cfg).unwrap();
    for (s, t) in VAR6_EDGES {
        let (x, y) = (a.flow(s, t).unwrap().value, b.flow(s, t).unwrap().value);
        assert!((x - y).abs() < 0.005, "{s}->{t}: {x} vs {y}");
    }
}

#[test]
fn noise_rate_tracks_noise_amplitude() {
    // For a stationary AR(1) X(n+1) = φX(n) + b e, g = b² and σ = b²/(1−φ²),
    // so g/(2σ) = (1−φ²)/2 regardless of b, while g itself scales with b².
    let phi = 0.5;
    let run = |b: f64| {
        let spec = VarSpec {
            transition: DMatrix::from_row_slice(2, 2, &[phi, 0.0, 0.0, 0.3]),
            intercept: vec![0.0; 2],
            noise: vec![b; 2],
            n: 50_000,
            burn_in: 100,
            seed: 19,
        };
        estimate_flow_matrix(&simulate_var(&spec).unwrap(), &AnalysisConfig::default()).unwrap()
    };
    let (lo, hi) = (run(1.0), run(100.0));
    let expected = (1.0 - phi * phi) / 2.0;
    assert!((lo.nodes[0].noise_rate - expected).abs() < 0.01);
    assert!((hi.nodes[0].noise_rate - expected).abs() < 0.01);
    let ratio = hi.rows[0].g_hat / lo.rows[0].g_hat;
    assert!((ratio / 1e4 - 1.0).abs() < 1e-6, "{ratio}");
}

#[test]
fn nil_causality_false_positive_rate() {
    let m = 600;
    let alpha = 0.90;
    let hits: usize = (0..m)
        .into_par_iter()
        .map(|seed| {
            let panel = independent_ar1(2, 800, 10_000 + seed as u64);
            let fm = estimate_flow_matrix(&panel, &AnalysisConfig::default()).unwrap();
            usize::from(fm.flow(1, 0).unwrap().significant)
        })
        .sum();
    let rate = hits as f64 / m as f64;
    let p = 1.0 - alpha;
    let band = 3.0 * (p * (1.0 - p) / m as f64).sqrt();
    assert!((rate - p).abs() <= band, "rate {rate} outside {p} ± {band}");
}

#[test]
fn white_noise_edge_count_near_alpha() {
    let d = 4;
    let trials = 200;
    let edges: usize = (0..trials)
        .into_par_iter()
        .map(|seed| {
            let spec = VarSpec {
                transition: DMatrix::zeros(d, d),
                intercept: vec![0.0; d],
                noise: vec![1.0; d],
                n: 500,
                burn_in: 0,
                seed: 500 + seed as u64,
            };
            let panel = simulate_var(&spec).unwrap();
            reconstruct(&panel, &AnalysisConfig::default())
                .unwrap()
                .edges
                .len()
        })
        .sum();
    let per_graph = edges as f64 / trials as f64;
    let expected = 0.1 * (d * (d - 1)) as f64;
    assert!(
        (per_graph - expected).abs() < 0.25,
        "{per_graph} vs {expected}"
    );
}

#[test]
fn one_way_linear_sde_gives_single_edge() {
    // dX = −X dt + dW1, dY = (0.8X − Y) dt + dW2, Euler–Maruyama with dt = 0.05.
    let dt: f64 = 0.05;
    let n = 20_000;
    let mut rng = infoflow::rng::SimRng::seed_from_u64(99);
    let (mut x, mut y) = (0.0, 0.0);
    let mut rows = vec![Vec::with_capacity(n), Vec::with_capacity(n)];
    for _ in 0..n {
        let nx = x - x * dt + dt.sqrt() * rng.standard_normal();
        let ny = y + (0.8 * x - y) * dt + dt.sqrt() * rng.standard_normal();
        x = nx;
        y = ny;
        rows[0].push(x);
        rows[1].push(y);
    }
    let panel = TimeSeriesPanel::new(rows, dt, Some(vec!["X".into(), "Y".into()])).unwrap();
    let g = reconstruct(&panel, &AnalysisConfig::default()).unwrap();
    assert!(g.edge_pairs().contains(&(0, 1)));
    let back = g.flow_matrix[1][0].as_ref().unwrap();
    assert!(back.t.abs() < 0.1 * g.flow_matrix[0][1].as_ref().unwrap().t.abs());
}

#[test]
fn relabeling_gives_isomorphic_graph() {
    let panel = Preset::Var6B1.analysis_panel(11, None).unwrap();
    let perm = [3usize, 5, 0, 1, 4, 2];
    let permuted = panel.select(&perm).unwrap();
    let cfg = AnalysisConfig::default();
    let g = reconstruct(&panel, &cfg).unwrap();
    let pg = reconstruct(&permuted, &cfg).unwrap();
    let mut mapped: Vec<(usize, usize)> = pg
        .edge_pairs()
        .into_iter()
        .map(|(s, t)| (perm[s], perm[t]))
        .collect();
    mapped.sort_unstable();
    assert_eq!(mapped, g.edge_pairs());
    for (pi, &i) in perm.iter().enumerate() {
        assert_eq!(pg.nodes[pi].label, g.nodes[i].label);
    }
}

#[test]
fn serializations_are_deterministic_and_consistent() {
    let cfg = AnalysisConfig::default();
    let build = || {
        let panel = Preset::Var6B1.analysis_panel(5, None).unwrap();
        reconstruct(&panel, &cfg).unwrap()
    };
    let (a, b) = (build(), build());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_dot(), b.to_dot());

    let dot = a.to_dot();
    let edge_lines = dot.lines().filter(|l| l.contains("->")).count();
    let node_lines = dot
        .lines()
        .filter(|l| l.contains("[label=") && !l.contains("->"))
        .count();
    assert_eq!(edge_lines, a.edges.len());
    assert!(edge_lines >= 7);
    assert_eq!(node_lines, 6);

    let back = CausalGraph::from_json(&a.to_json()).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.meta.alpha, 0.90);
    let v: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), a.edges.len());
}

#[test]
fn sweep_table_shape_and_coupling() {
    let base = RosslerSpec::benchmark(0.0, 1);
    let cfg = AnalysisConfig::default().with_k(2);
    let rows = sweep_epsilon(&base, &[0.0, 0.25], &cfg).unwrap();
    assert_eq!(rows.len(), 2);
    let header = infoflow::simgen::SweepRow::csv_header();
    assert_eq!(header.split(',').count(), 13);
    assert_eq!(rows[0].csv_line().split(',').count(), 13);

    // Without coupling every flow is tiny next to the coupled drive flows.
    let uncoupled_max = rows[0]
        .flows
        .iter()
        .map(|f| f.value.abs())
        .fold(0.0, f64::max);
    let coupled = &rows[1];
    assert!(uncoupled_max < 0.01, "{uncoupled_max}");
    assert!(coupled.flows[0].significant && coupled.flows[2].significant);
    assert!(coupled.flows[0].value.abs() > 0.1);
    assert!(coupled.sync_corr > 0.9);
}

#[test]
fn uncoupled_oscillators_stay_independent() {
    let full = Preset::Rossler.analysis_panel(4, Some(0.0)).unwrap();
    let o = oscillator_panel(&full).unwrap();
    let cfg = AnalysisConfig::default().with_k(2);
    let fm = estimate_flow_matrix(&full, &cfg).unwrap();
    for (s, t) in [(0usize, 3usize), (3, 0), (0, 6), (6, 0), (3, 6), (6, 3)] {
        assert!(fm.flow(s, t).unwrap().value.abs() < 0.01);
    }
    assert!(pearson(o.row(1), o.row(2)).abs() < 0.9);
}
