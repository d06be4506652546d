use spike_circuits::mouse::{
    aeif_params, build_mouse_brain, Connectome, ConnectomeSource, MouseBrainConfig, NeuronType, PerType, TABLE_COUNTS,
};
use spike_circuits::CircuitError;
use spike_core::network::Sign;

fn small() -> MouseBrainConfig {
    MouseBrainConfig { scale: 0.01, ..MouseBrainConfig::default() }
}

#[test]
fn full_scale_counts_match_the_table() {
    let cfg = MouseBrainConfig { scale: 1.0, ..MouseBrainConfig::default() };
    let c = cfg.scaled_counts();
    assert_eq!([c.e, c.i_bc, c.i_mc, c.tc, c.ti, c.trn], [56100, 14960, 7480, 1300, 260, 520]);
}

#[test]
fn scaled_counts_round_and_are_built_exactly() {
    let cfg = small();
    let expected = TABLE_COUNTS.map(|_, n| (0.01 * n as f64).round() as usize);
    assert_eq!(cfg.scaled_counts(), expected);
    assert_eq!([expected.ti, expected.trn], [3, 5]);
    let brain = build_mouse_brain(&cfg).unwrap();
    assert_eq!(brain.type_counts(), expected);
    for t in NeuronType::ALL {
        assert!(brain.type_counts().get(t) >= 1);
    }
}

#[test]
fn excitatory_type_uses_table_parameters() {
    let cfg = MouseBrainConfig::default();
    let e = cfg.params.e;
    assert_eq!((e.v_th, e.v_r, e.tau_v, e.alpha, e.beta), (-50.0, -110.0, 100.0, 0.0, 0.0));
    let p = aeif_params(&cfg.params.trn, &cfg.membrane);
    assert_eq!((p.v_th, p.v_reset, p.c_mem, p.tau_w, p.a, p.b), (-45.0, -65.0, 400.0, 20.0, -2.0, 4.5));
}

#[test]
fn zero_scale_names_the_bound() {
    let err = build_mouse_brain(&MouseBrainConfig { scale: 0.0, ..small() }).unwrap_err();
    assert!(err.to_string().contains("scale ∈ (0,1]"), "{err}");
    assert!(build_mouse_brain(&MouseBrainConfig { scale: 1.5, ..small() }).is_err());
    let tiny = MouseBrainConfig { scale: 1e-4, ..small() };
    assert!(build_mouse_brain(&tiny).is_err());
}

#[test]
fn projection_signs_follow_the_source_type() {
    let brain = build_mouse_brain(&small()).unwrap();
    assert!(brain.net.n_projections() > 0);
    for info in brain.net.projections() {
        let pre = brain.populations.iter().find(|p| p.id == info.pre).unwrap();
        let expected = if pre.kind.is_excitatory() { Sign::Excitatory } else { Sign::Inhibitory };
        assert_eq!(info.sign, expected);
    }
}

#[test]
fn connectome_round_trips_through_csv() {
    let c = Connectome::small_world(8, 2, 0.3, 5);
    assert_eq!(c, Connectome::small_world(8, 2, 0.3, 5));
    assert_eq!(c.edges.len(), 16);
    assert!(c.edges.iter().all(|e| e.src != e.dst));
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("src_area,dst_area,weight\n"));
    let back = Connectome::from_reader(buf.as_slice()).unwrap();
    let named = |c: &Connectome| -> Vec<(String, String, f64)> {
        c.edges.iter().map(|e| (c.areas[e.src].clone(), c.areas[e.dst].clone(), e.weight)).collect()
    };
    assert_eq!(named(&back), named(&c));
}

#[test]
fn malformed_connectome_rows_are_located() {
    let bad_weight = "src_area,dst_area,weight\nA,B,0.5\nB,C,abc\n";
    match Connectome::from_reader(bad_weight.as_bytes()) {
        Err(CircuitError::Connectome { line, column, .. }) => assert_eq!((line, column.as_str()), (3, "weight")),
        other => panic!("unexpected {other:?}"),
    }
    let negative = "src_area,dst_area,weight\nA,B,-1\n";
    match Connectome::from_reader(negative.as_bytes()) {
        Err(CircuitError::Connectome { line, column, .. }) => assert_eq!((line, column.as_str()), (2, "weight")),
        other => panic!("unexpected {other:?}"),
    }
    let header = "from,to,weight\nA,B,1\n";
    assert!(matches!(Connectome::from_reader(header.as_bytes()), Err(CircuitError::Connectome { line: 1, .. })));
    let short = "src_area,dst_area,weight\nA,B\n";
    assert!(matches!(Connectome::from_reader(short.as_bytes()), Err(CircuitError::Connectome { .. })));
}

#[test]
fn connectome_file_drives_the_area_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    std::fs::write(&path, "src_area,dst_area,weight\nVISp,MOp,1.0\nMOp,VISp,0.5\nMOp,TH,0.2\n").unwrap();
    let cfg = MouseBrainConfig { connectome: ConnectomeSource::File { path }, ..small() };
    let brain = build_mouse_brain(&cfg).unwrap();
    assert_eq!(brain.connectome.areas, ["VISp", "MOp", "TH"]);
    assert!(brain.net.population_id("VISp_e").is_ok());
    let missing = MouseBrainConfig { connectome: ConnectomeSource::File { path: dir.path().join("nope.csv") }, ..small() };
    assert!(matches!(build_mouse_brain(&missing), Err(CircuitError::ConnectomeIo(_))));
}

#[test]
fn spontaneous_run_stays_finite_and_reproducible() {
    let mut brain = build_mouse_brain(&small()).unwrap();
    let a = brain.run_spontaneous(200, 3).unwrap();
    let b = brain.run_spontaneous(200, 3).unwrap();
    assert_eq!(a.non_finite, 0);
    assert_eq!(a.activity, b.activity);
    assert!(a.activity.iter().map(|t| t.spikes).sum::<u64>() > 0);
}

#[test]
fn per_type_table_is_serialisable() {
    let json = serde_json::to_string(&TABLE_COUNTS).unwrap();
    let back: PerType<usize> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, TABLE_COUNTS);
}
