use spike_circuits::drosophila::{build_drosophila, max_jump, Cue, DrosophilaConfig, Pathway};
use spike_circuits::CircuitError;
use spike_core::network::Sign;

fn cfg(pathway: Pathway) -> DrosophilaConfig {
    DrosophilaConfig { pathway, ..DrosophilaConfig::default() }
}

#[test]
fn linear_pathway_has_no_modulatory_populations() {
    let c = build_drosophila(&cfg(Pathway::Linear)).unwrap();
    assert!(c.apl.is_none() && c.da.is_none());
    assert!(c.net.population_id("apl").is_err());
    assert!(c.net.population_id("da").is_err());
}

#[test]
fn nonlinear_pathway_wiring_signs() {
    let c = build_drosophila(&cfg(Pathway::Nonlinear)).unwrap();
    let (apl, da) = (c.apl.unwrap(), c.da.unwrap());
    let sign = |pre, post| {
        let found = c.net.projections_between(pre, post);
        assert_eq!(found.len(), 1, "expected one projection");
        found[0].sign
    };
    assert_eq!(sign(c.kc, apl), Sign::Excitatory);
    assert_eq!(sign(apl, c.kc), Sign::Inhibitory);
    assert_eq!(sign(da, apl), Sign::Inhibitory);
    assert_eq!(sign(apl, da), Sign::Inhibitory);
    assert_eq!(sign(da, c.avoid), Sign::Excitatory);
    assert_eq!(sign(da, c.approach), Sign::Excitatory);
    assert!(c.net.weights(c.apl_to_kc.unwrap()).unwrap().iter().all(|&w| w < 0.0));
}

#[test]
fn both_pathways_share_input_kc_and_output_sizes() {
    let lin = build_drosophila(&cfg(Pathway::Linear)).unwrap();
    let non = build_drosophila(&cfg(Pathway::Nonlinear)).unwrap();
    for name in ["cue_green", "cue_blue", "cue_upright", "cue_inverted", "kc", "mbon_avoid", "mbon_approach"] {
        let a = lin.net.population_id(name).unwrap();
        let b = non.net.population_id(name).unwrap();
        assert_eq!(lin.net.size(a), non.net.size(b), "{name}");
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        DrosophilaConfig { apl_gain: -1.0, ..DrosophilaConfig::default() },
        DrosophilaConfig { da_gain: -0.1, ..DrosophilaConfig::default() },
        DrosophilaConfig { test_steps: 0, ..DrosophilaConfig::default() },
        DrosophilaConfig { kc_size: 6, ..DrosophilaConfig::default() },
    ];
    for c in bad {
        assert!(matches!(build_drosophila(&c), Err(CircuitError::InvalidConfig(_))));
    }
}

#[test]
fn zero_training_trials_leave_weights_unchanged() {
    let mut c = build_drosophila(&DrosophilaConfig { train_trials: 0, ..cfg(Pathway::Linear) }).unwrap();
    let before = c.net.weights(c.kc_to_approach).unwrap().to_vec();
    c.train(3).unwrap();
    assert_eq!(c.net.weights(c.kc_to_approach).unwrap(), before.as_slice());
}

#[test]
fn training_orders_cue_weights_and_flipped_reward_reverses_them() {
    for pathway in [Pathway::Linear, Pathway::Nonlinear] {
        let mut c = build_drosophila(&cfg(pathway)).unwrap();
        c.train(5).unwrap();
        assert!(c.mean_weight(Cue::Green, true) > c.mean_weight(Cue::Blue, true));
        assert!(c.mean_weight(Cue::Blue, false) > c.mean_weight(Cue::Green, false));

        let mut flipped = build_drosophila(&DrosophilaConfig { reward: -1.0, ..cfg(pathway) }).unwrap();
        flipped.train(5).unwrap();
        assert!(flipped.mean_weight(Cue::Green, true) < flipped.mean_weight(Cue::Blue, true));
    }
}

#[test]
fn trained_circuit_follows_the_dominant_cue() {
    let mut c = build_drosophila(&cfg(Pathway::Linear)).unwrap();
    c.train(2).unwrap();
    // Pure upright shape: learned safe, so approach.
    assert!(c.test_dilemma(0.0, 1).unwrap().preference > 0.5);
    // Pure blue colour: learned punished, so avoid.
    assert!(c.test_dilemma(1.0, 1).unwrap().preference < -0.5);
    assert!(c.test_dilemma(1.5, 1).is_err());
}

#[test]
fn sweep_is_reproducible_and_bounded() {
    let mut c = build_drosophila(&DrosophilaConfig { test_repeats: 1, ..cfg(Pathway::Nonlinear) }).unwrap();
    c.train(4).unwrap();
    let a = c.sweep(5, 11).unwrap();
    let b = c.sweep(5, 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 5);
    assert!(a.iter().all(|o| (0.0..=1.0).contains(&o.pi) && o.preference.abs() <= 1.0));
    assert!(max_jump(&a) <= 2.0);
}
