use ndarray::Array2;
use proptest::prelude::*;
use spike_core::encoding::{decode_phase, encode_phase, encode_ttfs, SpikeTrain};
use spike_core::network::Mask;
use spike_core::neurons::{NeuronModel, LifParams, NeuronState};
use spike_core::plasticity::{
    apply_stdp, pbln_normalize, stp_on_spike, Pairing, StdpParams, StpParams, StpState,
};

fn train_strategy(duration: u32, n: usize) -> impl Strategy<Value = SpikeTrain> {
    prop::collection::vec(prop::collection::vec(0..duration, 0..12), n)
        .prop_map(move |ev| SpikeTrain::from_events(duration, ev).unwrap())
}

proptest! {
    #[test]
    fn stp_state_stays_bounded(
        u in 0.01f64..=1.0,
        tau_fac in 1.0f64..500.0,
        tau_rec in 1.0f64..1000.0,
        gaps in prop::collection::vec(0.0f64..200.0, 1..60),
    ) {
        let p = StpParams { u, tau_fac, tau_rec };
        let mut s = StpState::new(&p);
        for g in gaps {
            let (next, eff) = stp_on_spike(&s, g, &p);
            prop_assert!(next.u > 0.0 && next.u <= 1.0 + 1e-12);
            prop_assert!(next.r >= -1e-12 && next.r <= 1.0 + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&eff));
            s = next;
        }
        let (rest, _) = stp_on_spike(&s, 10.0 * tau_fac.max(tau_rec) * 5.0, &p);
        prop_assert!((rest.u - u).abs() < 1e-6);
        prop_assert!((rest.r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stdp_keeps_weights_in_bounds(
        pre in train_strategy(60, 3),
        post in train_strategy(60, 2),
        w0 in 0.0f64..1.0,
        nearest in any::<bool>(),
    ) {
        let p = StdpParams {
            a_plus: 0.3,
            a_minus: 0.35,
            pairing: if nearest { Pairing::NearestNeighbor } else { Pairing::AllPairs },
            ..StdpParams::default()
        };
        let w = Array2::from_elem((3, 2), w0);
        let out = apply_stdp(&pre, &post, &w, &p).unwrap();
        prop_assert!(out.iter().all(|&x| (p.w_min..=p.w_max).contains(&x)));
    }

    #[test]
    fn phase_round_trip(i in 0usize..256, k in prop::sample::select(vec![4u32, 8])) {
        let x = i as f64 / 255.0;
        let back = decode_phase(&encode_phase(x, k, 3 * k).unwrap(), 0, k);
        let bound = 1.0 / ((1u64 << k) - 1) as f64;
        prop_assert!((back - x).abs() <= bound + 1e-12);
    }

    #[test]
    fn ttfs_is_antitone(a in 0.0f64..=1.0, b in 0.0f64..=1.0, t in 1u32..2000) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(encode_ttfs(hi, t).unwrap() <= encode_ttfs(lo, t).unwrap());
    }

    #[test]
    fn mask_dense_round_trip(bits in prop::collection::vec(any::<bool>(), 1..80), cols in 1usize..9) {
        let rows = bits.len().div_ceil(cols);
        let dense = Array2::from_shape_fn((rows, cols), |(i, j)| bits.get(i * cols + j).copied().unwrap_or(false));
        let mask = Mask::from_dense(&dense);
        prop_assert_eq!(mask.to_dense(), dense.clone());
        prop_assert_eq!(mask.n_synapses(), dense.iter().filter(|&&b| b).count());
    }

    #[test]
    fn pbln_has_zero_mean(x in prop::collection::vec(-100.0f64..100.0, 2..50)) {
        let y = pbln_normalize(&x, 1e-9).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        prop_assert!(mean.abs() < 1e-9);
        let var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        prop_assert!(var <= 1.0 + 1e-9);
    }

    #[test]
    fn lif_subthreshold_stays_between_start_and_asymptote(v0 in -1.0f64..0.9, i_in in -1.0f64..0.9) {
        let model = NeuronModel::Lif(LifParams::default());
        let mut s = NeuronState::at_potential(v0);
        let (lo, hi) = if v0 < i_in { (v0, i_in) } else { (i_in, v0) };
        for _ in 0..200 {
            s = model.step(&s, i_in, 1.0).unwrap().state;
            prop_assert!(s.v >= lo - 1e-12 && s.v <= hi + 1e-12);
        }
    }
}
