//! One runner per experiment. Runners return in-memory artifacts; writing
//! them is left to [`crate::output`].

use serde_json::{json, Map, Value};
use spike_circuits::bdm::{build_bdm, BdmConfig, BdmOutcome};
use spike_circuits::column::{build_column, classify_presets, ColumnConfig, Layer};
use spike_circuits::digits::{assign_labels_and_score, build_unsupervised_layer, digit_set, CLASSES, PIXELS};
use spike_circuits::drosophila::{build_drosophila, max_jump, DrosophilaConfig, Pathway};
use spike_circuits::mouse::{build_mouse_brain, NeuronType};
use spike_core::network::Recorder;
use spike_core::neurons::classify_firing_pattern;
use spike_core::par;

use crate::config::{
    BdmParams, ColumnParams, DigitsParams, DrosophilaParams, Experiment, ExperimentConfig, MouseParams, Params,
    ProbeParams,
};
use crate::error::CliError;

pub const RASTER_HEADER: &str = "step,population,neuron";

/// Named series sharing one x axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Curve {
    pub x_name: String,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    /// Raster CSV with header [`RASTER_HEADER`].
    pub raster: Vec<u8>,
    pub metrics: Map<String, Value>,
    pub curve: Curve,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    log::info!("running {} with seed {}", cfg.experiment, cfg.seed);
    match (&cfg.params, cfg.experiment) {
        (Params::Drosophila(p), Experiment::DrosophilaPi) => drosophila(p, cfg.seed),
        (Params::Bdm(p), Experiment::BdmTask) => bdm(p, cfg.seed),
        (Params::Column(p), Experiment::ColumnL4) => column(p, cfg.steps_or(200), cfg.seed),
        (Params::Mouse(p), Experiment::MouseSpontaneous) => mouse(p, cfg.steps_or(1000), cfg.seed),
        (Params::Digits(p), Experiment::UnsupervisedDigits) => digits(p, cfg.seed),
        (Params::Probe(p), Experiment::NeuronProbe) => probe(p, cfg.steps_or(500)),
        (_, e) => unreachable!("params resolved for a different experiment than {e}"),
    }
}

fn raster_csv(rec: &Recorder) -> Vec<u8> {
    let mut out = Vec::new();
    rec.write_raster_csv(&mut out).expect("writing to memory");
    out
}

/// Sums per-step spike counts of `pops`.
fn summed_counts(rec: &Recorder, pops: &[spike_core::network::PopulationId]) -> Vec<f64> {
    let mut out = vec![0.0; rec.steps_recorded()];
    for &p in pops {
        for (o, &c) in out.iter_mut().zip(rec.spike_counts(p)) {
            *o += f64::from(c);
        }
    }
    out
}

fn steps_axis(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64).collect()
}

fn drosophila(p: &DrosophilaParams, seed: u64) -> Result<Artifacts, CliError> {
    let mut metrics = Map::new();
    let mut curve = Curve { x_name: "color_intensity".into(), ..Curve::default() };
    let mut slopes = Vec::new();
    let mut raster = Vec::new();
    let spacing = 1.0 / (p.points - 1) as f64;
    for &pathway in &p.pathways {
        let name = match pathway {
            Pathway::Linear => "linear",
            Pathway::Nonlinear => "nonlinear",
        };
        let mut circuit = build_drosophila(&DrosophilaConfig { pathway, ..p.circuit.clone() })?;
        circuit.train(seed)?;
        let sweep = circuit.sweep(p.points, seed)?;
        let pref: Vec<f64> = sweep.iter().map(|o| o.preference).collect();
        let jump = max_jump(&sweep);
        curve.x = sweep.iter().map(|o| o.color_intensity).collect();
        metrics.insert(format!("{name}_preference"), json!(pref));
        metrics.insert(format!("{name}_pi"), json!(sweep.iter().map(|o| o.pi).collect::<Vec<_>>()));
        metrics.insert(format!("{name}_max_jump"), json!(jump));
        metrics.insert(format!("{name}_max_slope"), json!(jump / spacing));
        metrics.insert(format!("{name}_preference_at_0"), json!(pref[0]));
        metrics.insert(format!("{name}_preference_at_1"), json!(pref[pref.len() - 1]));
        slopes.push(jump / spacing);
        curve.series.push((name.to_string(), pref));
        raster = raster_csv(&circuit.record_window(0.5, seed)?);
    }
    metrics.insert("color_intensity".into(), json!(curve.x));
    if let [linear, nonlinear] = slopes[..] {
        if p.pathways == [Pathway::Linear, Pathway::Nonlinear] && linear > 0.0 {
            metrics.insert("slope_ratio".into(), json!(nonlinear / linear));
        }
    }
    Ok(Artifacts { raster, metrics, curve })
}

/// Trains one circuit per (variant, replicate) pair in parallel.
pub fn bdm_outcomes(p: &BdmParams, seed: u64) -> Result<Vec<(BdmOutcome, u64, Option<Recorder>)>, CliError> {
    let reps = p.replicates as usize;
    let jobs = p.variants.len() * reps;
    par::map_range(jobs, |k| -> Result<_, CliError> {
        let variant = p.variants[k / reps];
        let s = seed.wrapping_add((k % reps) as u64);
        let mut circuit = build_bdm(&BdmConfig { neuron_variant: variant, ..p.circuit.clone() })?;
        let outcome = circuit.run(s)?;
        let rec = if k == 0 { Some(circuit.record_states(s)?) } else { None };
        Ok((outcome, s, rec))
    })
    .into_iter()
    .collect()
}

fn bdm(p: &BdmParams, seed: u64) -> Result<Artifacts, CliError> {
    let results = bdm_outcomes(p, seed)?;
    let mut metrics = Map::new();
    let episodes = p.circuit.episodes as usize;
    let mut curve = Curve { x_name: "episode".into(), x: steps_axis(episodes), series: Vec::new() };
    let mut raster = format!("{RASTER_HEADER}\n").into_bytes();
    for variant in &p.variants {
        let name = variant.as_str();
        let runs: Vec<&(BdmOutcome, u64, Option<Recorder>)> =
            results.iter().filter(|(o, _, _)| o.variant == *variant).collect();
        let collect = |f: &dyn Fn(&BdmOutcome) -> f64| runs.iter().map(|(o, _, _)| f(o)).collect::<Vec<f64>>();
        let (first, last) = if episodes == 0 {
            (Vec::new(), Vec::new())
        } else {
            (collect(&|o| o.first_fraction_mean(0.2)), collect(&|o| o.last_fraction_mean(0.2)))
        };
        metrics.insert(format!("{name}_first20_mean"), json!(first));
        metrics.insert(format!("{name}_last20_mean"), json!(last));
        let improved = first.iter().zip(&last).filter(|(a, b)| b > a).count();
        metrics.insert(format!("{name}_improved_runs"), json!(improved));
        metrics.insert(format!("{name}_spearman"), json!(collect(&|o| o.spearman())));
        metrics.insert(format!("{name}_network_decisions"), json!(collect(&|o| o.network_decisions as f64)));
        metrics.insert(format!("{name}_default_decisions"), json!(collect(&|o| o.default_decisions as f64)));
        for (o, s, rec) in runs {
            curve.series.push((format!("{name}_seed{s}"), o.episode_rewards.clone()));
            if let Some(rec) = rec {
                raster = raster_csv(rec);
            }
        }
    }
    metrics.insert("seeds".into(), json!((0..u64::from(p.replicates)).map(|k| seed.wrapping_add(k)).collect::<Vec<_>>()));
    metrics.insert("episodes".into(), json!(episodes));
    Ok(Artifacts { raster, metrics, curve })
}

fn column(p: &ColumnParams, steps: u64, seed: u64) -> Result<Artifacts, CliError> {
    let runs = par::map_range(p.replicates as usize, |k| -> Result<_, CliError> {
        let s = seed.wrapping_add(k as u64);
        let cfg = ColumnConfig { wiring_seed: p.circuit.wiring_seed.wrapping_add(s), ..p.circuit.clone() };
        let mut c = build_column(&cfg)?;
        let n = c.net.n_neurons();
        let layers: Vec<(Layer, Vec<_>)> = Layer::CORTICAL
            .iter()
            .chain(&[Layer::Thalamus, Layer::Rtn])
            .map(|&l| (l, c.populations.iter().filter(|q| q.layer == l).map(|q| q.id).collect()))
            .collect();
        let run = c.stimulate_l4(p.amplitude, p.pulse_steps, steps, s)?;
        Ok((run, n, layers))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut metrics = Map::new();
    let mut leads_all = true;
    let mut leads = Vec::new();
    for layer in Layer::CORTICAL {
        let lat: Vec<Option<u64>> = runs.iter().map(|(r, _, _)| r.latency(layer)).collect();
        metrics.insert(format!("latency_{}", layer.as_str()), json!(lat));
    }
    for (run, _, _) in &runs {
        let l4 = run.latency(Layer::L4);
        let ok = l4.is_some_and(|l4| {
            [Layer::L23, Layer::L5, Layer::L6].iter().all(|&l| run.latency(l).is_none_or(|t| l4 <= t))
        });
        leads_all &= ok;
        leads.push(ok);
    }
    metrics.insert("l4_leads".into(), json!(leads));
    metrics.insert("l4_leads_all".into(), json!(leads_all));
    metrics.insert("mean_rate_hz".into(), json!(runs.iter().map(|(r, n, _)| r.mean_rate_hz(*n)).collect::<Vec<_>>()));
    let labels = classify_presets(&p.circuit.presets, p.classify_drive, p.classify_duration_ms);
    for (class, pattern) in labels {
        metrics.insert(format!("pattern_{}", class.as_str()), json!(pattern.as_str()));
    }

    let (first, _, layers) = &runs[0];
    let mut curve = Curve { x_name: "step".into(), x: steps_axis(first.recorder.steps_recorded()), series: Vec::new() };
    for (layer, ids) in layers {
        curve.series.push((layer.as_str().to_string(), summed_counts(&first.recorder, ids)));
    }
    Ok(Artifacts { raster: raster_csv(&first.recorder), metrics, curve })
}

fn mouse(p: &MouseParams, steps: u64, seed: u64) -> Result<Artifacts, CliError> {
    let mut brain = build_mouse_brain(&p.circuit)?;
    let run = brain.run_spontaneous(steps, seed)?;
    let mut metrics = Map::new();
    let mut curve = Curve { x_name: "step".into(), x: steps_axis(run.recorder.steps_recorded()), series: Vec::new() };
    for t in NeuronType::ALL {
        let ids: Vec<_> = brain.populations.iter().filter(|q| q.kind == t).map(|q| q.id).collect();
        curve.series.push((t.as_str().to_string(), summed_counts(&run.recorder, &ids)));
    }
    for a in &run.activity {
        let name = a.kind.as_str();
        metrics.insert(format!("{name}_neurons"), json!(a.neurons));
        metrics.insert(format!("{name}_spikes"), json!(a.spikes));
        metrics.insert(format!("{name}_rate_hz"), json!(a.rate_hz));
    }
    metrics.insert("all_types_spiked".into(), json!(run.activity.iter().all(|a| a.spikes > 0)));
    metrics.insert("non_finite".into(), json!(run.non_finite));
    metrics.insert("areas".into(), json!(brain.connectome.areas.len()));
    metrics.insert("neurons".into(), json!(brain.net.n_neurons()));
    Ok(Artifacts { raster: raster_csv(&run.recorder), metrics, curve })
}

fn digits(p: &DigitsParams, seed: u64) -> Result<Artifacts, CliError> {
    let train = digit_set(p.train_per_class, p.flip, seed);
    let test = digit_set(p.test_per_class, p.flip, seed ^ 0x7E57_DA7A);
    let mut layer = build_unsupervised_layer(PIXELS, &p.layer, seed)?;
    let mut accuracy = vec![assign_labels_and_score(&mut layer.clone(), &train, &test)?];
    for _ in 0..p.epochs {
        layer.train(&train, 1)?;
        accuracy.push(assign_labels_and_score(&mut layer.clone(), &train, &test)?);
    }
    layer.assign_labels(&train)?;

    let mut raster = format!("{RASTER_HEADER}\n");
    let window = u64::from(p.layer.present_steps);
    for (k, s) in test.iter().take(CLASSES).enumerate() {
        let resp = layer.present(&s.pixels, false)?;
        let mut events: Vec<(u32, usize)> =
            resp.output.events().iter().enumerate().flat_map(|(n, ts)| ts.iter().map(move |&t| (t, n))).collect();
        events.sort_unstable();
        for (t, n) in events {
            raster.push_str(&format!("{},digits_output,{n}\n", k as u64 * window + u64::from(t)));
        }
    }

    let chance = 1.0 / CLASSES as f64;
    let trained = accuracy[accuracy.len() - 1];
    let mut metrics = Map::new();
    metrics.insert("accuracy_untrained".into(), json!(accuracy[0]));
    metrics.insert("accuracy_trained".into(), json!(trained));
    metrics.insert("accuracy_per_epoch".into(), json!(accuracy));
    metrics.insert("chance".into(), json!(chance));
    metrics.insert("train_items".into(), json!(train.len()));
    metrics.insert("test_items".into(), json!(test.len()));
    metrics.insert("labelled_cells".into(), json!(layer.labels.iter().filter(|l| l.is_some()).count()));
    let curve = Curve {
        x_name: "epoch".into(),
        x: steps_axis(accuracy.len()),
        series: vec![("accuracy".into(), accuracy)],
    };
    Ok(Artifacts { raster: raster.into_bytes(), metrics, curve })
}

fn probe(p: &ProbeParams, steps: u64) -> Result<Artifacts, CliError> {
    let mut state = p.model.initial_state();
    let mut trace = Vec::with_capacity(steps as usize);
    let mut spikes = Vec::new();
    for step in 0..steps {
        let current = if step >= p.onset_steps { p.current } else { 0.0 };
        let r = p.model.advance(&state, current, p.dt, p.substeps, 0)?;
        state = r.state;
        trace.push(state.v);
        if r.spiked {
            spikes.push(step);
        }
    }
    let onset = p.onset_steps.min(steps) as usize;
    let driven_ms = (steps as usize - onset) as f64 * p.dt;
    let driven_spikes: Vec<f64> =
        spikes.iter().filter(|&&s| s as usize >= onset).map(|&s| (s as usize - onset) as f64 * p.dt).collect();
    let pattern = classify_firing_pattern(&trace[onset..], p.dt, &driven_spikes);

    let mut metrics = Map::new();
    metrics.insert("spikes".into(), json!(spikes.len()));
    metrics.insert("driven_spikes".into(), json!(driven_spikes.len()));
    let rate = if driven_ms > 0.0 { driven_spikes.len() as f64 * 1000.0 / driven_ms } else { 0.0 };
    metrics.insert("driven_rate_hz".into(), json!(rate));
    metrics.insert("pattern".into(), json!(pattern.as_str()));
    metrics.insert("final_v".into(), json!(state.v));

    let mut raster = format!("{RASTER_HEADER}\n");
    for s in &spikes {
        raster.push_str(&format!("{s},probe,0\n"));
    }
    let curve = Curve { x_name: "step".into(), x: steps_axis(trace.len()), series: vec![("v".into(), trace)] };
    Ok(Artifacts { raster: raster.into_bytes(), metrics, curve })
}
