//! Clock-driven network of neuron populations joined by masked projections.
//!
//! One call to [`Network::step`] advances every population by one tick of
//! `dt` ms in this order: deliver spikes due this tick, sum synaptic and
//! external currents, advance neurons, queue new spikes, apply plasticity.
//! Random draws come from one ChaCha stream per population, so results are
//! identical for any number of worker threads.

mod mask;
mod population;
mod projection;
mod readout;
mod recorder;
mod schedule;

use std::collections::HashMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::NetworkError;
use crate::neurons::NeuronState;
use crate::par;

pub use mask::Mask;
pub use population::{Background, PopulationId, PopulationModel, PopulationSpec, ProjectionId};
pub use projection::{Plasticity, ProjectionInfo, ProjectionSpec, Sign, Weights};
pub use readout::{wta_readout, WtaOutcome, WtaStatus};
pub use recorder::{RecordConfig, Recorder, SpikeEvent, VoltageSample};
pub use schedule::{Drive, Schedule, Stimulus};

use projection::Projection;

#[derive(Debug, Clone)]
struct PopulationState {
    neurons: Vec<NeuronState>,
    /// External current queued for the next tick.
    injected: Vec<f64>,
    /// Filtered synaptic current (only used when `synaptic_tau > 0`).
    synaptic: Vec<f64>,
    /// Per-neuron source rate override for the next tick.
    rate_override: Vec<Option<f64>>,
    base_rate: f64,
    forced: Vec<u32>,
    spikes: Vec<u32>,
    spiked: Vec<bool>,
    rng: ChaCha8Rng,
}

impl PopulationState {
    fn new(spec: &PopulationSpec, id: usize, seed: u64) -> Self {
        let init = match spec.model {
            PopulationModel::Neuron(m) => m.initial_state(),
            PopulationModel::Source { .. } => NeuronState::default(),
        };
        let base_rate = match spec.model {
            PopulationModel::Source { rate_hz } => rate_hz,
            PopulationModel::Neuron(_) => 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id as u64);
        Self {
            neurons: vec![init; spec.size],
            injected: vec![0.0; spec.size],
            synaptic: vec![0.0; spec.size],
            rate_override: vec![None; spec.size],
            base_rate,
            forced: Vec::new(),
            spikes: Vec::new(),
            spiked: vec![false; spec.size],
            rng,
        }
    }
}

fn poisson_count<R: Rng>(rng: &mut R, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    Poisson::new(lambda).map_or(0.0, |d| d.sample(rng))
}

#[derive(Debug, Clone)]
pub struct Network {
    dt: f64,
    specs: Vec<PopulationSpec>,
    index: HashMap<String, usize>,
    projections: Vec<Projection>,
    /// Projection indices grouped by postsynaptic population.
    incoming: Vec<Vec<usize>>,
    state: Vec<PopulationState>,
    step: u64,
    seed: u64,
}

impl Network {
    /// Empty network with tick length `dt` ms.
    pub fn new(dt: f64) -> Result<Self, NetworkError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NetworkError::InvalidParams { param: "dt", constraint: "dt > 0" });
        }
        Ok(Self {
            dt,
            specs: Vec::new(),
            index: HashMap::new(),
            projections: Vec::new(),
            incoming: Vec::new(),
            state: Vec::new(),
            step: 0,
            seed: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn add_population(&mut self, spec: PopulationSpec) -> Result<PopulationId, NetworkError> {
        if self.index.contains_key(&spec.name) {
            return Err(NetworkError::DuplicatePopulation(spec.name));
        }
        if spec.size == 0 {
            return Err(NetworkError::EmptyPopulation(spec.name));
        }
        match spec.model {
            PopulationModel::Neuron(m) => m.validate()?,
            PopulationModel::Source { rate_hz } => {
                if !(rate_hz >= 0.0 && rate_hz.is_finite()) {
                    return Err(NetworkError::InvalidParams { param: "rate_hz", constraint: "finite rate >= 0" });
                }
            }
        }
        if !spec.input_gain.is_finite() || !spec.bias.is_finite() {
            return Err(NetworkError::InvalidParams { param: "input_gain", constraint: "finite gain and bias" });
        }
        if !(spec.synaptic_tau >= 0.0 && spec.synaptic_tau.is_finite()) {
            return Err(NetworkError::InvalidParams { param: "synaptic_tau", constraint: "finite tau >= 0" });
        }
        if let Some(bg) = spec.background {
            if !(bg.rate_hz >= 0.0 && bg.rate_hz.is_finite() && bg.weight.is_finite()) {
                return Err(NetworkError::InvalidParams {
                    param: "background",
                    constraint: "finite rate >= 0 and finite weight",
                });
            }
        }
        let id = self.specs.len();
        self.state.push(PopulationState::new(&spec, id, self.seed));
        self.index.insert(spec.name.clone(), id);
        self.specs.push(spec);
        self.incoming.push(Vec::new());
        Ok(PopulationId(id))
    }

    pub fn connect(&mut self, spec: ProjectionSpec) -> Result<ProjectionId, NetworkError> {
        let pre = self.check_pop(spec.pre)?;
        let post = self.check_pop(spec.post)?;
        let proj = Projection::build(spec, pre.size, post.size)?;
        let id = self.projections.len();
        self.incoming[proj.post].push(id);
        self.projections.push(proj);
        Ok(ProjectionId(id))
    }

    /// Recurrent all-to-all inhibition within `pop` (no self-connections),
    /// every synapse weighing `-strength`.
    pub fn lateral_inhibit(&mut self, pop: PopulationId, strength: f64) -> Result<ProjectionId, NetworkError> {
        let n = self.check_pop(pop)?.size;
        self.connect(
            ProjectionSpec::new(pop, pop, Mask::all_but_self(n), Weights::Constant(-strength.abs())).inhibitory(),
        )
    }

    fn check_pop(&self, id: PopulationId) -> Result<&PopulationSpec, NetworkError> {
        self.specs.get(id.0).ok_or_else(|| NetworkError::UnknownPopulation(format!("#{}", id.0)))
    }

    fn proj(&self, id: ProjectionId) -> Result<&Projection, NetworkError> {
        self.projections.get(id.0).ok_or(NetworkError::UnknownProjection(id.0))
    }

    pub fn population_id(&self, name: &str) -> Result<PopulationId, NetworkError> {
        self.index
            .get(name)
            .map(|&i| PopulationId(i))
            .ok_or_else(|| NetworkError::UnknownPopulation(name.to_owned()))
    }

    pub fn populations(&self) -> &[PopulationSpec] {
        &self.specs
    }

    pub fn population(&self, id: PopulationId) -> &PopulationSpec {
        &self.specs[id.0]
    }

    pub fn size(&self, id: PopulationId) -> usize {
        self.specs[id.0].size
    }

    pub fn n_neurons(&self) -> usize {
        self.specs.iter().map(|s| s.size).sum()
    }

    pub fn n_projections(&self) -> usize {
        self.projections.len()
    }

    /// Every projection in creation order.
    pub fn projections(&self) -> impl Iterator<Item = ProjectionInfo> + '_ {
        self.projections.iter().enumerate().map(|(id, p)| ProjectionInfo {
            id: ProjectionId(id),
            pre: PopulationId(p.pre),
            post: PopulationId(p.post),
            sign: p.sign,
            delay: p.delay,
            plasticity: p.plasticity,
            n_synapses: p.weights.len(),
        })
    }

    /// Projections from `pre` onto `post`.
    pub fn projections_between(&self, pre: PopulationId, post: PopulationId) -> Vec<ProjectionInfo> {
        self.projections().filter(|p| p.pre == pre && p.post == post).collect()
    }

    pub fn n_synapses(&self) -> usize {
        self.projections.iter().map(|p| p.weights.len()).sum()
    }

    pub fn mask(&self, id: ProjectionId) -> Result<&Mask, NetworkError> {
        Ok(&self.proj(id)?.mask)
    }

    /// Synaptic weights in mask order.
    pub fn weights(&self, id: ProjectionId) -> Result<&[f64], NetworkError> {
        Ok(&self.proj(id)?.weights)
    }

    pub fn eligibility(&self, id: ProjectionId) -> Result<&[f64], NetworkError> {
        Ok(self.proj(id)?.eligibility())
    }

    /// Dense `(n_pre x n_post)` view with zeros where no synapse exists.
    pub fn weight_matrix(&self, id: ProjectionId) -> Result<Array2<f64>, NetworkError> {
        let p = self.proj(id)?;
        let mut out = Array2::zeros(p.mask.shape());
        for i in 0..p.mask.shape().0 {
            for (syn, &j) in p.mask.row_range(i).zip(p.mask.row(i)) {
                out[[i, j as usize]] = p.weights[syn];
            }
        }
        Ok(out)
    }

    pub fn set_weights(&mut self, id: ProjectionId, weights: Vec<f64>) -> Result<(), NetworkError> {
        let p = self.projections.get_mut(id.0).ok_or(NetworkError::UnknownProjection(id.0))?;
        if weights.len() != p.weights.len() {
            return Err(NetworkError::ShapeMismatch {
                what: "weights vs mask synapses",
                expected: (p.weights.len(), 1),
                got: (weights.len(), 1),
            });
        }
        if let Some(&bad) = weights.iter().find(|&&w| !p.sign.admits(w) || !w.is_finite()) {
            return Err(NetworkError::SignViolation { sign: p.sign.as_str(), weight: bad });
        }
        p.weights = weights;
        Ok(())
    }

    /// Reinitialises neuron state, random streams, traces and in-flight
    /// spikes. Weights are kept.
    pub fn reset(&mut self, seed: u64) {
        self.seed = seed;
        self.step = 0;
        self.state = self
            .specs
            .iter()
            .enumerate()
            .map(|(id, spec)| PopulationState::new(spec, id, seed))
            .collect();
        self.projections.iter_mut().for_each(Projection::reset);
    }

    /// Steps completed since the last reset.
    pub fn current_step(&self) -> u64 {
        self.step
    }

    /// Adds `current` to every neuron of `pop` for the next tick only.
    pub fn inject(&mut self, pop: PopulationId, current: f64) {
        self.state[pop.0].injected.iter_mut().for_each(|x| *x += current);
    }

    pub fn inject_neuron(&mut self, pop: PopulationId, neuron: usize, current: f64) {
        self.state[pop.0].injected[neuron] += current;
    }

    /// Makes source neuron `neuron` of `pop` spike on the next tick.
    pub fn force_spike(&mut self, pop: PopulationId, neuron: usize) -> Result<(), NetworkError> {
        let spec = self.check_pop(pop)?;
        if neuron >= spec.size {
            return Err(NetworkError::RangeOutOfBounds {
                population: spec.name.clone(),
                start: neuron,
                end: neuron + 1,
                size: spec.size,
            });
        }
        if !spec.is_source() {
            return Err(NetworkError::InvalidParams {
                param: "force_spike",
                constraint: "target must be a source population",
            });
        }
        self.state[pop.0].forced.push(neuron as u32);
        Ok(())
    }

    /// Sets the persistent Poisson rate of a source population.
    pub fn set_source_rate(&mut self, pop: PopulationId, rate_hz: f64) {
        self.state[pop.0].base_rate = rate_hz.max(0.0);
    }

    /// Overrides the source rate of neurons `start..end` for the next tick.
    pub fn drive_rate(&mut self, pop: PopulationId, start: usize, end: usize, rate_hz: f64) {
        for r in &mut self.state[pop.0].rate_override[start..end] {
            *r = Some(rate_hz.max(0.0));
        }
    }

    /// Indices of neurons in `pop` that spiked during the last tick.
    pub fn spikes(&self, pop: PopulationId) -> &[u32] {
        &self.state[pop.0].spikes
    }

    pub fn states(&self, pop: PopulationId) -> &[NeuronState] {
        &self.state[pop.0].neurons
    }

    pub fn potentials(&self, pop: PopulationId) -> Vec<f64> {
        self.state[pop.0].neurons.iter().map(|s| s.v).collect()
    }

    /// Applies `gain * reward * eligibility` to every reward-modulated
    /// projection.
    pub fn deliver_reward(&mut self, reward: f64) {
        for p in &mut self.projections {
            p.reward(reward);
        }
    }

    /// Advances the network by one tick.
    pub fn step(&mut self) -> Result<(), NetworkError> {
        let dt = self.dt;
        let step = self.step;

        let arrivals: Vec<Vec<(u32, f64)>> = self.projections.iter_mut().map(Projection::take_arrivals).collect();
        let projections = &self.projections;
        let incoming = &self.incoming;
        let specs = &self.specs;

        let results = par::map_each_mut(&mut self.state, |k, st| {
            let spec = &specs[k];
            let injected = std::mem::replace(&mut st.injected, vec![0.0; spec.size]);
            let mut input = vec![0.0; spec.size];
            for &pi in &incoming[k] {
                projections[pi].deliver(&arrivals[pi], &mut input);
            }
            let overrides = std::mem::replace(&mut st.rate_override, vec![None; spec.size]);
            let forced = std::mem::take(&mut st.forced);
            st.spiked.iter_mut().for_each(|s| *s = false);
            st.spikes.clear();

            match spec.model {
                PopulationModel::Source { .. } => {
                    for (n, over) in overrides.iter().enumerate() {
                        let rate = over.unwrap_or(st.base_rate);
                        if rate > 0.0 && st.rng.random::<f64>() < rate * dt / 1000.0 {
                            st.spiked[n] = true;
                        }
                    }
                    for n in forced {
                        st.spiked[n as usize] = true;
                    }
                }
                PopulationModel::Neuron(model) => {
                    if let Some(bg) = spec.background {
                        let lambda = bg.rate_hz * dt / 1000.0;
                        for x in input.iter_mut() {
                            *x += bg.weight * poisson_count(&mut st.rng, lambda);
                        }
                    }
                    if spec.synaptic_tau > 0.0 {
                        let keep = (-dt / spec.synaptic_tau).exp();
                        for (syn, x) in st.synaptic.iter_mut().zip(input.iter_mut()) {
                            *syn = keep * *syn + (1.0 - keep) * *x;
                            *x = *syn;
                        }
                    }
                    for (x, inj) in input.iter_mut().zip(&injected) {
                        *x += inj;
                    }
                    let gain = spec.input_gain;
                    let bias = spec.bias;
                    let outcome = par::map_mut(&mut st.neurons, |n, s| {
                        let r = model.advance(s, gain * (input[n] + bias), dt, spec.substeps, spec.refractory_steps)?;
                        *s = r.state;
                        Ok(r.spiked)
                    });
                    for (n, r) in outcome.into_iter().enumerate() {
                        match r {
                            Ok(spiked) => st.spiked[n] = spiked,
                            Err(source) => {
                                return Err(NetworkError::Neuron { population: spec.name.clone(), neuron: n, source })
                            }
                        }
                    }
                }
            }
            st.spikes.extend(st.spiked.iter().enumerate().filter(|(_, &s)| s).map(|(n, _)| n as u32));
            Ok(())
        });
        results.into_iter().collect::<Result<(), _>>()?;

        let state = &self.state;
        par::map_each_mut(&mut self.projections, |_, p| {
            p.emit(&state[p.pre].spikes, step, dt);
            p.learn(&state[p.pre].spiked, &state[p.post].spiked, dt);
        });
        self.step += 1;
        Ok(())
    }

    /// Resets with `seed`, then runs `steps` ticks under `schedule`,
    /// recording spike counts and the full raster.
    pub fn run(&mut self, steps: u64, schedule: &Schedule, seed: u64) -> Result<Recorder, NetworkError> {
        let mut rec = Recorder::new(RecordConfig::raster());
        self.run_with(steps, schedule, seed, &mut rec)?;
        Ok(rec)
    }

    pub fn run_with(
        &mut self,
        steps: u64,
        schedule: &Schedule,
        seed: u64,
        recorder: &mut Recorder,
    ) -> Result<(), NetworkError> {
        if steps == 0 {
            return Err(NetworkError::ZeroSteps);
        }
        let resolved = self.resolve(schedule)?;
        self.reset(seed);
        for _ in 0..steps {
            self.apply_stimuli(&resolved);
            self.step()?;
            recorder.observe(self);
        }
        Ok(())
    }

    fn resolve(&self, schedule: &Schedule) -> Result<Vec<(PopulationId, usize, usize, Stimulus)>, NetworkError> {
        schedule
            .stimuli
            .iter()
            .map(|s| {
                let id = self.population_id(&s.population)?;
                let spec = self.population(id);
                if s.onset > s.offset {
                    return Err(NetworkError::InvalidStimulus { onset: s.onset, offset: s.offset });
                }
                let (start, end) = s.neurons.unwrap_or((0, spec.size));
                if start > end || end > spec.size {
                    return Err(NetworkError::RangeOutOfBounds {
                        population: spec.name.clone(),
                        start,
                        end,
                        size: spec.size,
                    });
                }
                match (s.drive, spec.is_source()) {
                    (Drive::Current { amplitude }, false) if amplitude.is_finite() => {}
                    (Drive::Rate { hz }, true) if hz >= 0.0 && hz.is_finite() => {}
                    _ => {
                        return Err(NetworkError::InvalidParams {
                            param: "drive",
                            constraint: "finite current into neurons or non-negative rate into sources",
                        })
                    }
                }
                Ok((id, start, end, s.clone()))
            })
            .collect()
    }

    fn apply_stimuli(&mut self, stimuli: &[(PopulationId, usize, usize, Stimulus)]) {
        let step = self.step;
        for (id, start, end, s) in stimuli {
            if !s.active_at(step) {
                continue;
            }
            match s.drive {
                Drive::Current { amplitude } => {
                    for x in &mut self.state[id.0].injected[*start..*end] {
                        *x += amplitude;
                    }
                }
                Drive::Rate { hz } => self.drive_rate(*id, *start, *end, hz),
            }
        }
    }
}
