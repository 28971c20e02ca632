use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Algorithm, ScenarioConfig};
use super::metrics::{relative_error, support_hit_ratio, MetricsReport, MetricsRow};
use crate::distributed::{
    run_diomp, run_wdiomp, transmission_cost, NetworkTopology, ProtocolTrace, Scheme, WeightTable,
};
use crate::measurement::{observe, sample_pilots, MeasurementSet, PilotMatrix};
use crate::recovery::{omp, somp, RecoveryResult, SupportEstimate};
use crate::signal_model::{
    build_dictionary, sample_profile, sample_sparse_vectors, ArrayConfig, Dictionary,
    JointSparsityProfile, SparseVector, SupportSet,
};
use crate::{CMatrix, CVector, Error, Result};

/// SplitMix64 output function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream used for training length `t`, trial `trial`
/// and purpose `stream`: `mix(mix(mix(mix(master) ^ t) ^ trial) ^ stream)`
/// with the SplitMix64 output function. Stream 0 draws the signals, stream
/// `1 + p` the noise of SNR profile `p`.
pub fn substream_seed(master_seed: u64, t: usize, trial: usize, stream: u64) -> u64 {
    mix(mix(mix(mix(master_seed) ^ t as u64) ^ trial as u64) ^ stream)
}

fn substream(master_seed: u64, t: usize, trial: usize, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master_seed, t, trial, stream))
}

/// Seed stream reserved for the shared profile when profiles are not redrawn.
const FIXED_PROFILE_STREAM: u64 = u64::MAX;

/// Signals of one trial, shared by every SNR profile and algorithm.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub profile: JointSparsityProfile,
    /// `S_k` of every user.
    pub truths: Vec<SupportSet>,
    pub coefficients: Vec<SparseVector>,
    /// `h_k = Ψ w_k`.
    pub channels: Vec<CVector>,
    pub pilots: PilotMatrix,
    /// `A = X Ψ`.
    pub sensing: CMatrix,
}

/// Estimates produced by one algorithm on one trial.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub estimates: Vec<RecoveryResult>,
    pub trace: Option<ProtocolTrace>,
    pub weights: Option<WeightTable>,
}

/// A validated configuration with its dictionary and topology built.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    dict: Dictionary,
    topology: NetworkTopology,
    fixed_profile: Option<JointSparsityProfile>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let array = ArrayConfig::new(config.num_antennas, config.element_spacing)?;
        let dict = build_dictionary(&array, config.num_atoms, config.grid_policy)?;
        let topology = NetworkTopology::complete(config.num_users, config.include_self);
        let fixed_profile = if config.redraw_profile {
            None
        } else {
            let mut rng = substream(config.master_seed, 0, 0, FIXED_PROFILE_STREAM);
            Some(draw_profile(&config, &mut rng)?)
        };
        Ok(Self {
            config,
            dict,
            topology,
            fixed_profile,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn sparsity(&self) -> usize {
        self.config.sparsity()
    }

    /// Draws profile, coefficients and pilots of trial `trial` at length `t`.
    pub fn draw_signals(&self, t: usize, trial: usize) -> Result<TrialData> {
        let mut rng = substream(self.config.master_seed, t, trial, 0);
        let profile = match &self.fixed_profile {
            Some(p) => p.clone(),
            None => draw_profile(&self.config, &mut rng)?,
        };
        let coefficients = sample_sparse_vectors(&mut rng, &profile, self.config.value_law);
        let pilots = sample_pilots(&mut rng, t, self.config.num_antennas)?;
        let sensing = pilots.entries() * self.dict.atoms();
        Ok(TrialData {
            truths: coefficients.iter().map(|w| w.support.clone()).collect(),
            channels: coefficients.iter().map(|w| self.dict.synthesize(w)).collect(),
            profile,
            coefficients,
            pilots,
            sensing,
        })
    }

    /// Per-user SNR of profile `profile_idx` in this trial, after the
    /// optional random assignment.
    fn snr_assignment(&self, rng: &mut ChaCha8Rng, profile_idx: usize) -> Vec<f64> {
        let mut snr = self.config.snr_profiles[profile_idx].per_user(self.config.num_users);
        if self.config.shuffle_snr {
            snr.shuffle(rng);
        }
        snr
    }

    /// Noisy observations of `data` under SNR profile `profile_idx`.
    pub fn observe(&self, data: &TrialData, t: usize, trial: usize, profile_idx: usize) -> Result<MeasurementSet> {
        let mut rng = substream(self.config.master_seed, t, trial, 1 + profile_idx as u64);
        let snr = self.snr_assignment(&mut rng, profile_idx);
        observe(&mut rng, data.sensing.clone(), &data.coefficients, &snr)
    }

    pub fn run_algorithm(&self, algorithm: Algorithm, m: &MeasurementSet) -> Result<AlgorithmRun> {
        let a = &m.sensing_matrix;
        let ys = &m.per_user;
        let l = self.sparsity();
        Ok(match algorithm {
            Algorithm::Omp => AlgorithmRun {
                estimates: ys
                    .iter()
                    .map(|y| omp(a, y, l, &SupportEstimate::new()))
                    .collect::<Result<_>>()?,
                trace: None,
                weights: None,
            },
            Algorithm::Somp => AlgorithmRun {
                estimates: somp(a, ys, l)?.per_user,
                trace: None,
                weights: None,
            },
            Algorithm::Diomp => {
                let out = run_diomp(&self.topology, a, ys, l)?;
                AlgorithmRun {
                    estimates: out.results,
                    trace: Some(out.trace),
                    weights: None,
                }
            }
            Algorithm::Wdiomp => {
                let out = run_wdiomp(&self.topology, a, ys, l, self.config.forgetting_factor)?;
                AlgorithmRun {
                    estimates: out.results,
                    trace: Some(out.trace),
                    weights: out.weights,
                }
            }
        })
    }

    /// Bits one estimation round costs under `algorithm` at length `t`.
    pub fn bits(&self, algorithm: Algorithm, t: usize) -> u64 {
        let cfg = &self.config;
        let l = self.sparsity() as u64;
        let k = cfg.num_users as u64;
        match algorithm {
            Algorithm::Omp => 0,
            Algorithm::Somp => transmission_cost(
                Scheme::CentralizedSomp,
                cfg.bits_per_sample,
                k,
                t as u64,
                cfg.num_atoms,
                l,
                0,
            ),
            Algorithm::Diomp | Algorithm::Wdiomp => {
                let degree = self.topology.uniform_transmit_degree().unwrap_or(0) as u64;
                transmission_cost(Scheme::DiompFamily, cfg.bits_per_sample, k, t as u64, cfg.num_atoms, l, degree)
            }
        }
    }

    /// Distinct SNR levels of a profile, in first-appearance order.
    fn snr_levels(&self, profile_idx: usize) -> Vec<f64> {
        let mut levels: Vec<f64> = Vec::new();
        for s in self.config.snr_profiles[profile_idx].per_user(self.config.num_users) {
            if !levels.contains(&s) {
                levels.push(s);
            }
        }
        levels
    }
}

fn draw_profile(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<JointSparsityProfile> {
    sample_profile(
        rng,
        cfg.num_atoms,
        cfg.global_sparsity,
        &cfg.groups,
        cfg.num_users,
        cfg.overlap_policy,
    )
}

/// Per-user scores of one algorithm on one trial.
struct UserScores {
    snr_db: Vec<f64>,
    hit: Vec<f64>,
    nmse: Vec<f64>,
}

fn score_trial(scenario: &Scenario, t: usize, trial: usize) -> Result<Vec<Vec<UserScores>>> {
    let data = scenario.draw_signals(t, trial)?;
    let dict = scenario.dictionary();
    let mut per_profile = Vec::with_capacity(scenario.config.snr_profiles.len());
    for p in 0..scenario.config.snr_profiles.len() {
        let m = scenario.observe(&data, t, trial, p)?;
        let mut per_alg = Vec::with_capacity(scenario.config.algorithms.len());
        for &alg in &scenario.config.algorithms {
            let run = scenario.run_algorithm(alg, &m)?;
            let mut hit = Vec::with_capacity(run.estimates.len());
            let mut nmse = Vec::with_capacity(run.estimates.len());
            for (k, est) in run.estimates.iter().enumerate() {
                hit.push(support_hit_ratio(&est.support, &data.truths[k], k)?);
                let h_hat = dict.atoms() * est.dense(dict.num_atoms());
                nmse.push(relative_error(&h_hat, &data.channels[k], k)?);
            }
            per_alg.push(UserScores {
                snr_db: m.snr_db.clone(),
                hit,
                nmse,
            });
        }
        per_profile.push(per_alg);
    }
    Ok(per_profile)
}

#[derive(Default, Clone, Copy)]
struct Accumulator {
    hit: f64,
    nmse: f64,
    count: usize,
}

impl Accumulator {
    fn add(&mut self, hit: f64, nmse: f64) {
        self.hit += hit;
        self.nmse += nmse;
        self.count += 1;
    }
}

/// Runs every configured algorithm on every trial of every training length
/// and aggregates ASCE, NMSE and bit cost.
///
/// Rows are ordered by `T`, then SNR profile, then algorithm. Profiles with
/// several SNR levels get an extra row per level, tagged `<tag>@<snr>dB`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<MetricsReport> {
    let scenario = Scenario::new(config.clone())?;
    let cfg = scenario.config();
    let mut report = MetricsReport {
        scenario: cfg.name.clone(),
        rows: Vec::new(),
    };
    for &t in &cfg.t_list {
        let trials: Vec<Vec<Vec<UserScores>>> = (0..cfg.trials)
            .into_par_iter()
            .map(|m| score_trial(&scenario, t, m))
            .collect::<Result<_>>()?;
        for (p, profile) in cfg.snr_profiles.iter().enumerate() {
            let levels = scenario.snr_levels(p);
            for (ai, &alg) in cfg.algorithms.iter().enumerate() {
                let mut overall = Accumulator::default();
                let mut by_level = vec![Accumulator::default(); levels.len()];
                for trial in &trials {
                    let s = &trial[p][ai];
                    for k in 0..s.hit.len() {
                        overall.add(s.hit[k], s.nmse[k]);
                        let level = levels
                            .iter()
                            .position(|&l| l == s.snr_db[k])
                            .ok_or_else(|| Error::Config("SNR level vanished".into()))?;
                        by_level[level].add(s.hit[k], s.nmse[k]);
                    }
                }
                let bits = scenario.bits(alg, t);
                let row = |tag: String, acc: Accumulator| MetricsRow {
                    scenario: cfg.name.clone(),
                    algorithm: alg.name().to_owned(),
                    t,
                    snr_tag: tag,
                    asce: 1.0 - acc.hit / acc.count as f64,
                    nmse: acc.nmse / acc.count as f64,
                    bits,
                    trials: cfg.trials,
                };
                report.rows.push(row(profile.tag.clone(), overall));
                if levels.len() > 1 {
                    for (level, acc) in levels.iter().zip(by_level) {
                        report.rows.push(row(format!("{}@{}dB", profile.tag, level), acc));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Writes the WDiOMP or DiOMP protocol trace of the first `trials` trials at
/// length `t` as JSON lines.
pub fn write_traces<W: std::io::Write>(
    config: &ScenarioConfig,
    algorithm: Algorithm,
    t: usize,
    profile_idx: usize,
    trials: usize,
    out: &mut W,
) -> Result<()> {
    if !matches!(algorithm, Algorithm::Diomp | Algorithm::Wdiomp) {
        return Err(Error::Config(format!("{algorithm} has no cooperation trace")));
    }
    if profile_idx >= config.snr_profiles.len() {
        return Err(Error::Config(format!("no SNR profile #{profile_idx}")));
    }
    let scenario = Scenario::new(config.clone())?;
    for trial in 0..trials {
        let data = scenario.draw_signals(t, trial)?;
        let m = scenario.observe(&data, t, trial, profile_idx)?;
        let run = scenario.run_algorithm(algorithm, &m)?;
        let trace = run.trace.expect("cooperative algorithms record a trace");
        trace.write_jsonl(trial, out).map_err(|source| Error::Io {
            path: "<trace output>".into(),
            source,
        })?;
    }
    Ok(())
}
