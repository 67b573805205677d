//! Experiment configs, built-in presets and the artifact-writing runner.
//!
//! A config is a JSON object tagged by `kind`:
//!
//! ```json
//! {"kind": "strategy", "seed": 7, "plan": {"preset": "strategy4", "K": 4000}}
//! {"kind": "qkd", "rounds": 10000, "epsilon": 0.05, "sample_fraction": 0.5,
//!  "bases": [[0,0,1],[1,0,0]], "seed": 1}
//! ```
//!
//! Each run writes a `summary.json` and a per-event CSV into the output
//! directory. Artifacts depend only on the config (seed included); wall-clock
//! time is kept out of them.
//!
//! Seeds: one master seed per experiment. Event `k` of a sampled stream uses
//! `seed::derive(master, stream, k)`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::detector::{
    build_joint_initial, decompose, recurrence_scan, sample_event, DetectorInit, DetectorModel,
    Evolution,
};
use crate::epr::{
    self, chsh_experiment, covariance_analytic, pair_state, required_events, run_pair_events,
    summarize, ChshSettings,
};
use crate::error::{Error, Result};
use crate::qkd::{estimate_qber, run_session, sift, MeasurerAgent, NoiseModel};
use crate::qstate::{pre_analyzer_state, BlochVector, Mat2};
use crate::seed;
use crate::strategy::{
    self, average_density, frequency_estimate, mean_observable, partition_by_observable,
    predicted_probabilities, run_strategy, PlanPair, Selector, StrategyPlan,
};

fn default_threshold() -> f64 {
    0.9
}

fn default_reference() -> BlochVector {
    BlochVector::Z
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Strategy(StrategyConfig),
    Dynamics(DynamicsConfig),
    Epr(EprConfig),
    Chsh(ChshConfig),
    Qkd(QkdConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyPreset {
    Strategy1,
    Strategy2,
    Strategy3,
    Strategy4,
}

/// Overrides for preset plans; unset fields take the preset defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<BlochVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<BlochVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<BlochVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<BlochVector>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetPlan {
    pub preset: StrategyPreset,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default)]
    pub parameters: PresetParameters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlanSpec {
    Pairs(Vec<PlanPair>),
    Preset(PresetPlan),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    #[serde(default)]
    pub seed: u64,
    pub plan: PlanSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonSpec {
    pub n: BlochVector,
    pub m: BlochVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    #[serde(default)]
    pub seed: u64,
    pub dimension: usize,
    pub omega: f64,
    pub g0: f64,
    pub t_i: f64,
    pub t_f: f64,
    pub detector_init: DetectorInit,
    /// Photon preparation `n` seen through analyzer direction `m`.
    pub photon: PhotonSpec,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Singlet,
    Pair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(rename = "type")]
    pub kind: PairKind,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "default_reference")]
    pub n: BlochVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub m_l: BlochVector,
    pub m_r: BlochVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprConfig {
    #[serde(default)]
    pub seed: u64,
    pub state: PairSpec,
    pub settings: Vec<SettingSpec>,
    #[serde(rename = "N")]
    pub n: usize,
    /// Error probability for which the required series length is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshConfig {
    #[serde(default)]
    pub seed: u64,
    pub a: BlochVector,
    pub a_prime: BlochVector,
    pub b: BlochVector,
    pub b_prime: BlochVector,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QkdConfig {
    #[serde(default)]
    pub seed: u64,
    pub rounds: usize,
    pub epsilon: f64,
    pub sample_fraction: f64,
    pub bases: [BlochVector; 2],
    /// Write the final keys as hex to `keys.txt`.
    #[serde(default)]
    pub hex_keys: bool,
}

fn unit(field: &str, v: &BlochVector) -> Result<()> {
    v.check_direction()
        .map_err(|e| Error::field(field, e.to_string()))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::field(field, format!("{v} must be positive")))
    }
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Strategy(_) => "strategy",
            ExperimentConfig::Dynamics(_) => "dynamics",
            ExperimentConfig::Epr(_) => "epr",
            ExperimentConfig::Chsh(_) => "chsh",
            ExperimentConfig::Qkd(_) => "qkd",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Strategy(c) => c.seed,
            ExperimentConfig::Dynamics(c) => c.seed,
            ExperimentConfig::Epr(c) => c.seed,
            ExperimentConfig::Chsh(c) => c.seed,
            ExperimentConfig::Qkd(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Strategy(c) => c.seed = seed,
            ExperimentConfig::Dynamics(c) => c.seed = seed,
            ExperimentConfig::Epr(c) => c.seed = seed,
            ExperimentConfig::Chsh(c) => c.seed = seed,
            ExperimentConfig::Qkd(c) => c.seed = seed,
        }
    }

    /// Checks every parameter against the target module's preconditions.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Strategy(c) => c.build_plan().map(|_| ()),
            ExperimentConfig::Dynamics(c) => {
                if c.dimension < 2 {
                    return Err(Error::field("dimension", "must be at least 2"));
                }
                for (name, v) in [
                    ("omega", c.omega),
                    ("g0", c.g0),
                    ("t_i", c.t_i),
                    ("t_f", c.t_f),
                ] {
                    if !v.is_finite() {
                        return Err(Error::field(name, "must be finite"));
                    }
                }
                if c.t_i >= c.t_f {
                    return Err(Error::field("t_f", "must exceed t_i"));
                }
                c.photon
                    .n
                    .check_pure()
                    .map_err(|e| Error::field("photon.n", e.to_string()))?;
                unit("photon.m", &c.photon.m)?;
                positive("dt", c.dt)?;
                if !(c.t_max.is_finite() && c.t_max > c.dt) {
                    return Err(Error::field("t_max", "must exceed dt"));
                }
                if !(c.threshold > 0.0 && c.threshold < 1.0) {
                    return Err(Error::field("threshold", "must lie in (0, 1)"));
                }
                Ok(())
            }
            ExperimentConfig::Epr(c) => {
                unit("state.n", &c.state.n)?;
                if !(c.state.theta.is_finite() && c.state.phi.is_finite()) {
                    return Err(Error::field("state.theta", "angles must be finite"));
                }
                if c.settings.is_empty() {
                    return Err(Error::field("settings", "at least one setting is required"));
                }
                for (i, s) in c.settings.iter().enumerate() {
                    unit(&format!("settings[{i}].m_l"), &s.m_l)?;
                    unit(&format!("settings[{i}].m_r"), &s.m_r)?;
                }
                if c.n == 0 {
                    return Err(Error::field("N", "must be at least 1"));
                }
                if let Some(p) = c.confidence {
                    if !(p > 0.0 && p < 1.0) {
                        return Err(Error::field("confidence", format!("{p} not in (0, 1)")));
                    }
                }
                Ok(())
            }
            ExperimentConfig::Chsh(c) => {
                unit("a", &c.a)?;
                unit("a_prime", &c.a_prime)?;
                unit("b", &c.b)?;
                unit("b_prime", &c.b_prime)?;
                if c.n == 0 {
                    return Err(Error::field("N", "must be at least 1"));
                }
                Ok(())
            }
            ExperimentConfig::Qkd(c) => {
                if c.rounds == 0 {
                    return Err(Error::field("rounds", "must be at least 1"));
                }
                if !(0.0..=1.0).contains(&c.epsilon) {
                    return Err(Error::field(
                        "epsilon",
                        format!("{} not in [0, 1]", c.epsilon),
                    ));
                }
                if !(c.sample_fraction > 0.0 && c.sample_fraction < 1.0) {
                    return Err(Error::field(
                        "sample_fraction",
                        format!("{} not in (0, 1)", c.sample_fraction),
                    ));
                }
                unit("bases[0]", &c.bases[0])?;
                unit("bases[1]", &c.bases[1])?;
                Ok(())
            }
        }
    }
}

impl StrategyConfig {
    pub fn build_plan(&self) -> Result<StrategyPlan> {
        match &self.plan {
            PlanSpec::Pairs(pairs) => {
                if pairs.is_empty() {
                    return Err(Error::field("plan", "at least one pair is required"));
                }
                for (i, p) in pairs.iter().enumerate() {
                    p.n.check_pure()
                        .map_err(|e| Error::field(&format!("plan[{i}].n"), e.to_string()))?;
                    unit(&format!("plan[{i}].m"), &p.m)?;
                }
                StrategyPlan::new(pairs.clone())
            }
            PlanSpec::Preset(generator) => {
                if generator.k == 0 {
                    return Err(Error::field("plan.K", "must be at least 1"));
                }
                let p = &generator.parameters;
                let check_n = |v: BlochVector| {
                    v.check_pure()
                        .map(|_| v)
                        .map_err(|e| Error::field("plan.parameters.n", e.to_string()))
                };
                let check_m = |field: &str, v: BlochVector| unit(field, &v).map(|_| v);
                match generator.preset {
                    StrategyPreset::Strategy1 => {
                        let n = check_n(p.n.unwrap_or(BlochVector::from_angles(
                            std::f64::consts::FRAC_PI_3,
                            0.0,
                        )))?;
                        let m = check_m("plan.parameters.m", p.m.unwrap_or(BlochVector::Z))?;
                        StrategyPlan::repeated(n, m, generator.k)
                    }
                    StrategyPreset::Strategy2 => {
                        let states = p.states.clone().unwrap_or_else(|| {
                            vec![
                                BlochVector::Z,
                                BlochVector::X,
                                BlochVector::Z,
                                BlochVector::Y,
                            ]
                        });
                        if states.is_empty() {
                            return Err(Error::field("plan.parameters.states", "empty"));
                        }
                        for (i, s) in states.iter().enumerate() {
                            s.check_pure().map_err(|e| {
                                Error::field(&format!("plan.parameters.states[{i}]"), e.to_string())
                            })?;
                        }
                        let m = check_m("plan.parameters.m", p.m.unwrap_or(BlochVector::Z))?;
                        StrategyPlan::cycled_states(&states, m, generator.k)
                    }
                    StrategyPreset::Strategy3 => {
                        let n = check_n(p.n.unwrap_or(BlochVector::from_angles(
                            std::f64::consts::FRAC_PI_3,
                            std::f64::consts::FRAC_PI_4,
                        )))?;
                        let m1 = check_m("plan.parameters.m", p.m.unwrap_or(BlochVector::Z))?;
                        let m2 = check_m("plan.parameters.m2", p.m2.unwrap_or(BlochVector::X))?;
                        StrategyPlan::alternating_observables(n, m1, m2, generator.k)
                    }
                    StrategyPreset::Strategy4 => {
                        StrategyPlan::four_state_two_observable(generator.k)
                    }
                }
            }
        }
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

pub const PRESETS: [&str; 8] = [
    "strategy1",
    "strategy2",
    "strategy3",
    "strategy4",
    "dynamics-d2",
    "epr-singlet",
    "chsh-optimal",
    "qkd-basic",
];

/// Built-in configuration by name (see [`PRESETS`]).
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let strategy = |preset, k| {
        ExperimentConfig::Strategy(StrategyConfig {
            seed: 1,
            plan: PlanSpec::Preset(PresetPlan {
                preset,
                k,
                parameters: PresetParameters::default(),
            }),
        })
    };
    Ok(match name {
        "strategy1" => strategy(StrategyPreset::Strategy1, 4000),
        "strategy2" => strategy(StrategyPreset::Strategy2, 4000),
        "strategy3" => strategy(StrategyPreset::Strategy3, 4000),
        "strategy4" => strategy(StrategyPreset::Strategy4, 4000),
        "dynamics-d2" => ExperimentConfig::Dynamics(DynamicsConfig {
            seed: 1,
            dimension: 2,
            omega: 0.0,
            g0: 1.0,
            t_i: 0.0,
            t_f: 100.0,
            detector_init: DetectorInit::Ground,
            photon: PhotonSpec {
                n: BlochVector::X,
                m: BlochVector::Z,
            },
            t_max: 3.0 * std::f64::consts::PI,
            dt: 0.01,
            threshold: 0.9,
        }),
        "epr-singlet" => {
            let m = BlochVector::Z;
            let x = BlochVector::X;
            ExperimentConfig::Epr(EprConfig {
                seed: 1,
                state: PairSpec {
                    kind: PairKind::Singlet,
                    theta: 0.0,
                    phi: 0.0,
                    n: BlochVector::Z,
                },
                settings: vec![
                    SettingSpec { m_l: m, m_r: -m },
                    SettingSpec { m_l: m, m_r: m },
                    SettingSpec { m_l: m, m_r: x },
                ],
                n: 10_000,
                confidence: Some(0.1),
            })
        }
        "chsh-optimal" => {
            let s = ChshSettings::optimal_planar();
            ExperimentConfig::Chsh(ChshConfig {
                seed: 1,
                a: s.a,
                a_prime: s.a_prime,
                b: s.b,
                b_prime: s.b_prime,
                n: 100_000,
            })
        }
        "qkd-basic" => ExperimentConfig::Qkd(QkdConfig {
            seed: 1,
            rounds: 10_000,
            epsilon: 0.0,
            sample_fraction: 0.25,
            bases: [BlochVector::Z, BlochVector::X],
            hex_keys: true,
        }),
        other => {
            return Err(Error::field(
                "preset",
                format!(
                    "unknown preset `{other}`; expected one of {}",
                    PRESETS.join(", ")
                ),
            ))
        }
    })
}

/// Outcome of [`run`]. `duration` is informational and not written to disk.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub summary: Value,
    pub duration: Duration,
    pub artifacts: Vec<PathBuf>,
}

/// `[[re, im], [re, im]]` rows.
pub fn matrix_json(m: &Mat2) -> Value {
    json!([
        [[m[(0, 0)].re, m[(0, 0)].im], [m[(0, 1)].re, m[(0, 1)].im]],
        [[m[(1, 0)].re, m[(1, 0)].im], [m[(1, 1)].re, m[(1, 1)].im]],
    ])
}

/// Runs the experiment and writes its artifacts into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    fs::create_dir_all(out_dir)?;
    let (body, mut artifacts) = match config {
        ExperimentConfig::Strategy(c) => run_strategy_experiment(c, out_dir),
        ExperimentConfig::Dynamics(c) => run_dynamics(c, out_dir),
        ExperimentConfig::Epr(c) => run_epr(c, out_dir),
        ExperimentConfig::Chsh(c) => run_chsh(c, out_dir),
        ExperimentConfig::Qkd(c) => run_qkd(c, out_dir),
    }
    .map_err(|e| e.context(format!("{} experiment", config.kind())))?;
    let summary = json!({
        "kind": config.kind(),
        "seed": config.seed(),
        "config": config,
        "results": body,
    });
    let summary_path = out_dir.join("summary.json");
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    artifacts.insert(0, summary_path);
    Ok(RunReport {
        config: config.clone(),
        summary,
        duration: start.elapsed(),
        artifacts,
    })
}

fn run_strategy_experiment(c: &StrategyConfig, out: &Path) -> Result<(Value, Vec<PathBuf>)> {
    let plan = c.build_plan()?;
    let outcomes = run_strategy(&plan, c.seed);
    let events = out.join("events.csv");
    strategy::write_csv(&plan, &outcomes, fs::File::create(&events)?)?;

    let stats = partition_by_observable(&plan, &outcomes)?;
    let probs = predicted_probabilities(&plan);
    let groups: Vec<Value> = stats
        .groups
        .iter()
        .map(|g| {
            let predicted =
                g.indices.iter().map(|&k| probs[k]).sum::<f64>() / g.indices.len() as f64;
            json!({
                "direction": g.direction,
                "events": g.indices.len(),
                "nu_plus": g.estimate.nu,
                "stderr": g.estimate.stderr,
                "predicted_plus": predicted,
                "average_density": matrix_json(g.average_density.matrix()),
                "average_density_eigenvalues": g.average_density.eigenvalues(),
                "predicted_mean": g.predicted_mean(),
            })
        })
        .collect();
    let all = average_density(&plan, Selector::All)?;
    let overall = frequency_estimate(outcomes.values(), 1)?;
    Ok((
        json!({
            "K": plan.len(),
            "nu_plus": overall.nu,
            "stderr": overall.stderr,
            "mean_observable": mean_observable(&plan).ok(),
            "average_density_all": matrix_json(all.matrix()),
            "groups": groups,
        }),
        vec![events],
    ))
}

fn run_dynamics(c: &DynamicsConfig, out: &Path) -> Result<(Value, Vec<PathBuf>)> {
    let model = DetectorModel::ladder(c.dimension, c.omega, c.g0, c.t_i, c.t_f, c.detector_init)?;
    let photon = pre_analyzer_state(c.photon.n, c.photon.m)?;
    let initial = build_joint_initial(&model, &photon)?;
    let evolution = Evolution::new(&model);
    let spectrum0 = initial.spectrum();
    let base = decompose(&initial);

    let path = out.join("dynamics.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "t",
        "p1",
        "lambda_norm",
        "lambda_frobenius",
        "trace_re",
        "purity",
    ])?;
    let steps = (c.t_max / c.dt).floor() as usize;
    let (mut trace_dev, mut spectrum_dev, mut p1_drift) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..=steps {
        let t = k as f64 * c.dt;
        let state = evolution.state_at(&initial, t)?;
        let dec = decompose(&state);
        let tr = state.trace();
        trace_dev = trace_dev.max((tr - 1.0).norm());
        spectrum_dev = state
            .spectrum()
            .iter()
            .zip(&spectrum0)
            .map(|(a, b)| (a - b).abs())
            .fold(spectrum_dev, f64::max);
        p1_drift = p1_drift.max((dec.p1 - base.p1).abs());
        w.write_record([
            t.to_string(),
            dec.p1.to_string(),
            dec.lambda_norm.to_string(),
            dec.lambda_frobenius.to_string(),
            tr.re.to_string(),
            state.purity().to_string(),
        ])?;
    }
    w.flush()?;

    let revivals = if base.lambda_norm > crate::detector::ABSENT_BRANCH {
        recurrence_scan(&model, &photon, c.t_max, c.dt, c.threshold)?
    } else {
        Vec::new()
    };
    let event = sample_event(
        c.photon.n,
        c.photon.m,
        seed::derive(c.seed, seed::stream::EVENT, 0),
    )?;
    Ok((
        json!({
            "p1": base.p1,
            "lambda_norm_initial": base.lambda_norm,
            "revivals": revivals,
            "max_trace_deviation": trace_dev,
            "max_spectrum_deviation": spectrum_dev,
            "max_p1_drift": p1_drift,
            "sample_event": {
                "outcome": event.outcome,
                "applied": event.applied,
                "hidden_seed": event.hidden_seed,
            },
        }),
        vec![path],
    ))
}

fn run_epr(c: &EprConfig, out: &Path) -> Result<(Value, Vec<PathBuf>)> {
    let state = match c.state.kind {
        PairKind::Singlet => epr::singlet_state(c.state.n)?,
        PairKind::Pair => pair_state(c.state.theta, c.state.phi, c.state.n)?,
    };
    let path = out.join("events.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(epr::PAIR_CSV_HEADER)?;
    let mut results = Vec::new();
    for (i, s) in c.settings.iter().enumerate() {
        let outcomes = run_pair_events(
            &state,
            s.m_l,
            s.m_r,
            c.n,
            seed::derive(c.seed, seed::stream::SETTING, i as u64),
        )?;
        epr::write_pair_csv(&mut w, i, &outcomes)?;
        let summary = summarize(&state, s.m_l, s.m_r, &outcomes)?;
        results.push(json!({
            "m_l": s.m_l,
            "m_r": s.m_r,
            "covariance_analytic": covariance_analytic(&state, s.m_l, s.m_r)?,
            "correlation": summary.correlation,
            "covariance": summary.covariance,
            "sample_covariance": summary.sample_covariance,
            "stderr": summary.stderr(),
            "matches": summary.matches,
            "mismatches": summary.mismatches,
            "bound": summary.bound,
        }));
    }
    w.flush()?;
    let required = c.confidence.map(required_events).transpose()?;
    Ok((
        json!({
            "N": c.n,
            "settings": results,
            "required_events": required,
        }),
        vec![path],
    ))
}

fn run_chsh(c: &ChshConfig, out: &Path) -> Result<(Value, Vec<PathBuf>)> {
    let settings = ChshSettings {
        a: c.a,
        a_prime: c.a_prime,
        b: c.b,
        b_prime: c.b_prime,
    };
    let result = chsh_experiment(&settings, c.n, c.seed)?;
    let singlet = epr::singlet_state(BlochVector::Z)?;

    let path = out.join("events.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(epr::PAIR_CSV_HEADER)?;
    for (i, &(l, r)) in settings.pairs().iter().enumerate() {
        // Same per-setting seeds as chsh_experiment.
        let outcomes = run_pair_events(
            &singlet,
            l,
            r,
            c.n,
            seed::derive(c.seed, seed::stream::SETTING, i as u64),
        )?;
        epr::write_pair_csv(&mut w, i, &outcomes)?;
    }
    w.flush()?;

    let correlations: Vec<f64> = result.per_setting.iter().map(|r| r.correlation).collect();
    Ok((
        json!({
            "N_per_setting": c.n,
            "correlations": correlations,
            "S": result.s,
            "stderr": result.stderr,
            "S_analytic": epr::chsh_singlet_analytic(&settings),
            "local_deterministic_max": epr::local_deterministic_chsh_max(),
        }),
        vec![path],
    ))
}

fn run_qkd(c: &QkdConfig, out: &Path) -> Result<(Value, Vec<PathBuf>)> {
    let left = MeasurerAgent::left(c.bases, seed::derive(c.seed, seed::stream::BASIS, 1))?;
    let right = MeasurerAgent::right_of(&left, seed::derive(c.seed, seed::stream::BASIS, 2));
    let noise = NoiseModel::new(c.epsilon)?;
    let (lr, rr) = run_session(c.rounds, &left, &right, &noise, c.seed)?;
    let (lk, rk) = sift(&lr, &rr)?;
    let (estimate, fl, fr) = estimate_qber(&lk, &rk, c.sample_fraction, c.seed)?;

    let path = out.join("rounds.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "round",
        "left_choice",
        "left_bit",
        "right_choice",
        "right_bit",
        "sifted",
        "disclosed",
    ])?;
    for (l, r) in lr.iter().zip(&rr) {
        let disclosed = estimate.disclosed_rounds.binary_search(&l.round).is_ok();
        w.write_record([
            l.round.to_string(),
            l.choice.to_string(),
            l.bit.to_string(),
            r.choice.to_string(),
            r.bit.to_string(),
            u8::from(l.choice == r.choice).to_string(),
            u8::from(disclosed).to_string(),
        ])?;
    }
    w.flush()?;
    let mut artifacts = vec![path];
    if c.hex_keys {
        let keys = out.join("keys.txt");
        fs::write(
            &keys,
            format!("left  {}\nright {}\n", fl.to_hex(), fr.to_hex()),
        )?;
        artifacts.push(keys);
    }
    Ok((
        json!({
            "rounds": c.rounds,
            "sifted_length": lk.len(),
            "qber": estimate.qber,
            "sampled": estimate.sampled,
            "mismatches": estimate.mismatches,
            "expected_qber": noise.expected_qber(),
            "final_key_length": fl.len(),
            "keys_equal": fl == fr,
            "bit_convention": "bit = (d + 1)/2 on both sides; right detectors antiparallel, no flip",
        }),
        artifacts,
    ))
}
