//! Two-photon polarization states and correlation experiments.
//!
//! Pair amplitudes are stored over `{|0⟩|0⟩, |0⟩|1⟩, |1⟩|0⟩, |1⟩|1⟩}` with
//! the left photon as the first factor. The spatial part of the pair state
//! is reduced to the left/right labels.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::qstate::{BlochVector, PureKet, C64};
use crate::seed;

const NORM_TOL: f64 = 1e-12;

/// Normalized two-photon polarization ket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairPolarizationState {
    amplitudes: [C64; 4],
    theta: f64,
    phi: f64,
    reference: BlochVector,
}

fn product(a: &PureKet, b: &PureKet) -> [C64; 4] {
    let (a0, a1) = a.amplitudes();
    let (b0, b1) = b.amplitudes();
    [a0 * b0, a0 * b1, a1 * b0, a1 * b1]
}

/// `(|n⟩|−n⟩ − |−n⟩|n⟩)/√2` and `(|n⟩|−n⟩ + |−n⟩|n⟩)/√2`.
fn singlet_triplet(n: BlochVector) -> Result<([C64; 4], [C64; 4])> {
    let plus = PureKet::from_bloch(n)?;
    let minus = PureKet::antipode_of(n)?;
    let pm = product(&plus, &minus);
    let mp = product(&minus, &plus);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = std::array::from_fn(|k| (pm[k] - mp[k]) * r);
    let triplet = std::array::from_fn(|k| (pm[k] + mp[k]) * r);
    Ok((singlet, triplet))
}

impl PairPolarizationState {
    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amplitudes
    }

    /// `(θ, φ, n)` the state was built from.
    pub fn parameters(&self) -> (f64, f64, BlochVector) {
        (self.theta, self.phi, self.reference)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &PairPolarizationState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Unnormalized state of the right photon after projecting the left one on `left`.
    fn project_left(&self, left: &PureKet) -> (C64, C64) {
        let (e0, e1) = left.amplitudes();
        let a = &self.amplitudes;
        (
            e0.conj() * a[0] + e1.conj() * a[2],
            e0.conj() * a[1] + e1.conj() * a[3],
        )
    }
}

/// The singlet built on direction `n`; the same state for every `n` up to a phase.
pub fn singlet_state(n: BlochVector) -> Result<PairPolarizationState> {
    pair_state(0.0, 0.0, n)
}

/// `cos θ |S⟩ + e^{iφ} sin θ |T⟩` with `|S⟩, |T⟩` built on direction `n`.
pub fn pair_state(theta: f64, phi: f64, n: BlochVector) -> Result<PairPolarizationState> {
    if !(theta.is_finite() && phi.is_finite()) {
        return Err(Error::out_of_range("theta/phi", "angles must be finite"));
    }
    let (s, t) = singlet_triplet(n)?;
    let cs = C64::from(theta.cos());
    let ct = C64::from_polar(theta.sin(), phi);
    let amplitudes = std::array::from_fn(|k| cs * s[k] + ct * t[k]);
    let state = PairPolarizationState {
        amplitudes,
        theta,
        phi,
        reference: n,
    };
    debug_assert!((state.norm() - 1.0).abs() <= NORM_TOL);
    Ok(state)
}

fn outcome_index(d: i8) -> usize {
    if d >= 0 {
        0
    } else {
        1
    }
}

fn eigenket(m: BlochVector, d: i8) -> Result<PureKet> {
    if d >= 0 {
        PureKet::from_bloch(m)
    } else {
        PureKet::antipode_of(m)
    }
}

/// `P(d_l, d_r)` for `d ∈ {+1, −1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointProbabilities {
    /// Row: left outcome (+1, −1); column: right outcome (+1, −1).
    pub table: [[f64; 2]; 2],
}

impl JointProbabilities {
    pub fn get(&self, d_l: i8, d_r: i8) -> f64 {
        self.table[outcome_index(d_l)][outcome_index(d_r)]
    }

    pub fn left_marginal(&self, d_l: i8) -> f64 {
        self.table[outcome_index(d_l)].iter().sum()
    }

    pub fn right_marginal(&self, d_r: i8) -> f64 {
        let c = outcome_index(d_r);
        self.table[0][c] + self.table[1][c]
    }

    pub fn left_mean(&self) -> f64 {
        self.left_marginal(1) - self.left_marginal(-1)
    }

    pub fn right_mean(&self) -> f64 {
        self.right_marginal(1) - self.right_marginal(-1)
    }

    /// `⟨M_l M_r⟩`.
    pub fn correlation(&self) -> f64 {
        self.table[0][0] + self.table[1][1] - self.table[0][1] - self.table[1][0]
    }

    pub fn covariance(&self) -> f64 {
        self.correlation() - self.left_mean() * self.right_mean()
    }

    pub fn total(&self) -> f64 {
        self.table.iter().flatten().sum()
    }
}

/// `P(d_l, d_r) = ⟨ψ| Π_{d_l}(m_l) ⊗ Π_{d_r}(m_r) |ψ⟩`.
pub fn joint_probabilities(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
) -> Result<JointProbabilities> {
    m_l.check_direction()?;
    m_r.check_direction()?;
    let mut table = [[0.0; 2]; 2];
    for d_l in [1i8, -1] {
        let left = eigenket(m_l, d_l)?;
        let (r0, r1) = state.project_left(&left);
        for d_r in [1i8, -1] {
            let (e0, e1) = eigenket(m_r, d_r)?.amplitudes();
            let amp = e0.conj() * r0 + e1.conj() * r1;
            table[outcome_index(d_l)][outcome_index(d_r)] = amp.norm_sqr();
        }
    }
    Ok(JointProbabilities { table })
}

/// `⟨M_l M_r⟩ − ⟨M_l⟩⟨M_r⟩`; equals `−m_l·m_r` for the singlet.
pub fn covariance_analytic(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
) -> Result<f64> {
    Ok(joint_probabilities(state, m_l, m_r)?.covariance())
}

/// Outcome of one pair event, left photon measured first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointOutcome {
    pub d_l: i8,
    pub d_r: i8,
    /// Right photon state after the left measurement.
    pub remote_state: PureKet,
}

pub fn sample_pair_event(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
    seed: u64,
) -> Result<JointOutcome> {
    m_l.check_direction()?;
    m_r.check_direction()?;
    let mut rng = seed::rng(seed);
    let plus = PureKet::from_bloch(m_l)?;
    let (r0, r1) = state.project_left(&plus);
    let p_plus = r0.norm_sqr() + r1.norm_sqr();
    let u: f64 = rng.random();
    let (d_l, (r0, r1)) = if u < p_plus {
        (1, (r0, r1))
    } else {
        (-1, state.project_left(&PureKet::antipode_of(m_l)?))
    };
    let remote_state = PureKet::normalized(r0, r1)?;
    let (e0, e1) = PureKet::from_bloch(m_r)?.amplitudes();
    let (a0, a1) = remote_state.amplitudes();
    let p_right = (e0.conj() * a0 + e1.conj() * a1).norm_sqr();
    let d_r = if rng.random::<f64>() < p_right { 1 } else { -1 };
    Ok(JointOutcome {
        d_l,
        d_r,
        remote_state,
    })
}

/// Runs `count` pair events; event `k` uses the seed derived from `(seed, k)`.
pub fn run_pair_events(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
    count: usize,
    seed: u64,
) -> Result<Vec<JointOutcome>> {
    m_l.check_direction()?;
    m_r.check_direction()?;
    (0..count)
        .into_par_iter()
        .map(|k| {
            sample_pair_event(
                state,
                m_l,
                m_r,
                seed::derive(seed, seed::stream::PAIR, k as u64),
            )
        })
        .collect()
}

/// Upper limit on the alternative-hypothesis probability after `n` matched events.
pub fn alternative_bound(n: usize) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// Summary of a correlation run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub m_l: BlochVector,
    pub m_r: BlochVector,
    pub events: usize,
    /// Mean of `d_l·d_r`.
    pub correlation: f64,
    /// `correlation − ⟨M_l⟩⟨M_r⟩` with the state's marginal means.
    pub covariance: f64,
    /// Covariance with the empirical marginal means.
    pub sample_covariance: f64,
    /// Events with `d_l = d_r`.
    pub matches: usize,
    pub mismatches: usize,
    /// `1/(N+1)` when every event matched.
    pub bound: Option<f64>,
}

impl CorrelationResult {
    /// Standard error of `correlation`: `√((1 − E²)/N)`.
    pub fn stderr(&self) -> f64 {
        ((1.0 - self.correlation * self.correlation).max(0.0) / self.events as f64).sqrt()
    }
}

pub fn summarize(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
    outcomes: &[JointOutcome],
) -> Result<CorrelationResult> {
    let n = outcomes.len();
    if n == 0 {
        return Err(Error::out_of_range("N", "at least one event is required"));
    }
    let probs = joint_probabilities(state, m_l, m_r)?;
    let nf = n as f64;
    let correlation = outcomes.iter().map(|o| (o.d_l * o.d_r) as f64).sum::<f64>() / nf;
    let mean_l = outcomes.iter().map(|o| o.d_l as f64).sum::<f64>() / nf;
    let mean_r = outcomes.iter().map(|o| o.d_r as f64).sum::<f64>() / nf;
    let matches = outcomes.iter().filter(|o| o.d_l == o.d_r).count();
    Ok(CorrelationResult {
        m_l,
        m_r,
        events: n,
        correlation,
        covariance: correlation - probs.left_mean() * probs.right_mean(),
        sample_covariance: correlation - mean_l * mean_r,
        matches,
        mismatches: n - matches,
        bound: (matches == n).then(|| alternative_bound(n)),
    })
}

pub fn correlation_experiment(
    state: &PairPolarizationState,
    m_l: BlochVector,
    m_r: BlochVector,
    count: usize,
    seed: u64,
) -> Result<CorrelationResult> {
    if count == 0 {
        return Err(Error::out_of_range("N", "at least one event is required"));
    }
    let outcomes = run_pair_events(state, m_l, m_r, count, seed)?;
    summarize(state, m_l, m_r, &outcomes)
}

/// Smallest series length `⌈6/P − 1⌉` that confirms the singlet correlation
/// properties with error probability at most `p`.
pub fn required_events(p: f64) -> Result<u64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::out_of_range("P", format!("{p} not in (0, 1)")));
    }
    // Absorb rounding in 6/P so exact quotients are not pushed up a step.
    Ok((6.0 / p - 1.0 - 1e-9).ceil() as u64)
}

/// Four CHSH settings `(a, a′, b, b′)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshSettings {
    pub a: BlochVector,
    pub a_prime: BlochVector,
    pub b: BlochVector,
    pub b_prime: BlochVector,
}

impl ChshSettings {
    /// `a, a′` at 0°, 90°; `b, b′` at 45°, 135° in the x–z plane.
    pub fn optimal_planar() -> Self {
        use std::f64::consts::FRAC_PI_4;
        Self {
            a: BlochVector::planar(0.0),
            a_prime: BlochVector::planar(2.0 * FRAC_PI_4),
            b: BlochVector::planar(FRAC_PI_4),
            b_prime: BlochVector::planar(3.0 * FRAC_PI_4),
        }
    }

    /// `(left, right)` pairs in the order `ab, ab′, a′b, a′b′`.
    pub fn pairs(&self) -> [(BlochVector, BlochVector); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
pub fn chsh_combination(e: [f64; 4]) -> f64 {
    e[0] - e[1] + e[2] + e[3]
}

/// Singlet prediction with `E = −m_l·m_r`.
pub fn chsh_singlet_analytic(settings: &ChshSettings) -> f64 {
    chsh_combination(settings.pairs().map(|(l, r)| -l.dot(&r)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChshResult {
    pub settings: ChshSettings,
    pub per_setting: Vec<CorrelationResult>,
    pub s: f64,
    pub stderr: f64,
}

/// Empirical CHSH value on the singlet, `count` events per setting pair.
pub fn chsh_experiment(settings: &ChshSettings, count: usize, seed: u64) -> Result<ChshResult> {
    let singlet = singlet_state(BlochVector::Z)?;
    let per_setting = settings
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, &(l, r))| {
            correlation_experiment(
                &singlet,
                l,
                r,
                count,
                seed::derive(seed, seed::stream::SETTING, i as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let e: [f64; 4] = std::array::from_fn(|i| per_setting[i].correlation);
    let stderr = per_setting
        .iter()
        .map(|c| c.stderr().powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ChshResult {
        settings: *settings,
        per_setting,
        s: chsh_combination(e),
        stderr,
    })
}

/// Largest `|S|` over all 16 local deterministic assignments
/// `A(a), A(a′), B(b), B(b′) ∈ {±1}`.
pub fn local_deterministic_chsh_max() -> f64 {
    let sign = |bit: u32| if bit == 0 { 1.0 } else { -1.0 };
    (0u32..16)
        .map(|mask| {
            let (a, a2, b, b2) = (
                sign(mask & 1),
                sign((mask >> 1) & 1),
                sign((mask >> 2) & 1),
                sign((mask >> 3) & 1),
            );
            chsh_combination([a * b, a * b2, a2 * b, a2 * b2]).abs()
        })
        .fold(0.0, f64::max)
}

pub const PAIR_CSV_HEADER: [&str; 5] = ["setting", "k", "d_l", "d_r", "match"];

/// Per-event CSV rows for one setting; `k` is one-based.
pub fn write_pair_csv<W: Write>(
    writer: &mut csv::Writer<W>,
    setting: usize,
    outcomes: &[JointOutcome],
) -> Result<()> {
    for (k, o) in outcomes.iter().enumerate() {
        writer.write_record([
            setting.to_string(),
            (k + 1).to_string(),
            o.d_l.to_string(),
            o.d_r.to_string(),
            u8::from(o.d_l == o.d_r).to_string(),
        ])?;
    }
    Ok(())
}
