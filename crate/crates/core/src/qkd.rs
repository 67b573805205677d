//! Key duplication over singlet pairs.
//!
//! Two agents share a pair of pre-coordinated bases; the right agent's
//! detectors are the antiparallel images of the left's, so on rounds where
//! both picked the same basis index the singlet gives equal raw outcomes.
//! Bits are `(d + 1)/2` on both sides, with no flip on the right.
//!
//! Reconciliation is basis sifting followed by disclosure of a random sample
//! to estimate the error rate. Interactive error correction is not modeled.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::epr::{sample_pair_event, singlet_state};
use crate::error::{Error, Result};
use crate::qstate::BlochVector;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One key-generating party.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurerAgent {
    pub side: Side,
    pub bases: [BlochVector; 2],
    pub seed: u64,
}

impl MeasurerAgent {
    /// Left agent with bases `(m₁, m₂)`.
    pub fn left(bases: [BlochVector; 2], seed: u64) -> Result<Self> {
        for b in &bases {
            b.check_direction()?;
        }
        Ok(Self {
            side: Side::Left,
            bases,
            seed,
        })
    }

    /// Right agent with bases `(−m₁, −m₂)`.
    pub fn right_of(left: &MeasurerAgent, seed: u64) -> Self {
        Self {
            side: Side::Right,
            bases: [-left.bases[0], -left.bases[1]],
            seed,
        }
    }

    /// Basis index (1 or 2) for `round`, a fair private coin.
    pub fn choose(&self, round: usize) -> u8 {
        let u = seed::uniform(seed::derive(self.seed, seed::stream::BASIS, round as u64));
        if u < 0.5 {
            1
        } else {
            2
        }
    }

    pub fn basis(&self, choice: u8) -> BlochVector {
        self.bases[usize::from(choice - 1)]
    }
}

/// Independent flip of each side's outcome with probability `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    epsilon: f64,
}

impl NoiseModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::out_of_range(
                "epsilon",
                format!("{epsilon} not in [0, 1]"),
            ));
        }
        Ok(Self { epsilon })
    }

    pub fn noiseless() -> Self {
        Self { epsilon: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Expected mismatch rate on sifted keys, `2ε(1−ε)`.
    pub fn expected_qber(&self) -> f64 {
        2.0 * self.epsilon * (1.0 - self.epsilon)
    }

    fn flips(&self, seed: u64) -> bool {
        self.epsilon > 0.0 && seed::rng(seed).random::<f64>() < self.epsilon
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    /// 1 or 2.
    pub choice: u8,
    pub bit: u8,
}

/// Runs `rounds` pair events. Each agent picks its basis with its own seed;
/// the pair outcome and the noise flips derive from the session seed.
pub fn run_session(
    rounds: usize,
    left: &MeasurerAgent,
    right: &MeasurerAgent,
    noise: &NoiseModel,
    seed: u64,
) -> Result<(Vec<RoundRecord>, Vec<RoundRecord>)> {
    if rounds == 0 {
        return Err(Error::out_of_range(
            "rounds",
            "at least one round is required",
        ));
    }
    if left.side != Side::Left || right.side != Side::Right {
        return Err(Error::Protocol(
            "agents must be one left and one right".into(),
        ));
    }
    let singlet = singlet_state(BlochVector::Z)?;
    let mut left_records = Vec::with_capacity(rounds);
    let mut right_records = Vec::with_capacity(rounds);
    for round in 0..rounds {
        let r = round as u64;
        let (cl, cr) = (left.choose(round), right.choose(round));
        let outcome = sample_pair_event(
            &singlet,
            left.basis(cl),
            right.basis(cr),
            seed::derive(seed, seed::stream::PAIR, r),
        )?;
        let mut bl = ((outcome.d_l + 1) / 2) as u8;
        let mut br = ((outcome.d_r + 1) / 2) as u8;
        if noise.flips(seed::derive(seed, seed::stream::NOISE_LEFT, r)) {
            bl ^= 1;
        }
        if noise.flips(seed::derive(seed, seed::stream::NOISE_RIGHT, r)) {
            br ^= 1;
        }
        left_records.push(RoundRecord {
            round,
            choice: cl,
            bit: bl,
        });
        right_records.push(RoundRecord {
            round,
            choice: cr,
            bit: br,
        });
    }
    Ok((left_records, right_records))
}

/// Key bits with the round each came from.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct SiftedKey {
    pub bits: Vec<u8>,
    pub rounds: Vec<usize>,
}

impl SiftedKey {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bits packed MSB-first into bytes, hex encoded.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self
            .bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)))
            })
            .collect();
        hex::encode(bytes)
    }
}

/// Keeps the rounds where both agents chose the same basis index.
pub fn sift(left: &[RoundRecord], right: &[RoundRecord]) -> Result<(SiftedKey, SiftedKey)> {
    if left.len() != right.len() {
        return Err(Error::Protocol(format!(
            "record lengths differ: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    let mut lk = SiftedKey::default();
    let mut rk = SiftedKey::default();
    for (l, r) in left.iter().zip(right) {
        if l.round != r.round {
            return Err(Error::Protocol(format!(
                "round {} paired with round {}",
                l.round, r.round
            )));
        }
        if l.choice == r.choice {
            lk.bits.push(l.bit);
            lk.rounds.push(l.round);
            rk.bits.push(r.bit);
            rk.rounds.push(r.round);
        }
    }
    Ok((lk, rk))
}

/// Error-rate estimate from the disclosed sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QberEstimate {
    pub qber: f64,
    pub sampled: usize,
    pub mismatches: usize,
    /// Rounds whose bits were disclosed, ascending.
    pub disclosed_rounds: Vec<usize>,
}

impl QberEstimate {
    /// Binomial standard error at rate `p` for this sample size.
    pub fn stderr_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.sampled as f64).sqrt()
    }
}

/// Discloses `round(len · sample_fraction)` seeded-random positions, reports
/// their mismatch fraction and removes them from both keys.
pub fn estimate_qber(
    left: &SiftedKey,
    right: &SiftedKey,
    sample_fraction: f64,
    seed: u64,
) -> Result<(QberEstimate, SiftedKey, SiftedKey)> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::Protocol("cannot estimate on an empty key".into()));
    }
    if left.rounds != right.rounds {
        return Err(Error::Protocol("keys are not aligned by round".into()));
    }
    if !(sample_fraction > 0.0 && sample_fraction < 1.0) {
        return Err(Error::out_of_range(
            "sample_fraction",
            format!("{sample_fraction} not in (0, 1)"),
        ));
    }
    let len = left.len();
    let sampled = (len as f64 * sample_fraction).round() as usize;
    if sampled == 0 {
        return Err(Error::out_of_range(
            "sample_fraction",
            format!("{sample_fraction} of {len} bits discloses nothing"),
        ));
    }
    let mut rng = seed::rng(seed::derive(seed, seed::stream::SAMPLE, 0));
    let mut positions = index::sample(&mut rng, len, sampled).into_vec();
    positions.sort_unstable();

    let mismatches = positions
        .iter()
        .filter(|&&i| left.bits[i] != right.bits[i])
        .count();
    let mut disclosed = vec![false; len];
    for &i in &positions {
        disclosed[i] = true;
    }
    let keep = |key: &SiftedKey| SiftedKey {
        bits: (0..len)
            .filter(|&i| !disclosed[i])
            .map(|i| key.bits[i])
            .collect(),
        rounds: (0..len)
            .filter(|&i| !disclosed[i])
            .map(|i| key.rounds[i])
            .collect(),
    };
    let estimate = QberEstimate {
        qber: mismatches as f64 / sampled as f64,
        sampled,
        mismatches,
        disclosed_rounds: positions.iter().map(|&i| left.rounds[i]).collect(),
    };
    Ok((estimate, keep(left), keep(right)))
}
