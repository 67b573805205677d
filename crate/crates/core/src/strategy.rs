//! Measurement strategies: scheduled `(state, observable)` pairs, their
//! execution, and the frequency estimators built on the outcomes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::detector::sample_outcome;
use crate::error::{Error, Result};
use crate::qstate::{density_from_bloch, observable_matrix, BlochVector, PolarizationDensity};
use crate::seed;

/// Component tolerance when grouping events by observable direction.
pub const DIRECTION_TOL: f64 = 1e-9;

/// One scheduled event: prepared state `n` measured with observable `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanPair {
    pub n: BlochVector,
    pub m: BlochVector,
}

/// The sequence `Q = {[n_k, m_k]}` chosen by the experimenter.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyPlan {
    pairs: Vec<PlanPair>,
}

impl StrategyPlan {
    pub fn new(pairs: Vec<PlanPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::out_of_range("K", "a plan needs at least one pair"));
        }
        for p in &pairs {
            p.n.check_pure()?;
            p.m.check_direction()?;
        }
        Ok(Self { pairs })
    }

    /// Same state, same observable for all `k` events.
    pub fn repeated(n: BlochVector, m: BlochVector, k: usize) -> Result<Self> {
        Self::new(vec![PlanPair { n, m }; k])
    }

    /// States cycled from `states`, one observable.
    pub fn cycled_states(states: &[BlochVector], m: BlochVector, k: usize) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::out_of_range("states", "empty state list"));
        }
        Self::new(
            (0..k)
                .map(|i| PlanPair {
                    n: states[i % states.len()],
                    m,
                })
                .collect(),
        )
    }

    /// One state, observables alternating `m1, m2, m1, …`.
    pub fn alternating_observables(
        n: BlochVector,
        m1: BlochVector,
        m2: BlochVector,
        k: usize,
    ) -> Result<Self> {
        Self::new(
            (0..k)
                .map(|i| PlanPair {
                    n,
                    m: if i % 2 == 0 { m1 } else { m2 },
                })
                .collect(),
        )
    }

    /// States `z, x, z, y` cycled against observables `z, y` alternating.
    pub fn four_state_two_observable(k: usize) -> Result<Self> {
        let states = [
            BlochVector::Z,
            BlochVector::X,
            BlochVector::Z,
            BlochVector::Y,
        ];
        let observables = [BlochVector::Z, BlochVector::Y];
        Self::new(
            (0..k)
                .map(|i| PlanPair {
                    n: states[i % 4],
                    m: observables[i % 2],
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[PlanPair] {
        &self.pairs
    }

    /// Distinct observable directions in order of first appearance.
    pub fn observables(&self) -> Vec<BlochVector> {
        let mut out: Vec<BlochVector> = Vec::new();
        for p in &self.pairs {
            if !out.iter().any(|m| m.approx_eq(&p.m, DIRECTION_TOL)) {
                out.push(p.m);
            }
        }
        out
    }
}

/// Outcomes `d_k ∈ {−1, +1}` of a plan run; bits are `b_k = (d_k + 1)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSequence {
    values: Vec<i8>,
    seed: u64,
}

impl OutcomeSequence {
    pub fn from_values(values: Vec<i8>, seed: u64) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&d| d != 1 && d != -1) {
            return Err(Error::out_of_range("d_k", format!("{bad} is not ±1")));
        }
        Ok(Self { values, seed })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn bits(&self) -> Vec<u8> {
        self.values.iter().map(|&d| ((d + 1) / 2) as u8).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn event_seed(master: u64, k: usize) -> u64 {
    seed::derive(master, seed::stream::EVENT, k as u64)
}

/// Runs every event of the plan. Event `k` is seeded from `(seed, k)`, so the
/// parallel schedule yields the same sequence as [`run_strategy_serial`].
pub fn run_strategy(plan: &StrategyPlan, seed: u64) -> OutcomeSequence {
    let values = plan
        .pairs
        .par_iter()
        .enumerate()
        .map(|(k, p)| sample_outcome(p.n, p.m, event_seed(seed, k)).expect("plan validated"))
        .collect();
    OutcomeSequence { values, seed }
}

pub fn run_strategy_serial(plan: &StrategyPlan, seed: u64) -> OutcomeSequence {
    let values = plan
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| sample_outcome(p.n, p.m, event_seed(seed, k)).expect("plan validated"))
        .collect();
    OutcomeSequence { values, seed }
}

/// `ν ± √(ν(1−ν)/K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub nu: f64,
    pub stderr: f64,
    pub count: usize,
}

impl FrequencyEstimate {
    pub fn from_counts(hits: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::out_of_range("K", "no events to estimate from"));
        }
        let nu = hits as f64 / count as f64;
        Ok(Self {
            nu,
            stderr: (nu * (1.0 - nu) / count as f64).sqrt(),
            count,
        })
    }

    /// Whether `p` lies in `ν ± width·stderr`.
    pub fn covers(&self, p: f64, width: f64) -> bool {
        (self.nu - p).abs() <= width * self.stderr
    }
}

/// Frequency of `value` (`+1` or `−1`) among the outcomes.
pub fn frequency_estimate(outcomes: &[i8], value: i8) -> Result<FrequencyEstimate> {
    if value != 1 && value != -1 {
        return Err(Error::out_of_range("value", format!("{value} is not ±1")));
    }
    let hits = outcomes.iter().filter(|&&d| d == value).count();
    FrequencyEstimate::from_counts(hits, outcomes.len())
}

/// `⟨M⟩ = (1/K) Σ n_k·m` for a single-observable plan.
pub fn mean_observable(plan: &StrategyPlan) -> Result<f64> {
    let observables = plan.observables();
    if observables.len() != 1 {
        return Err(Error::SingleObservableRequired);
    }
    let m = observables[0];
    Ok(plan.pairs.iter().map(|p| p.n.dot(&m)).sum::<f64>() / plan.len() as f64)
}

/// Which events an average is taken over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selector {
    All,
    Observable(BlochVector),
}

impl Selector {
    fn selects(&self, pair: &PlanPair) -> bool {
        match self {
            Selector::All => true,
            Selector::Observable(m) => pair.m.approx_eq(m, DIRECTION_TOL),
        }
    }
}

/// Mean of the prepared density matrices over the selected events.
pub fn average_density(plan: &StrategyPlan, selector: Selector) -> Result<PolarizationDensity> {
    let densities: Vec<PolarizationDensity> = plan
        .pairs
        .iter()
        .filter(|p| selector.selects(p))
        .map(|p| density_from_bloch(p.n))
        .collect::<Result<_>>()?;
    PolarizationDensity::mean(&densities).ok_or(Error::EmptySubsequence)
}

/// Events sharing one observable direction.
#[derive(Clone, Debug)]
pub struct ObservableGroup {
    pub direction: BlochVector,
    /// Zero-based event indices.
    pub indices: Vec<usize>,
    /// Frequency of `+1` in the group.
    pub estimate: FrequencyEstimate,
    pub average_density: PolarizationDensity,
}

impl ObservableGroup {
    /// `Tr(ρ̄ M)` for the group's average state.
    pub fn predicted_mean(&self) -> f64 {
        let m = observable_matrix(self.direction).expect("plan directions are unit");
        self.average_density.expectation(&m)
    }
}

/// Statistical subsequences, one per observable.
#[derive(Clone, Debug)]
pub struct SubsequenceStats {
    pub groups: Vec<ObservableGroup>,
}

pub fn partition_by_observable(
    plan: &StrategyPlan,
    outcomes: &OutcomeSequence,
) -> Result<SubsequenceStats> {
    if plan.len() != outcomes.len() {
        return Err(Error::out_of_range(
            "outcomes",
            format!("{} outcomes for a plan of {}", outcomes.len(), plan.len()),
        ));
    }
    let mut groups = Vec::new();
    for direction in plan.observables() {
        let indices: Vec<usize> = plan
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.m.approx_eq(&direction, DIRECTION_TOL))
            .map(|(k, _)| k)
            .collect();
        let hits = indices.iter().filter(|&&k| outcomes.values[k] == 1).count();
        let estimate = FrequencyEstimate::from_counts(hits, indices.len())?;
        let average_density = average_density(plan, Selector::Observable(direction))?;
        groups.push(ObservableGroup {
            direction,
            indices,
            estimate,
            average_density,
        });
    }
    Ok(SubsequenceStats { groups })
}

/// `P_k = (1 + m_k·n_k)/2`.
pub fn predicted_probabilities(plan: &StrategyPlan) -> Vec<f64> {
    plan.pairs
        .iter()
        .map(|p| (0.5 + 0.5 * p.n.dot(&p.m)).clamp(0.0, 1.0))
        .collect()
}

/// Header of the per-event CSV export.
pub const CSV_HEADER: [&str; 10] = [
    "k", "n_x", "n_y", "n_z", "m_x", "m_y", "m_z", "P_k", "d_k", "b_k",
];

/// Writes one row per event; `k` is one-based.
pub fn write_csv<W: Write>(
    plan: &StrategyPlan,
    outcomes: &OutcomeSequence,
    writer: W,
) -> Result<()> {
    if plan.len() != outcomes.len() {
        return Err(Error::out_of_range("outcomes", "length differs from plan"));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let probs = predicted_probabilities(plan);
    for (k, ((p, &d), pk)) in plan
        .pairs
        .iter()
        .zip(&outcomes.values)
        .zip(probs)
        .enumerate()
    {
        let [nx, ny, nz] = p.n.as_array();
        let [mx, my, mz] = p.m.as_array();
        w.write_record([
            (k + 1).to_string(),
            nx.to_string(),
            ny.to_string(),
            nz.to_string(),
            mx.to_string(),
            my.to_string(),
            mz.to_string(),
            pk.to_string(),
            d.to_string(),
            ((d + 1) / 2).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Mat2, C64};

    #[test]
    fn plan_validation() {
        assert!(StrategyPlan::new(vec![]).is_err());
        let bad = PlanPair {
            n: BlochVector::new(0.5, 0.0, 0.0),
            m: BlochVector::Z,
        };
        assert!(StrategyPlan::new(vec![bad]).is_err());
    }

    #[test]
    fn nondemolition_plan() {
        let n = BlochVector::from_angles(1.0, 2.0);
        let plan = StrategyPlan::repeated(n, n, 1000).unwrap();
        assert!(run_strategy(&plan, 4).values().iter().all(|&d| d == 1));
    }

    #[test]
    fn runs_are_reproducible_and_schedule_independent() {
        let plan = StrategyPlan::four_state_two_observable(500).unwrap();
        let a = run_strategy(&plan, 17);
        assert_eq!(a, run_strategy(&plan, 17));
        assert_eq!(a, run_strategy_serial(&plan, 17));
        assert_ne!(a, run_strategy(&plan, 18));
    }

    #[test]
    fn orthogonal_plan_mean_is_zero() {
        let plan = StrategyPlan::repeated(BlochVector::X, BlochVector::Z, 10_000).unwrap();
        let out = run_strategy(&plan, 1);
        let mean = out.values().iter().map(|&d| d as f64).sum::<f64>() / 1e4;
        assert!(mean.abs() <= 0.04, "mean {mean}");
    }

    #[test]
    fn bits_follow_d() {
        let seq = OutcomeSequence::from_values(vec![1, -1, -1, 1], 0).unwrap();
        assert_eq!(seq.bits(), vec![1, 0, 0, 1]);
        assert!(OutcomeSequence::from_values(vec![0], 0).is_err());
    }

    #[test]
    fn frequency_examples() {
        let est = frequency_estimate(&[1; 100], 1).unwrap();
        assert_eq!((est.nu, est.stderr), (1.0, 0.0));
        let half: Vec<i8> = (0..100).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect();
        let est = frequency_estimate(&half, 1).unwrap();
        assert_eq!(est.nu, 0.5);
        assert!((est.stderr - 0.05).abs() < 1e-15);
        assert!(frequency_estimate(&[], 1).is_err());
    }

    #[test]
    fn mean_observable_examples() {
        let m = BlochVector::Z;
        let plan = StrategyPlan::repeated(m, m, 7).unwrap();
        assert_eq!(mean_observable(&plan).unwrap(), 1.0);
        let plan = StrategyPlan::cycled_states(&[m, -m], m, 10).unwrap();
        assert_eq!(mean_observable(&plan).unwrap(), 0.0);
        let states = [
            BlochVector::Z,
            BlochVector::X,
            BlochVector::Z,
            BlochVector::Y,
        ];
        let plan = StrategyPlan::cycled_states(&states, m, 4).unwrap();
        assert_eq!(mean_observable(&plan).unwrap(), 0.5);
        let mixed = StrategyPlan::four_state_two_observable(4).unwrap();
        assert!(matches!(
            mean_observable(&mixed),
            Err(Error::SingleObservableRequired)
        ));
    }

    #[test]
    fn four_state_subsequence_densities() {
        let plan = StrategyPlan::four_state_two_observable(8).unwrap();
        let odd = average_density(&plan, Selector::Observable(BlochVector::Z)).unwrap();
        let vertical = Mat2::new(0.0.into(), 0.0.into(), 0.0.into(), 1.0.into());
        assert!(odd.max_abs_diff(&vertical) <= 1e-12);

        let even = average_density(&plan, Selector::Observable(BlochVector::Y)).unwrap();
        assert!((even.element(1, 0) - C64::new(0.25, -0.25)).norm() <= 1e-12);
        assert!((even.element(0, 1) - C64::new(0.25, 0.25)).norm() <= 1e-12);
        let [lo, hi] = even.eigenvalues();
        let r = 0.5 / 2f64.sqrt();
        assert!((lo - (0.5 - r)).abs() <= 1e-12 && (hi - (0.5 + r)).abs() <= 1e-12);

        let err = average_density(&plan, Selector::Observable(BlochVector::X)).unwrap_err();
        assert!(matches!(err, Error::EmptySubsequence));
    }

    #[test]
    fn predicted_examples() {
        let plan = StrategyPlan::four_state_two_observable(8).unwrap();
        assert_eq!(
            predicted_probabilities(&plan),
            vec![1.0, 0.5, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0]
        );
        let plan = StrategyPlan::repeated(BlochVector::X, BlochVector::Y, 3).unwrap();
        assert_eq!(predicted_probabilities(&plan), vec![0.5; 3]);
    }

    #[test]
    fn partition_examples() {
        let plan = StrategyPlan::alternating_observables(
            BlochVector::Z,
            BlochVector::Z,
            BlochVector::X,
            10,
        )
        .unwrap();
        let out = run_strategy(&plan, 2);
        let stats = partition_by_observable(&plan, &out).unwrap();
        assert_eq!(stats.groups.len(), 2);
        assert_eq!(stats.groups[0].indices, vec![0, 2, 4, 6, 8]);
        assert_eq!(stats.groups[1].indices, vec![1, 3, 5, 7, 9]);

        let single = StrategyPlan::repeated(BlochVector::X, BlochVector::Z, 9).unwrap();
        let out = run_strategy(&single, 2);
        let stats = partition_by_observable(&single, &out).unwrap();
        assert_eq!(stats.groups.len(), 1);
        assert_eq!(stats.groups[0].indices.len(), 9);

        let short = OutcomeSequence::from_values(vec![1], 0).unwrap();
        assert!(partition_by_observable(&single, &short).is_err());
    }

    #[test]
    fn csv_has_documented_header() {
        let plan = StrategyPlan::four_state_two_observable(4).unwrap();
        let out = run_strategy(&plan, 0);
        let mut buf = Vec::new();
        write_csv(&plan, &out, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.count(), 4);
    }
}
