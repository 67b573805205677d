//! Joint photon + detector evolution during a measurement event.
//!
//! The joint space is `detector ⊗ photon` in lexicographic order: basis
//! index `2·d + p` for detector level `d` and photon index `p` (0 = `|0⟩`,
//! 1 = `|1⟩`). The Hamiltonian is
//!
//! ```text
//! H(t) = H_D ⊗ I + I ⊗ H_e + g(t) · J ⊗ σ₃
//! ```
//!
//! with `g(t) = g0` on `[t_i, t_f]` and zero elsewhere. Each segment has a
//! constant Hamiltonian, so the propagator is assembled exactly from two
//! Hermitian eigendecompositions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    born_probabilities, pre_analyzer_state, reduction_unitaries, BlochVector, Branch, PureKet, C64,
};
use crate::seed;

pub type CMat = DMatrix<C64>;

/// Hermiticity tolerance for model operators.
pub const MODEL_TOL: f64 = 1e-10;
/// Trace and spectrum tolerance for joint states.
pub const JOINT_TOL: f64 = 1e-9;
/// Probabilities below this mark a conditional branch as absent.
pub const ABSENT_BRANCH: f64 = 1e-12;

/// Initial detector preparation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorInit {
    /// Lowest-energy eigenstate of `H_D` (level 0 for a diagonal `H_D`).
    Ground,
    MaximallyMixed,
}

/// A finite `D`-level detector with a rectangular interaction pulse.
#[derive(Clone, Debug)]
pub struct DetectorModel {
    h_detector: CMat,
    coupling: CMat,
    photon_energies: [f64; 2],
    g0: f64,
    t_i: f64,
    t_f: f64,
    rho_detector: CMat,
}

fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
}

fn is_diagonal(m: &CMat) -> bool {
    m.iter()
        .enumerate()
        .all(|(k, e)| k % m.nrows() == k / m.nrows() || *e == C64::from(0.0))
}

fn hermitian_spectrum(m: &CMat) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

fn check_density(rho: &CMat, tol: f64, what: &str) -> Result<()> {
    if rho.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::Config(format!("{what} has non-finite entries")));
    }
    if hermitian_defect(rho) > tol {
        return Err(Error::Config(format!("{what} is not Hermitian")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Config(format!("{what} has trace {tr}")));
    }
    if let Some(&low) = hermitian_spectrum(rho).first() {
        if low < -tol {
            return Err(Error::Config(format!(
                "{what} has negative eigenvalue {low}"
            )));
        }
    }
    Ok(())
}

impl DetectorModel {
    /// Builds a model from explicit operators. `H_e` defaults to zero.
    pub fn new(
        h_detector: CMat,
        coupling: CMat,
        g0: f64,
        t_i: f64,
        t_f: f64,
        rho_detector: CMat,
    ) -> Result<Self> {
        let dim = h_detector.nrows();
        if dim < 2 {
            return Err(Error::Config(format!("dimension {dim} is below 2")));
        }
        for (name, m) in [
            ("H_D", &h_detector),
            ("J", &coupling),
            ("detector state", &rho_detector),
        ] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Config(format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if hermitian_defect(&h_detector) > MODEL_TOL {
            return Err(Error::Config("H_D is not Hermitian".into()));
        }
        if hermitian_defect(&coupling) > MODEL_TOL {
            return Err(Error::Config("J is not Hermitian".into()));
        }
        check_density(&rho_detector, MODEL_TOL, "detector state")?;
        if !(g0.is_finite() && t_i.is_finite() && t_f.is_finite()) {
            return Err(Error::Config("pulse parameters must be finite".into()));
        }
        if t_i >= t_f {
            return Err(Error::Config(format!("pulse window t_i={t_i} ≥ t_f={t_f}")));
        }
        Ok(Self {
            h_detector,
            coupling,
            photon_energies: [0.0, 0.0],
            g0,
            t_i,
            t_f,
            rho_detector,
        })
    }

    /// Ladder detector: `H_D = ω·diag(0, 1, …, D−1)`, `J` = nearest-neighbour hopping.
    pub fn ladder(
        dimension: usize,
        omega: f64,
        g0: f64,
        t_i: f64,
        t_f: f64,
        init: DetectorInit,
    ) -> Result<Self> {
        let levels: Vec<f64> = (0..dimension).map(|k| omega * k as f64).collect();
        Self::with_levels(&levels, g0, t_i, t_f, init)
    }

    /// Diagonal `H_D` with the given levels and nearest-neighbour hopping `J`.
    pub fn with_levels(
        levels: &[f64],
        g0: f64,
        t_i: f64,
        t_f: f64,
        init: DetectorInit,
    ) -> Result<Self> {
        let dim = levels.len();
        if dim < 2 {
            return Err(Error::Config(format!("dimension {dim} is below 2")));
        }
        let h = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            levels.iter().map(|&e| C64::from(e)),
        ));
        let j = hopping(dim);
        let rho = initial_detector_state(&h, init);
        Self::new(h, j, g0, t_i, t_f, rho)
    }

    /// Sets the diagonal photon Hamiltonian `H_e = e₀|0⟩⟨0| + e₁|1⟩⟨1|`.
    pub fn with_photon_energies(mut self, e0: f64, e1: f64) -> Self {
        self.photon_energies = [e0, e1];
        self
    }

    pub fn dimension(&self) -> usize {
        self.h_detector.nrows()
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_i, self.t_f)
    }

    pub fn h_detector(&self) -> &CMat {
        &self.h_detector
    }

    pub fn coupling(&self) -> &CMat {
        &self.coupling
    }

    pub fn rho_detector(&self) -> &CMat {
        &self.rho_detector
    }

    /// Pulse amplitude `g(t)`.
    pub fn pulse(&self, t: f64) -> f64 {
        if (self.t_i..=self.t_f).contains(&t) {
            self.g0
        } else {
            0.0
        }
    }

    /// Joint Hamiltonian for a constant coupling `g`.
    pub fn hamiltonian(&self, g: f64) -> CMat {
        let d = self.dimension();
        let id_d = CMat::identity(d, d);
        let id_p = CMat::identity(2, 2);
        let [e0, e1] = self.photon_energies;
        let h_e = CMat::from_row_slice(2, 2, &[e0.into(), 0.0.into(), 0.0.into(), e1.into()]);
        let sigma3 =
            CMat::from_row_slice(2, 2, &[(-1.0).into(), 0.0.into(), 0.0.into(), 1.0.into()]);
        self.h_detector.kronecker(&id_p)
            + id_d.kronecker(&h_e)
            + self.coupling.kronecker(&sigma3) * C64::from(g)
    }
}

fn hopping(dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |r, c| {
        if r.abs_diff(c) == 1 {
            C64::from(1.0)
        } else {
            C64::from(0.0)
        }
    })
}

fn initial_detector_state(h: &CMat, init: DetectorInit) -> CMat {
    let dim = h.nrows();
    match init {
        DetectorInit::MaximallyMixed => CMat::identity(dim, dim) / C64::from(dim as f64),
        DetectorInit::Ground => {
            let ground = if is_diagonal(h) {
                let k = (0..dim)
                    .min_by(|&a, &b| h[(a, a)].re.total_cmp(&h[(b, b)].re))
                    .unwrap_or(0);
                let mut v = nalgebra::DVector::from_element(dim, C64::from(0.0));
                v[k] = C64::from(1.0);
                v
            } else {
                let eig = h.clone().symmetric_eigen();
                let k = eig.eigenvalues.imin();
                eig.eigenvectors.column(k).into_owned()
            };
            &ground * ground.adjoint()
        }
    }
}

/// Density matrix over `detector ⊗ photon`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    rho: CMat,
    detector_dim: usize,
}

impl JointState {
    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn detector_dim(&self) -> usize {
        self.detector_dim
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_spectrum(&self.rho)
    }

    pub fn validate(&self) -> Result<()> {
        check_density(&self.rho, JOINT_TOL, "joint state")
    }

    /// Photon reduced density matrix `Tr_D ρ` as a 2×2 matrix.
    pub fn photon_reduced(&self) -> nalgebra::Matrix2<C64> {
        let mut out = nalgebra::Matrix2::zeros();
        for p in 0..2 {
            for q in 0..2 {
                out[(p, q)] = (0..self.detector_dim)
                    .map(|d| self.rho[(2 * d + p, 2 * d + q)])
                    .sum();
            }
        }
        out
    }

    fn block(&self, p: usize, q: usize) -> CMat {
        let d = self.detector_dim;
        CMat::from_fn(d, d, |r, c| self.rho[(2 * r + p, 2 * c + q)])
    }

    pub fn max_abs_diff(&self, other: &JointState) -> f64 {
        (&self.rho - &other.rho)
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }
}

/// `ρ_in = ρ_D ⊗ |ψ⟩⟨ψ|`.
pub fn build_joint_initial(model: &DetectorModel, photon: &PureKet) -> Result<JointState> {
    let v = photon.vector();
    let ket = CMat::from_column_slice(2, 1, v.as_slice());
    let photon_rho = &ket * ket.adjoint();
    if model.rho_detector.nrows() != model.dimension() {
        return Err(Error::Config("detector state dimension mismatch".into()));
    }
    Ok(JointState {
        rho: model.rho_detector.kronecker(&photon_rho),
        detector_dim: model.dimension(),
    })
}

struct Eigen {
    values: Vec<f64>,
    vectors: CMat,
}

impl Eigen {
    fn of(h: &CMat) -> Self {
        let eig = h.clone().symmetric_eigen();
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `exp(−i H τ)`.
    fn propagator(&self, tau: f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -e * tau);
            for r in 0..n {
                scaled[(r, k)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Cached propagators for one model.
pub struct Evolution<'a> {
    model: &'a DetectorModel,
    free: Eigen,
    coupled: Eigen,
}

impl<'a> Evolution<'a> {
    pub fn new(model: &'a DetectorModel) -> Self {
        Self {
            model,
            free: Eigen::of(&model.hamiltonian(0.0)),
            coupled: Eigen::of(&model.hamiltonian(model.g0)),
        }
    }

    /// `U(t)` from time 0, composed over the pulse segments.
    pub fn propagator(&self, t: f64) -> Result<CMat> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::out_of_range(
                "t",
                format!("{t} must be finite and ≥ 0"),
            ));
        }
        let (t_i, t_f) = self.model.window();
        let on_start = t_i.max(0.0);
        let on_end = t_f.min(t);
        let dim = 2 * self.model.dimension();
        let mut u = CMat::identity(dim, dim);
        if on_end <= on_start {
            // Pulse not reached yet, or entirely in the past before time 0.
            if t > 0.0 {
                u = self.free.propagator(t);
            }
            return Ok(u);
        }
        if on_start > 0.0 {
            u = self.free.propagator(on_start);
        }
        u = self.coupled.propagator(on_end - on_start) * u;
        if t > on_end {
            u = self.free.propagator(t - on_end) * u;
        }
        if u.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::Numerical("propagator has non-finite entries".into()));
        }
        Ok(u)
    }

    pub fn state_at(&self, initial: &JointState, t: f64) -> Result<JointState> {
        if initial.detector_dim != self.model.dimension() {
            return Err(Error::Config("joint state does not match the model".into()));
        }
        let u = self.propagator(t)?;
        let rho = &u * &initial.rho * u.adjoint();
        if rho.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::Numerical(
                "evolved state has non-finite entries".into(),
            ));
        }
        Ok(JointState {
            rho,
            detector_dim: initial.detector_dim,
        })
    }
}

/// `ρ(t) = U(t) ρ U†(t)`, where `state` is the joint state at time 0.
pub fn evolve(state: &JointState, model: &DetectorModel, t: f64) -> Result<JointState> {
    Evolution::new(model).state_at(state, t)
}

/// Split of a joint state into conditional detector branches and the
/// photon coherence block:
///
/// ```text
/// ρ = p₁ ρ₁ ⊗ |1⟩⟨1| + p₀ ρ₀ ⊗ |0⟩⟨0| + λ ⊗ |0⟩⟨1| + λ† ⊗ |1⟩⟨0|
/// ```
#[derive(Clone, Debug)]
pub struct BranchDecomposition {
    pub p1: f64,
    pub p0: f64,
    /// `None` when `p1` is below [`ABSENT_BRANCH`].
    pub rho1: Option<CMat>,
    pub rho0: Option<CMat>,
    pub lambda: CMat,
    /// `|Tr λ|`, the magnitude of the photon's reduced coherence `⟨0|Tr_D ρ|1⟩`.
    pub lambda_norm: f64,
    /// Frobenius norm of `λ`. Invariant under the block-diagonal dynamics.
    pub lambda_frobenius: f64,
}

impl BranchDecomposition {
    /// Rebuilds the joint density matrix.
    pub fn reassemble(&self) -> JointState {
        let d = self.lambda.nrows();
        let zero = CMat::zeros(d, d);
        let b11 = self
            .rho1
            .as_ref()
            .map_or(zero.clone(), |r| r * C64::from(self.p1));
        let b00 = self.rho0.as_ref().map_or(zero, |r| r * C64::from(self.p0));
        let b01 = &self.lambda;
        let b10 = self.lambda.adjoint();
        let rho = CMat::from_fn(2 * d, 2 * d, |r, c| {
            let (dr, p) = (r / 2, r % 2);
            let (dc, q) = (c / 2, c % 2);
            match (p, q) {
                (1, 1) => b11[(dr, dc)],
                (0, 0) => b00[(dr, dc)],
                (0, 1) => b01[(dr, dc)],
                _ => b10[(dr, dc)],
            }
        });
        JointState {
            rho,
            detector_dim: d,
        }
    }
}

pub fn decompose(state: &JointState) -> BranchDecomposition {
    let b11 = state.block(1, 1);
    let b00 = state.block(0, 0);
    let lambda = state.block(0, 1);
    let p1 = b11.trace().re;
    let p0 = b00.trace().re;
    let rho1 = (p1 > ABSENT_BRANCH).then(|| b11 / C64::from(p1));
    let rho0 = (p0 > ABSENT_BRANCH).then(|| b00 / C64::from(p0));
    let lambda_norm = lambda.trace().norm();
    let lambda_frobenius = lambda.norm();
    BranchDecomposition {
        p1,
        p0,
        rho1,
        rho0,
        lambda,
        lambda_norm,
        lambda_frobenius,
    }
}

/// Times at which the photon coherence revives.
///
/// Samples `r(t) = lambda_norm(t) / lambda_norm(0)` on the grid `k·dt`,
/// `0 ≤ k·dt ≤ t_max`. A revival episode begins when `r` climbs back to
/// `threshold` after having dropped below it, and ends when `r` drops below
/// again (or the scan ends). Each episode contributes the grid time of its
/// largest `r`.
pub fn recurrence_scan(
    model: &DetectorModel,
    photon: &PureKet,
    t_max: f64,
    dt: f64,
    threshold: f64,
) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::out_of_range("dt", format!("{dt} must be > 0")));
    }
    if !(t_max.is_finite() && t_max > dt) {
        return Err(Error::out_of_range(
            "t_max",
            format!("{t_max} must exceed dt"),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::out_of_range(
            "threshold",
            format!("{threshold} not in (0,1)"),
        ));
    }
    let initial = build_joint_initial(model, photon)?;
    let base = decompose(&initial).lambda_norm;
    if base <= ABSENT_BRANCH {
        return Err(Error::NoCoherence);
    }
    let evolution = Evolution::new(model);
    let steps = (t_max / dt).floor() as usize;

    let mut revivals = Vec::new();
    let mut fallen = false;
    let mut episode: Option<(f64, f64)> = None;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let ratio = decompose(&evolution.state_at(&initial, t)?).lambda_norm / base;
        if ratio < threshold {
            if let Some((peak_t, _)) = episode.take() {
                revivals.push(peak_t);
            }
            fallen = true;
        } else if let Some((_, peak)) = episode {
            if ratio > peak {
                episode = Some((t, ratio));
            }
        } else if fallen {
            episode = Some((t, ratio));
            fallen = false;
        }
    }
    if let Some((peak_t, _)) = episode {
        revivals.push(peak_t);
    }
    Ok(revivals)
}

/// Result of one reduction event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventOutcome {
    /// `+1` for the vertical counter, `−1` for the horizontal one.
    pub outcome: i8,
    pub post_photon_state: PureKet,
    pub applied: Branch,
    pub hidden_seed: u64,
}

/// One measurement event: the hidden detector parameters, represented by
/// `hidden_seed`, select `U_v` with probability `P_v(n, m)` and `U_h` otherwise.
pub fn sample_event(n: BlochVector, m: BlochVector, hidden_seed: u64) -> Result<EventOutcome> {
    let (p_v, _) = born_probabilities(n, m)?;
    let mes = pre_analyzer_state(n, m)?;
    let pair = reduction_unitaries(n, m)?;
    let u = seed::uniform(hidden_seed);
    let (outcome, applied) = if u < p_v {
        (1, Branch::V)
    } else {
        (-1, Branch::H)
    };
    let post_photon_state = mes.apply(pair.get(applied))?;
    Ok(EventOutcome {
        outcome,
        post_photon_state,
        applied,
        hidden_seed,
    })
}

/// Sampling-only variant of [`sample_event`] for bulk runs; draws the same
/// outcome for the same inputs.
pub fn sample_outcome(n: BlochVector, m: BlochVector, hidden_seed: u64) -> Result<i8> {
    let (p_v, _) = born_probabilities(n, m)?;
    n.check_pure()?;
    Ok(if seed::uniform(hidden_seed) < p_v {
        1
    } else {
        -1
    })
}
