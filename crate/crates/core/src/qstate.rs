//! Qubit polarization states, observables, Born probabilities and the
//! reduction unitaries.
//!
//! Basis convention: index 0 is `|0⟩` (horizontal), index 1 is `|1⟩`
//! (vertical). `σ₃ = |1⟩⟨1| − |0⟩⟨0|`, so the Bloch vector `(0, 0, 1)` is the
//! pure vertical state. In this ordering the Pauli matrices read
//!
//! ```text
//! σ₁ = [[0, 1], [1, 0]]   σ₂ = [[0, i], [−i, 0]]   σ₃ = [[−1, 0], [0, 1]]
//! ```
//!
//! which is the textbook representation written with `|1⟩` first; the
//! algebra `σ₁σ₂ = iσ₃` is preserved.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Neg;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

/// Tolerance on `|n| = 1` where a unit direction is required.
pub const UNIT_TOL: f64 = 1e-12;
/// Slack on `|n| ≤ 1` for state vectors.
pub const BALL_TOL: f64 = 1e-9;
/// Tolerance for Hermiticity and trace checks on 2×2 matrices.
pub const EXACT_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The three Pauli matrices in the `(|0⟩, |1⟩)` index order.
pub fn pauli() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, I, -I, ZERO),
        Mat2::new(-ONE, ZERO, ZERO, ONE),
    ]
}

/// Real 3-vector parameterizing states and observable directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for BlochVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        [v.x, v.y, v.z]
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.x, self.y, self.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        BlochVector::new(-self.x, -self.y, -self.z)
    }
}

impl BlochVector {
    pub const X: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
    pub const Y: BlochVector = BlochVector::new(0.0, 1.0, 0.0);
    pub const Z: BlochVector = BlochVector::new(0.0, 0.0, 1.0);
    pub const ORIGIN: BlochVector = BlochVector::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector `{sinθ cosφ, sinθ sinφ, cosθ}`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    }

    /// Unit vector in the x–z plane at `angle` from +z toward +x.
    pub fn planar(angle: f64) -> Self {
        Self::new(angle.sin(), 0.0, angle.cos())
    }

    /// Uniformly distributed unit vector.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self::new(r * phi.cos(), r * phi.sin(), z)
    }

    /// Uniformly distributed vector in the closed unit ball.
    pub fn random_ball<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = Self::random_unit(rng);
        let r: f64 = rng.random::<f64>().cbrt();
        u.scale(r)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        BlochVector::new(self.x - other.x, self.y - other.y, self.z - other.z).norm()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Component-wise equality within `tol`.
    pub fn approx_eq(&self, other: &BlochVector, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol
            && (self.y - other.y).abs() <= tol
            && (self.z - other.z).abs() <= tol
    }

    /// Accepts any vector inside the closed unit ball.
    pub fn check_state(&self) -> Result<()> {
        let length = self.norm();
        if !length.is_finite() || length > 1.0 + BALL_TOL {
            return Err(Error::InvalidBloch { length });
        }
        Ok(())
    }

    /// Accepts only unit vectors (observable directions).
    pub fn check_direction(&self) -> Result<()> {
        let length = self.norm();
        if !length.is_finite() || (length - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidObservable { length });
        }
        Ok(())
    }

    /// Accepts only unit vectors (pure preparations).
    pub fn check_pure(&self) -> Result<()> {
        let length = self.norm();
        if !length.is_finite() || length > 1.0 + UNIT_TOL {
            return Err(Error::InvalidBloch { length });
        }
        if length < 1.0 - UNIT_TOL {
            return Err(Error::PureStateRequired { length });
        }
        Ok(())
    }

    /// `n·σ`.
    pub fn dot_sigma(&self) -> Mat2 {
        let [s1, s2, s3] = pauli();
        s1 * C64::from(self.x) + s2 * C64::from(self.y) + s3 * C64::from(self.z)
    }
}

fn is_hermitian(m: &Mat2, tol: f64) -> bool {
    (m - m.adjoint()).iter().all(|e| e.norm() <= tol)
}

fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().map(|e| e.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationDensity(Mat2);

impl PolarizationDensity {
    /// Validates a raw matrix as a density matrix.
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        if m.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        if !is_hermitian(&m, EXACT_TOL) {
            return Err(Error::InvalidDensity("matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > EXACT_TOL || tr.im.abs() > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let [low, _] = hermitian_eigenvalues(&m);
        if low < -EXACT_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low}")));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_ket(ket: &PureKet) -> Self {
        let v = ket.vector();
        Self(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2::identity() * C64::from(0.5))
    }

    /// Arithmetic mean of a non-empty collection.
    pub fn mean<'a, I>(items: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a PolarizationDensity>,
    {
        let mut sum = Mat2::zeros();
        let mut count = 0usize;
        for rho in items {
            sum += rho.0;
            count += 1;
        }
        (count > 0).then(|| Self(sum / C64::from(count as f64)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `⟨row|ρ|col⟩` in the `(|0⟩, |1⟩)` basis.
    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn bloch(&self) -> BlochVector {
        let [s1, s2, s3] = pauli();
        BlochVector::new(
            (self.0 * s1).trace().re,
            (self.0 * s2).trace().re,
            (self.0 * s3).trace().re,
        )
    }

    /// Ascending eigenvalues (the mixture weights).
    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian_eigenvalues(&self.0)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `Tr(ρ M)`.
    pub fn expectation(&self, observable: &ObservableMatrix) -> f64 {
        (self.0 * observable.0).trace().re
    }

    pub fn frobenius_distance(&self, other: &PolarizationDensity) -> f64 {
        (self.0 - other.0).norm()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        max_abs_diff(&self.0, other)
    }
}

/// `ρ = ½I + ½ n·σ`.
pub fn density_from_bloch(n: BlochVector) -> Result<PolarizationDensity> {
    n.check_state()?;
    let half = C64::from(0.5);
    Ok(PolarizationDensity(
        Mat2::identity() * half + n.dot_sigma() * half,
    ))
}

/// `n_i = Tr(ρ σ_i)` for a raw matrix, validating it first.
pub fn bloch_from_density(rho: &Mat2) -> Result<BlochVector> {
    Ok(PolarizationDensity::from_matrix(*rho)?.bloch())
}

/// A normalized single-photon polarization ket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureKet {
    a0: C64,
    a1: C64,
}

impl PureKet {
    /// Checks `|a₀|² + |a₁|² = 1` to `1e-12`.
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let norm = a0.norm_sqr() + a1.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidDensity(format!("ket norm² {norm} is not 1")));
        }
        Ok(Self { a0, a1 })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(a0: C64, a1: C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical("cannot normalize a zero ket".into()));
        }
        Ok(Self {
            a0: a0 / norm,
            a1: a1 / norm,
        })
    }

    /// `|0⟩`, horizontal.
    pub fn horizontal() -> Self {
        Self { a0: ONE, a1: ZERO }
    }

    /// `|1⟩`, vertical.
    pub fn vertical() -> Self {
        Self { a0: ZERO, a1: ONE }
    }

    /// The `+n` eigenstate of `n·σ`: `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|0⟩`.
    pub fn from_bloch(n: BlochVector) -> Result<Self> {
        n.check_pure()?;
        let (theta, phi) = angles(&n);
        Ok(Self {
            a0: C64::from_polar((theta / 2.0).sin(), phi),
            a1: C64::from((theta / 2.0).cos()),
        })
    }

    /// The `−n` eigenstate: `sin(θ/2)|1⟩ − e^{iφ} cos(θ/2)|0⟩`, with `θ, φ` of `n`.
    pub fn antipode_of(n: BlochVector) -> Result<Self> {
        n.check_pure()?;
        let (theta, phi) = angles(&n);
        Ok(Self {
            a0: -C64::from_polar((theta / 2.0).cos(), phi),
            a1: C64::from((theta / 2.0).sin()),
        })
    }

    pub fn amplitudes(&self) -> (C64, C64) {
        (self.a0, self.a1)
    }

    pub fn vector(&self) -> Vector2<C64> {
        Vector2::new(self.a0, self.a1)
    }

    pub fn apply(&self, u: &Mat2) -> Result<Self> {
        let v = u * self.vector();
        PureKet::new(v[0], v[1])
    }

    pub fn inner(&self, other: &PureKet) -> C64 {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// `|⟨self|other⟩| = 1` within `tol`.
    pub fn same_up_to_phase(&self, other: &PureKet, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }

    pub fn bloch(&self) -> BlochVector {
        PolarizationDensity::from_ket(self).bloch()
    }

    pub fn density(&self) -> PolarizationDensity {
        PolarizationDensity::from_ket(self)
    }
}

fn angles(n: &BlochVector) -> (f64, f64) {
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = if n.x == 0.0 && n.y == 0.0 {
        0.0
    } else {
        n.y.atan2(n.x)
    };
    (theta, phi)
}

/// `M = m·σ`, eigenvalues `±1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableMatrix(Mat2);

impl ObservableMatrix {
    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian_eigenvalues(&self.0)
    }

    /// Projector on the `±1` eigenspace: `(I ± M)/2`.
    pub fn projector(&self, outcome: i8) -> Mat2 {
        let sign = if outcome >= 0 { 1.0 } else { -1.0 };
        (Mat2::identity() + self.0 * C64::from(sign)) * C64::from(0.5)
    }
}

pub fn observable_matrix(m: BlochVector) -> Result<ObservableMatrix> {
    m.check_direction()?;
    Ok(ObservableMatrix(m.dot_sigma()))
}

/// `[M(m), M(n)] = M(m)M(n) − M(n)M(m)`, which equals `2i M(m×n)`.
pub fn pauli_commutator(m: BlochVector, n: BlochVector) -> Result<Mat2> {
    let a = observable_matrix(m)?.0;
    let b = observable_matrix(n)?.0;
    Ok(a * b - b * a)
}

/// Detection probabilities `(P_v, P_h) = ½ ± ½ n·m`.
pub fn born_probabilities(n: BlochVector, m: BlochVector) -> Result<(f64, f64)> {
    n.check_state()?;
    m.check_direction()?;
    let c = n.dot(&m).clamp(-1.0, 1.0);
    Ok((0.5 + 0.5 * c, 0.5 - 0.5 * c))
}

/// Photon state between polarizer and analyzer:
/// `√((1+n·m)/2)|1⟩ + √((1−n·m)/2)|0⟩`.
pub fn pre_analyzer_state(n: BlochVector, m: BlochVector) -> Result<PureKet> {
    n.check_pure()?;
    m.check_direction()?;
    let (c, s) = reduction_amplitudes(&n, &m);
    Ok(PureKet {
        a0: C64::from(s),
        a1: C64::from(c),
    })
}

fn reduction_amplitudes(n: &BlochVector, m: &BlochVector) -> (f64, f64) {
    let d = n.dot(m).clamp(-1.0, 1.0);
    (((1.0 + d) / 2.0).sqrt(), ((1.0 - d) / 2.0).sqrt())
}

/// Which reduction unitary was applied in an event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `U_v`, photon ends in `|1⟩`.
    V,
    /// `U_h`, photon ends in `|0⟩`.
    H,
}

/// The two unitaries taking the pre-analyzer state to `|1⟩` and `|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionPair {
    pub u_v: Mat2,
    pub u_h: Mat2,
}

impl ReductionPair {
    pub fn get(&self, branch: Branch) -> &Mat2 {
        match branch {
            Branch::V => &self.u_v,
            Branch::H => &self.u_h,
        }
    }
}

/// With `c = √((1+n·m)/2)`, `s = √((1−n·m)/2)`:
///
/// ```text
/// U_v = c(|1⟩⟨1| + |0⟩⟨0|) + s(|1⟩⟨0| − |0⟩⟨1|)
/// U_h = s(|1⟩⟨1| + |0⟩⟨0|) + c(|0⟩⟨1| − |1⟩⟨0|)
/// ```
pub fn reduction_unitaries(n: BlochVector, m: BlochVector) -> Result<ReductionPair> {
    n.check_pure()?;
    m.check_direction()?;
    let (c, s) = reduction_amplitudes(&n, &m);
    let (c, s) = (C64::from(c), C64::from(s));
    // Matrix2::new takes rows: (⟨0|·|0⟩, ⟨0|·|1⟩, ⟨1|·|0⟩, ⟨1|·|1⟩).
    let u_v = Mat2::new(c, -s, s, c);
    let u_h = Mat2::new(s, c, -c, s);
    Ok(ReductionPair { u_v, u_h })
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &Mat2::identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        max_abs_diff(a, b) <= tol
    }

    #[test]
    fn density_examples() {
        let rho = density_from_bloch(BlochVector::Z).unwrap();
        assert!(close(
            rho.matrix(),
            &Mat2::new(c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)),
            0.0
        ));
        let rho = density_from_bloch(BlochVector::ORIGIN).unwrap();
        assert!(close(
            rho.matrix(),
            PolarizationDensity::maximally_mixed().matrix(),
            0.0
        ));
        let rho = density_from_bloch(BlochVector::X).unwrap();
        let h = c(0.5, 0.);
        assert!(close(rho.matrix(), &Mat2::new(h, h, h, h), 1e-15));
    }

    #[test]
    fn density_rejects_outside_ball() {
        let err = density_from_bloch(BlochVector::new(1.0, 0.1, 0.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidBloch { .. }));
    }

    #[test]
    fn bloch_from_density_examples() {
        let n = bloch_from_density(PolarizationDensity::maximally_mixed().matrix()).unwrap();
        assert!(n.approx_eq(&BlochVector::ORIGIN, 1e-15));

        let p0 = PureKet::horizontal().density();
        let p1 = PureKet::vertical().density();
        let mix = p0.matrix() * c(0.75, 0.) + p1.matrix() * c(0.25, 0.);
        let n = bloch_from_density(&mix).unwrap();
        assert!((n.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bloch_from_density_rejects_bad_input() {
        let bad_trace = Mat2::identity();
        assert!(matches!(
            bloch_from_density(&bad_trace),
            Err(Error::InvalidDensity(_))
        ));
        let non_hermitian = Mat2::new(c(0.5, 0.), c(0.3, 0.), c(0.1, 0.), c(0.5, 0.));
        assert!(matches!(
            bloch_from_density(&non_hermitian),
            Err(Error::InvalidDensity(_))
        ));
    }

    #[test]
    fn random_pure_states_have_unit_bloch() {
        let mut rng = seed::rng(11);
        for _ in 0..100 {
            let a0 = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let a1 = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let ket = PureKet::normalized(a0, a1).unwrap();
            let n = bloch_from_density(ket.density().matrix()).unwrap();
            assert!((n.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn observable_examples() {
        let [s1, _, s3] = pauli();
        assert_eq!(*observable_matrix(BlochVector::Z).unwrap().matrix(), s3);
        assert_eq!(*observable_matrix(BlochVector::X).unwrap().matrix(), s1);
        let err = observable_matrix(BlochVector::new(0.5, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidObservable { .. }));
    }

    #[test]
    fn sigma3_acts_as_vertical_minus_horizontal() {
        let [_, _, s3] = pauli();
        let v = PureKet::vertical().vector();
        let h = PureKet::horizontal().vector();
        assert_eq!(s3 * v, v);
        assert_eq!(s3 * h, -h);
    }

    #[test]
    fn commutator_examples() {
        let zero = pauli_commutator(BlochVector::Y, BlochVector::Y).unwrap();
        assert!(close(&zero, &Mat2::zeros(), 0.0));
        let [_, _, s3] = pauli();
        let comm = pauli_commutator(BlochVector::X, BlochVector::Y).unwrap();
        assert!(close(&comm, &(s3 * c(0., 2.)), 1e-15));
    }

    #[test]
    fn born_examples() {
        assert_eq!(
            born_probabilities(BlochVector::Z, BlochVector::Z).unwrap(),
            (1.0, 0.0)
        );
        assert_eq!(
            born_probabilities(BlochVector::X, BlochVector::Z).unwrap(),
            (0.5, 0.5)
        );
        assert_eq!(
            born_probabilities(BlochVector::Z, -BlochVector::Z).unwrap(),
            (0.0, 1.0)
        );
    }

    #[test]
    fn pre_analyzer_examples() {
        let ket = pre_analyzer_state(BlochVector::X, BlochVector::X).unwrap();
        assert!(ket.same_up_to_phase(&PureKet::vertical(), 1e-15));
        let ket = pre_analyzer_state(BlochVector::X, BlochVector::Z).unwrap();
        let (a0, a1) = ket.amplitudes();
        assert!((a0.re - FRAC_1_SQRT_2).abs() < 1e-15 && (a1.re - FRAC_1_SQRT_2).abs() < 1e-15);
        let err = pre_analyzer_state(BlochVector::new(0.5, 0.0, 0.0), BlochVector::Z).unwrap_err();
        assert!(matches!(err, Error::PureStateRequired { .. }));
    }

    #[test]
    fn reduction_examples() {
        let pair = reduction_unitaries(BlochVector::Y, BlochVector::Y).unwrap();
        assert!(close(&pair.u_v, &Mat2::identity(), 1e-15));

        let pair = reduction_unitaries(BlochVector::X, BlochVector::Z).unwrap();
        // (I + |1⟩⟨0| − |0⟩⟨1|)/√2
        let r = c(FRAC_1_SQRT_2, 0.);
        let expected = Mat2::new(r, -r, r, r);
        assert!(close(&pair.u_v, &expected, 1e-15));
        assert!(unitarity_defect(&pair.u_v) <= 1e-15);
    }

    #[test]
    fn eigenstate_kets_match_their_bloch_vectors() {
        let mut rng = seed::rng(5);
        for _ in 0..100 {
            let n = BlochVector::random_unit(&mut rng);
            let plus = PureKet::from_bloch(n).unwrap();
            let minus = PureKet::antipode_of(n).unwrap();
            assert!(plus.bloch().approx_eq(&n, 1e-12));
            assert!(minus.bloch().approx_eq(&-n, 1e-12));
            assert!(plus.inner(&minus).norm() < 1e-12);
        }
    }
}
