//! Spin-1 operator algebra on the F_z eigenbasis.
//!
//! Every matrix and spinor in the crate uses the basis ordering
//! (m = +1, 0, −1). Index 0 is χ₁, index 2 is χ₋₁.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Tolerance for algebraic identities and unitarity checks.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for constructions that are exact up to rounding.
pub const EXACT_TOL: f64 = 1e-14;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinAlgebraError {
    #[error("generator is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("magnetic quantum number {0} is outside {{-1, 0, 1}}")]
    InvalidM(i32),
}

/// Cartesian axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Basis index of magnetic quantum number `m`.
pub fn m_index(m: i32) -> Result<usize, SpinAlgebraError> {
    match m {
        1 => Ok(0),
        0 => Ok(1),
        -1 => Ok(2),
        _ => Err(SpinAlgebraError::InvalidM(m)),
    }
}

/// Magnetic quantum numbers in basis order.
pub const M_VALUES: [i32; 3] = [1, 0, -1];

/// A 3×3 complex operator on the F = 1 manifold.
#[derive(Clone, Copy, PartialEq)]
pub struct SpinMatrix(pub Matrix3<C64>);

/// A three-component spinor (χ₁, χ₀, χ₋₁ amplitudes).
#[derive(Clone, Copy, PartialEq)]
pub struct SpinState(pub Vector3<C64>);

impl SpinMatrix {
    pub fn zeros() -> Self {
        SpinMatrix(Matrix3::zeros())
    }

    pub fn identity() -> Self {
        SpinMatrix(Matrix3::identity())
    }

    pub fn from_rows(rows: [[C64; 3]; 3]) -> Self {
        SpinMatrix(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    /// Matrix element ⟨χ_m|M|χ_m′⟩.
    pub fn element(&self, m: i32, m_prime: i32) -> Result<C64, SpinAlgebraError> {
        Ok(self.0[(m_index(m)?, m_index(m_prime)?)])
    }

    pub fn adjoint(&self) -> Self {
        SpinMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        SpinMatrix(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        SpinMatrix(self.0 * factor)
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        SpinMatrix(self.0 * C64::new(factor, 0.0))
    }

    pub fn commutator(&self, other: &SpinMatrix) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &SpinMatrix) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpinMatrix) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&SpinMatrix::identity()) <= tol
    }

    /// ⟨a|M|b⟩.
    pub fn sandwich(&self, bra: &SpinState, ket: &SpinState) -> C64 {
        bra.inner(&(*self * *ket))
    }
}

impl fmt::Debug for SpinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpinMatrix[")?;
        for r in 0..3 {
            writeln!(
                f,
                "  {:+.6}{:+.6}i  {:+.6}{:+.6}i  {:+.6}{:+.6}i",
                self.0[(r, 0)].re,
                self.0[(r, 0)].im,
                self.0[(r, 1)].re,
                self.0[(r, 1)].im,
                self.0[(r, 2)].re,
                self.0[(r, 2)].im
            )?;
        }
        write!(f, "]")
    }
}

impl Add for SpinMatrix {
    type Output = SpinMatrix;
    fn add(self, rhs: SpinMatrix) -> SpinMatrix {
        SpinMatrix(self.0 + rhs.0)
    }
}

impl Sub for SpinMatrix {
    type Output = SpinMatrix;
    fn sub(self, rhs: SpinMatrix) -> SpinMatrix {
        SpinMatrix(self.0 - rhs.0)
    }
}

impl Neg for SpinMatrix {
    type Output = SpinMatrix;
    fn neg(self) -> SpinMatrix {
        SpinMatrix(-self.0)
    }
}

impl Mul for SpinMatrix {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        SpinMatrix(self.0 * rhs.0)
    }
}

impl Mul<SpinState> for SpinMatrix {
    type Output = SpinState;
    fn mul(self, rhs: SpinState) -> SpinState {
        SpinState(self.0 * rhs.0)
    }
}

impl Mul<SpinMatrix> for C64 {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        rhs.scale(self)
    }
}

impl Mul<SpinMatrix> for f64 {
    type Output = SpinMatrix;
    fn mul(self, rhs: SpinMatrix) -> SpinMatrix {
        rhs.scale_re(self)
    }
}

impl SpinState {
    pub fn zeros() -> Self {
        SpinState(Vector3::zeros())
    }

    pub fn new(plus: C64, zero: C64, minus: C64) -> Self {
        SpinState(Vector3::new(plus, zero, minus))
    }

    /// Basis spinor χ_m.
    pub fn basis(m: i32) -> Result<Self, SpinAlgebraError> {
        let mut v = Vector3::zeros();
        v[m_index(m)?] = C64::new(1.0, 0.0);
        Ok(SpinState(v))
    }

    pub fn component(&self, m: i32) -> Result<C64, SpinAlgebraError> {
        Ok(self.0[m_index(m)?])
    }

    /// ⟨self|other⟩ (antilinear in `self`).
    pub fn inner(&self, other: &SpinState) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        SpinState(self.0 * factor)
    }

    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SpinState({:+.6}{:+.6}i, {:+.6}{:+.6}i, {:+.6}{:+.6}i)",
            self.0[0].re, self.0[0].im, self.0[1].re, self.0[1].im, self.0[2].re, self.0[2].im
        )
    }
}

impl Add for SpinState {
    type Output = SpinState;
    fn add(self, rhs: SpinState) -> SpinState {
        SpinState(self.0 + rhs.0)
    }
}

impl AddAssign for SpinState {
    fn add_assign(&mut self, rhs: SpinState) {
        self.0 += rhs.0;
    }
}

impl Sub for SpinState {
    type Output = SpinState;
    fn sub(self, rhs: SpinState) -> SpinState {
        SpinState(self.0 - rhs.0)
    }
}

impl Neg for SpinState {
    type Output = SpinState;
    fn neg(self) -> SpinState {
        SpinState(-self.0)
    }
}

impl Mul<SpinState> for C64 {
    type Output = SpinState;
    fn mul(self, rhs: SpinState) -> SpinState {
        rhs.scale(self)
    }
}

/// The spin-1 operators (F_x, F_y, F_z).
pub fn spin_operators() -> (SpinMatrix, SpinMatrix, SpinMatrix) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let r = C64::new(s, 0.0);
    let im = C64::new(0.0, s);
    let fx = SpinMatrix::from_rows([[z, r, z], [r, z, r], [z, r, z]]);
    let fy = SpinMatrix::from_rows([[z, -im, z], [im, z, -im], [z, im, z]]);
    let one = C64::new(1.0, 0.0);
    let fz = SpinMatrix::from_rows([[one, z, z], [z, z, z], [z, z, -one]]);
    (fx, fy, fz)
}

/// F_j for a single Cartesian axis.
pub fn spin_component(axis: Axis) -> SpinMatrix {
    let (fx, fy, fz) = spin_operators();
    match axis {
        Axis::X => fx,
        Axis::Y => fy,
        Axis::Z => fz,
    }
}

/// n·F for a real 3-vector `n` (not necessarily unit length).
pub fn spin_projection(n: [f64; 3]) -> SpinMatrix {
    let (fx, fy, fz) = spin_operators();
    fx.scale_re(n[0]) + fy.scale_re(n[1]) + fz.scale_re(n[2])
}

/// Quadrupole operator Q_{j,j′} = F_j F_j′ + F_j′ F_j − (2/3)F(F+1)δ_{j,j′} with F = 1.
pub fn quadrupole(j: Axis, j_prime: Axis) -> SpinMatrix {
    let fj = spin_component(j);
    let fk = spin_component(j_prime);
    let mut q = fj.anticommutator(&fk);
    if j == j_prime {
        q = q - SpinMatrix::identity().scale_re(4.0 / 3.0);
    }
    q
}

/// exp(−iθH) for Hermitian `h`, via eigendecomposition.
pub fn mat_exp_antihermitian(h: &SpinMatrix, theta: f64) -> Result<SpinMatrix, SpinAlgebraError> {
    let deviation = h.hermiticity_defect();
    if deviation > IDENTITY_TOL * h.max_abs().max(1.0) {
        return Err(SpinAlgebraError::NotHermitian { deviation });
    }
    // symmetrize away rounding-level anti-Hermitian noise
    let sym = (h.0 + h.0.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let phases = Matrix3::from_diagonal(&Vector3::from_fn(|k, _| {
        (-I * theta * eig.eigenvalues[k]).exp()
    }));
    Ok(SpinMatrix(
        eig.eigenvectors * phases * eig.eigenvectors.adjoint(),
    ))
}

/// exp(−iθ n·F) in closed form.
///
/// For a unit axis n̂ the spin-1 generator satisfies (n̂·F)³ = n̂·F, so
/// exp(−iφ n̂·F) = 𝕀 + (cos φ − 1)(n̂·F)² − i sin φ (n̂·F). A non-unit `n`
/// is folded into the angle φ = θ|n|.
pub fn spin_rotation(n: [f64; 3], theta: f64) -> SpinMatrix {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 {
        return SpinMatrix::identity();
    }
    let unit = [n[0] / len, n[1] / len, n[2] / len];
    let phi = theta * len;
    let g = spin_projection(unit);
    SpinMatrix::identity() + (g * g).scale_re(phi.cos() - 1.0) - g.scale(I * phi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Term-by-term Taylor sum of exp(−iθH), an oracle independent of both
    /// the eigendecomposition and the closed form.
    fn taylor_exp(h: &SpinMatrix, theta: f64) -> SpinMatrix {
        let a = h.scale(c(0.0, -theta));
        let mut term = SpinMatrix::identity();
        let mut sum = SpinMatrix::identity();
        for k in 1..80 {
            term = (term * a).scale_re(1.0 / k as f64);
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn fy_raises_chi_plus_to_chi_zero() {
        let (_, fy, _) = spin_operators();
        let out = fy * SpinState::basis(1).unwrap();
        let expected = SpinState::new(
            c(0.0, 0.0),
            c(0.0, std::f64::consts::FRAC_1_SQRT_2),
            c(0.0, 0.0),
        );
        assert!(out.max_abs_diff(&expected) < EXACT_TOL);
    }

    #[test]
    fn fz_annihilates_chi_zero() {
        let (_, _, fz) = spin_operators();
        let out = fz * SpinState::basis(0).unwrap();
        assert!(out.norm_sqr() < EXACT_TOL);
    }

    #[test]
    fn casimir_is_two() {
        let (fx, fy, fz) = spin_operators();
        let f2 = fx * fx + fy * fy + fz * fz;
        assert!(f2.max_abs_diff(&SpinMatrix::identity().scale_re(2.0)) < EXACT_TOL);
    }

    #[test]
    fn commutation_relations() {
        let (fx, fy, fz) = spin_operators();
        let i = c(0.0, 1.0);
        assert!(fx.commutator(&fy).max_abs_diff(&fz.scale(i)) < EXACT_TOL);
        assert!(fy.commutator(&fz).max_abs_diff(&fx.scale(i)) < EXACT_TOL);
        assert!(fz.commutator(&fx).max_abs_diff(&fy.scale(i)) < EXACT_TOL);
    }

    #[test]
    fn quadrupole_yy_definition() {
        let (_, fy, _) = spin_operators();
        let expected = (fy * fy).scale_re(2.0) - SpinMatrix::identity().scale_re(4.0 / 3.0);
        assert!(quadrupole(Axis::Y, Axis::Y).max_abs_diff(&expected) < EXACT_TOL);
    }

    #[test]
    fn quadrupoles_traceless_hermitian_symmetric() {
        for a in Axis::ALL {
            for b in Axis::ALL {
                let q = quadrupole(a, b);
                assert!(q.trace().norm() < EXACT_TOL, "trace Q_{a:?}{b:?}");
                assert!(q.is_hermitian(EXACT_TOL));
                assert_eq!(q, quadrupole(b, a));
            }
        }
    }

    #[test]
    fn quadrupole_yy_on_chi_plus() {
        // ⟨F_y²⟩ = 1/2 in χ₁, so 2·(1/2) − 4/3 = −1/3
        let chi = SpinState::basis(1).unwrap();
        let v = quadrupole(Axis::Y, Axis::Y).sandwich(&chi, &chi);
        assert!((v - c(-1.0 / 3.0, 0.0)).norm() < EXACT_TOL);
    }

    #[test]
    fn exp_zero_angle_is_identity() {
        let (_, fy, _) = spin_operators();
        let u = mat_exp_antihermitian(&fy, 0.0).unwrap();
        assert!(u.max_abs_diff(&SpinMatrix::identity()) < IDENTITY_TOL);
    }

    #[test]
    fn exp_pi_fz_on_chi_plus() {
        let (_, _, fz) = spin_operators();
        let u = mat_exp_antihermitian(&fz, std::f64::consts::PI).unwrap();
        let out = u * SpinState::basis(1).unwrap();
        let expected = SpinState::basis(1).unwrap().scale(c(-1.0, 0.0));
        assert!(out.max_abs_diff(&expected) < IDENTITY_TOL);
    }

    #[test]
    fn closed_form_matches_taylor_and_eigen() {
        let (_, fy, _) = spin_operators();
        for theta in [0.1, 1.0, std::f64::consts::PI] {
            let closed = SpinMatrix::identity() + (fy * fy).scale_re(theta.cos() - 1.0)
                - fy.scale(c(0.0, theta.sin()));
            let taylor = taylor_exp(&fy, theta);
            let eigen = mat_exp_antihermitian(&fy, theta).unwrap();
            let rot = spin_rotation([0.0, 1.0, 0.0], theta);
            assert!(closed.max_abs_diff(&taylor) < IDENTITY_TOL, "theta={theta}");
            assert!(eigen.max_abs_diff(&taylor) < IDENTITY_TOL, "theta={theta}");
            assert!(rot.max_abs_diff(&taylor) < IDENTITY_TOL, "theta={theta}");
        }
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let mut m = SpinMatrix::identity();
        m.0[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            mat_exp_antihermitian(&m, 1.0),
            Err(SpinAlgebraError::NotHermitian { .. })
        ));
    }

    #[test]
    fn invalid_m_rejected() {
        assert_eq!(
            SpinState::basis(2).unwrap_err(),
            SpinAlgebraError::InvalidM(2)
        );
    }

    fn hermitian_strategy() -> impl Strategy<Value = SpinMatrix> {
        proptest::collection::vec(-2.0f64..2.0, 9).prop_map(|v| {
            let diag = [v[0], v[1], v[2]];
            let off = [c(v[3], v[4]), c(v[5], v[6]), c(v[7], v[8])];
            let mut m = Matrix3::zeros();
            for k in 0..3 {
                m[(k, k)] = c(diag[k], 0.0);
            }
            m[(0, 1)] = off[0];
            m[(1, 0)] = off[0].conj();
            m[(0, 2)] = off[1];
            m[(2, 0)] = off[1].conj();
            m[(1, 2)] = off[2];
            m[(2, 1)] = off[2].conj();
            SpinMatrix(m)
        })
    }

    proptest! {
        #[test]
        fn exp_group_law(h in hermitian_strategy(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let u1 = mat_exp_antihermitian(&h, t1).unwrap();
            let u2 = mat_exp_antihermitian(&h, t2).unwrap();
            let u12 = mat_exp_antihermitian(&h, t1 + t2).unwrap();
            prop_assert!((u1 * u2).max_abs_diff(&u12) < IDENTITY_TOL);
            prop_assert!(u1.is_unitary(IDENTITY_TOL));
        }

        #[test]
        fn exp_matches_taylor(h in hermitian_strategy(), t in -1.0f64..1.0) {
            let u = mat_exp_antihermitian(&h, t).unwrap();
            prop_assert!(u.max_abs_diff(&taylor_exp(&h, t)) < 1e-11);
        }

        #[test]
        fn rotation_closed_form_agrees_with_eigen(
            nx in -2.0f64..2.0, ny in -2.0f64..2.0, nz in -2.0f64..2.0, t in -4.0f64..4.0
        ) {
            let g = spin_projection([nx, ny, nz]);
            let eigen = mat_exp_antihermitian(&g, t).unwrap();
            let closed = spin_rotation([nx, ny, nz], t);
            prop_assert!(eigen.max_abs_diff(&closed) < IDENTITY_TOL);
        }
    }
}
