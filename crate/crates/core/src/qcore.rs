//! Small fixed-size complex linear algebra for one- and two-qubit operators.
//!
//! Only 2×2 and 4×4 matrices exist here; the dimension is a const parameter
//! restricted at compile time through [`SupportedDim`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance used when validating density matrices (trace and hermiticity).
pub const STATE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite operator.
pub const PSD_TOL: f64 = 1e-10;

/// Marker for the matrix dimensions this module supports.
pub struct Dim<const N: usize>;

pub trait SupportedDim {}
impl SupportedDim for Dim<2> {}
impl SupportedDim for Dim<4> {}

/// Dense square complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>
where
    Dim<N>: SupportedDim,
{
    data: [[C64; N]; N],
}

pub type Mat2 = Matrix<2>;
pub type Mat4 = Matrix<4>;

impl<const N: usize> Matrix<N>
where
    Dim<N>: SupportedDim,
{
    pub const DIM: usize = N;

    pub fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        Self { data: rows }
    }

    pub fn from_real_rows(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.data[i][j] = C64::new(v, 0.0);
            }
        }
        m
    }

    pub fn diag(values: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in values.into_iter().enumerate() {
            m.data[i][i] = C64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row][col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row][col] = value;
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[j][i] = self.data[i][j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.data.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .flatten()
            .zip(other.data.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut t = ZERO;
        for i in 0..N {
            for k in 0..N {
                t += self.data[i][k] * other.data[k][i];
            }
        }
        t
    }

    /// `self · rho · self†`.
    pub fn conjugate(&self, rho: &Self) -> Self {
        *self * *rho * self.adjoint()
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Only the Hermitian part of `self` is used.
    pub fn eigh(&self) -> Eigh<N> {
        let mut a = (*self + self.adjoint()).scale_real(0.5);
        let mut v = Self::identity();
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

        for _sweep in 0..64 {
            let off: f64 = (0..N)
                .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
                .map(|(p, q)| a.data[p][q].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a.data[p][q];
                    let b = apq.norm();
                    if b <= 1e-300 {
                        continue;
                    }
                    // A phase on basis vector q makes the pivot real, then a
                    // real Jacobi rotation annihilates it.
                    let phase = apq / b;
                    let theta = (a.data[q][q].re - a.data[p][p].re) / (2.0 * b);
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let mut u = Self::identity();
                    u.data[p][p] = C64::new(c, 0.0);
                    u.data[p][q] = C64::new(s, 0.0);
                    u.data[q][p] = -phase.conj() * s;
                    u.data[q][q] = phase.conj() * c;
                    a = u.adjoint() * a * u;
                    v = v * u;
                }
            }
        }

        let mut order: Vec<usize> = (0..N).collect();
        order.sort_by(|&i, &j| a.data[i][i].re.total_cmp(&a.data[j][j].re));
        let mut values = [0.0; N];
        let mut vectors = Self::zeros();
        for (k, &i) in order.iter().enumerate() {
            values[k] = a.data[i][i].re;
            for r in 0..N {
                vectors.data[r][k] = v.data[r][i];
            }
        }
        Eigh { values, vectors }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().values[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

impl<const N: usize> fmt::Debug for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix<{N}>[")?;
        for row in &self.data {
            write!(f, " ")?;
            for z in row {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<const N: usize> Add for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] += rhs.data[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] -= rhs.data[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let aik = self.data[i][k];
                if aik == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.data[i][j] += aik * rhs.data[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> std::iter::Sum for Matrix<N>
where
    Dim<N>: SupportedDim,
{
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zeros(), |acc, m| acc + m)
    }
}

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh<const N: usize>
where
    Dim<N>: SupportedDim,
{
    pub values: [f64; N],
    pub vectors: Matrix<N>,
}

impl<const N: usize> Eigh<N>
where
    Dim<N>: SupportedDim,
{
    /// `V · diag(λ) · V†`.
    pub fn reconstruct(&self) -> Matrix<N> {
        self.vectors * Matrix::diag(self.values) * self.vectors.adjoint()
    }
}

/// Pauli matrix σ₁, σ₂ or σ₃ (`index` 1, 2, 3); index 0 gives the identity.
pub fn pauli(index: usize) -> Mat2 {
    let i = C64::new(0.0, 1.0);
    match index {
        0 => Mat2::identity(),
        1 => Mat2::from_real_rows([[0.0, 1.0], [1.0, 0.0]]),
        2 => Mat2::from_rows([[ZERO, -i], [i, ZERO]]),
        3 => Mat2::diag([1.0, -1.0]),
        _ => panic!("pauli index {index} out of range 0..=3"),
    }
}

/// Real three-vector parameterising a qubit operator `(I + v·σ)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector in the x–z plane at `angle` from +x towards +z.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self::new(angle.cos(), 0.0, angle.sin())
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + 1e-12
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// `v·σ` without the identity part.
    pub fn sigma_dot(&self) -> Mat2 {
        pauli(1).scale_real(self.x) + pauli(2).scale_real(self.y) + pauli(3).scale_real(self.z)
    }

    /// Bloch vector of a trace-one qubit operator, `v_i = Tr(σ_i ρ)`.
    pub fn from_density(rho: &Mat2) -> Self {
        Self::new(
            pauli(1).trace_product(rho).re,
            pauli(2).trace_product(rho).re,
            pauli(3).trace_product(rho).re,
        )
    }
}

impl Add for BlochVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for BlochVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// `(I + x σ₁ + y σ₂ + z σ₃)/2`.
pub fn pauli_expand(v: BlochVector) -> Mat2 {
    (Mat2::identity() + v.sigma_dot()).scale_real(0.5)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.set(2 * i + k, 2 * j + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    m
}

/// Traces out the first qubit, leaving the operator on the second.
pub fn partial_trace_first(m: &Mat4) -> Mat2 {
    let mut r = Mat2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            r.set(k, l, m.get(k, l) + m.get(2 + k, 2 + l));
        }
    }
    r
}

/// Traces out the second qubit, leaving the operator on the first.
pub fn partial_trace_second(m: &Mat4) -> Mat2 {
    let mut r = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            r.set(i, j, m.get(2 * i, 2 * j) + m.get(2 * i + 1, 2 * j + 1));
        }
    }
    r
}

/// Validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    /// Checks unit trace, hermiticity and positivity before accepting `matrix`.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if !matrix.is_hermitian(STATE_TOL) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {:.3e})",
                matrix.max_abs_diff(&matrix.adjoint())
            )));
        }
        let min = matrix.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a density matrix by construction (for example the
    /// output of a trace-preserving channel on a valid state).
    pub(crate) fn from_trusted(matrix: Mat4) -> Self {
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-9);
        Self { matrix }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// `Tr(op · ρ)`, real part.
    pub fn expectation(&self, op: &Mat4) -> f64 {
        op.trace_product(&self.matrix).re
    }

    /// `Tr[(a ⊗ b) ρ]`.
    pub fn local_expectation(&self, a: &Mat2, b: &Mat2) -> f64 {
        self.expectation(&tensor(a, b))
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn reduced_first(&self) -> Mat2 {
        partial_trace_second(&self.matrix)
    }

    pub fn reduced_second(&self) -> Mat2 {
        partial_trace_first(&self.matrix)
    }

    /// Applies `I ⊗ K` to both sides for every operator in `kraus`, summing the
    /// results.
    pub fn apply_second(&self, kraus: &[Mat2]) -> Mat4 {
        kraus
            .iter()
            .map(|k| tensor(&Mat2::identity(), k).conjugate(&self.matrix))
            .sum()
    }

    /// Unnormalised state of the second qubit after the first qubit is
    /// projected with the effect `effect`.
    pub fn conditional_second(&self, effect: &Mat2) -> Mat2 {
        partial_trace_first(&(tensor(effect, &Mat2::identity()) * self.matrix))
    }
}

/// The Bell state `(|00⟩ + |11⟩)/√2` as a density matrix.
pub fn max_entangled_state() -> TwoQubitState {
    let mut m = Mat4::zeros();
    for &i in &[0, 3] {
        for &j in &[0, 3] {
            m.set(i, j, C64::new(0.5, 0.0));
        }
    }
    TwoQubitState::from_trusted(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_expand_examples() {
        let half = Mat2::identity().scale_real(0.5);
        assert!(pauli_expand(BlochVector::default()).max_abs_diff(&half) < 1e-15);
        let up = pauli_expand(BlochVector::new(0.0, 0.0, 1.0));
        assert!(up.max_abs_diff(&Mat2::diag([1.0, 0.0])) < 1e-15);
        // (I + σ₁)/2 by hand: every entry 1/2.
        let plus = pauli_expand(BlochVector::new(1.0, 0.0, 0.0));
        let expected = Mat2::from_real_rows([[0.5, 0.5], [0.5, 0.5]]);
        assert!(plus.max_abs_diff(&expected) < 1e-15);
        assert!(plus.is_hermitian(0.0));
        assert!((plus.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let i4 = tensor(&Mat2::identity(), &Mat2::identity());
        assert_eq!(i4, Mat4::identity());
        let p0 = Mat2::diag([1.0, 0.0]);
        assert_eq!(tensor(&p0, &p0), Mat4::diag([1.0, 0.0, 0.0, 0.0]));
        // σ₁⊗σ₃ written out entry by entry.
        let expected = Mat4::from_real_rows([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(tensor(&pauli(1), &pauli(3)), expected);
    }

    #[test]
    fn bell_state_properties() {
        let rho = max_entangled_state();
        let m = rho.matrix();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(m.get(i, j), c(0.5, 0.0));
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let half = Mat2::identity().scale_real(0.5);
        assert!(rho.reduced_first().max_abs_diff(&half) < 1e-15);
        assert!(rho.reduced_second().max_abs_diff(&half) < 1e-15);
        assert!((rho.local_expectation(&pauli(1), &pauli(1)) - 1.0).abs() < 1e-15);
        assert!((rho.local_expectation(&pauli(2), &pauli(2)) + 1.0).abs() < 1e-15);
        assert!((rho.local_expectation(&pauli(3), &pauli(3)) - 1.0).abs() < 1e-15);
        assert!(TwoQubitState::new(*m).is_ok());
    }

    #[test]
    fn state_validation_rejects_bad_matrices() {
        let not_unit = Mat4::identity();
        assert!(matches!(
            TwoQubitState::new(not_unit),
            Err(Error::InvalidState(_))
        ));
        let negative = Mat4::diag([1.5, -0.5, 0.0, 0.0]);
        assert!(TwoQubitState::new(negative).is_err());
        let mut skew = Mat4::diag([0.25; 4]);
        skew.set(0, 1, c(0.1, 0.0));
        assert!(TwoQubitState::new(skew).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = pauli_expand(BlochVector::new(0.3, -0.2, 0.5));
        let b = pauli_expand(BlochVector::new(-0.1, 0.6, 0.2));
        let ab = tensor(&a, &b);
        assert!(partial_trace_first(&ab).max_abs_diff(&b) < 1e-15);
        assert!(partial_trace_second(&ab).max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn eigh_of_known_spectrum() {
        let e = pauli(2).eigh();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let bell = max_entangled_state();
        let e = bell.matrix().eigh();
        assert!(e.values[..3].iter().all(|v| v.abs() < 1e-14));
        assert!((e.values[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_round_trip() {
        let v = BlochVector::new(0.1, -0.4, 0.7);
        let back = BlochVector::from_density(&pauli_expand(v));
        assert!(back.distance(&v) < 1e-15);
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    fn arb_mat2() -> impl Strategy<Value = Mat2> {
        prop::array::uniform4(arb_c64())
            .prop_map(|e| Mat2::from_rows([[e[0], e[1]], [e[2], e[3]]]))
    }

    fn arb_mat4() -> impl Strategy<Value = Mat4> {
        prop::array::uniform16(arb_c64()).prop_map(|e| {
            let mut m = Mat4::zeros();
            for (k, z) in e.into_iter().enumerate() {
                m.set(k / 4, k % 4, z);
            }
            m
        })
    }

    fn arb_ball() -> impl Strategy<Value = BlochVector> {
        (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, cz, phi)| {
            let sz = (1.0 - cz * cz).sqrt();
            BlochVector::new(r * sz * phi.cos(), r * sz * phi.sin(), r * cz)
        })
    }

    proptest! {
        #[test]
        fn adjoint_reverses_products(a in arb_mat4(), b in arb_mat4()) {
            let lhs = (a * b).adjoint();
            let rhs = b.adjoint() * a.adjoint();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
        }

        #[test]
        fn physical_bloch_vectors_expand_to_psd(v in arb_ball()) {
            let m = pauli_expand(v);
            prop_assert!(m.min_eigenvalue() >= -1e-12);
            prop_assert!((m.trace().re - 1.0).abs() < 1e-15);
        }

        #[test]
        fn tensor_is_bilinear(a in arb_mat2(), b in arb_mat2(), cm in arb_mat2(),
                              s in arb_c64(), t in arb_c64()) {
            let lhs = tensor(&(a.scale(s) + b.scale(t)), &cm);
            let rhs = tensor(&a, &cm).scale(s) + tensor(&b, &cm).scale(t);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
            let tr = tensor(&a, &b).trace();
            prop_assert!((tr - a.trace() * b.trace()).norm() <= 1e-13);
        }

        #[test]
        fn hermitian_eigh_reconstructs(m in arb_mat4()) {
            let h = (m + m.adjoint()).scale_real(0.5);
            let e = h.eigh();
            prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let vv = e.vectors.adjoint() * e.vectors;
            prop_assert!(vv.max_abs_diff(&Mat4::identity()) <= 1e-10);
        }
    }
}
