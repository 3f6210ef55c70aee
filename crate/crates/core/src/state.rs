//! Qubit states: pure spinors and density matrices in the Pauli basis.
//!
//! Basis convention: the first amplitude multiplies the `σz = +1` state, the
//! second the `σz = −1` state. The T₁ jump operator relaxes towards `σz = −1`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Scalar> Add for BlochVector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for BlochVector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Pure two-level state `up·|↑⟩ + down·|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T> {
    pub up: Complex<T>,
    pub down: Complex<T>,
}

impl<T: Scalar> Spinor<T> {
    pub fn new(up: Complex<T>, down: Complex<T>) -> Self {
        Self { up, down }
    }

    /// `σz = +1` eigenstate.
    pub fn spin_up() -> Self {
        Self::new(
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        )
    }

    /// `σz = −1` eigenstate, the relaxation target.
    pub fn spin_down() -> Self {
        Self::new(
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::one(), T::zero()),
        )
    }

    /// Pure state pointing along the unit Bloch direction `n`, with the first
    /// amplitude real and nonnegative. When the first amplitude vanishes the
    /// second is made real and positive.
    pub fn from_bloch_direction(n: &BlochVector<T>) -> Self {
        let len = n.norm();
        let (nx, ny, nz) = (n.x / len, n.y / len, n.z / len);
        let transverse = (nx * nx + ny * ny).sqrt();
        let two = T::lit(2.0);
        // (1 ± nz) / 2 without cancellation: 1 - |nz| = transverse² / (1 + |nz|).
        let one_minus_abs = transverse * transverse / (T::one() + nz.abs());
        let (plus, minus) = if nz >= T::zero() {
            (T::one() + nz, one_minus_abs)
        } else {
            (one_minus_abs, T::one() - nz)
        };
        let a = (plus / two).sqrt();
        let b_mag = (minus / two).sqrt();
        if transverse > T::zero() {
            let phase = Complex::new(nx / transverse, ny / transverse);
            Self::new(Complex::new(a, T::zero()), phase * b_mag)
        } else if a > T::zero() {
            Self::spin_up()
        } else {
            Self::spin_down()
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(T::one() / n)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.up * s, self.down * s)
    }

    pub fn phase(&self, z: Complex<T>) -> Self {
        Self::new(self.up * z, self.down * z)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    pub fn bloch(&self) -> BlochVector<T> {
        let cross = self.up.conj() * self.down;
        let two = T::lit(2.0);
        BlochVector::new(
            two * cross.re,
            two * cross.im,
            self.up.norm_sqr() - self.down.norm_sqr(),
        )
    }
}

impl<T: Scalar> Add for Spinor<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.up + o.up, self.down + o.down)
    }
}

impl<T: Scalar> Sub for Spinor<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.up - o.up, self.down - o.down)
    }
}

impl<T: Scalar> Mul<Complex<T>> for Spinor<T> {
    type Output = Self;
    fn mul(self, z: Complex<T>) -> Self {
        self.phase(z)
    }
}

/// Density matrix stored in the Pauli parametrization
/// `ρ = ½ (trace·I + x σx + y σy + z σz)`.
///
/// Hermiticity is structural: every component is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T> {
    pub trace: T,
    pub bloch: BlochVector<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(trace: T, bloch: BlochVector<T>) -> Self {
        Self { trace, bloch }
    }

    /// Unit-trace state with the given Bloch vector; rejects `|r| > 1`.
    pub fn from_bloch(bloch: BlochVector<T>) -> Result<Self> {
        let rho = Self::new(T::one(), bloch);
        rho.validate()?;
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        Self::new(T::one(), BlochVector::zero())
    }

    pub fn from_pure(psi: &Spinor<T>) -> Self {
        Self::new(psi.norm_sqr(), psi.bloch())
    }

    /// Eigenvalues `½(trace ∓ |r|)`, ascending.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5);
        let r = self.bloch.norm();
        [half * (self.trace - r), half * (self.trace + r)]
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    pub fn purity(&self) -> T {
        let half = T::lit(0.5);
        half * (self.trace * self.trace + self.bloch.dot(&self.bloch))
    }

    /// Dense matrix `[[ρ00, ρ01], [ρ10, ρ11]]`.
    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        let half = T::lit(0.5);
        let r = &self.bloch;
        [
            [
                Complex::new(half * (self.trace + r.z), T::zero()),
                Complex::new(half * r.x, -half * r.y),
            ],
            [
                Complex::new(half * r.x, half * r.y),
                Complex::new(half * (self.trace - r.z), T::zero()),
            ],
        ]
    }

    /// Inverse of [`matrix`](Self::matrix): projects onto the Pauli basis.
    /// The anti-Hermitian part of `m`, if any, is discarded.
    pub fn from_matrix(m: &[[Complex<T>; 2]; 2]) -> Self {
        let trace = (m[0][0] + m[1][1]).re;
        let x = (m[0][1] + m[1][0]).re;
        let y = (m[1][0] - m[0][1]).im;
        let z = (m[0][0] - m[1][1]).re;
        Self::new(trace, BlochVector::new(x, y, z))
    }

    /// Checks unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let tol = T::norm_tolerance();
        let trace_dev = (self.trace - T::one()).abs();
        if !(trace_dev <= tol) {
            return Err(Error::InvalidState(format!(
                "trace deviates from 1 by {:e}",
                trace_dev.as_f64()
            )));
        }
        let lam = self.min_eigenvalue();
        if !(lam >= -tol) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                lam.as_f64()
            )));
        }
        Ok(())
    }
}

/// Either a pure state or a mixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitState<T> {
    Pure(Spinor<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Scalar> QubitState<T> {
    /// Expectation values `Tr(ρ σ_i)`, normalized by the trace.
    pub fn bloch(&self) -> BlochVector<T> {
        match self {
            QubitState::Pure(psi) => psi.bloch().scale(T::one() / psi.norm_sqr()),
            QubitState::Mixed(rho) => rho.bloch.scale(T::one() / rho.trace),
        }
    }

    pub fn density(&self) -> DensityMatrix<T> {
        match self {
            QubitState::Pure(psi) => DensityMatrix::from_pure(psi),
            QubitState::Mixed(rho) => *rho,
        }
    }
}

impl<T> From<Spinor<T>> for QubitState<T> {
    fn from(psi: Spinor<T>) -> Self {
        QubitState::Pure(psi)
    }
}

impl<T> From<DensityMatrix<T>> for QubitState<T> {
    fn from(rho: DensityMatrix<T>) -> Self {
        QubitState::Mixed(rho)
    }
}
