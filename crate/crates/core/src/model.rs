//! Parameter manifold, rotating-frame Hamiltonian and ramp protocol.
//!
//! The drive Hamiltonian in the rotating frame is
//! `H/ħ = ½ [Δ σz + Ω cos φ σx + Ω sin φ σy]` and the family of Hamiltonians
//! explored is the ellipsoid `Δ = Δ₁ cos θ + Δ₂`, `Ω = Ω₁ sin θ`, cylindrically
//! symmetric about the z-axis. All frequencies are angular (rad/s) and all
//! times are in seconds; MHz/μs conversion happens at the config boundary.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{mhz_to_rad_per_s, pole_sin, us_to_s, Scalar};
use crate::state::{BlochVector, Spinor};

/// Relative degeneracy tolerance: `ground_state` refuses `|h| < 1e-6 · max(Δ₁, Ω₁)`.
pub const DEGENERACY_RELATIVE_TOLERANCE: f64 = 1e-6;

/// Ellipsoidal manifold `(Δ₁, Ω₁, Δ₂)` and drive phase `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldParams<T> {
    pub delta1: T,
    pub omega1: T,
    pub delta2: T,
    pub phi: T,
}

impl<T: Scalar> ManifoldParams<T> {
    /// Angular frequencies in rad/s. `phi` is wrapped into `[0, 2π)`.
    pub fn new(delta1: T, omega1: T, delta2: T, phi: T) -> Result<Self> {
        if !(delta1 > T::zero()) || !delta1.is_finite() {
            return Err(Error::param("delta1", "must be positive and finite"));
        }
        if !(omega1 > T::zero()) || !omega1.is_finite() {
            return Err(Error::param("omega1", "must be positive and finite"));
        }
        if !delta2.is_finite() {
            return Err(Error::param("delta2", "must be finite"));
        }
        if !phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        let tau = T::TAU();
        let mut phi = phi % tau;
        if phi < T::zero() {
            phi = phi + tau;
        }
        if phi >= tau {
            phi = T::zero();
        }
        Ok(Self {
            delta1,
            omega1,
            delta2,
            phi,
        })
    }

    /// Ordinary frequencies in MHz, drive phase zero.
    pub fn from_mhz(delta1_mhz: T, omega1_mhz: T, delta2_mhz: T) -> Result<Self> {
        Self::new(
            mhz_to_rad_per_s(delta1_mhz),
            mhz_to_rad_per_s(omega1_mhz),
            mhz_to_rad_per_s(delta2_mhz),
            T::zero(),
        )
    }

    pub fn with_delta2(&self, delta2: T) -> Result<Self> {
        Self::new(self.delta1, self.omega1, delta2, self.phi)
    }

    pub fn with_phi(&self, phi: T) -> Result<Self> {
        Self::new(self.delta1, self.omega1, self.delta2, phi)
    }

    /// `Δ₂ / Δ₁`; the topological transition sits at `|Δ₂/Δ₁| = 1`.
    pub fn delta2_ratio(&self) -> T {
        self.delta2 / self.delta1
    }

    pub fn degeneracy_tolerance(&self) -> T {
        T::lit(DEGENERACY_RELATIVE_TOLERANCE) * self.delta1.max(self.omega1)
    }

    /// `(Δ, Ω)` at polar angle `theta`.
    pub fn manifold_point(&self, theta: T) -> Result<(T, T)> {
        check_theta(theta)?;
        Ok(self.manifold_point_unchecked(theta))
    }

    pub(crate) fn manifold_point_unchecked(&self, theta: T) -> (T, T) {
        let delta = self.delta1 * theta.cos() + self.delta2;
        let omega = self.omega1 * pole_sin(theta);
        (delta, omega)
    }

    /// Rotating-frame Hamiltonian at `(theta, self.phi)`.
    pub fn hamiltonian_at(&self, theta: T) -> Result<Hamiltonian2<T>> {
        check_theta(theta)?;
        Ok(self.field(theta, self.phi))
    }

    /// Bloch field at an arbitrary `(theta, phi)`, without range checks.
    ///
    /// The formula is analytic in `theta`; values outside `[0, π]` are the
    /// continuation used by finite-difference stencils that straddle a pole.
    pub fn field(&self, theta: T, phi: T) -> Hamiltonian2<T> {
        let (delta, omega) = self.manifold_point_unchecked(theta);
        let (s, c) = phi.sin_cos();
        Hamiltonian2::new(omega * c, omega * s, delta)
    }

    /// Bloch-field norm `√(Ω₁² sin²θ + (Δ₁ cos θ + Δ₂)²)`.
    pub fn gap(&self, theta: T) -> T {
        let (delta, omega) = self.manifold_point_unchecked(theta);
        delta.hypot(omega)
    }

    /// Ground state at `(theta, phi)` with the default degeneracy tolerance.
    pub fn ground_state_at(&self, theta: T, phi: T) -> Result<Spinor<T>> {
        ground_state(&self.field(theta, phi), self.degeneracy_tolerance()).map_err(|e| match e {
            Error::Degenerate { norm, .. } => Error::Degenerate {
                theta: theta.as_f64(),
                norm,
            },
            other => other,
        })
    }

    /// Largest `|h(θ)|` over `θ ∈ [0, π]`.
    pub fn max_gap(&self) -> T {
        // |h|² = Ω₁² + Δ₂² + Δ₁² c² ... is a quadratic in c = cos θ:
        // (Δ₁² − Ω₁²) c² + 2 Δ₁ Δ₂ c + Ω₁² + Δ₂²; the max is at an endpoint or
        // the vertex.
        let mut best = self.gap(T::zero()).max(self.gap(T::PI()));
        let a = self.delta1 * self.delta1 - self.omega1 * self.omega1;
        if a < T::zero() {
            let c = -(self.delta1 * self.delta2) / a;
            if c > -T::one() && c < T::one() {
                best = best.max(self.gap(c.acos()));
            }
        }
        best
    }

    /// Smallest `|h(θ)|` over `θ ∈ [0, π]`.
    pub fn min_gap(&self) -> T {
        let mut best = self.gap(T::zero()).min(self.gap(T::PI()));
        let a = self.delta1 * self.delta1 - self.omega1 * self.omega1;
        if a > T::zero() {
            let c = -(self.delta1 * self.delta2) / a;
            if c > -T::one() && c < T::one() {
                best = best.min(self.gap(c.acos()));
            }
        }
        best
    }
}

fn check_theta<T: Scalar>(theta: T) -> Result<()> {
    if theta >= T::zero() && theta <= T::PI() {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta.as_f64()))
    }
}

/// Free function form of [`ManifoldParams::manifold_point`].
pub fn manifold_point<T: Scalar>(params: &ManifoldParams<T>, theta: T) -> Result<(T, T)> {
    params.manifold_point(theta)
}

/// Free function form of [`ManifoldParams::hamiltonian_at`].
pub fn hamiltonian_at<T: Scalar>(params: &ManifoldParams<T>, theta: T) -> Result<Hamiltonian2<T>> {
    params.hamiltonian_at(theta)
}

/// Traceless Hermitian 2×2 operator `H/ħ = ½ (h_x σx + h_y σy + h_z σz)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hamiltonian2<T> {
    pub hx: T,
    pub hy: T,
    pub hz: T,
}

impl<T: Scalar> Hamiltonian2<T> {
    pub fn new(hx: T, hy: T, hz: T) -> Self {
        Self { hx, hy, hz }
    }

    pub fn bloch_field(&self) -> BlochVector<T> {
        BlochVector::new(self.hx, self.hy, self.hz)
    }

    pub fn norm(&self) -> T {
        self.bloch_field().norm()
    }

    /// `±½|h|`, ascending.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5) * self.norm();
        [-half, half]
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.hx, -self.hy, -self.hz)
    }

    /// Dense matrix of `H/ħ`.
    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        let half = T::lit(0.5);
        [
            [
                Complex::new(half * self.hz, T::zero()),
                Complex::new(half * self.hx, -half * self.hy),
            ],
            [
                Complex::new(half * self.hx, half * self.hy),
                Complex::new(-half * self.hz, T::zero()),
            ],
        ]
    }

    /// Pauli coefficients of a traceless Hermitian matrix (inverse of [`matrix`](Self::matrix)).
    pub fn from_matrix(m: &[[Complex<T>; 2]; 2]) -> Self {
        Self::new(
            (m[0][1] + m[1][0]).re,
            (m[1][0] - m[0][1]).im,
            (m[0][0] - m[1][1]).re,
        )
    }

    /// `(H/ħ) ψ`.
    pub fn apply(&self, psi: &Spinor<T>) -> Spinor<T> {
        let m = self.matrix();
        Spinor::new(
            m[0][0] * psi.up + m[0][1] * psi.down,
            m[1][0] * psi.up + m[1][1] * psi.down,
        )
    }

    /// `⟨ψ|H/ħ|ψ⟩ = ½ h·r`.
    pub fn expectation(&self, psi: &Spinor<T>) -> T {
        T::lit(0.5) * self.bloch_field().dot(&psi.bloch())
    }
}

/// Normalized eigenvector of the lower eigenvalue, i.e. the state whose Bloch
/// vector is anti-aligned with the field. Gauge: first amplitude real and
/// nonnegative.
pub fn ground_state<T: Scalar>(h: &Hamiltonian2<T>, tolerance: T) -> Result<Spinor<T>> {
    let norm = h.norm();
    if !(norm >= tolerance) || norm == T::zero() {
        return Err(Error::Degenerate {
            theta: f64::NAN,
            norm: norm.as_f64(),
        });
    }
    Ok(Spinor::from_bloch_direction(&h.bloch_field().scale(-T::one())))
}

/// Linear ramp `θ(t) = π t / t_ramp` integrated on a fixed grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampProtocol<T> {
    /// Ramp duration in seconds.
    pub t_ramp: T,
    /// RK4 steps over the full ramp.
    pub n_steps: usize,
    /// Record every `record_stride`-th step in trajectories.
    pub record_stride: usize,
}

impl<T: Scalar> RampProtocol<T> {
    pub fn new(t_ramp: T, n_steps: usize) -> Result<Self> {
        if !(t_ramp > T::zero()) || !t_ramp.is_finite() {
            return Err(Error::param("t_ramp", "must be positive and finite"));
        }
        if n_steps == 0 {
            return Err(Error::param("n_steps", "must be at least 1"));
        }
        Ok(Self {
            t_ramp,
            n_steps,
            record_stride: 1,
        })
    }

    pub fn from_us(t_ramp_us: T, n_steps: usize) -> Result<Self> {
        Self::new(us_to_s(t_ramp_us), n_steps)
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    pub fn theta(&self, t: T) -> T {
        T::PI() * t / self.t_ramp
    }

    /// Constant angular velocity `v_θ = π / t_ramp`.
    pub fn velocity(&self) -> T {
        T::PI() / self.t_ramp
    }

    pub fn dt(&self) -> T {
        self.t_ramp / T::from_usize(self.n_steps).unwrap()
    }
}
