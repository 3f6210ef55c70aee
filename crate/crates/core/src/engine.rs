//! Fixed-step RK4 integration of the driven qubit along a ramp.
//!
//! Pure states evolve under `i ∂t ψ = (H/ħ) ψ` on the complex spinor. Mixed
//! states evolve under the Lindblad equation with jump operators `√γ₁ σ₋`
//! and `√(γ_φ/2) σz`, written in the Pauli parametrization
//! `ρ = ½(r₀ I + r·σ)`:
//!
//! ```text
//! dr₀/dt = 0
//! dr/dt  = h × r − γ₂ (x, y, 0) − γ₁ (0, 0, z + r₀),   γ₂ = γ₁/2 + γ_φ
//! ```
//!
//! The Hamiltonian is re-evaluated at every RK4 stage time, so time-dependent
//! ramps keep fourth-order accuracy. Both integrators are bit-reproducible.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Hamiltonian2, ManifoldParams, RampProtocol};
use crate::scalar::{s_to_us, us_to_s, Scalar};
use crate::state::{BlochVector, DensityMatrix, Spinor};

/// Minimum RK4 steps per period of the fastest Bloch precession.
pub const MIN_STEPS_PER_PERIOD: f64 = 40.0;

/// Target for the accumulated RK4 norm drift of a pure-state ramp.
pub const NORM_DRIFT_BUDGET: f64 = 1e-10;

/// Energy relaxation and total dephasing times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams<T> {
    /// T₁ in seconds; `+∞` disables relaxation.
    pub t1: T,
    /// T₂* in seconds; `+∞` together with `t1 = +∞` is the closed system.
    pub t2_star: T,
}

impl<T: Scalar> DecoherenceParams<T> {
    pub fn new(t1: T, t2_star: T) -> Result<Self> {
        if !(t1 > T::zero()) {
            return Err(Error::param("t1", "must be positive"));
        }
        if !(t2_star > T::zero()) {
            return Err(Error::param("t2_star", "must be positive"));
        }
        if t2_star > T::lit(2.0) * t1 {
            return Err(Error::param(
                "t2_star",
                "T2* must not exceed 2*T1 (pure dephasing rate would be negative)",
            ));
        }
        Ok(Self { t1, t2_star })
    }

    pub fn from_us(t1_us: T, t2_star_us: T) -> Result<Self> {
        Self::new(us_to_s(t1_us), us_to_s(t2_star_us))
    }

    /// No dissipation at all.
    pub fn coherent() -> Self {
        Self {
            t1: T::infinity(),
            t2_star: T::infinity(),
        }
    }

    pub fn is_coherent(&self) -> bool {
        let (g1, gphi) = self.rates();
        g1 == T::zero() && gphi == T::zero()
    }

    /// `(γ₁, γ_φ)` = `(1/T₁, 1/T₂* − 1/(2T₁))`.
    pub fn rates(&self) -> (T, T) {
        let g1 = self.t1.recip();
        let gphi = self.t2_star.recip() - T::lit(0.5) * g1;
        (g1, gphi)
    }

    pub fn t1_us(&self) -> T {
        s_to_us(self.t1)
    }

    pub fn t2_star_us(&self) -> T {
        s_to_us(self.t2_star)
    }
}

/// Lindblad jump rates `(γ₁, γ_φ)` in 1/s.
pub fn jump_rates<T: Scalar>(d: &DecoherenceParams<T>) -> Result<(T, T)> {
    let (g1, gphi) = d.rates();
    if gphi < T::zero() {
        return Err(Error::param(
            "t2_star",
            "negative pure dephasing rate (T2* > 2*T1)",
        ));
    }
    Ok((g1, gphi))
}

/// Time-ordered samples of an evolving state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, S> {
    samples: Vec<(T, S)>,
}

pub type PureTrajectory<T> = Trajectory<T, Spinor<T>>;
pub type MixedTrajectory<T> = Trajectory<T, DensityMatrix<T>>;

impl<T: Scalar, S: Copy> Trajectory<T, S> {
    pub fn samples(&self) -> &[(T, S)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }

    pub fn states(&self) -> impl Iterator<Item = S> + '_ {
        self.samples.iter().map(|(_, s)| *s)
    }

    pub fn last(&self) -> (T, S) {
        *self
            .samples
            .last()
            .expect("trajectory always holds the initial sample")
    }

    pub fn into_samples(self) -> Vec<(T, S)> {
        self.samples
    }
}

impl<T: Scalar> PureTrajectory<T> {
    /// Largest `| ‖ψ‖ − 1 |` over the trajectory.
    pub fn max_norm_drift(&self) -> T {
        self.samples
            .iter()
            .map(|(_, s)| (s.norm() - T::one()).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T: Scalar> MixedTrajectory<T> {
    pub fn max_trace_drift(&self) -> T {
        self.samples
            .iter()
            .map(|(_, r)| (r.trace - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.samples
            .iter()
            .map(|(_, r)| r.min_eigenvalue())
            .fold(T::infinity(), T::min)
    }
}

/// Number of RK4 steps for a full ramp.
///
/// At least [`MIN_STEPS_PER_PERIOD`] steps resolve each period of the fastest
/// precession `max_θ |h(θ)|`. The count is raised further until the predicted
/// accumulated RK4 norm drift, `cycles · π⁶ / (72 · spp⁵)` for a spinor
/// rotating at half the Bloch frequency, stays below [`NORM_DRIFT_BUDGET`].
pub fn step_control<T: Scalar>(t_ramp: T, params: &ManifoldParams<T>) -> usize {
    steps_for(t_ramp, params.max_gap())
}

pub(crate) fn steps_for<T: Scalar>(duration: T, max_rate: T) -> usize {
    let cycles = (duration * max_rate / T::TAU()).as_f64().abs();
    if cycles == 0.0 {
        return 1;
    }
    let pi6 = std::f64::consts::PI.powi(6);
    let spp_drift = (cycles * pi6 / (72.0 * NORM_DRIFT_BUDGET)).powf(0.2);
    let spp = spp_drift.max(MIN_STEPS_PER_PERIOD);
    ((cycles * spp).ceil() as usize).max(1)
}

/// `dψ/dt = −i (H/ħ) ψ`.
#[inline]
fn spinor_rhs<T: Scalar>(h: &Hamiltonian2<T>, psi: &Spinor<T>) -> Spinor<T> {
    h.apply(psi).phase(Complex::new(T::zero(), -T::one()))
}

#[inline]
fn lindblad_rhs<T: Scalar>(
    h: &Hamiltonian2<T>,
    rho: &DensityMatrix<T>,
    gamma1: T,
    gamma2: T,
) -> DensityMatrix<T> {
    let r = &rho.bloch;
    let rot = h.bloch_field().cross(r);
    DensityMatrix::new(
        T::zero(),
        BlochVector::new(
            rot.x - gamma2 * r.x,
            rot.y - gamma2 * r.y,
            rot.z - gamma1 * (r.z + rho.trace),
        ),
    )
}

#[inline]
fn axpy_spinor<T: Scalar>(y: &Spinor<T>, a: T, x: &Spinor<T>) -> Spinor<T> {
    Spinor::new(y.up + x.up * a, y.down + x.down * a)
}

#[inline]
fn axpy_rho<T: Scalar>(y: &DensityMatrix<T>, a: T, x: &DensityMatrix<T>) -> DensityMatrix<T> {
    DensityMatrix::new(y.trace + a * x.trace, y.bloch + x.bloch.scale(a))
}

/// Classical RK4 for a state type with an `axpy` update.
fn rk4<T, S, F, A>(rhs: F, axpy: A, state0: S, t0: T, t1: T, steps: usize, stride: usize) -> Trajectory<T, S>
where
    T: Scalar,
    S: Copy,
    F: Fn(T, &S) -> S,
    A: Fn(&S, T, &S) -> S,
{
    let steps = steps.max(1);
    let stride = stride.max(1);
    let n = T::from_usize(steps).unwrap();
    let dt = (t1 - t0) / n;
    let half = T::lit(0.5);
    let sixth = dt / T::lit(6.0);
    let mut samples = Vec::with_capacity(steps / stride + 2);
    samples.push((t0, state0));
    let mut y = state0;
    for i in 0..steps {
        // Stage times from the step index, not an accumulated clock.
        let t = t0 + dt * T::from_usize(i).unwrap();
        let tm = t + half * dt;
        let te = if i + 1 == steps {
            t1
        } else {
            t0 + dt * T::from_usize(i + 1).unwrap()
        };
        let k1 = rhs(t, &y);
        let k2 = rhs(tm, &axpy(&y, half * dt, &k1));
        let k3 = rhs(tm, &axpy(&y, half * dt, &k2));
        let k4 = rhs(te, &axpy(&y, dt, &k3));
        let two = T::lit(2.0);
        let inc = axpy(&axpy(&axpy(&k1, two, &k2), two, &k3), T::one(), &k4);
        y = axpy(&y, sixth, &inc);
        if (i + 1) % stride == 0 || i + 1 == steps {
            samples.push((te, y));
        }
    }
    Trajectory { samples }
}

/// Integrates a pure state under an arbitrary time-dependent Hamiltonian from
/// `t0` to `t1` (either direction) in `steps` RK4 steps.
pub fn integrate_spinor<T, H>(
    hamiltonian: H,
    psi0: Spinor<T>,
    t0: T,
    t1: T,
    steps: usize,
    stride: usize,
) -> PureTrajectory<T>
where
    T: Scalar,
    H: Fn(T) -> Hamiltonian2<T>,
{
    rk4(
        |t, psi| spinor_rhs(&hamiltonian(t), psi),
        axpy_spinor,
        psi0,
        t0,
        t1,
        steps,
        stride,
    )
}

/// Integrates the Lindblad equation under an arbitrary time-dependent
/// Hamiltonian with the given decoherence.
pub fn integrate_lindblad<T, H>(
    hamiltonian: H,
    rho0: DensityMatrix<T>,
    decoherence: &DecoherenceParams<T>,
    t0: T,
    t1: T,
    steps: usize,
    stride: usize,
) -> Result<MixedTrajectory<T>>
where
    T: Scalar,
    H: Fn(T) -> Hamiltonian2<T>,
{
    let (g1, gphi) = jump_rates(decoherence)?;
    let g2 = T::lit(0.5) * g1 + gphi;
    Ok(rk4(
        |t, rho| lindblad_rhs(&hamiltonian(t), rho, g1, g2),
        axpy_rho,
        rho0,
        t0,
        t1,
        steps,
        stride,
    ))
}

fn ramp_steps<T: Scalar>(protocol: &RampProtocol<T>, t_end: T) -> Result<usize> {
    let slack = T::one() + T::lit(1e-12);
    if !(t_end > T::zero()) || t_end > protocol.t_ramp * slack {
        return Err(Error::param(
            "t_end",
            format!(
                "must satisfy 0 < t_end <= t_ramp (got {:e} s, t_ramp {:e} s)",
                t_end.as_f64(),
                protocol.t_ramp.as_f64()
            ),
        ));
    }
    let frac = (t_end / protocol.t_ramp).min(T::one());
    let steps = (T::from_usize(protocol.n_steps).unwrap() * frac)
        .round()
        .to_usize()
        .unwrap_or(1);
    Ok(steps.max(1))
}

/// Ramp Hamiltonian `H(θ(t))`, clamping stage times to the manifold range.
fn ramp_hamiltonian<T: Scalar>(
    params: &ManifoldParams<T>,
    protocol: &RampProtocol<T>,
) -> impl Fn(T) -> Hamiltonian2<T> + Copy {
    let params = *params;
    let protocol = *protocol;
    move |t| {
        let theta = protocol.theta(t).max(T::zero()).min(T::PI());
        params.field(theta, params.phi)
    }
}

/// Evolves a pure state along the ramp from `t = 0` to `t_end`.
///
/// Fails with [`Error::StepTooCoarse`] when the norm drifts by more than
/// [`Scalar::drift_tolerance`], reporting a step count that would bring the
/// drift back within [`NORM_DRIFT_BUDGET`].
pub fn evolve_unitary<T: Scalar>(
    params: &ManifoldParams<T>,
    protocol: &RampProtocol<T>,
    psi0: Spinor<T>,
    t_end: T,
) -> Result<PureTrajectory<T>> {
    let dev = (psi0.norm() - T::one()).abs();
    if !(dev <= T::norm_tolerance()) {
        return Err(Error::NotNormalized(dev.as_f64()));
    }
    let steps = ramp_steps(protocol, t_end)?;
    let traj = integrate_spinor(
        ramp_hamiltonian(params, protocol),
        psi0,
        T::zero(),
        t_end,
        steps,
        protocol.record_stride,
    );
    let drift = (traj.last().1.norm() - T::one()).abs();
    if drift > T::drift_tolerance() {
        // RK4 amplitude error scales as steps^-5 at fixed duration.
        let factor = (drift.as_f64() / NORM_DRIFT_BUDGET).powf(0.2);
        let suggested = (protocol.n_steps as f64 * factor).ceil() as usize;
        return Err(Error::StepTooCoarse {
            drift: drift.as_f64(),
            suggested_steps: suggested,
        });
    }
    Ok(traj)
}

/// Evolves a density matrix along the ramp under the Lindblad equation.
pub fn evolve_lindblad<T: Scalar>(
    params: &ManifoldParams<T>,
    protocol: &RampProtocol<T>,
    rho0: DensityMatrix<T>,
    decoherence: &DecoherenceParams<T>,
    t_end: T,
) -> Result<MixedTrajectory<T>> {
    rho0.validate()?;
    let steps = ramp_steps(protocol, t_end)?;
    let traj = integrate_lindblad(
        ramp_hamiltonian(params, protocol),
        rho0,
        decoherence,
        T::zero(),
        t_end,
        steps,
        protocol.record_stride,
    )?;
    let tol = T::positivity_tolerance();
    for (t, rho) in traj.samples() {
        let lam = rho.min_eigenvalue();
        if lam < -tol {
            return Err(Error::PositivityViolation {
                time: t.as_f64(),
                min_eigenvalue: lam.as_f64(),
            });
        }
    }
    Ok(traj)
}
