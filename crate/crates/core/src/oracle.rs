//! Ground-truth Berry curvature and Chern numbers from exact eigenstates.
//!
//! Nothing here touches the dynamics: curvature comes from the closed form,
//! from finite differences of exact ground states, or from the gauge-invariant
//! plaquette (link-variable) construction on a (θ, φ) lattice covering the
//! whole closed manifold.

use num_complex::Complex;

use crate::chern::{measure_chern, ExperimentSetup, ThetaPoints};
use crate::error::{Error, Result};
use crate::model::ManifoldParams;
use crate::scalar::{pole_sin, Scalar};
use crate::state::Spinor;

/// Ground-state Berry curvature
/// `F_θφ = Ω₁² sin θ (Δ₁ + Δ₂ cos θ) / (2 |h|³)`.
pub fn analytic_curvature<T: Scalar>(params: &ManifoldParams<T>, theta: T) -> Result<T> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::ThetaOutOfRange(theta.as_f64()));
    }
    let gap = params.gap(theta);
    if gap < params.degeneracy_tolerance() {
        return Err(Error::Degenerate {
            theta: theta.as_f64(),
            norm: gap.as_f64(),
        });
    }
    let o1 = params.omega1;
    let num = o1 * o1 * pole_sin(theta) * (params.delta1 + params.delta2 * theta.cos());
    Ok(num / (T::lit(2.0) * gap * gap * gap))
}

/// `∫₀^π F dθ` of the closed form by adaptive Simpson quadrature.
pub fn analytic_chern<T: Scalar>(params: &ManifoldParams<T>, tolerance: T) -> Result<T> {
    let f = |theta: T| analytic_curvature(params, theta);
    let (a, b) = (T::zero(), T::PI());
    let m = T::lit(0.5) * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, tolerance, 50)
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<T: Scalar, F: Fn(T) -> Result<T>>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let half = T::lit(0.5);
    let m = half * (a + b);
    let lm = half * (a + m);
    let rm = half * (m + b);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    Ok(
        adaptive_simpson(f, a, m, fa, flm, fm, left, half * tol, depth - 1)?
            + adaptive_simpson(f, m, b, fm, frm, fb, right, half * tol, depth - 1)?,
    )
}

/// Ground state at an arbitrary `(θ, φ)`, including θ slightly outside
/// `[0, π]` for stencils straddling a pole.
fn site_state<T: Scalar>(params: &ManifoldParams<T>, theta: T, phi: T) -> Result<Spinor<T>> {
    let h = params.field(theta, phi);
    crate::model::ground_state(&h, params.degeneracy_tolerance()).map_err(|_| Error::Degenerate {
        theta: theta.as_f64(),
        norm: h.norm().as_f64(),
    })
}

/// Finite-difference curvature `F = −2 Im ⟨∂θψ|(1 − |ψ⟩⟨ψ|)|∂φψ⟩` from
/// central differences of exact ground states.
///
/// The stencil is brought into a local gauge (largest component of the
/// centre state real and positive), which is smooth across the stencil even
/// at the poles; the projected expression is gauge invariant.
pub fn curvature_fd_derivative<T: Scalar>(
    params: &ManifoldParams<T>,
    theta: T,
    phi: T,
    step: T,
) -> Result<T> {
    let centre = site_state(params, theta, phi)?;
    let use_up = centre.up.norm() >= centre.down.norm();
    let local = |psi: Spinor<T>| {
        let c = if use_up { psi.up } else { psi.down };
        psi.phase(c.conj() / c.norm())
    };
    let centre = local(centre);
    let at = |dt: T, dp: T| site_state(params, theta + dt, phi + dp).map(local);
    let z = T::zero();
    let inv = T::one() / (T::lit(2.0) * step);
    let d_theta = (at(step, z)? - at(-step, z)?).scale(inv);
    let d_phi = (at(z, step)? - at(z, -step)?).scale(inv);
    let projected = d_phi - centre.phase(centre.inner(&d_phi));
    Ok(-T::lit(2.0) * d_theta.inner(&projected).im)
}

/// Berry phase `−arg ∏⟨ψᵢ|ψᵢ₊₁⟩` around a loop of states.
fn loop_phase<T: Scalar>(states: &[Spinor<T>]) -> T {
    let mut prod = Complex::new(T::one(), T::zero());
    for i in 0..states.len() {
        let j = (i + 1) % states.len();
        prod = prod * states[i].inner(&states[j]);
    }
    -prod.arg()
}

/// Curvature from the four-point overlap phase of a square plaquette of side
/// `step` centred on `(θ, φ)`, Richardson-extrapolated from sides `step` and
/// `step/2`.
///
/// The plaquette phase is `F·step² + O(step⁴)` and its rounding error is
/// `~ε/step²`, so sides around 1e-3 are the useful range.
pub fn curvature_fd_plaquette<T: Scalar>(params: &ManifoldParams<T>, theta: T, phi: T, step: T) -> Result<T> {
    let single = |s: T| -> Result<T> {
        let h = T::lit(0.5) * s;
        let corners = [
            site_state(params, theta - h, phi - h)?,
            site_state(params, theta + h, phi - h)?,
            site_state(params, theta + h, phi + h)?,
            site_state(params, theta - h, phi + h)?,
        ];
        Ok(loop_phase(&corners) / (s * s))
    };
    let coarse = single(step)?;
    let fine = single(T::lit(0.5) * step)?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

/// `n_theta × n_phi` plaquettes on `[0, π] × [0, 2π)`, φ periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl LatticeGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::param("grid", "need n_theta >= 2 and n_phi >= 3"));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }
}

/// Largest accepted plaquette phase; beyond it the branch of `arg` is ambiguous.
pub const MAX_PLAQUETTE_PHASE: f64 = 0.9 * std::f64::consts::PI;

/// Lattice Chern number of the ground-state bundle over the closed manifold.
pub fn lattice_chern<T: Scalar>(params: &ManifoldParams<T>, grid: &LatticeGrid) -> Result<i64> {
    lattice_chern_gauged(params, grid, |_, _| T::zero())
}

/// [`lattice_chern`] with every site state multiplied by `e^{iχ(θ, φ)}`.
/// The result does not depend on `χ`.
pub fn lattice_chern_gauged<T, G>(params: &ManifoldParams<T>, grid: &LatticeGrid, gauge: G) -> Result<i64>
where
    T: Scalar,
    G: Fn(T, T) -> T,
{
    let nt = grid.n_theta;
    let np = grid.n_phi;
    let thetas = crate::chern::uniform_thetas::<T>(nt + 1);
    let dphi = T::TAU() / T::from_usize(np).unwrap();
    let mut sites = Vec::with_capacity((nt + 1) * np);
    for &theta in &thetas {
        for j in 0..np {
            let phi = dphi * T::from_usize(j).unwrap();
            let psi = params.ground_state_at(theta, phi)?;
            let (s, c) = gauge(theta, phi).sin_cos();
            sites.push(psi.phase(Complex::new(c, s)));
        }
    }
    let site = |i: usize, j: usize| sites[i * np + (j % np)];
    let mut total = T::zero();
    let mut worst = T::zero();
    for i in 0..nt {
        for j in 0..np {
            let phase = loop_phase(&[site(i, j), site(i + 1, j), site(i + 1, j + 1), site(i, j + 1)]);
            worst = worst.max(phase.abs());
            total = total + phase;
        }
    }
    check_plaquette_phase(worst)?;
    let c = total / T::TAU();
    let rounded = c.round();
    debug_assert!((c - rounded).abs() < T::lit(1e-3), "non-integer lattice sum {c}");
    Ok(rounded.to_i64().expect("finite Chern number"))
}

fn check_plaquette_phase<T: Scalar>(worst: T) -> Result<()> {
    if worst > T::lit(MAX_PLAQUETTE_PHASE) {
        return Err(Error::GridTooCoarse {
            max_phase: worst.as_f64(),
        });
    }
    Ok(())
}

/// One ramp time of an adiabatic-consistency study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyRow<T> {
    pub t_ramp: T,
    /// `max_θ |F_est − F_analytic|`.
    pub max_deviation: T,
    pub c1: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport<T> {
    pub rows: Vec<ConsistencyRow<T>>,
    /// Least-squares slope of `ln max_deviation` against `ln t_ramp`.
    pub decay_exponent: T,
    /// Whether the deviation never grows from one ramp time to the next.
    pub monotone: bool,
}

/// Compares the dynamical curvature estimate of a coherent, perfectly
/// prepared qubit with the closed form for a sequence of ramp times.
pub fn adiabatic_consistency<T: Scalar>(
    params: &ManifoldParams<T>,
    t_ramps: &[T],
    theta_points: ThetaPoints,
) -> Result<ConsistencyReport<T>> {
    if t_ramps.is_empty() {
        return Err(Error::EmptySweep("t_ramps"));
    }
    let mut sorted = t_ramps.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite ramp times"));
    let mut rows = Vec::with_capacity(sorted.len());
    for t_ramp in sorted {
        let mut setup = ExperimentSetup::coherent(*params, t_ramp);
        setup.theta_points = theta_points;
        let (profile, result) = measure_chern(&setup)?;
        let mut max_dev = T::zero();
        for s in &profile.samples {
            let exact = analytic_curvature(params, s.theta)?;
            max_dev = max_dev.max((s.f_est - exact).abs());
        }
        rows.push(ConsistencyRow {
            t_ramp,
            max_deviation: max_dev,
            c1: result.c1_raw,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation);
    let decay_exponent = log_log_slope(&rows);
    Ok(ConsistencyReport {
        rows,
        decay_exponent,
        monotone,
    })
}

fn log_log_slope<T: Scalar>(rows: &[ConsistencyRow<T>]) -> T {
    let pts: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.max_deviation > T::zero())
        .map(|r| (r.t_ramp.ln(), r.max_deviation.ln()))
        .collect();
    if pts.len() < 2 {
        return T::zero();
    }
    let n = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let my = pts.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let sxy = pts
        .iter()
        .map(|p| (p.0 - mx) * (p.1 - my))
        .fold(T::zero(), |a, b| a + b);
    let sxx = pts
        .iter()
        .map(|p| (p.0 - mx).powi(2))
        .fold(T::zero(), |a, b| a + b);
    sxy / sxx
}
