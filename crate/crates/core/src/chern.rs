//! Berry curvature from the nonadiabatic `⟨σy⟩` response, Chern number by
//! quadrature over θ, and the Δ₂ / t_ramp sweeps built on top of them.
//!
//! Orientation: θ runs from the north pole of the parameter ellipsoid
//! (θ = 0) to the south pole, φ counter-clockwise about +z; with the outward
//! normal this orientation gives `C₁ = +1` for a manifold enclosing the
//! degeneracy at `Δ = Ω = 0`. Positive `⟨σy⟩` during the ramp means positive
//! curvature.

use rayon::prelude::*;

use crate::engine::{evolve_lindblad, step_control, DecoherenceParams};
use crate::error::{Error, Result};
use crate::model::{ManifoldParams, RampProtocol};
use crate::scalar::{pole_sin, Scalar};
use crate::state::BlochVector;
use crate::tomography::{prepare_initial, PreparationModel, ShotModel};

/// Tomography points used by fixed grids and as the floor of the automatic grid.
pub const DEFAULT_THETA_POINTS: usize = 51;

/// Samples per period of the fastest precession required by [`ThetaPoints::Auto`].
pub const SAMPLES_PER_PRECESSION: f64 = 4.0;

/// Number of tomography times `t_meas` along a ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaPoints {
    /// `max(51, ⌈4 · t_ramp · f_max⌉ + 1)`: dense enough that the transient
    /// precession excited at the start of the ramp is not aliased.
    #[default]
    Auto,
    Fixed(usize),
}

impl ThetaPoints {
    pub fn resolve<T: Scalar>(&self, params: &ManifoldParams<T>, t_ramp: T) -> usize {
        match *self {
            ThetaPoints::Fixed(n) => n,
            ThetaPoints::Auto => {
                let cycles = (t_ramp * params.max_gap() / T::TAU()).as_f64();
                // The small offset keeps exact integers (30 MHz × 1 μs) from rounding up.
                let n = (SAMPLES_PER_PRECESSION * cycles - 1e-9).ceil() as usize + 1;
                n.max(DEFAULT_THETA_POINTS)
            }
        }
    }
}

/// Everything needed to simulate one ramp-and-tomography experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSetup<T> {
    pub params: ManifoldParams<T>,
    /// Ramp duration in seconds.
    pub t_ramp: T,
    pub theta_points: ThetaPoints,
    /// RK4 steps over the full ramp; `None` uses [`step_control`].
    pub n_steps: Option<usize>,
    pub decoherence: DecoherenceParams<T>,
    pub preparation: PreparationModel<T>,
    /// `None` means exact expectation values.
    pub shots: Option<ShotModel>,
}

impl<T: Scalar> ExperimentSetup<T> {
    /// Reference experiment: Δ₁/2π = 30 MHz, Ω₁/2π = 10 MHz,
    /// Δ₂/2π = 0.3 MHz, 1 μs ramp, T₁ = 22 μs, T₂* = 9 μs, 98.8 % preparation.
    pub fn reference() -> Self {
        Self {
            params: ManifoldParams::from_mhz(T::lit(30.0), T::lit(10.0), T::lit(0.3))
                .expect("valid reference manifold"),
            t_ramp: T::lit(1e-6),
            theta_points: ThetaPoints::Auto,
            n_steps: None,
            decoherence: DecoherenceParams::from_us(T::lit(22.0), T::lit(9.0))
                .expect("valid reference decoherence"),
            preparation: PreparationModel::default(),
            shots: None,
        }
    }

    /// Closed system with perfect preparation.
    pub fn coherent(params: ManifoldParams<T>, t_ramp: T) -> Self {
        Self {
            params,
            t_ramp,
            theta_points: ThetaPoints::Auto,
            n_steps: None,
            decoherence: DecoherenceParams::coherent(),
            preparation: PreparationModel::perfect(),
            shots: None,
        }
    }

    pub fn theta_count(&self) -> usize {
        self.theta_points.resolve(&self.params, self.t_ramp)
    }

    /// Ramp protocol whose step count is a multiple of the tomography
    /// intervals, recording exactly at every `t_meas`.
    pub fn protocol(&self) -> Result<RampProtocol<T>> {
        let n = self.theta_count();
        if n < 3 {
            return Err(Error::param("theta_points", "need at least 3 tomography points"));
        }
        let intervals = n - 1;
        let base = self
            .n_steps
            .unwrap_or_else(|| step_control(self.t_ramp, &self.params));
        let per = base.div_ceil(intervals).max(1);
        Ok(RampProtocol::new(self.t_ramp, per * intervals)?.with_record_stride(per))
    }
}

/// Bloch vector measured at one `t_meas`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyPoint<T> {
    pub t: T,
    pub theta: T,
    pub bloch: BlochVector<T>,
    /// Standard errors, present in sampled mode.
    pub error: Option<BlochVector<T>>,
}

/// Ramps from the prepared state and performs tomography at every `t_meas`.
///
/// One trajectory is integrated and sampled at all tomography times; the
/// evolution up to `t_meas` does not depend on where the ramp is stopped.
pub fn run_tomography<T: Scalar>(setup: &ExperimentSetup<T>) -> Result<Vec<TomographyPoint<T>>> {
    let protocol = setup.protocol()?;
    let n = setup.theta_count();
    let rho0 = prepare_initial(&setup.params, &setup.preparation)?;
    let traj = evolve_lindblad(&setup.params, &protocol, rho0, &setup.decoherence, setup.t_ramp)?;
    debug_assert_eq!(traj.len(), n);
    let last = n - 1;
    let points = traj
        .samples()
        .iter()
        .enumerate()
        .map(|(k, (t, rho))| {
            let (theta, t) = if k == last {
                (T::PI(), setup.t_ramp)
            } else {
                (protocol.theta(*t), *t)
            };
            let exact = rho.bloch.scale(rho.trace.recip());
            let (bloch, error) = match &setup.shots {
                None => (exact, None),
                Some(shot) => {
                    let base = 3 * k as u64;
                    let (x, ex) = shot.sample(exact.x, base);
                    let (y, ey) = shot.sample(exact.y, base + 1);
                    let (z, ez) = shot.sample(exact.z, base + 2);
                    (BlochVector::new(x, y, z), Some(BlochVector::new(ex, ey, ez)))
                }
            };
            TomographyPoint {
                t,
                theta,
                bloch,
                error,
            }
        })
        .collect();
    Ok(points)
}

/// One curvature estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample<T> {
    pub theta: T,
    pub f_est: T,
    pub f_err: T,
}

/// Curvature samples along θ, optionally tagged with the run that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile<T> {
    pub samples: Vec<CurvatureSample<T>>,
    pub setup: Option<ExperimentSetup<T>>,
}

impl<T: Scalar> CurvatureProfile<T> {
    pub fn new(samples: Vec<CurvatureSample<T>>) -> Self {
        Self { samples, setup: None }
    }

    /// Exact (error-free) samples of `f` at the given angles.
    pub fn from_fn(thetas: &[T], f: impl Fn(T) -> T) -> Self {
        Self::new(
            thetas
                .iter()
                .map(|&theta| CurvatureSample {
                    theta,
                    f_est: f(theta),
                    f_err: T::zero(),
                })
                .collect(),
        )
    }

    pub fn thetas(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|s| s.theta)
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|s| s.f_est)
    }
}

/// `n` uniformly spaced angles on `[0, π]` with exact endpoints.
pub fn uniform_thetas<T: Scalar>(n: usize) -> Vec<T> {
    let last = n.saturating_sub(1);
    (0..n)
        .map(|k| {
            if k == last {
                T::PI()
            } else {
                T::PI() * T::from_usize(k).unwrap() / T::from_usize(last).unwrap()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
}

impl Quadrature {
    pub fn name(&self) -> &'static str {
        match self {
            Quadrature::Trapezoid => "trapezoid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernResult<T> {
    pub c1_raw: T,
    pub c1_err: T,
    pub c1_corrected: T,
    pub quadrature: Quadrature,
}

/// `F_θφ ≈ Ω₁ sin θ ⟨σy⟩ / (2 v_θ)`.
pub fn curvature_from_response<T: Scalar>(
    params: &ManifoldParams<T>,
    protocol: &RampProtocol<T>,
    theta: T,
    sigma_y: T,
) -> T {
    params.omega1 * pole_sin(theta) * sigma_y / (T::lit(2.0) * protocol.velocity())
}

/// Converts tomography into a curvature profile.
pub fn curvature_profile<T: Scalar>(
    setup: &ExperimentSetup<T>,
    points: &[TomographyPoint<T>],
) -> Result<CurvatureProfile<T>> {
    let protocol = setup.protocol()?;
    let samples = points
        .iter()
        .map(|p| {
            let scale = curvature_from_response(&setup.params, &protocol, p.theta, T::one());
            CurvatureSample {
                theta: p.theta,
                f_est: scale * p.bloch.y,
                f_err: p.error.map_or(T::zero(), |e| (scale * e.y).abs()),
            }
        })
        .collect();
    Ok(CurvatureProfile {
        samples,
        setup: Some(*setup),
    })
}

pub fn run_curvature_experiment<T: Scalar>(setup: &ExperimentSetup<T>) -> Result<CurvatureProfile<T>> {
    let points = run_tomography(setup)?;
    curvature_profile(setup, &points)
}

/// `c1_raw / (2f − 1)`.
pub fn fidelity_correction<T: Scalar>(c1_raw: T, prep: &PreparationModel<T>) -> T {
    c1_raw / prep.polarization()
}

/// Trapezoidal `∫₀^π F dθ`; errors propagated in quadrature. The fidelity
/// correction uses the profile's setup, or is the identity without one.
pub fn chern_integrate<T: Scalar>(profile: &CurvatureProfile<T>) -> Result<ChernResult<T>> {
    let s = &profile.samples;
    if s.len() < 3 {
        return Err(Error::InsufficientSamples(s.len()));
    }
    let (first, last) = (s[0].theta, s[s.len() - 1].theta);
    let edge_tol = T::lit(1e-12) * T::PI();
    if first.abs() > edge_tol || (last - T::PI()).abs() > edge_tol {
        return Err(Error::NotSpanning {
            first: first.as_f64(),
            last: last.as_f64(),
        });
    }
    for i in 1..s.len() {
        if !(s[i].theta > s[i - 1].theta) {
            return Err(Error::NotIncreasing(i));
        }
    }
    let half = T::lit(0.5);
    let mut c1 = T::zero();
    let mut var = T::zero();
    for i in 0..s.len() {
        let left = if i > 0 {
            s[i].theta - s[i - 1].theta
        } else {
            T::zero()
        };
        let right = if i + 1 < s.len() {
            s[i + 1].theta - s[i].theta
        } else {
            T::zero()
        };
        let w = half * (left + right);
        c1 = c1 + w * s[i].f_est;
        var = var + (w * s[i].f_err).powi(2);
    }
    let prep = profile
        .setup
        .map(|st| st.preparation)
        .unwrap_or_else(PreparationModel::perfect);
    Ok(ChernResult {
        c1_raw: c1,
        c1_err: var.sqrt(),
        c1_corrected: fidelity_correction(c1, &prep),
        quadrature: Quadrature::Trapezoid,
    })
}

/// Runs one experiment and integrates it.
pub fn measure_chern<T: Scalar>(setup: &ExperimentSetup<T>) -> Result<(CurvatureProfile<T>, ChernResult<T>)> {
    let profile = run_curvature_experiment(setup)?;
    let result = chern_integrate(&profile)?;
    Ok((profile, result))
}

/// `n` points from `a` to `b` inclusive.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let m = T::from_usize(n - 1).unwrap();
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        b
                    } else {
                        a + (b - a) * T::from_usize(k).unwrap() / m
                    }
                })
                .collect()
        }
    }
}

/// Default Δ₂/Δ₁ sweep: 29 points over `[−1/3, 2]` (the −10 … 60 MHz range at Δ₁/2π = 30 MHz).
pub fn coarse_delta2_grid<T: Scalar>() -> Vec<T> {
    linspace(T::lit(-1.0 / 3.0), T::lit(2.0), 29)
}

/// Default fine Δ₂/Δ₁ sweep across the transition: 15 points over `[0.8, 1.2]`.
pub fn fine_delta2_grid<T: Scalar>() -> Vec<T> {
    linspace(T::lit(0.8), T::lit(1.2), 15)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoint<T> {
    pub delta2_ratio: T,
    pub result: ChernResult<T>,
}

/// Chern number versus `Δ₂/Δ₁`. Point `i` samples shots with seed
/// `mix_seed(seed, i)`; results are ordered like `ratios` regardless of
/// how the rayon pool schedules them.
pub fn transition_sweep<T: Scalar>(
    ratios: &[T],
    setup: &ExperimentSetup<T>,
) -> Result<Vec<TransitionPoint<T>>> {
    if ratios.is_empty() {
        return Err(Error::EmptySweep("delta2_ratios"));
    }
    ratios
        .par_iter()
        .enumerate()
        .map(|(i, &ratio)| {
            let mut point = *setup;
            point.params = setup.params.with_delta2(ratio * setup.params.delta1)?;
            point.shots = setup.shots.map(|s| s.for_point(i as u64));
            let (_, result) = measure_chern(&point)?;
            Ok(TransitionPoint {
                delta2_ratio: ratio,
                result,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampRatePoint<T> {
    pub t_ramp: T,
    pub profile: CurvatureProfile<T>,
    pub result: ChernResult<T>,
}

/// Curvature map and Chern number versus ramp time.
pub fn ramp_rate_sweep<T: Scalar>(
    t_ramps: &[T],
    setup: &ExperimentSetup<T>,
) -> Result<Vec<RampRatePoint<T>>> {
    if t_ramps.is_empty() {
        return Err(Error::EmptySweep("t_ramps"));
    }
    t_ramps
        .par_iter()
        .enumerate()
        .map(|(i, &t_ramp)| {
            if !(t_ramp > T::zero()) {
                return Err(Error::param("t_ramp", "sweep values must be positive"));
            }
            let mut point = *setup;
            point.t_ramp = t_ramp;
            point.shots = setup.shots.map(|s| s.for_point(i as u64));
            let (profile, result) = measure_chern(&point)?;
            Ok(RampRatePoint {
                t_ramp,
                profile,
                result,
            })
        })
        .collect()
}

/// Mean Chern number below and above the transition (`Δ₂/Δ₁ < 1` and `> 1`);
/// points within 1e-9 of the transition belong to neither bin.
pub fn plateau_averages<T: Scalar>(points: &[(T, T)]) -> (Option<T>, Option<T>) {
    let tol = T::lit(1e-9);
    let mean = |it: Vec<T>| {
        if it.is_empty() {
            None
        } else {
            let n = T::from_usize(it.len()).unwrap();
            Some(it.into_iter().fold(T::zero(), |a, b| a + b) / n)
        }
    };
    let below = points
        .iter()
        .filter(|(r, _)| *r < T::one() - tol)
        .map(|p| p.1)
        .collect();
    let above = points
        .iter()
        .filter(|(r, _)| *r > T::one() + tol)
        .map(|p| p.1)
        .collect();
    (mean(below), mean(above))
}

/// Width of the C₁ = 0.75 → 0.25 drop.
///
/// Points are sorted by ratio and replaced by their running minimum, a
/// monotone non-increasing envelope; crossings are linearly interpolated.
/// Returns `None` if either level is never crossed.
pub fn transition_width<T: Scalar>(points: &[(T, T)]) -> Option<T> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite ratios"));
    let mut env = T::infinity();
    let pts: Vec<(T, T)> = pts
        .into_iter()
        .map(|(x, y)| {
            env = env.min(y);
            (x, env)
        })
        .collect();
    let crossing = |level: T| -> Option<T> {
        if pts.first()?.1 <= level {
            return None;
        }
        pts.windows(2).find_map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            (y0 > level && y1 <= level).then(|| x0 + (x1 - x0) * (y0 - level) / (y0 - y1))
        })
    };
    let hi = crossing(T::lit(0.75))?;
    let lo = crossing(T::lit(0.25))?;
    Some(lo - hi)
}
