//! State preparation, Bloch-vector tomography and the generalized force.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::model::ManifoldParams;
use crate::scalar::{pole_sin, Scalar};
use crate::state::{BlochVector, DensityMatrix, QubitState};

/// Post-selected ground-state preparation fidelity of the experiment.
pub const DEFAULT_GROUND_FIDELITY: f64 = 0.988;

/// Shots per tomography axis that reproduce a propagated C₁ standard error
/// of about 0.023 for the default ramp (1 μs, auto θ grid of 123 points).
pub const DEFAULT_SHOTS: u64 = 7500;

/// Imperfect ground-state preparation: population `1 − f` is left in the
/// excited state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationModel<T> {
    pub ground_fidelity: T,
}

impl<T: Scalar> PreparationModel<T> {
    pub fn new(ground_fidelity: T) -> Result<Self> {
        if !(ground_fidelity > T::lit(0.5) && ground_fidelity <= T::one()) {
            return Err(Error::param("ground_fidelity", "must lie in (0.5, 1]"));
        }
        Ok(Self { ground_fidelity })
    }

    pub fn perfect() -> Self {
        Self {
            ground_fidelity: T::one(),
        }
    }

    /// Population imbalance `2f − 1`.
    pub fn polarization(&self) -> T {
        T::lit(2.0) * self.ground_fidelity - T::one()
    }
}

impl<T: Scalar> Default for PreparationModel<T> {
    fn default() -> Self {
        Self {
            ground_fidelity: T::lit(DEFAULT_GROUND_FIDELITY),
        }
    }
}

/// Projective readout statistics for sampled tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotModel {
    pub n_shots: u64,
    pub seed: u64,
}

impl ShotModel {
    pub fn new(n_shots: u64, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::param("n_shots", "must be at least 1"));
        }
        Ok(Self { n_shots, seed })
    }

    /// Same shot count, seed replaced by `mix_seed(seed, index)`.
    pub fn for_point(&self, index: u64) -> Self {
        Self {
            n_shots: self.n_shots,
            seed: mix_seed(self.seed, index),
        }
    }

    /// RNG for an independent measurement stream under this seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Samples `n_shots` projective outcomes of an observable with the given
    /// expectation, on measurement stream `stream`.
    pub fn sample<T: Scalar>(&self, expectation: T, stream: u64) -> (T, T) {
        let mut rng = self.rng(stream);
        sample_with(expectation, self.n_shots, &mut rng)
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-point seed: `splitmix64(base ^ splitmix64(index))`.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

/// `ρ₀ = f |g⟩⟨g| + (1 − f) |e⟩⟨e|` in the eigenbasis of `H(θ = 0)`.
pub fn prepare_initial<T: Scalar>(
    params: &ManifoldParams<T>,
    prep: &PreparationModel<T>,
) -> Result<DensityMatrix<T>> {
    let g = params.ground_state_at(T::zero(), params.phi)?;
    Ok(DensityMatrix::new(T::one(), g.bloch().scale(prep.polarization())))
}

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
pub fn bloch_expectations<T: Scalar>(state: &QubitState<T>) -> BlochVector<T> {
    state.bloch()
}

/// `⟨f_φ⟩ = −(Ω₁ sin θ / 2) ⟨σy⟩` at `φ = 0`, in rad/s per radian of φ.
/// Exactly zero at both poles.
pub fn generalized_force<T: Scalar>(params: &ManifoldParams<T>, theta: T, sigma_y: T) -> T {
    -(params.omega1 * pole_sin(theta) / T::lit(2.0)) * sigma_y
}

/// Draws `n_shots` Bernoulli outcomes with `p = (1 + expectation)/2` and
/// returns `(2p̂ − 1, 2√(p̂(1 − p̂)/n))`.
pub fn sample_shots<T: Scalar>(expectation: T, shot: &ShotModel) -> (T, T) {
    shot.sample(expectation, 0)
}

fn sample_with<T: Scalar, R: rand::Rng>(expectation: T, n_shots: u64, rng: &mut R) -> (T, T) {
    let p = ((1.0 + expectation.as_f64()) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(n_shots, p)
        .expect("p clamped to [0, 1]")
        .sample(rng);
    let n = n_shots as f64;
    let p_hat = k as f64 / n;
    let estimate = 2.0 * p_hat - 1.0;
    let err = 2.0 * (p_hat * (1.0 - p_hat) / n).sqrt();
    (T::lit(estimate), T::lit(err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ground_state;
    use crate::state::Spinor;
    use num_complex::Complex;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn reference_ellipse() -> ManifoldParams<f64> {
        ManifoldParams::from_mhz(30.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn preparation_examples() {
        let p = reference_ellipse();
        let rho = prepare_initial(&p, &PreparationModel::perfect()).unwrap();
        assert_eq!(rho.bloch, BlochVector::new(0.0, 0.0, -1.0));

        let rho = prepare_initial(&p, &PreparationModel::new(0.988).unwrap()).unwrap();
        assert!((rho.bloch.z + 0.976).abs() < 1e-12);

        let rho = prepare_initial(&p, &PreparationModel::new(0.5 + 1e-12).unwrap()).unwrap();
        assert!(rho.bloch.norm() < 1e-11);
        assert!(PreparationModel::new(0.5).is_err());
        assert!(PreparationModel::new(1.01).is_err());
    }

    #[test]
    fn expectation_examples() {
        let mixed = QubitState::Mixed(DensityMatrix::<f64>::maximally_mixed());
        assert_eq!(bloch_expectations(&mixed), BlochVector::zero());

        let s = 0.5_f64.sqrt();
        let circ = QubitState::Pure(Spinor::new(Complex::new(s, 0.0), Complex::new(0.0, s)));
        assert!((bloch_expectations(&circ).y.abs() - 1.0).abs() < 1e-15);

        let g = reference_ellipse().ground_state_at(FRAC_PI_2, 0.0).unwrap();
        let b = bloch_expectations(&QubitState::Pure(g));
        assert!(b.max_abs_diff(&BlochVector::new(-1.0, 0.0, 0.0)) < 1e-7);
    }

    #[test]
    fn generalized_force_examples() {
        let p = reference_ellipse();
        assert_eq!(generalized_force(&p, 0.0, 0.7), 0.0);
        assert_eq!(generalized_force(&p, PI, -0.3), 0.0);
        let f = generalized_force(&p, FRAC_PI_2, 0.15);
        assert!((f - (-0.075 * p.omega1)).abs() < 1e-6);
        assert!((f + TAU * 0.75e6).abs() < 1e-6);
        // ground states carry no σy at φ = 0: the force vanishes adiabatically
        for i in 1..20 {
            let theta = PI * i as f64 / 20.0;
            let g = ground_state(&p.hamiltonian_at(theta).unwrap(), 1.0).unwrap();
            assert_eq!(generalized_force(&p, theta, g.bloch().y), 0.0);
        }
    }

    #[test]
    fn shot_examples() {
        let shot = ShotModel::new(1000, 7).unwrap();
        assert_eq!(sample_shots(1.0_f64, &shot), (1.0, 0.0));
        assert_eq!(sample_shots(-1.0_f64, &shot), (-1.0, 0.0));

        let shot = ShotModel::new(10_000, 3).unwrap();
        let (_, err) = sample_shots(0.0_f64, &shot);
        assert!((err - 0.01).abs() < 2e-4);
        assert!(ShotModel::new(0, 1).is_err());
    }

    #[test]
    fn shots_are_deterministic_per_seed() {
        let a = ShotModel::new(500, 11).unwrap();
        assert_eq!(a.sample(0.3_f64, 4), a.sample(0.3_f64, 4));
        assert_ne!(a.sample(0.3_f64, 4), a.sample(0.3_f64, 5));
        assert_ne!(a.for_point(0).seed, a.for_point(1).seed);
        assert_eq!(mix_seed(11, 3), a.for_point(3).seed);
    }

    #[test]
    fn sampling_is_unbiased() {
        let truth = 0.37_f64;
        let n = 1000;
        let mut sum = 0.0;
        let mut var = 0.0;
        for seed in 0..n {
            let (est, err) = sample_shots(truth, &ShotModel::new(400, seed).unwrap());
            sum += est;
            var += err * err;
        }
        let mean = sum / n as f64;
        let se = (var / n as f64).sqrt() / (n as f64).sqrt();
        assert!((mean - truth).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    proptest! {
        #[test]
        fn prepared_state_is_physical(f in 0.5001..=1.0_f64, d2 in -9.0..60.0_f64) {
            let p = ManifoldParams::from_mhz(30.0, 10.0, d2).unwrap();
            let rho = prepare_initial(&p, &PreparationModel::new(f).unwrap()).unwrap();
            prop_assert!(rho.validate().is_ok());
            prop_assert!((rho.bloch.z + (2.0 * f - 1.0)).abs() < 1e-12);
        }

        #[test]
        fn force_vanishes_at_poles(sy in -1.0..1.0_f64, o1 in 0.1..100.0_f64) {
            let p = ManifoldParams::from_mhz(30.0, o1, 0.0).unwrap();
            prop_assert_eq!(generalized_force(&p, 0.0, sy), 0.0);
            prop_assert_eq!(generalized_force(&p, PI, sy), 0.0);
        }

        #[test]
        fn estimates_stay_in_range(e in -1.0..=1.0_f64, n in 1u64..5000, seed in any::<u64>()) {
            let (est, err) = sample_shots(e, &ShotModel::new(n, seed).unwrap());
            prop_assert!((-1.0..=1.0).contains(&est));
            prop_assert!(err >= 0.0 && err <= 1.0 / (n as f64).sqrt() + 1e-12);
        }
    }
}
