//! Floating-point scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the simulation is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or configuration value into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64`, used for error payloads and output.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used for "is this state normalized" preconditions.
    #[inline]
    fn norm_tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Norm drift beyond which a fixed-step integration is declared too coarse.
    #[inline]
    fn drift_tolerance() -> Self {
        Self::lit(1e-6).max(Self::epsilon() * Self::lit(1e3))
    }

    /// Most negative density-matrix eigenvalue tolerated before positivity is
    /// considered violated.
    #[inline]
    fn positivity_tolerance() -> Self {
        Self::lit(1e-8).max(Self::epsilon() * Self::lit(1e3))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `sin θ` on the closed interval `[0, π]` that is exactly zero at both poles.
///
/// `f64::sin(π)` is ~1.2e-16; every quantity carrying a `sin θ` factor
/// (drive amplitude, generalized force, curvature estimate) must vanish
/// identically at the poles.
#[inline]
pub fn pole_sin<T: Scalar>(theta: T) -> T {
    if theta == T::zero() || theta == T::PI() {
        T::zero()
    } else {
        theta.sin()
    }
}

/// Conversion from ordinary frequency in MHz to angular frequency in rad/s.
#[inline]
pub fn mhz_to_rad_per_s<T: Scalar>(mhz: T) -> T {
    mhz * T::TAU() * T::lit(1e6)
}

#[inline]
pub fn rad_per_s_to_mhz<T: Scalar>(w: T) -> T {
    w / (T::TAU() * T::lit(1e6))
}

#[inline]
pub fn us_to_s<T: Scalar>(us: T) -> T {
    us * T::lit(1e-6)
}

#[inline]
pub fn s_to_us<T: Scalar>(s: T) -> T {
    s * T::lit(1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_sin_exact_at_poles() {
        assert_eq!(pole_sin(0.0_f64), 0.0);
        assert_eq!(pole_sin(std::f64::consts::PI), 0.0);
        assert_eq!(pole_sin(std::f32::consts::PI), 0.0);
        assert!((pole_sin(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_round_trip() {
        let w = mhz_to_rad_per_s(30.0_f64);
        assert!((w - 2.0 * std::f64::consts::PI * 30e6).abs() < 1e-6);
        assert!((rad_per_s_to_mhz(w) - 30.0).abs() < 1e-12);
        assert!((s_to_us(us_to_s(22.0_f64)) - 22.0).abs() < 1e-12);
    }
}
