use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar underlying every complex matrix in the crate.
///
/// Implemented for `f32` and `f64`. The default tolerances scale with the
/// machine epsilon of the type, so `f32` instantiations get looser thresholds.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Converts an `f64` literal; every finite `f64` is representable up to rounding.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn machine_eps() -> Self {
        Self::default_epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}
