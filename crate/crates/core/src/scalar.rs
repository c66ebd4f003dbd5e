//! Scalar abstraction shared by probabilities, utilities and acceptability.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the engine computes in (`f32` or `f64`).
///
/// The two tolerances are the only precision-dependent constants in the
/// engine: `compare_tolerance` decides when two midpoints or expectations
/// are equal, `sum_tolerance` bounds how far a strict-valid action's branch
/// probabilities may drift from one.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    fn compare_tolerance() -> Self;

    fn sum_tolerance() -> Self;

    /// Converts an `f64` literal; panics only for values the type cannot hold.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn clamp_unit(self) -> Self {
        self.max(Self::zero()).min(Self::one())
    }
}

impl Scalar for f64 {
    fn compare_tolerance() -> Self {
        1e-12
    }

    fn sum_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn compare_tolerance() -> Self {
        1e-6
    }

    fn sum_tolerance() -> Self {
        1e-5
    }
}

/// Renders a scalar with at most `max_decimals` decimals, trailing zeros trimmed.
pub fn format_trimmed<T: Scalar>(value: T, max_decimals: usize) -> String {
    let v = value.to_f64().unwrap_or(f64::NAN);
    let mut s = format!("{:.*}", max_decimals, v);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Fixed three-decimal rendering used by tables and transcripts.
pub fn format_fixed3<T: Scalar>(value: T) -> String {
    let v = value.to_f64().unwrap_or(f64::NAN);
    let s = format!("{:.3}", v);
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}
