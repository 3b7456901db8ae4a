//! Coordinate scalar abstraction for vertex geometry.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a polygon vertex coordinate.
///
/// Everything on the Hilbert side is integral; only the interchange geometry
/// (WKT, GeoJSON, SVG) and its rasterization are parameterised by this trait.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    /// Converts a lattice coordinate.
    fn lattice(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("lattice coordinate fits the float type")
    }

    fn half() -> Self {
        Self::from_f64(0.5).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
