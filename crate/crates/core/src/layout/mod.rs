//! Layout optimization along the time axis and on the ground plane.

pub mod geomap;
pub mod time;
