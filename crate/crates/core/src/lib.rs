//! Rotational Weingarten surfaces: curvature relations, phase space, profiles.

pub mod expr;
pub mod numeric;
pub mod phase;
pub mod profile;
pub mod taxonomy;
pub mod wclass;
pub mod yau;
