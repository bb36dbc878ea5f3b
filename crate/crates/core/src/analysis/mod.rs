//! Measurements on sampled fields: beam axis, OAM spectrum, phase
//! singularities and azimuthally averaged intensity.

mod oam;
mod profile;
mod singularity;

pub use oam::{oam_spectrum, OamSpectrum};
pub use profile::{centroid, radial_profile};
pub use singularity::{singularity_map, Charge, SingularityMap, DEFAULT_THRESHOLD};
