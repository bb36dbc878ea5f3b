//! Plot-ready CSV tables.
//!
//! Every table starts with a header line. Floats use Rust's shortest
//! round-tripping scientific notation, so equal values give equal bytes.

use std::io::Write;

use num_complex::Complex;

use crate::analysis::{OamSpectrum, SingularityMap};
use crate::error::{Error, Result};
use crate::modal::RadialSpectrum;
use crate::scalar::Real;

/// `m,weight`, one row per azimuthal order.
pub fn write_oam_spectrum<T: Real, W: Write>(spec: &OamSpectrum<T>, mut w: W) -> Result<()> {
    writeln!(w, "m,weight")?;
    for (m, v) in spec.m_values.iter().zip(&spec.weights) {
        writeln!(w, "{m},{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// `r_meters,intensity` from `(radius, mean intensity)` pairs.
pub fn write_radial_profile<T: Real, W: Write>(profile: &[(T, T)], mut w: W) -> Result<()> {
    writeln!(w, "r_meters,intensity")?;
    for (r, v) in profile {
        writeln!(w, "{r:e},{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// `ix,iy,q`: plaquette lower-left indices and charge.
pub fn write_singularities<T: Real, W: Write>(map: &SingularityMap<T>, mut w: W) -> Result<()> {
    writeln!(w, "ix,iy,q")?;
    for c in &map.charges {
        writeln!(w, "{},{},{}", c.ix, c.iy, c.q)?;
    }
    w.flush()?;
    Ok(())
}

/// `p,weight` for `p = 0..=p_max`.
pub fn write_radial_spectrum<T: Real, W: Write>(spec: &RadialSpectrum<T>, mut w: W) -> Result<()> {
    writeln!(w, "p,weight")?;
    for (p, v) in spec.weights.iter().enumerate() {
        writeln!(w, "{p},{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// `r_meters,re,im` for a sampled complex radial profile.
pub fn write_complex_profile<T: Real, W: Write>(r: &[T], values: &[Complex<T>], mut w: W) -> Result<()> {
    if r.len() != values.len() {
        return Err(Error::invalid("values", "length differs from radii"));
    }
    writeln!(w, "r_meters,re,im")?;
    for (r, v) in r.iter().zip(values) {
        writeln!(w, "{r:e},{:e},{:e}", v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}
