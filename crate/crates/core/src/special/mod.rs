//! Special functions evaluated without overflow for large arguments and orders.

mod bessel;
mod gamma;

pub use bessel::bessel_j;
pub use gamma::ln_gamma;
