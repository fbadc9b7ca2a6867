//! Quadrature, root finding and ODE stepping.

pub mod fd;
pub mod ode;
pub mod quad;
pub mod roots;
