//! Numerics for hyperbolic-harmonic Bergman-Besov theory on the real
//! hyperbolic ball.
//!
//! The crate builds H-harmonic functions from their homogeneous expansions
//! f = sum_m S_m(|x|) f_m(x), evaluates the extended reproducing kernels
//! R_alpha and the coefficient multipliers D^t_s, computes the equivalent
//! Bergman-Besov norms (direct, multiplier, tangential, normal, partial), and
//! provides the weighted quadrature and integral operators needed to verify
//! the identities and growth estimates of the theory at desk scale.
//!
//! Module map:
//! - [`geometry`]: ball/sphere points, the bracket [x,y], Mobius maps,
//!   weighted measure constants, finite-difference hyperbolic Laplacian.
//! - [`specfun`]: radial profiles S_m (Gauss hypergeometric), zonal
//!   harmonics, dimension counts.
//! - [`expansion`]: the H-harmonic function type and its exact differential
//!   operators N, T_{i,j}, partials, spherical Laplacian.
//! - [`kernels`]: coefficients c_m(alpha), multipliers D^t_s, kernel
//!   evaluation with controlled truncation.
//! - [`integrate`]: sphere/ball product quadrature, projections P_beta,
//!   the operator E_{s,t}, duality pairings.
//! - [`spaces`]: the five norm characterizations, the exact B^2 inner
//!   product, Bloch seminorm, equivalence reports.

#![warn(missing_docs)]

pub mod error;
pub mod expansion;
pub mod geometry;
pub mod integrate;
pub mod kernels;
pub mod quad;
pub mod spaces;
pub mod specfun;

pub use error::{Error, Result};
pub use expansion::{DerivedField, HHarmonicFunction};
pub use geometry::{bracket, mobius, v_alpha, BallPoint, SpherePoint, WeightedMeasure};
pub use kernels::{apply_dst, eval_kernel, kernel_as_function, KernelSpec, Multiplier};
pub use spaces::{inner_product_b2, norm, Characterization, NormSpec};
