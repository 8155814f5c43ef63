//! Numerical kernels shared by the rest of the crate: special functions,
//! adaptive quadrature, bracketed root finding, and seeded random streams.

pub mod quadrature;
pub mod rng;
pub mod root;
pub mod special;

pub use quadrature::{integrate, integrate_finite, integrate_to_infinity, QuadratureConfig};
pub use rng::{derive_rng, make_rng, sample_exponential, sample_standard_normal, SeededRng};
pub use root::{find_root, RootBracket, DEFAULT_ROOT_TOL};
pub use special::{digamma, ln_gamma, EULER_GAMMA};
