//! Exact Fedosov deformation quantization on a single Darboux chart.
//!
//! The crate builds the formal Weyl algebra bundle with its fiberwise Moyal
//! product, the Abelian connection and star product, the local
//! trivialization `T: W_D → W_{D₀}`, and the deformed differential calculus
//! (`λ_i`, `X_i`, `⊗_*`, `Alt`, `∧_*`, `d_*`) on top of it. All arithmetic is
//! over Gaussian rationals, so every identity is checked with equality.
//!
//! ```
//! use fedosov::{AbelianConnection, Chart, StarFunction, Poly};
//!
//! let chart = Chart::flat(2, 6, 2).unwrap();
//! let conn = AbelianConnection::build(&chart);
//! let f = StarFunction::from_poly(Poly::x(0));
//! let g = StarFunction::from_poly(Poly::x(1));
//! let fg = conn.star_product(&f, &g).unwrap();
//! assert_eq!(fedosov::render::render_star(&fg).text, "x1 x2 + (1/2 I) h");
//! ```

pub mod abelian;
pub mod calculus;
pub mod chart;
pub mod error;
pub mod io;
pub mod parse;
pub mod poly;
pub mod random;
pub mod rational;
pub mod reference;
pub mod render;
pub mod scalar;
pub mod trivialization;
pub mod verify;
pub mod weyl;

pub use abelian::{build_r, project_center, AbelianConnection, StarFunction};
pub use calculus::{alt, Frame, Side, StarForm, StarTensor};
pub use chart::{omega_lower, omega_upper, Chart};
pub use error::{Error, Result};
pub use poly::{Monomial, Poly};
pub use rational::Rational;
pub use scalar::Scalar;
pub use trivialization::{build_homotopy, hamiltonian, Homotopy, TrivializationMap};
pub use weyl::{Key, WeylForm};
