//! Lie algebra and matrix Lie group arithmetic.
//!
//! Conventions used throughout the crate:
//!
//! * `(ad*_ξ p)(η) = p([ξ, η])`;
//! * `(Ad*_g p)(ξ) = p(Ad_g ξ)` with `Ad_g ξ = g ρ(ξ) g⁻¹` (pullback);
//! * a left-trivialized covector `p` at `g` and a right-trivialized covector
//!   `q` at `g` describe the same cotangent vector iff `p(ξ) = q(g ξ g⁻¹)`.

mod algebra;
mod classify;
mod cotangent;
pub mod io;
mod orbit;
mod types;

pub use algebra::{LieAlgebra, MatrixRepresentation};
pub use classify::{classify_map, Classification, MapKind};
pub use cotangent::{compare_cotangent, momentum_maps, CotangentPoint, Side};
pub use orbit::{orbit_report, OrbitReport, DEFAULT_RANK_TOL};
pub use types::{AlgebraVector, Covector, GroupPoint, LinearMapOnAlgebra};
