//! Orthonormal bases for spectral clusters of three model operators:
//!
//! * flat torus `[0, 2π)²`: `(2π)⁻¹ e^{i⟨k,x⟩}` with `|k|` in a window around `λ`;
//! * round sphere: degree-`l` harmonics `Y_l^m`, `λ = √(l(l+1))`;
//! * 2D harmonic oscillator `−Δ + |x|²`: products `h_{n₁}(x₁)h_{n₂}(x₂)`,
//!   `n₁ + n₂ = n`, `λ² = 2n + 2`.
//!
//! Sphere and oscillator functions are evaluated with scaled recurrences so
//! that high degrees work far into the evanescent region.

// `!(x > a)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod basis;
mod error;
pub mod hermite;
pub mod scaled;
pub mod sphere;
pub mod torus;

pub use basis::{
    evaluate_basis, hermite_cluster, sphere_cluster, sphere_kernel_diagonal, torus_cluster, BasisMatrix,
    ClusterBasis, Family, Indices,
};
pub use error::BasisError;
pub use hermite::{hermite_functions, polar_radial};
pub use sphere::{legendre, legendre_column};
pub use torus::{annulus_points, lattice_rows, LatticeRow, RowSegment};

/// Default torus window `[λ − 1, λ + 1]`.
pub const DEFAULT_WINDOW: [f64; 2] = [-1.0, 1.0];
