//! Anisotropic multiscale frames on regular grids, with cartoon-class phantoms
//! and sparse-approximation benchmarking.
//!
//! The crate builds pyramid-adapted shearlet systems from either band-limited
//! or compactly supported generators, certifies their frame bounds on sampled
//! grids, and measures N-term approximation decay against Fourier and Haar
//! baselines on piecewise-smooth phantoms.
//!
//! Everything numerical is generic over the floating scalar via [`Scalar`];
//! `f64` aliases for the main types live at the crate root.

pub mod error;
pub mod scalar;

pub mod mat;

mod bessel;
pub mod field;
pub mod fft;
pub mod fourier;
pub mod generators;
pub mod haar;
pub mod lattice;
pub mod phantom;
pub(crate) mod pool;
pub mod frame;
pub mod system;
pub mod transform;

pub use error::{Result, ShearletError};
pub use scalar::Scalar;

pub use field::SampledField;
pub use frame::{
    apply_frame_operator, dual_coefficients_to_field, estimate_frame_bounds, frame_potential,
    FrameBoundEstimate,
};
pub use fourier::{fourier_analyze, fourier_synthesize, FourierCoeffs};
pub use generators::{BandlimitedSpec, CompactSpec, Generator};
pub use haar::{haar_analyze, haar_synthesize, HaarAtom, HaarCoeffs};
pub use lattice::{LatticeSpec, PyramidTag, ShearletIndex};
pub use phantom::{
    ball_phantom, deformed_sphere_phantom, halfspace_phantom, piecewise_phantom, CartoonPhantom,
    RegionSpec, SmoothPart,
};
pub use system::{ShearletSystem, SystemSpec, TileSpec};
pub use transform::{analyze, synthesize, CoeffTable};

/// Default-precision field.
pub type Field64 = SampledField<f64>;
/// Default-precision lattice spec.
pub type Lattice64 = LatticeSpec<f64>;
