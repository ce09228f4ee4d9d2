//! Fourier-truncated approximate quantum probability image encoding (FAQPIE).
//!
//! The crate turns raster images into amplitude-encoding circuits:
//!
//! 1. [`image_io`] loads, pads and splits images into power-of-two planes.
//! 2. [`spectrum`] computes the 2D DFT, truncates it to a low-frequency block
//!    and provides the classical reconstruction used as an oracle.
//! 3. [`fsl`] synthesizes Fourier-series-loader circuits out of uniformly
//!    controlled rotations ([`ucr`]) plus inverse QFTs.
//! 4. [`compress`] prunes small rotations and cancels redundant CNOTs.
//! 5. [`simulator`] runs circuits on a dense statevector.
//! 6. [`partition`] encodes an image as independent tiles.
//! 7. [`pipeline`] wires the stages together and produces reports.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases
//! below pin the common double-precision instantiations.
//!
//! # Qubit ordering
//!
//! Qubit 0 is the most significant bit of a basis index. A `2n`-qubit image
//! register stores pixel `(k, l)` at basis index `k * 2^n + l`; the row
//! register is qubits `0..n`, the column register `n..2n`. Inside each
//! register of an FSL circuit the layout is `[high (n-m-1) | sign | low (m)]`.

pub mod circuit;
pub mod compress;
pub mod encoder;
pub mod error;
pub mod fsl;
pub mod image_io;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod simulator;
pub mod spectrum;
pub mod ucr;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type Grid = image_io::Grid<f64>;
pub type ImagePlane = image_io::ImagePlane<f64>;
pub type Spectrum = spectrum::Spectrum<f64>;
pub type SpectrumBlock = spectrum::SpectrumBlock<f64>;
pub type Gate = circuit::Gate<f64>;
pub type Circuit = circuit::Circuit<f64>;
pub type UcrCascade = ucr::UcrCascade<f64>;
pub type Statevector = simulator::Statevector<f64>;
pub type PartitionPlan = partition::PartitionPlan<f64>;

pub type ImagePlaneF32 = image_io::ImagePlane<f32>;
pub type SpectrumF32 = spectrum::Spectrum<f32>;
pub type CircuitF32 = circuit::Circuit<f32>;
pub type StatevectorF32 = simulator::Statevector<f32>;
