//! Single-plane FAQPIE pipeline: spectrum, truncation, synthesis, optional
//! compression, simulation and quality metrics.

use std::time::{Duration, Instant};

use num_complex::Complex;

use crate::circuit::{count_gates, Circuit, GateCounts};
use crate::compress::{compress, CompressionOptions, CompressionStats};
use crate::error::Result;
use crate::fsl::{build_exact_qpie, build_fsl_2d, FslLayout};
use crate::image_io::{Grid, ImagePlane};
use crate::scalar::Real;
use crate::simulator::{run, run_fsl_fast, Statevector};
use crate::spectrum::{
    classical_reconstruct, fidelity, forward_dft, overlap_fidelity, retained_energy_ratio,
    truncate_spectrum, Fidelity, TruncationMode,
};

/// Exact-encoding circuits wider than this are not simulated.
pub const EXACT_SIMULATION_LIMIT: usize = 16;

/// Metrics for one encoded plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneMetrics<T> {
    pub qubits: usize,
    /// Counts of the emitted (possibly compressed) circuit.
    pub counts: GateCounts,
    pub compression: Option<CompressionStats>,
    /// `|⟨circuit state|P⟩|²`; `None` when not simulated.
    pub fidelity_simulated: Option<Fidelity<T>>,
    /// `|⟨P_m|P⟩|²` from the classical reconstruction.
    pub fidelity_oracle: Fidelity<T>,
    pub retained_energy_ratio: T,
    /// ∞-norm of `|state| - |normalized oracle|`; `None` when not simulated.
    pub oracle_deviation: Option<T>,
    /// `‖P_m‖_F`, the scale that turns the state back into pixels.
    pub reconstruction_norm: T,
    pub preprocess: Duration,
    /// All-zero plane: no circuit, fidelity 1 by convention.
    pub empty: bool,
}

impl<T: Real> PlaneMetrics<T> {
    /// Fidelity used for reporting: simulated when available.
    pub fn fidelity(&self) -> Fidelity<T> {
        self.fidelity_simulated.unwrap_or(self.fidelity_oracle)
    }
}

#[derive(Debug, Clone)]
pub struct PlaneEncoding<T> {
    pub circuit: Option<Circuit<T>>,
    pub metrics: PlaneMetrics<T>,
    /// Unit-norm pixel magnitudes of the simulated state.
    pub image: Grid<T>,
}

fn empty_encoding<T: Real>(plane: &ImagePlane<T>) -> PlaneEncoding<T> {
    let side = plane.side();
    PlaneEncoding {
        circuit: None,
        metrics: PlaneMetrics {
            qubits: 2 * plane.n() as usize,
            counts: GateCounts::default(),
            compression: None,
            fidelity_simulated: None,
            fidelity_oracle: Fidelity::one(),
            retained_energy_ratio: T::one(),
            oracle_deviation: None,
            reconstruction_norm: T::zero(),
            preprocess: Duration::ZERO,
            empty: true,
        },
        image: Grid::zeros(side, side),
    }
}

fn pixels_as_state<T: Real>(plane: &ImagePlane<T>) -> Vec<Complex<T>> {
    plane.grid().data().iter().map(|&v| Complex::new(v, T::zero())).collect()
}

fn unit_magnitudes<T: Real>(sv: &Statevector<T>, side: usize) -> Result<Grid<T>> {
    let norm = sv.norm();
    Grid::from_vec(side, side, sv.amplitudes().iter().map(|a| a.norm() / norm).collect())
}

/// Optional hook applied to the synthesized circuit before compression.
pub type CircuitHook<'a, T> = &'a (dyn Fn(&mut Circuit<T>) + Sync);

/// FAQPIE encoding of one plane at truncation order `m`.
pub fn encode_plane<T: Real>(
    plane: &ImagePlane<T>,
    m: u32,
    opts: Option<&CompressionOptions>,
) -> Result<PlaneEncoding<T>> {
    encode_plane_with(plane, m, opts, false, None)
}

/// Like [`encode_plane`]; `full_simulation` runs the generic simulator
/// instead of the FSL fast path, and `hook` may edit the circuit first.
pub fn encode_plane_with<T: Real>(
    plane: &ImagePlane<T>,
    m: u32,
    opts: Option<&CompressionOptions>,
    full_simulation: bool,
    hook: Option<CircuitHook<'_, T>>,
) -> Result<PlaneEncoding<T>> {
    let layout = FslLayout::new(plane.n(), m)?;
    if plane.frobenius_norm() == T::zero() {
        return Ok(empty_encoding(plane));
    }
    let spec = forward_dft(plane);
    let block = truncate_spectrum(&spec, m, TruncationMode::Centered)?;

    let start = Instant::now();
    let mut circuit = build_fsl_2d(&block, &layout)?;
    if let Some(h) = hook {
        h(&mut circuit);
    }
    let (circuit, compression) = match opts {
        Some(o) => {
            let (c, stats) = compress(&circuit, o)?;
            (c, Some(stats))
        }
        None => (circuit, None),
    };
    let preprocess = start.elapsed();

    let sv = if full_simulation { run(&circuit, None)? } else { run_fsl_fast(&circuit, &layout)? };
    let oracle = classical_reconstruct(&block).normalized()?;
    let state_norm = sv.norm();
    let oracle_deviation = sv
        .amplitudes()
        .iter()
        .zip(&oracle)
        .map(|(a, o)| (a.norm() / state_norm - o.norm()).abs())
        .fold(T::zero(), T::max);

    Ok(PlaneEncoding {
        metrics: PlaneMetrics {
            qubits: layout.width(),
            counts: count_gates(&circuit),
            compression,
            fidelity_simulated: Some(overlap_fidelity(sv.amplitudes(), &pixels_as_state(plane))?),
            fidelity_oracle: fidelity(&block, &spec)?,
            retained_energy_ratio: retained_energy_ratio(&block, &spec)?,
            oracle_deviation: Some(oracle_deviation),
            reconstruction_norm: block.reconstruction_norm(),
            preprocess,
            empty: false,
        },
        image: unit_magnitudes(&sv, plane.side())?,
        circuit: Some(circuit),
    })
}

/// Truncation and classical reconstruction only; no circuit is built.
/// This is the only path for [`TruncationMode::NonNegative`].
pub fn encode_plane_classical<T: Real>(
    plane: &ImagePlane<T>,
    m: u32,
    mode: TruncationMode,
) -> Result<PlaneEncoding<T>> {
    crate::spectrum::check_order(plane.n(), m)?;
    if plane.frobenius_norm() == T::zero() {
        return Ok(empty_encoding(plane));
    }
    let start = Instant::now();
    let spec = forward_dft(plane);
    let block = truncate_spectrum(&spec, m, mode)?;
    let recon = classical_reconstruct(&block);
    let preprocess = start.elapsed();
    let side = plane.side();
    let image = Grid::from_vec(side, side, recon.normalized()?.iter().map(|a| a.norm()).collect())?;
    Ok(PlaneEncoding {
        circuit: None,
        metrics: PlaneMetrics {
            qubits: 0,
            counts: GateCounts::default(),
            compression: None,
            fidelity_simulated: None,
            fidelity_oracle: fidelity(&block, &spec)?,
            retained_energy_ratio: retained_energy_ratio(&block, &spec)?,
            oracle_deviation: None,
            reconstruction_norm: recon.norm(),
            preprocess,
            empty: false,
        },
        image,
    })
}

/// Exact QPIE baseline. Simulated only up to [`EXACT_SIMULATION_LIMIT`] qubits.
pub fn encode_plane_exact<T: Real>(plane: &ImagePlane<T>) -> Result<PlaneEncoding<T>> {
    if plane.frobenius_norm() == T::zero() {
        return Ok(empty_encoding(plane));
    }
    let start = Instant::now();
    let circuit = build_exact_qpie(plane)?;
    let preprocess = start.elapsed();
    let target = pixels_as_state(plane);
    let side = plane.side();
    let (fidelity_simulated, oracle_deviation, image) = if circuit.width() <= EXACT_SIMULATION_LIMIT {
        let sv = run(&circuit, None)?;
        let norm = plane.frobenius_norm();
        let dev = sv
            .amplitudes()
            .iter()
            .zip(&target)
            .map(|(a, t)| (a.norm() - t.re / norm).abs())
            .fold(T::zero(), T::max);
        (Some(overlap_fidelity(sv.amplitudes(), &target)?), Some(dev), unit_magnitudes(&sv, side)?)
    } else {
        let norm = plane.frobenius_norm();
        let data = plane.grid().data().iter().map(|&v| v / norm).collect();
        (None, None, Grid::from_vec(side, side, data)?)
    };
    Ok(PlaneEncoding {
        metrics: PlaneMetrics {
            qubits: circuit.width(),
            counts: count_gates(&circuit),
            compression: None,
            fidelity_simulated,
            fidelity_oracle: Fidelity::one(),
            retained_energy_ratio: T::one(),
            oracle_deviation,
            reconstruction_norm: plane.frobenius_norm(),
            preprocess,
            empty: false,
        },
        image,
        circuit: Some(circuit),
    })
}
