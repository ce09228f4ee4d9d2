//! Image partition: independent FAQPIE circuits per `2^{n0} x 2^{n0}` tile.
//!
//! The block index is classical bookkeeping. Each tile becomes its own
//! `2·n0`-qubit circuit and the image is reassembled classically from the
//! tiles, scaled by their norms. Blocks are numbered row-major:
//! `j = block_row · 2^{n-n0} + block_col`.

use std::time::Duration;

use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::compress::CompressionOptions;
use crate::encoder::{encode_plane, PlaneEncoding, PlaneMetrics};
use crate::error::{Error, Result};
use crate::image_io::{Grid, ImagePlane};
use crate::scalar::Real;
use crate::spectrum::{averaged_fidelity, block_weight, Fidelity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEntry<T> {
    pub index: usize,
    pub block_row: usize,
    pub block_col: usize,
    pub block_norm: T,
    /// `a_j = block_norm / sqrt(Σ block_norm²)`; zero for an all-zero image.
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan<T> {
    n: u32,
    n0: u32,
    blocks: Vec<BlockEntry<T>>,
}

impl<T: Real> PartitionPlan<T> {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn blocks(&self) -> &[BlockEntry<T>] {
        &self.blocks
    }

    pub fn blocks_per_side(&self) -> usize {
        1 << (self.n - self.n0)
    }

    /// Replaces the block norms (e.g. with truncated norms `‖P_{m,j}‖`)
    /// and recomputes the weights.
    pub fn with_norms(&self, norms: &[T]) -> Result<Self> {
        if norms.len() != self.blocks.len() {
            return Err(Error::Partition(format!(
                "{} norms for {} blocks",
                norms.len(),
                self.blocks.len()
            )));
        }
        let mut blocks = self.blocks.clone();
        for (b, &norm) in blocks.iter_mut().zip(norms) {
            b.block_norm = norm;
        }
        assign_weights(&mut blocks)?;
        Ok(Self { n: self.n, n0: self.n0, blocks })
    }
}

fn assign_weights<T: Real>(blocks: &mut [BlockEntry<T>]) -> Result<()> {
    let total = blocks.iter().fold(T::zero(), |acc, b| acc + b.block_norm * b.block_norm).sqrt();
    for b in blocks.iter_mut() {
        b.weight = if total > T::zero() { block_weight(b.block_norm, total)? } else { T::zero() };
    }
    Ok(())
}

/// Cuts `plane` into `4^{n-n0}` tiles of side `2^{n0}`.
pub fn split<T: Real>(plane: &ImagePlane<T>, n0: u32) -> Result<(PartitionPlan<T>, Vec<ImagePlane<T>>)> {
    let n = plane.n();
    if n0 >= n {
        return Err(Error::Partition(format!("block log-size n0 = {n0} must be below n = {n}")));
    }
    let per_side = 1usize << (n - n0);
    let tile = 1usize << n0;
    let mut entries = Vec::with_capacity(per_side * per_side);
    let mut tiles = Vec::with_capacity(per_side * per_side);
    for br in 0..per_side {
        for bc in 0..per_side {
            let grid = Grid::from_fn(tile, tile, |r, c| plane.get(br * tile + r, bc * tile + c));
            let tile_plane = ImagePlane::signed(grid)?;
            entries.push(BlockEntry {
                index: br * per_side + bc,
                block_row: br,
                block_col: bc,
                block_norm: tile_plane.frobenius_norm(),
                weight: T::zero(),
            });
            tiles.push(tile_plane);
        }
    }
    assign_weights(&mut entries)?;
    Ok((PartitionPlan { n, n0, blocks: entries }, tiles))
}

/// One FAQPIE pipeline per tile at order `m0`, run concurrently; results
/// are in block order.
pub fn encode_blocks<T: Real>(
    blocks: &[ImagePlane<T>],
    m0: u32,
    opts: Option<&CompressionOptions>,
) -> Result<Vec<PlaneEncoding<T>>> {
    blocks.par_iter().map(|b| encode_plane(b, m0, opts)).collect()
}

/// Places each unit-norm tile image, scaled by its plan norm, at its tile.
pub fn reassemble<T: Real>(block_images: &[Grid<T>], plan: &PartitionPlan<T>) -> Result<ImagePlane<T>> {
    if block_images.len() != plan.blocks.len() {
        return Err(Error::Partition(format!(
            "{} block images for {} planned blocks",
            block_images.len(),
            plan.blocks.len()
        )));
    }
    let tile = 1usize << plan.n0;
    let side = 1usize << plan.n;
    let mut out = Grid::zeros(side, side);
    for (img, entry) in block_images.iter().zip(&plan.blocks) {
        if img.rows() != tile || img.cols() != tile {
            return Err(Error::Partition(format!(
                "block {} is {}x{}, expected {tile}x{tile}",
                entry.index,
                img.rows(),
                img.cols()
            )));
        }
        for r in 0..tile {
            for c in 0..tile {
                out.set(
                    entry.block_row * tile + r,
                    entry.block_col * tile + c,
                    img.get(r, c) * entry.block_norm,
                );
            }
        }
    }
    ImagePlane::signed(out)
}

/// Maximal-criterion aggregate over per-block metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateMetrics<T> {
    pub max_rotations: usize,
    pub max_cnots: usize,
    pub max_qubits: usize,
    pub total_preprocess: Duration,
    pub avg_fidelity: Fidelity<T>,
}

/// How all-zero blocks enter the averaged fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyBlockFidelity {
    /// Counted with fidelity 1.
    #[default]
    IncludeAsOne,
    Exclude,
}

pub fn aggregate_metrics<T: Real>(
    reports: &[PlaneMetrics<T>],
    empty_policy: EmptyBlockFidelity,
) -> Result<AggregateMetrics<T>> {
    if reports.is_empty() {
        return Err(Error::Empty("block reports"));
    }
    let live = || reports.iter().filter(|r| !r.empty);
    let fidelities: Vec<Fidelity<T>> = reports
        .iter()
        .filter(|r| !(r.empty && empty_policy == EmptyBlockFidelity::Exclude))
        .map(|r| r.fidelity())
        .collect();
    let avg_fidelity =
        if fidelities.is_empty() { Fidelity::one() } else { averaged_fidelity(&fidelities)? };
    Ok(AggregateMetrics {
        max_rotations: live().map(|r| r.counts.rotations_ucr).max().unwrap_or(0),
        max_cnots: live().map(|r| r.counts.cnots_ucr).max().unwrap_or(0),
        max_qubits: live().map(|r| r.qubits).max().unwrap_or(0),
        total_preprocess: reports.iter().map(|r| r.preprocess).sum(),
        avg_fidelity,
    })
}

/// Circuits of the non-empty blocks.
pub fn block_circuits<T: Real>(encodings: &[PlaneEncoding<T>]) -> impl Iterator<Item = (usize, &Circuit<T>)> {
    encodings.iter().enumerate().filter_map(|(j, e)| e.circuit.as_ref().map(|c| (j, c)))
}
