//! Fourier-series-loader (FSL) circuits for 2D images.
//!
//! The retained `2^{m+1} x 2^{m+1}` coefficient block is loaded by a UCR
//! cascade onto the sign and low qubits of both dimension registers. Each
//! sign qubit then fans out onto the high qubits of its register, which sign
//! extends the `(m+1)`-bit two's-complement frequency to `f mod 2^n`. A QFT
//! with kernel `e^{+2πi xk/2^n}` per register finishes the circuit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex;

use crate::circuit::{Circuit, Gate, GateCounts, GateKind, Region};
use crate::error::{Error, Result};
use crate::image_io::ImagePlane;
use crate::scalar::Real;
use crate::spectrum::{check_order, SpectrumBlock, TruncationMode};
use crate::ucr::{cascade_counts, ucr_angles};

/// Qubit map of a 2D FSL circuit.
///
/// Register `d` (0 = rows, 1 = columns) occupies qubits `d*n .. d*n + n`,
/// laid out as `[high: n-m-1 | sign: 1 | low: m]`, most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FslLayout {
    n: u32,
    m: u32,
}

impl FslLayout {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        check_order(n, m)?;
        Ok(Self { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn width(&self) -> usize {
        2 * self.n as usize
    }

    pub fn register(&self, dim: usize) -> Vec<usize> {
        let n = self.n as usize;
        (dim * n..dim * n + n).collect()
    }

    pub fn high(&self, dim: usize) -> Vec<usize> {
        let start = dim * self.n as usize;
        (start..self.sign(dim)).collect()
    }

    pub fn sign(&self, dim: usize) -> usize {
        dim * self.n as usize + (self.n - self.m - 1) as usize
    }

    pub fn low(&self, dim: usize) -> Vec<usize> {
        let s = self.sign(dim);
        (s + 1..s + 1 + self.m as usize).collect()
    }

    /// The `2(m+1)` qubits the cascade loads, most significant first.
    pub fn loaded(&self) -> Vec<usize> {
        (0..2)
            .flat_map(|d| std::iter::once(self.sign(d)).chain(self.low(d)))
            .collect()
    }

    /// Number of qubits loaded by the cascade.
    pub fn loaded_width(&self) -> usize {
        2 * (self.m as usize + 1)
    }
}

/// QFT on `register` mapping `|x⟩ → 2^{-n/2} Σ_k e^{+2πi xk/2^n} |k⟩`.
///
/// This is the adjoint of the `e^{-2πi}` transform, matching the
/// reconstruction kernel. Gate order: H, controlled phases, final swaps.
pub fn build_iqft<T: Real>(register: &[usize]) -> Result<Vec<Gate<T>>> {
    let len = register.len();
    if len == 0 {
        return Err(Error::InvalidArgument("empty QFT register".into()));
    }
    let mut gates = Vec::with_capacity(len * (len + 1) / 2 + len / 2);
    for j in 0..len {
        gates.push(Gate::h(register[j], Region::Iqft));
        for l in j + 1..len {
            let angle = T::of(2.0 * PI / (1u64 << (l - j + 1)) as f64);
            gates.push(Gate::cphase(register[l], register[j], angle, Region::Iqft));
        }
    }
    for j in 0..len / 2 {
        gates.push(Gate::swap(register[j], register[len - 1 - j], Region::Iqft));
    }
    Ok(gates)
}

pub fn build_fsl_2d<T: Real>(block: &SpectrumBlock<T>, layout: &FslLayout) -> Result<Circuit<T>> {
    if block.mode() != TruncationMode::Centered {
        return Err(Error::WrongMode("FSL circuits load centered blocks"));
    }
    check_order(block.n(), block.m())?;
    if block.n() != layout.n || block.m() != layout.m {
        return Err(Error::DimensionMismatch(format!(
            "block (n={}, m={}) vs layout (n={}, m={})",
            block.n(),
            block.m(),
            layout.n,
            layout.m
        )));
    }
    let cascade = ucr_angles(block.coeffs()).map_err(|e| match e {
        Error::ZeroNorm(_) => Error::ZeroNorm("retained coefficient block"),
        other => other,
    })?;
    let mut circuit = Circuit::new(layout.width());
    circuit.extend(cascade.to_gates(&layout.loaded(), Region::Ucr)?)?;
    for d in 0..2 {
        let sign = layout.sign(d);
        circuit.extend(layout.high(d).into_iter().map(|h| Gate::cnot(sign, h, Region::Fanout)))?;
    }
    for d in 0..2 {
        circuit.extend(build_iqft(&layout.register(d))?)?;
    }
    Ok(circuit)
}

/// Exact amplitude encoding of a plane: a full cascade on all `2n` qubits.
pub fn build_exact_qpie<T: Real>(plane: &ImagePlane<T>) -> Result<Circuit<T>> {
    if plane.frobenius_norm() == T::zero() {
        return Err(Error::ZeroNorm("image"));
    }
    let amps: Vec<Complex<T>> =
        plane.grid().data().iter().map(|&v| Complex::new(v, T::zero())).collect();
    let cascade = ucr_angles(&amps)?;
    let width = 2 * plane.n() as usize;
    let register: Vec<usize> = (0..width).collect();
    Circuit::from_gates(width, cascade.to_gates(&register, Region::Ucr)?)
}

/// Gate counts of `build_fsl_2d` at `(n, m)`, derived without synthesis.
pub fn fsl_counts(n: u32, m: u32) -> Result<GateCounts> {
    check_order(n, m)?;
    let k = 2 * (m as usize + 1);
    let (rot, cnot) = cascade_counts(k);
    let n = n as usize;
    let fanout = 2 * (n - m as usize - 1);
    let mut by_kind = BTreeMap::new();
    by_kind.insert(GateKind::Ry, rot / 2);
    by_kind.insert(GateKind::Rz, rot / 2);
    by_kind.insert(GateKind::Cnot, cnot + fanout);
    by_kind.insert(GateKind::H, 2 * n);
    if n > 1 {
        by_kind.insert(GateKind::Cphase, n * (n - 1));
        by_kind.insert(GateKind::Swap, 2 * (n / 2));
    }
    Ok(GateCounts { rotations_ucr: rot, cnots_ucr: cnot, total_by_kind: by_kind })
}

/// Gate counts of `build_exact_qpie` on a `2^n x 2^n` plane.
pub fn exact_qpie_counts(n: u32) -> GateCounts {
    let (rot, cnot) = cascade_counts(2 * n as usize);
    let mut by_kind = BTreeMap::new();
    if rot > 0 {
        by_kind.insert(GateKind::Ry, rot / 2);
        by_kind.insert(GateKind::Rz, rot / 2);
    }
    if cnot > 0 {
        by_kind.insert(GateKind::Cnot, cnot);
    }
    GateCounts { rotations_ucr: rot, cnots_ucr: cnot, total_by_kind: by_kind }
}
