//! State preparation by cascades of uniformly controlled rotations (UCRs).
//!
//! A `k`-qubit register is loaded level by level: level `t` rotates qubit
//! `t-1` conditioned on the `t-1` more significant qubits. Magnitudes are set
//! by an RY cascade, phases by a following RZ cascade. Each UCR with `c`
//! controls is emitted as `2^c` rotations interleaved with `2^c` CNOTs along a
//! Gray-code walk (none for `c = 0`).

use num_complex::Complex;

use crate::circuit::{Gate, GateKind, Region};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-level multiplexed angles of a state-preparation cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct UcrCascade<T> {
    k: usize,
    magnitude_levels: Vec<Vec<T>>,
    phase_levels: Vec<Vec<T>>,
    global_phase: T,
}

impl<T: Real> UcrCascade<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    /// RY angles; level `t` (0-based here) has `2^t` entries.
    pub fn magnitude_levels(&self) -> &[Vec<T>] {
        &self.magnitude_levels
    }

    pub fn phase_levels(&self) -> &[Vec<T>] {
        &self.phase_levels
    }

    /// Phase of the prepared state relative to the target; never emitted.
    pub fn global_phase(&self) -> T {
        self.global_phase
    }

    /// Emits the cascade onto `register` (most significant qubit first).
    pub fn to_gates(&self, register: &[usize], region: Region) -> Result<Vec<Gate<T>>> {
        if register.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "cascade loads {} qubits, register has {}",
                self.k,
                register.len()
            )));
        }
        let (rot, cnot) = cascade_counts(self.k);
        let mut gates = Vec::with_capacity(rot + cnot);
        for (kind, levels) in [(GateKind::Ry, &self.magnitude_levels), (GateKind::Rz, &self.phase_levels)] {
            for (t, angles) in levels.iter().enumerate() {
                gates.extend(gray_ucr_to_gates(kind, angles, register[t], &register[..t], region)?);
            }
        }
        Ok(gates)
    }
}

/// `(rotations, CNOTs)` emitted by a full `k`-qubit cascade.
pub fn cascade_counts(k: usize) -> (usize, usize) {
    if k == 0 {
        return (0, 0);
    }
    (2 * ((1 << k) - 1), 2 * ((1 << k) - 2))
}

/// Computes the cascade preparing `amplitudes / ‖amplitudes‖` from `|0…0⟩`.
pub fn ucr_angles<T: Real>(amplitudes: &[Complex<T>]) -> Result<UcrCascade<T>> {
    let len = amplitudes.len();
    if !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("amplitude count {len} is not a power of two")));
    }
    let k = len.trailing_zeros() as usize;
    let energy: Vec<T> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    if energy.iter().all(|&e| e == T::zero()) {
        return Err(Error::ZeroNorm("amplitude vector"));
    }
    let two = T::of(2.0);

    // subtree energies, bottom-up; sums[d] has 2^d entries
    let mut sums = vec![Vec::new(); k + 1];
    sums[k] = energy;
    for d in (0..k).rev() {
        sums[d] = sums[d + 1].chunks_exact(2).map(|p| p[0] + p[1]).collect();
    }
    let magnitude_levels = (0..k)
        .map(|t| {
            sums[t + 1]
                .chunks_exact(2)
                .map(|p| two * p[1].sqrt().atan2(p[0].sqrt()))
                .collect()
        })
        .collect();

    let mut phases: Vec<T> = amplitudes.iter().map(|a| a.im.atan2(a.re)).collect();
    let mut phase_levels = vec![Vec::new(); k];
    for t in (0..k).rev() {
        phase_levels[t] = phases.chunks_exact(2).map(|p| p[1] - p[0]).collect();
        phases = phases.chunks_exact(2).map(|p| (p[0] + p[1]) / two).collect();
    }
    Ok(UcrCascade { k, magnitude_levels, phase_levels, global_phase: phases[0] })
}

#[inline]
pub fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Angles of the Gray-code decomposition of a multiplexed rotation.
///
/// Returns `θ̂_i = 2^{-c} Σ_j (-1)^{popcount(j & gray(i))} α_j`, each wrapped
/// to `(-π, π]`. Shifting any `θ̂_i` by `2π` negates the whole UCR, so the
/// wrap only changes the global phase.
pub fn gray_transform<T: Real>(angles: &[T]) -> Vec<T> {
    let len = angles.len();
    debug_assert!(len.is_power_of_two());
    let mut w = angles.to_vec();
    let mut h = 1;
    while h < len {
        for block in w.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = T::one() / T::of_usize(len);
    (0..len).map(|i| wrap_angle(w[gray(i)] * scale)).collect()
}

/// Wraps into `(-π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let pi = T::PI();
    let two_pi = pi + pi;
    if a > -pi && a <= pi {
        return a;
    }
    let r = a - two_pi * ((a + pi) / two_pi).floor();
    if r <= -pi { r + two_pi } else { r }
}

/// Index into `controls` of the CNOT emitted after rotation `i`.
pub fn gray_control_index(i: usize, c: usize) -> usize {
    let len = 1usize << c;
    let flipped = gray(i) ^ gray((i + 1) % len);
    c - 1 - flipped.trailing_zeros() as usize
}

/// Decomposes a multiplexed rotation of `kind` into rotations and CNOTs.
///
/// `controls[0]` is the most significant bit of the angle index.
pub fn gray_ucr_to_gates<T: Real>(
    kind: GateKind,
    angles: &[T],
    target: usize,
    controls: &[usize],
    region: Region,
) -> Result<Vec<Gate<T>>> {
    if !kind.is_rotation() {
        return Err(Error::InvalidGate(format!("{} is not a rotation", kind.name())));
    }
    let c = controls.len();
    if angles.len() != 1 << c {
        return Err(Error::InvalidArgument(format!(
            "UCR with {c} controls needs {} angles, got {}",
            1 << c,
            angles.len()
        )));
    }
    if c == 0 {
        return Ok(vec![Gate::rotation(kind, target, wrap_angle(angles[0]), region)]);
    }
    let transformed = gray_transform(angles);
    let mut gates = Vec::with_capacity(2 << c);
    for (i, &theta) in transformed.iter().enumerate() {
        gates.push(Gate::rotation(kind, target, theta, region));
        gates.push(Gate::cnot(controls[gray_control_index(i, c)], target, region));
    }
    Ok(gates)
}
