//! Dense statevector simulation.
//!
//! Gate matrices (basis order `|0⟩, |1⟩`; two-qubit gates `|control, target⟩`):
//!
//! | gate         | matrix                                       |
//! |--------------|----------------------------------------------|
//! | `RY(θ)`      | `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`  |
//! | `RZ(θ)`      | `diag(e^{-iθ/2}, e^{iθ/2})`                  |
//! | `X`          | `[[0, 1], [1, 0]]`                           |
//! | `H`          | `[[1, 1], [1, -1]] / √2`                     |
//! | `CNOT`       | flips target when control is 1               |
//! | `CPHASE(θ)`  | `diag(1, 1, 1, e^{iθ})`                      |
//! | `SWAP`       | exchanges the two qubits                     |

use num_complex::Complex;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateKind, Region};
use crate::error::{Error, Result};
use crate::fsl::{build_iqft, FslLayout};
use crate::image_io::Grid;
use crate::scalar::Real;
use crate::spectrum::{inverse_fft_2d, overlap_fidelity, Fidelity};

/// Largest width `run` accepts (2^24 amplitudes).
pub const MAX_WIDTH: usize = 24;

const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector<T> {
    width: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Statevector<T> {
    /// `|0…0⟩` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self> {
        guard(width)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << width];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self { width, amplitudes })
    }

    /// Wraps amplitudes as given; no normalization is applied.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes is not a power of two",
                amplitudes.len()
            )));
        }
        let width = amplitudes.len().trailing_zeros() as usize;
        guard(width)?;
        Ok(Self { width, amplitudes })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        crate::spectrum::l2_norm(&self.amplitudes)
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.width - 1 - qubit)
    }

    fn apply_1q(&mut self, qubit: usize, m: [[Complex<T>; 2]; 2]) {
        let mask = self.mask(qubit);
        let kernel = |chunk: &mut [Complex<T>]| {
            let (lo, hi) = chunk.split_at_mut(mask);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        };
        if self.amplitudes.len() >= PAR_THRESHOLD {
            self.amplitudes.par_chunks_mut(2 * mask).for_each(kernel);
        } else {
            self.amplitudes.chunks_mut(2 * mask).for_each(kernel);
        }
    }

    fn apply_diag_1q(&mut self, qubit: usize, d0: Complex<T>, d1: Complex<T>) {
        let mask = self.mask(qubit);
        let f = |(i, a): (usize, &mut Complex<T>)| {
            *a = *a * if i & mask == 0 { d0 } else { d1 };
        };
        if self.amplitudes.len() >= PAR_THRESHOLD {
            self.amplitudes.par_iter_mut().enumerate().for_each(f);
        } else {
            self.amplitudes.iter_mut().enumerate().for_each(f);
        }
    }

    fn swap_pairs(&mut self, select: impl Fn(usize) -> Option<usize>) {
        for i in 0..self.amplitudes.len() {
            if let Some(j) = select(i) {
                self.amplitudes.swap(i, j);
            }
        }
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        let in_range = |q: usize| q < self.width;
        if !in_range(gate.target) || gate.control.is_some_and(|c| !in_range(c)) {
            return Err(Error::InvalidGate(format!("{gate} exceeds width {}", self.width)));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let half = T::of(0.5);
        let t = gate.target;
        match gate.kind {
            GateKind::Ry => {
                let (s, c) = (gate.angle_or_zero() * half).sin_cos();
                let (s, c) = (Complex::new(s, T::zero()), Complex::new(c, T::zero()));
                self.apply_1q(t, [[c, -s], [s, c]]);
            }
            GateKind::Rz => {
                let h = gate.angle_or_zero() * half;
                self.apply_diag_1q(t, Complex::from_polar(T::one(), -h), Complex::from_polar(T::one(), h));
            }
            GateKind::H => {
                let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                self.apply_1q(t, [[r, r], [r, -r]]);
            }
            GateKind::X => {
                let one = Complex::new(T::one(), T::zero());
                self.apply_1q(t, [[zero, one], [one, zero]]);
            }
            GateKind::Cnot => {
                let (cm, tm) = (self.mask(gate.control.expect("validated")), self.mask(t));
                self.swap_pairs(|i| (i & cm != 0 && i & tm == 0).then_some(i | tm));
            }
            GateKind::Swap => {
                let (am, bm) = (self.mask(t), self.mask(gate.control.expect("validated")));
                self.swap_pairs(|i| (i & am != 0 && i & bm == 0).then_some(i ^ am ^ bm));
            }
            GateKind::Cphase => {
                let both = self.mask(t) | self.mask(gate.control.expect("validated"));
                let phase = Complex::from_polar(T::one(), gate.angle_or_zero());
                self.amplitudes
                    .iter_mut()
                    .enumerate()
                    .filter(|(i, _)| i & both == both)
                    .for_each(|(_, a)| *a = *a * phase);
            }
        }
        Ok(())
    }
}

fn guard(width: usize) -> Result<()> {
    if width > MAX_WIDTH {
        return Err(Error::WidthGuard { width, limit: MAX_WIDTH });
    }
    Ok(())
}

/// Runs `c` gate by gate from `initial` (default `|0…0⟩`).
pub fn run<T: Real>(c: &Circuit<T>, initial: Option<Statevector<T>>) -> Result<Statevector<T>> {
    guard(c.width())?;
    let mut sv = match initial {
        Some(sv) if sv.width != c.width() => {
            return Err(Error::DimensionMismatch(format!(
                "circuit width {} vs state width {}",
                c.width(),
                sv.width
            )))
        }
        Some(sv) => sv,
        None => Statevector::zero(c.width())?,
    };
    for g in c.gates() {
        sv.apply(g)?;
    }
    Ok(sv)
}

/// Fast simulation of an FSL circuit: UCR region on the loaded subspace,
/// fan-out as an index map, QFTs as FFTs.
pub fn run_fsl_fast<T: Real>(c: &Circuit<T>, layout: &FslLayout) -> Result<Statevector<T>> {
    let width = layout.width();
    if c.width() != width {
        return Err(Error::DimensionMismatch(format!(
            "circuit width {} vs layout width {width}",
            c.width()
        )));
    }
    guard(width)?;
    let gates = c.gates();
    let ucr_end = gates.iter().position(|g| g.region != Region::Ucr).unwrap_or(gates.len());
    let fan_end = ucr_end
        + gates[ucr_end..].iter().position(|g| g.region != Region::Fanout).unwrap_or(gates.len() - ucr_end);
    let (ucr, rest) = gates.split_at(ucr_end);
    let (fanout, iqft) = rest.split_at(fan_end - ucr_end);

    let loaded = layout.loaded();
    let mut local_of = vec![None; width];
    for (i, &q) in loaded.iter().enumerate() {
        local_of[q] = Some(i);
    }
    let to_local = |q: usize| {
        local_of[q].ok_or_else(|| Error::Structure(format!("ucr gate touches unloaded qubit {q}")))
    };
    let mut sub = Statevector::zero(loaded.len())?;
    for g in ucr {
        let mut local = *g;
        local.target = to_local(g.target)?;
        local.control = g.control.map(to_local).transpose()?;
        sub.apply(&local)?;
    }

    if let Some(g) = fanout.iter().find(|g| g.kind != GateKind::Cnot) {
        return Err(Error::Structure(format!("non-CNOT fan-out gate {g}")));
    }
    let expected_iqft: Vec<Gate<T>> =
        [build_iqft(&layout.register(0))?, build_iqft(&layout.register(1))?].concat();
    if iqft != expected_iqft.as_slice() {
        return Err(Error::Structure("iqft region is not the standard per-register QFT".into()));
    }

    let bit = |q: usize| 1usize << (width - 1 - q);
    let k = loaded.len();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << width];
    for (local, &a) in sub.amplitudes.iter().enumerate() {
        let mut idx = 0;
        for (i, &q) in loaded.iter().enumerate() {
            if local >> (k - 1 - i) & 1 == 1 {
                idx |= bit(q);
            }
        }
        for g in fanout {
            if idx & bit(g.control.expect("validated")) != 0 {
                idx ^= bit(g.target);
            }
        }
        amps[idx] = a;
    }

    let n = layout.n();
    inverse_fft_2d(n, &mut amps);
    let scale = T::one() / T::of_usize(1 << n);
    amps.iter_mut().for_each(|z| *z = *z * scale);
    Ok(Statevector { width, amplitudes: amps })
}

/// Pixel `(k, l) = |amplitude(k·2^n + l)| · norm`.
pub fn extract_image<T: Real>(sv: &Statevector<T>, norm: T, n: u32) -> Result<Grid<T>> {
    if sv.width != 2 * n as usize {
        return Err(Error::DimensionMismatch(format!(
            "state width {} vs image n = {n}",
            sv.width
        )));
    }
    let side = 1usize << n;
    Grid::from_vec(side, side, sv.amplitudes.iter().map(|a| a.norm() * norm).collect())
}

/// `|⟨a|b⟩|²` of the normalized states.
pub fn state_fidelity<T: Real>(a: &Statevector<T>, b: &Statevector<T>) -> Result<Fidelity<T>> {
    if a.width != b.width {
        return Err(Error::DimensionMismatch(format!("widths {} and {}", a.width, b.width)));
    }
    overlap_fidelity(&a.amplitudes, &b.amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_keeps_state() {
        let init = Statevector::from_amplitudes(vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]).unwrap();
        let out = run(&Circuit::<f64>::new(1), Some(init.clone())).unwrap();
        assert_eq!(out, init);
    }

    #[test]
    fn x_flips() {
        let mut c = Circuit::<f64>::new(1);
        c.push(Gate::x(0, Region::Ucr)).unwrap();
        let sv = run(&c, None).unwrap();
        assert_eq!(sv.amplitudes()[1], Complex::new(1.0, 0.0));
        assert_eq!(sv.amplitudes()[0], Complex::new(0.0, 0.0));
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let mut c = Circuit::<f64>::new(3);
        c.push(Gate::x(0, Region::Ucr)).unwrap();
        let sv = run(&c, None).unwrap();
        assert_eq!(sv.amplitudes()[4].re, 1.0);
    }

    #[test]
    fn width_guards() {
        assert!(matches!(Statevector::<f64>::zero(25), Err(Error::WidthGuard { .. })));
        let c = Circuit::<f64>::new(2);
        let sv = Statevector::zero(3).unwrap();
        assert!(matches!(run(&c, Some(sv)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn fidelity_of_basis_states() {
        let a = Statevector::<f64>::zero(2).unwrap();
        let mut c = Circuit::new(2);
        c.push(Gate::x(1, Region::Ucr)).unwrap();
        let b = run(&c, None).unwrap();
        assert_eq!(state_fidelity(&a, &a).unwrap().value(), 1.0);
        assert_eq!(state_fidelity(&a, &b).unwrap().value(), 0.0);
        let wide = Statevector::<f64>::zero(3).unwrap();
        assert!(state_fidelity(&a, &wide).is_err());
    }

    #[test]
    fn uniform_state_extracts_constant_plane() {
        let n = 2;
        let amps = vec![Complex::new(0.25, 0.0); 16];
        let sv = Statevector::from_amplitudes(amps).unwrap();
        let c = 3.0f64;
        let img = extract_image(&sv, 4.0 * c, n).unwrap();
        assert!(img.data().iter().all(|&v| (v - c).abs() < 1e-15));
    }
}
