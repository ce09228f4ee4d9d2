//! 2D DFT, low-frequency truncation and classical reconstruction.
//!
//! Conventions: the forward transform is unnormalized with kernel
//! `exp(-i2π(kx+ly)/2^n)`; reconstruction uses `exp(+i2π(kx+ly)/2^n)` and
//! divides by `4^n`. Fidelities are computed on L2-normalized vectors so the
//! scaling cancels.

use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::image_io::ImagePlane;
use crate::scalar::Real;

/// Which frequencies a truncated block keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TruncationMode {
    /// `x, y ∈ {-2^m, …, 2^m - 1}`; drives the FSL circuit.
    #[default]
    Centered,
    /// `x, y ∈ {0, …, 2^m - 1}`; classical-only.
    NonNegative,
}

impl std::str::FromStr for TruncationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centered" => Ok(Self::Centered),
            "nonneg" => Ok(Self::NonNegative),
            other => Err(Error::InvalidArgument(format!("unknown truncation mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for TruncationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Centered => "centered",
            Self::NonNegative => "nonneg",
        })
    }
}

/// Square complex grid of side `2^n`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane<T> {
    n: u32,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexPlane<T> {
    pub fn new(n: u32, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != 1usize << (2 * n) {
            return Err(Error::DimensionMismatch(format!(
                "complex plane of n = {n} needs {} values, got {}",
                1usize << (2 * n),
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[(row << self.n) + col]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.data)
    }

    /// Copy scaled to unit L2 norm.
    pub fn normalized(&self) -> Result<Vec<Complex<T>>> {
        let norm = self.norm();
        if norm == T::zero() {
            return Err(Error::ZeroNorm("grid"));
        }
        Ok(self.data.iter().map(|&z| z / norm).collect())
    }
}

pub(crate) fn l2_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Full DFT `C_xy` of a `2^n x 2^n` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    n: u32,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn from_coeffs(n: u32, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let plane = ComplexPlane::new(n, coeffs)?;
        Ok(Self { n, coeffs: plane.data })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, x: usize, y: usize) -> Complex<T> {
        self.coeffs[(x << self.n) + y]
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.coeffs)
    }
}

fn fft_2d<T: Real>(n: u32, data: &mut [Complex<T>], direction: FftDirection) {
    let side = 1usize << n;
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft(side, direction);
    fft.process(data);
    let mut column = vec![Complex::new(T::zero(), T::zero()); side];
    for c in 0..side {
        for r in 0..side {
            column[r] = data[r * side + c];
        }
        fft.process(&mut column);
        for r in 0..side {
            data[r * side + c] = column[r];
        }
    }
}

/// Unnormalized inverse 2D DFT (kernel `e^{+i...}`), in place.
pub(crate) fn inverse_fft_2d<T: Real>(n: u32, data: &mut [Complex<T>]) {
    fft_2d(n, data, FftDirection::Inverse);
}

pub fn forward_dft<T: Real>(plane: &ImagePlane<T>) -> Spectrum<T> {
    let n = plane.n();
    let mut coeffs: Vec<Complex<T>> =
        plane.grid().data().iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft_2d(n, &mut coeffs, FftDirection::Forward);
    Spectrum { n, coeffs }
}

/// Inverts the full spectrum; reproduces the source plane.
pub fn inverse_dft<T: Real>(spec: &Spectrum<T>) -> ComplexPlane<T> {
    let mut data = spec.coeffs.clone();
    inverse_fft_2d(spec.n, &mut data);
    let scale = T::one() / T::of_usize(data.len());
    data.iter_mut().for_each(|z| *z = *z * scale);
    ComplexPlane { n: spec.n, data }
}

/// Retained low-frequency coefficients.
///
/// Block entry `(i, j)` holds frequency `(block_frequency(i), block_frequency(j))`.
/// In centered mode a block index is the `(m+1)`-bit two's complement of its
/// frequency, which is exactly the basis ordering the UCR cascade loads.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBlock<T> {
    n: u32,
    m: u32,
    mode: TruncationMode,
    coeffs: Vec<Complex<T>>,
    block_norm: T,
}

impl<T: Real> SpectrumBlock<T> {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn mode(&self) -> TruncationMode {
        self.mode
    }

    /// Side of the retained block.
    pub fn side(&self) -> usize {
        block_side(self.m, self.mode)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.coeffs[i * self.side() + j]
    }

    pub fn block_norm(&self) -> T {
        self.block_norm
    }

    /// Signed frequency stored at block index `i`.
    pub fn frequency(&self, i: usize) -> i64 {
        block_frequency(i, self.m, self.mode)
    }

    /// `‖P_m‖_F` of the reconstructed grid, via Parseval.
    pub fn reconstruction_norm(&self) -> T {
        self.block_norm / T::of_usize(1usize << self.n)
    }
}

fn block_side(m: u32, mode: TruncationMode) -> usize {
    match mode {
        TruncationMode::Centered => 1 << (m + 1),
        TruncationMode::NonNegative => 1 << m,
    }
}

fn block_frequency(i: usize, m: u32, mode: TruncationMode) -> i64 {
    let half = 1i64 << m;
    match mode {
        TruncationMode::Centered if i as i64 >= half => i as i64 - 2 * half,
        _ => i as i64,
    }
}

/// Source index of a signed frequency in a `2^n` axis.
pub fn source_index(freq: i64, n: u32) -> usize {
    freq.rem_euclid(1i64 << n) as usize
}

pub fn check_order(n: u32, m: u32) -> Result<()> {
    if n < 2 || m > n - 2 {
        return Err(Error::TruncationOrder { m, n });
    }
    Ok(())
}

pub fn truncate_spectrum<T: Real>(
    spec: &Spectrum<T>,
    m: u32,
    mode: TruncationMode,
) -> Result<SpectrumBlock<T>> {
    check_order(spec.n, m)?;
    let side = block_side(m, mode);
    let axis: Vec<usize> =
        (0..side).map(|i| source_index(block_frequency(i, m, mode), spec.n)).collect();
    let mut coeffs = Vec::with_capacity(side * side);
    for &x in &axis {
        for &y in &axis {
            coeffs.push(spec.get(x, y));
        }
    }
    let block_norm = l2_norm(&coeffs);
    Ok(SpectrumBlock { n: spec.n, m, mode, coeffs, block_norm })
}

/// The unnormalized truncated image `(P_m)_kl`, scaled by `1/4^n`.
pub fn classical_reconstruct<T: Real>(block: &SpectrumBlock<T>) -> ComplexPlane<T> {
    let n = block.n;
    let side = block.side();
    let mut data = vec![Complex::new(T::zero(), T::zero()); 1 << (2 * n)];
    for i in 0..side {
        let x = source_index(block.frequency(i), n);
        for j in 0..side {
            let y = source_index(block.frequency(j), n);
            data[(x << n) + y] = block.get(i, j);
        }
    }
    inverse_fft_2d(n, &mut data);
    let scale = T::one() / T::of_usize(data.len());
    data.iter_mut().for_each(|z| *z = *z * scale);
    ComplexPlane { n, data }
}

/// A fidelity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fidelity<T>(T);

impl<T: Real> Fidelity<T> {
    pub fn new(value: T) -> Result<Self> {
        let slack = T::of(1e-9);
        if !(value >= -slack && value <= T::one() + slack) {
            return Err(Error::InvalidArgument(format!("fidelity {value} outside [0, 1]")));
        }
        Ok(Self(value))
    }

    pub fn one() -> Self {
        Self(T::one())
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// `|<a|b>|^2` of two vectors after L2 normalization.
pub(crate) fn overlap_fidelity<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Fidelity<T>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("lengths {} and {}", a.len(), b.len())));
    }
    let (na, nb) = (l2_norm(a), l2_norm(b));
    if na == T::zero() || nb == T::zero() {
        return Err(Error::ZeroNorm("state"));
    }
    let inner = a
        .iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y);
    Fidelity::new(inner.norm_sqr() / (na * na * nb * nb))
}

/// `|<P_m|P>|^2` computed as a pixel-domain inner product.
pub fn fidelity<T: Real>(block: &SpectrumBlock<T>, spec: &Spectrum<T>) -> Result<Fidelity<T>> {
    if block.n != spec.n {
        return Err(Error::DimensionMismatch(format!(
            "block n = {} vs spectrum n = {}",
            block.n, spec.n
        )));
    }
    let approx = classical_reconstruct(block);
    let exact = inverse_dft(spec);
    overlap_fidelity(approx.data(), exact.data())
}

/// Retained spectral energy over total spectral energy.
pub fn retained_energy_ratio<T: Real>(block: &SpectrumBlock<T>, spec: &Spectrum<T>) -> Result<T> {
    let total = spec.norm();
    if total == T::zero() {
        return Err(Error::ZeroNorm("spectrum"));
    }
    Ok((block.block_norm / total).powi(2))
}

/// Arithmetic mean over blocks (divides by the number of blocks).
pub fn averaged_fidelity<T: Real>(per_block: &[Fidelity<T>]) -> Result<Fidelity<T>> {
    if per_block.is_empty() {
        return Err(Error::Empty("fidelity list"));
    }
    let sum = per_block.iter().fold(T::zero(), |acc, f| acc + f.0);
    Fidelity::new(sum / T::of_usize(per_block.len()))
}

/// `a_j = ‖P_{m,j}‖ / ‖P_m‖`.
pub fn block_weight<T: Real>(block_norm: T, total_norm: T) -> Result<T> {
    if total_norm.is_nan() || total_norm <= T::zero() {
        return Err(Error::ZeroNorm("total"));
    }
    Ok(block_norm / total_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image_io::Grid;

    fn plane(n: u32, f: impl FnMut(usize, usize) -> f64) -> ImagePlane<f64> {
        ImagePlane::signed(Grid::from_fn(1 << n, 1 << n, f)).unwrap()
    }

    #[test]
    fn constant_plane_is_dc_only() {
        let spec = forward_dft(&plane(2, |_, _| 3.0));
        assert!((spec.get(0, 0).re - 48.0).abs() < 1e-12);
        for (i, z) in spec.coeffs().iter().enumerate().skip(1) {
            assert!(z.norm() < 1e-12, "coefficient {i} = {z}");
        }
    }

    #[test]
    fn single_tone() {
        let n = 3;
        let spec = forward_dft(&plane(n, |k, _| (2.0 * std::f64::consts::PI * k as f64 / 8.0).cos()));
        for x in 0..8 {
            for y in 0..8 {
                let expect = if y == 0 && (x == 1 || x == 7) { 32.0 } else { 0.0 };
                assert!((spec.get(x, y).re - expect).abs() < 1e-10);
                assert!(spec.get(x, y).im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn centered_axis_indices() {
        let spec = forward_dft(&plane(3, |k, l| (k * 8 + l) as f64));
        let block = truncate_spectrum(&spec, 1, TruncationMode::Centered).unwrap();
        let freqs: Vec<i64> = (0..4).map(|i| block.frequency(i)).collect();
        assert_eq!(freqs, [0, 1, -2, -1]);
        let sources: Vec<usize> = freqs.iter().map(|&f| source_index(f, 3)).collect();
        assert_eq!(sources, [0, 1, 6, 7]);
        assert_eq!(block.get(2, 3), spec.get(6, 7));
    }

    #[test]
    fn dc_block_in_both_modes() {
        let spec = forward_dft(&plane(4, |_, _| 2.0));
        for mode in [TruncationMode::Centered, TruncationMode::NonNegative] {
            for m in 0..=2 {
                let block = truncate_spectrum(&spec, m, mode).unwrap();
                assert!((block.block_norm() - spec.get(0, 0).norm()).abs() < 1e-9);
                assert!((fidelity(&block, &spec).unwrap().value() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dc_reconstructs_constant() {
        let spec = forward_dft(&plane(2, |_, _| 5.0));
        let rec = classical_reconstruct(&truncate_spectrum(&spec, 0, TruncationMode::Centered).unwrap());
        assert!(rec.data().iter().all(|z| (z.re - 5.0).abs() < 1e-12 && z.im.abs() < 1e-12));
    }

    #[test]
    fn order_above_n_minus_2_rejected() {
        let spec = forward_dft(&plane(3, |_, _| 1.0));
        let err = truncate_spectrum(&spec, 2, TruncationMode::Centered).unwrap_err();
        assert!(err.to_string().contains("m exceeds n-2"));
    }

    #[test]
    fn averaged_fidelity_examples() {
        let f = |v: f64| Fidelity::new(v).unwrap();
        assert_eq!(averaged_fidelity(&[f(1.0); 4]).unwrap().value(), 1.0);
        assert_eq!(averaged_fidelity(&[f(0.42)]).unwrap().value(), 0.42);
        let avg = averaged_fidelity(&[f(0.9), f(0.8), f(1.0), f(0.7)]).unwrap().value();
        assert!((avg - 0.85).abs() < 1e-15);
        assert!(matches!(averaged_fidelity::<f64>(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn block_weight_examples() {
        let norms = [3.0f64; 4];
        let total = norms.iter().map(|v| v * v).sum::<f64>().sqrt();
        for &b in &norms {
            assert!((block_weight(b, total).unwrap() - 0.5).abs() < 1e-15);
        }
        assert_eq!(block_weight(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(block_weight(0.0, 2.0).unwrap(), 0.0);
        assert!(block_weight(1.0, 0.0f64).is_err());
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = forward_dft(&plane(3, |_, _| 1.0));
        let b = forward_dft(&plane(4, |_, _| 1.0));
        let block = truncate_spectrum(&a, 1, TruncationMode::Centered).unwrap();
        assert!(matches!(fidelity(&block, &b), Err(Error::DimensionMismatch(_))));
    }
}
