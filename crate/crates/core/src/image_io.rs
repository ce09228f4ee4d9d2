//! Raster loading, zero padding, channel splitting and reassembly.
//!
//! Binary PPM (`P6`, maxval 255) is the bit-exact interchange format. PNG is
//! accepted for 8-bit RGB and grayscale files and decodes to the same bytes.

use std::fs;
use std::io::{BufWriter, Cursor, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on decoded payload size (1 GiB).
const MAX_PAYLOAD: usize = 1 << 30;

/// 8-bit RGB image, row-major triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        let expected = checked_payload(width, height)?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} RGB image needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

fn checked_payload(width: usize, height: usize) -> Result<usize> {
    width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .filter(|&b| b <= MAX_PAYLOAD)
        .ok_or(Error::DimensionOverflow { width, height })
}

/// Dense row-major real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "grid {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.data[row * self.cols + col] = v;
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
    }
}

/// Square `2^n x 2^n` plane together with its Frobenius norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane<T> {
    n: u32,
    grid: Grid<T>,
    frobenius_norm: T,
}

impl<T: Real> ImagePlane<T> {
    /// Wraps a square power-of-two grid of nonnegative pixels.
    pub fn new(grid: Grid<T>) -> Result<Self> {
        if let Some(v) = grid.data.iter().find(|v| v.is_nan() || **v < T::zero()) {
            return Err(Error::InvalidArgument(format!("pixel value {v} is negative or NaN")));
        }
        Self::signed(grid)
    }

    /// Like [`ImagePlane::new`] but accepts arbitrary real values.
    pub fn signed(grid: Grid<T>) -> Result<Self> {
        let side = grid.rows;
        if grid.cols != side || !side.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "plane must be square with power-of-two side, got {}x{}",
                grid.rows, grid.cols
            )));
        }
        let n = side.trailing_zeros();
        let frobenius_norm = grid.frobenius_norm();
        Ok(Self { n, grid, frobenius_norm })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn side(&self) -> usize {
        self.grid.rows
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.grid.get(row, col)
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm
    }
}

/// Where the original content sits inside a padded plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadRecord {
    pub original_width: usize,
    pub original_height: usize,
    pub offset_row: usize,
    pub offset_col: usize,
}

impl PadRecord {
    /// Record for an image that needed no padding.
    pub fn identity(width: usize, height: usize) -> Self {
        Self { original_width: width, original_height: height, offset_row: 0, offset_col: 0 }
    }
}

/// Smallest `n` with `2^n >= max(rows, cols)`.
pub fn required_log_side(rows: usize, cols: usize) -> u32 {
    rows.max(cols).max(1).next_power_of_two().trailing_zeros()
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Decodes PPM or PNG bytes, detected by magic number.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!("netpbm variant P{}", bytes[1] as char)))
    } else {
        Err(Error::UnsupportedFormat("unrecognized magic number".into()))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Malformed("truncated PPM header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Malformed("expected integer in PPM header".into()));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| Error::Malformed(format!("header value {text} out of range")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("PPM maxval {maxval} (only 255 supported)")));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Malformed("missing whitespace after PPM maxval".into())),
    }
    let expected = checked_payload(width, height)?;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::ShortRead { expected, got: payload.len() });
    }
    RgbImage::new(width, height, payload[..expected].to_vec())
}

fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let malformed = |e: png::DecodingError| Error::Malformed(format!("png: {e}"));
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(malformed)?;
    let size = reader
        .output_buffer_size()
        .ok_or(Error::Malformed("png: output buffer size overflow".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(malformed)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!("png bit depth {:?}", info.bit_depth)));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let mut data = Vec::with_capacity(checked_payload(width, height)?);
    for row in buf.chunks(info.line_size).take(height) {
        match info.color_type {
            png::ColorType::Rgb => data.extend_from_slice(&row[..3 * width]),
            png::ColorType::Grayscale => {
                for &g in &row[..width] {
                    data.extend_from_slice(&[g, g, g]);
                }
            }
            other => return Err(Error::UnsupportedFormat(format!("png color type {other:?}"))),
        }
    }
    RgbImage::new(width, height, data)
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let encode_err = |e: png::EncodingError| Error::Malformed(format!("png encode: {e}"));
        let mut writer = enc.write_header().map_err(encode_err)?;
        writer.write_image_data(&img.data).map_err(encode_err)?;
    }
    Ok(out)
}

/// Writes PNG when the extension is `.png`, PPM otherwise.
pub fn save_image(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png { encode_png(img)? } else { encode_ppm(img) };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Splits an RGB image into three real grids of `height x width`.
pub fn to_planes<T: Real>(img: &RgbImage) -> [Grid<T>; 3] {
    std::array::from_fn(|c| {
        Grid::from_fn(img.height, img.width, |r, col| {
            T::of(img.data[3 * (r * img.width + col) + c] as f64)
        })
    })
}

/// Embeds `plane` top-left into a zero `2^n x 2^n` plane.
pub fn zero_pad<T: Real>(plane: &Grid<T>, n: u32) -> Result<(ImagePlane<T>, PadRecord)> {
    let side = 1usize
        .checked_shl(n)
        .filter(|_| n < usize::BITS / 2)
        .ok_or(Error::InvalidArgument(format!("log side {n} too large")))?;
    if plane.rows > side || plane.cols > side {
        return Err(Error::PlaneTooLarge { rows: plane.rows, cols: plane.cols, side });
    }
    let mut grid = Grid::zeros(side, side);
    for r in 0..plane.rows {
        let src = &plane.data[r * plane.cols..(r + 1) * plane.cols];
        grid.data[r * side..r * side + plane.cols].copy_from_slice(src);
    }
    let rec = PadRecord {
        original_width: plane.cols,
        original_height: plane.rows,
        offset_row: 0,
        offset_col: 0,
    };
    Ok((ImagePlane::new(grid)?, rec))
}

/// Clamp to `[0, 255]` then round half-up.
pub fn quantize<T: Real>(v: T) -> u8 {
    let v = v.to_f64_lossy();
    if v.is_nan() {
        return 0;
    }
    (v.clamp(0.0, 255.0) + 0.5).floor() as u8
}

/// Inverse of padding plus channel split.
pub fn crop_and_merge<T: Real>(planes: &[ImagePlane<T>; 3], rec: PadRecord) -> Result<RgbImage> {
    let side = planes[0].side();
    if planes.iter().any(|p| p.side() != side) {
        return Err(Error::DimensionMismatch("planes have different sizes".into()));
    }
    if rec.offset_row + rec.original_height > side || rec.offset_col + rec.original_width > side {
        return Err(Error::DimensionMismatch(format!(
            "pad record {rec:?} does not fit in {side}x{side}"
        )));
    }
    let (w, h) = (rec.original_width, rec.original_height);
    let mut data = Vec::with_capacity(checked_payload(w, h)?);
    for r in 0..h {
        for c in 0..w {
            for p in planes {
                data.push(quantize(p.get(r + rec.offset_row, c + rec.offset_col)));
            }
        }
    }
    RgbImage::new(w, h, data)
}
