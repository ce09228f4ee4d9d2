//! Independent reference implementations shared by the integration tests.
//! Nothing here calls the library's transforms or simulator.
#![allow(dead_code)]

use std::f64::consts::PI;

use faqpie::circuit::{Circuit, Gate, GateKind};
use faqpie::image_io::{Grid, ImagePlane};
use faqpie::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<C>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 8-bit-valued plane of side `2^n`.
pub fn random_plane(n: u32, seed: u64) -> ImagePlane<f64> {
    let mut r = rng(seed);
    let side = 1 << n;
    ImagePlane::new(Grid::from_fn(side, side, |_, _| r.gen_range(0..=255) as f64)).unwrap()
}

pub fn random_state(k: usize, seed: u64) -> Vec<C> {
    let mut r = rng(seed);
    (0..1 << k).map(|_| C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

pub fn normalize(v: &[C]) -> Vec<C> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

/// `F(x, y) = Σ_k Σ_l P(k, l) e^{-2πi(kx + ly)/N}` by direct summation.
pub fn direct_dft(plane: &ImagePlane<f64>) -> Vec<C> {
    let side = plane.side();
    let nf = side as f64;
    let mut out = vec![C::new(0.0, 0.0); side * side];
    for x in 0..side {
        for y in 0..side {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..side {
                for l in 0..side {
                    let ph = -2.0 * PI * ((k * x + l * y) % side) as f64 / nf;
                    acc += C::from_polar(plane.get(k, l), ph);
                }
            }
            out[x * side + y] = acc;
        }
    }
    out
}

/// Retained signed frequencies per axis.
pub fn retained_freqs(m: u32, centered: bool) -> Vec<i64> {
    let half = 1i64 << m;
    if centered {
        (-half..half).collect()
    } else {
        (0..half).collect()
    }
}

/// `(1/N²) Σ_{x,y} F(x mod N, y mod N) e^{+2πi(kx + ly)/N}` over retained frequencies.
pub fn direct_reconstruct(f: &[C], n: u32, m: u32, centered: bool) -> Vec<C> {
    let side = 1usize << n;
    let nf = side as f64;
    let freqs = retained_freqs(m, centered);
    let wrap = |v: i64| v.rem_euclid(side as i64) as usize;
    let mut out = vec![C::new(0.0, 0.0); side * side];
    for k in 0..side {
        for l in 0..side {
            let mut acc = C::new(0.0, 0.0);
            for &x in &freqs {
                for &y in &freqs {
                    let ph = 2.0 * PI * (k as i64 * x + l as i64 * y) as f64 / nf;
                    acc += f[wrap(x) * side + wrap(y)] * C::from_polar(1.0, ph);
                }
            }
            out[k * side + l] = acc / (nf * nf);
        }
    }
    out
}

fn one_qubit_matrix(g: &Gate<f64>) -> [[C; 2]; 2] {
    let a = g.angle_or_zero();
    let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    match g.kind {
        GateKind::Ry => [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]],
        GateKind::Rz => [[C::from_polar(1.0, -a / 2.0), z], [z, C::from_polar(1.0, a / 2.0)]],
        GateKind::X | GateKind::Cnot => [[z, one], [one, z]],
        GateKind::H => {
            let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::Cphase => [[one, z], [z, C::from_polar(1.0, a)]],
        GateKind::Swap => unreachable!(),
    }
}

/// Full `2^w x 2^w` matrix of one gate, qubit 0 most significant.
#[allow(clippy::needless_range_loop)]
pub fn gate_matrix(g: &Gate<f64>, width: usize) -> Mat {
    let dim = 1 << width;
    let bit = |q: usize| 1usize << (width - 1 - q);
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        if g.kind == GateKind::Swap {
            let (a, b) = (g.target, g.control.unwrap());
            let (ba, bb) = (col & bit(a) != 0, col & bit(b) != 0);
            let mut row = col & !bit(a) & !bit(b);
            if ba {
                row |= bit(b);
            }
            if bb {
                row |= bit(a);
            }
            m[row][col] = C::new(1.0, 0.0);
            continue;
        }
        if let Some(c) = g.control {
            if col & bit(c) == 0 {
                m[col][col] = C::new(1.0, 0.0);
                continue;
            }
        }
        let u = one_qubit_matrix(g);
        let t = bit(g.target);
        let b_in = usize::from(col & t != 0);
        for b_out in 0..2 {
            let row = if b_out == 1 { col | t } else { col & !t };
            m[row][col] += u[b_out][b_in];
        }
    }
    m
}

pub fn identity(dim: usize) -> Mat {
    (0..dim).map(|i| (0..dim).map(|j| C::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![C::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &Mat, v: &[C]) -> Vec<C> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Product of all gate matrices, first gate rightmost.
pub fn circuit_unitary(c: &Circuit<f64>) -> Mat {
    c.gates().iter().fold(identity(1 << c.width()), |acc, g| matmul(&gate_matrix(g, c.width()), &acc))
}

/// State after applying each gate's dense matrix to `|0…0⟩`.
pub fn dense_run(c: &Circuit<f64>) -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); 1 << c.width()];
    v[0] = C::new(1.0, 0.0);
    for g in c.gates() {
        v = mat_vec(&gate_matrix(g, c.width()), &v);
    }
    v
}

/// `|x⟩ → Σ_k e^{+2πi xk/N} |k⟩ / √N`.
pub fn qft_matrix(n: usize) -> Mat {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|k| (0..dim).map(|x| C::from_polar(s, 2.0 * PI * ((x * k) % dim) as f64 / dim as f64)).collect())
        .collect()
}

/// Block-diagonal multiplexed rotation: the last qubit is the target and
/// control value `j` selects `R(angles[j])`.
pub fn multiplexed_matrix(kind: GateKind, angles: &[f64]) -> Mat {
    let dim = 2 * angles.len();
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    for (j, &a) in angles.iter().enumerate() {
        let u = one_qubit_matrix(&Gate::rotation(kind, 0, a, faqpie::circuit::Region::Ucr));
        for r in 0..2 {
            for c in 0..2 {
                m[2 * j + r][2 * j + c] = u[r][c];
            }
        }
    }
    m
}

/// Largest `|a - e^{iφ} b|` over entries, with `φ` fitted at the largest entry of `b`.
pub fn max_dev_up_to_phase(a: &[C], b: &[C]) -> f64 {
    let pivot = (0..b.len()).max_by(|&i, &j| b[i].norm().total_cmp(&b[j].norm())).unwrap();
    let phase = if b[pivot].norm() > 0.0 { a[pivot] / b[pivot] } else { C::new(1.0, 0.0) };
    let phase = phase / phase.norm();
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

pub fn flatten(m: &Mat) -> Vec<C> {
    m.iter().flatten().copied().collect()
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random circuit over every gate kind.
pub fn random_circuit(width: usize, len: usize, seed: u64) -> Circuit<f64> {
    use faqpie::circuit::Region;
    let mut r = rng(seed);
    let mut c = Circuit::new(width);
    for _ in 0..len {
        let t = r.gen_range(0..width);
        let mut o = r.gen_range(0..width - 1);
        if o >= t {
            o += 1;
        }
        let a = r.gen_range(-PI..PI);
        let g = match r.gen_range(0..7) {
            0 => Gate::ry(t, a, Region::Ucr),
            1 => Gate::rz(t, a, Region::Ucr),
            2 => Gate::cnot(o, t, Region::Ucr),
            3 => Gate::x(t, Region::Fanout),
            4 => Gate::h(t, Region::Iqft),
            5 => Gate::cphase(o, t, a, Region::Iqft),
            _ => Gate::swap(o, t, Region::Iqft),
        };
        c.push(g).unwrap();
    }
    c
}
