//! Gate-list circuit representation with region tags.
//!
//! Reported gate counts follow the convention of counting only the
//! uniformly-controlled-rotation cascade ([`Region::Ucr`]); the sign fan-out
//! CNOTs and the inverse QFT are kept in the circuit but excluded.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Ry,
    Rz,
    Cnot,
    X,
    H,
    Cphase,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::X,
        GateKind::H,
        GateKind::Cphase,
        GateKind::Swap,
    ];

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Rz | GateKind::Cphase)
    }

    pub fn has_control(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::Cphase | GateKind::Swap)
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Rz)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Cphase => "CPHASE",
            GateKind::Swap => "SWAP",
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Ucr,
    Fanout,
    Iqft,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Ucr => "ucr",
            Region::Fanout => "fanout",
            Region::Iqft => "iqft",
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ucr" => Ok(Region::Ucr),
            "fanout" => Ok(Region::Fanout),
            "iqft" => Ok(Region::Iqft),
            other => Err(Error::InvalidGate(format!("unknown region {other:?}"))),
        }
    }
}

/// One gate. `control` doubles as the second qubit of a SWAP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate<T> {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<T>,
    pub region: Region,
}

impl<T: Real> Gate<T> {
    pub fn ry(target: usize, angle: T, region: Region) -> Self {
        Self { kind: GateKind::Ry, target, control: None, angle: Some(angle), region }
    }

    pub fn rz(target: usize, angle: T, region: Region) -> Self {
        Self { kind: GateKind::Rz, target, control: None, angle: Some(angle), region }
    }

    pub fn rotation(kind: GateKind, target: usize, angle: T, region: Region) -> Self {
        debug_assert!(kind.is_rotation());
        Self { kind, target, control: None, angle: Some(angle), region }
    }

    pub fn cnot(control: usize, target: usize, region: Region) -> Self {
        Self { kind: GateKind::Cnot, target, control: Some(control), angle: None, region }
    }

    pub fn x(target: usize, region: Region) -> Self {
        Self { kind: GateKind::X, target, control: None, angle: None, region }
    }

    pub fn h(target: usize, region: Region) -> Self {
        Self { kind: GateKind::H, target, control: None, angle: None, region }
    }

    pub fn cphase(control: usize, target: usize, angle: T, region: Region) -> Self {
        Self { kind: GateKind::Cphase, target, control: Some(control), angle: Some(angle), region }
    }

    pub fn swap(a: usize, b: usize, region: Region) -> Self {
        Self { kind: GateKind::Swap, target: a, control: Some(b), angle: None, region }
    }

    /// Angle, or zero for gates without one.
    pub fn angle_or_zero(&self) -> T {
        self.angle.unwrap_or_else(T::zero)
    }

    fn validate(&self, width: usize) -> Result<()> {
        if self.kind.has_angle() != self.angle.is_some() {
            return Err(Error::InvalidGate(format!("{} angle presence mismatch", self.kind.name())));
        }
        if self.kind.has_control() != self.control.is_some() {
            return Err(Error::InvalidGate(format!("{} control presence mismatch", self.kind.name())));
        }
        if self.target >= width {
            return Err(Error::InvalidGate(format!("target {} >= width {width}", self.target)));
        }
        if let Some(c) = self.control {
            if c >= width {
                return Err(Error::InvalidGate(format!("control {c} >= width {width}")));
            }
            if c == self.target {
                return Err(Error::InvalidGate(format!("control equals target {c}")));
            }
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Gate<T> {
    /// `KIND target [control] [angle] region`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.name(), self.target)?;
        if let Some(c) = self.control {
            write!(f, " {c}")?;
        }
        if let Some(a) = self.angle {
            write!(f, " {a:?}")?;
        }
        write!(f, " {}", self.region.name())
    }
}

/// Ordered gate list on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    width: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(width: usize) -> Self {
        Self { width, gates: Vec::new() }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Self { width, gates })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate<T>>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Replaces the gate list, keeping the width. Gates must already be valid
    /// for this width.
    pub(crate) fn with_gates(&self, gates: Vec<Gate<T>>) -> Self {
        debug_assert!(gates.iter().all(|g| g.validate(self.width).is_ok()));
        Self { width: self.width, gates }
    }

    #[cfg(test)]
    pub(crate) fn gates_mut(&mut self) -> &mut [Gate<T>] {
        &mut self.gates
    }

    /// Line-per-gate text dump.
    pub fn dump(&self) -> String {
        let mut out = format!("WIDTH {}\n", self.width);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`Circuit::dump`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty dump".into() })?;
        let width = header
            .strip_prefix("WIDTH ")
            .and_then(|w| w.trim().parse().ok())
            .ok_or(Error::Parse { line: 1, msg: "expected `WIDTH <n>`".into() })?;
        let mut circuit = Circuit::new(width);
        for (i, line) in lines {
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let kind: GateKind = tokens[0].parse().map_err(|e: Error| err(e.to_string()))?;
            let expected = 3 + kind.has_control() as usize + kind.has_angle() as usize;
            if tokens.len() != expected {
                return Err(err(format!("expected {expected} fields, got {}", tokens.len())));
            }
            let qubit = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad qubit {s:?}")));
            let target = qubit(tokens[1])?;
            let mut next = 2;
            let control = if kind.has_control() {
                next += 1;
                Some(qubit(tokens[2])?)
            } else {
                None
            };
            let angle = if kind.has_angle() {
                let s = tokens[next];
                next += 1;
                Some(s.parse::<T>().map_err(|_| err(format!("bad angle {s:?}")))?)
            } else {
                None
            };
            let region = tokens[next].parse().map_err(|e: Error| err(e.to_string()))?;
            circuit
                .push(Gate { kind, target, control, angle, region })
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(circuit)
    }
}

/// Gate tallies; `rotations_ucr`/`cnots_ucr` are the reported numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub rotations_ucr: usize,
    pub cnots_ucr: usize,
    pub total_by_kind: BTreeMap<GateKind, usize>,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.total_by_kind.values().sum()
    }
}

pub fn count_gates<T: Real>(c: &Circuit<T>) -> GateCounts {
    c.gates.iter().fold(GateCounts::default(), |mut acc, g| {
        *acc.total_by_kind.entry(g.kind).or_default() += 1;
        if g.region == Region::Ucr {
            match g.kind {
                k if k.is_rotation() => acc.rotations_ucr += 1,
                GateKind::Cnot => acc.cnots_ucr += 1,
                _ => {}
            }
        }
        acc
    })
}

/// A percentage kept raw and at two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percent {
    pub raw: f64,
    /// Round half-up to 2 decimals.
    pub rounded: f64,
    /// Truncated toward zero at 2 decimals.
    pub truncated: f64,
}

impl Percent {
    pub fn reduction(before: usize, after: usize) -> Result<Self> {
        if before == 0 {
            return Err(Error::InvalidArgument("zero baseline for reduction".into()));
        }
        // integer arithmetic in hundredths-of-percent keeps the decimals exact
        let diff = before as i128 - after as i128;
        let scaled = diff * 10_000;
        let b = before as i128;
        let truncated = scaled / b;
        let rounded = (2 * scaled + b).div_euclid(2 * b);
        Ok(Self {
            raw: 100.0 * diff as f64 / before as f64,
            rounded: rounded as f64 / 100.0,
            truncated: truncated as f64 / 100.0,
        })
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}%", self.rounded)
    }
}

/// `(rotation reduction, CNOT reduction)` relative to `before`.
pub fn reduction_percent(before: &GateCounts, after: &GateCounts) -> Result<(Percent, Percent)> {
    Ok((
        Percent::reduction(before.rotations_ucr, after.rotations_ucr)?,
        Percent::reduction(before.cnots_ucr, after.cnots_ucr)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(rot: usize, cnot: usize) -> GateCounts {
        GateCounts { rotations_ucr: rot, cnots_ucr: cnot, ..Default::default() }
    }

    #[test]
    fn empty_circuit_counts_zero() {
        let c = Circuit::<f64>::new(3);
        assert_eq!(count_gates(&c), GateCounts::default());
    }

    #[test]
    fn region_filter() {
        let mut c = Circuit::<f64>::new(3);
        for q in 0..3 {
            c.push(Gate::ry(q, 0.1, Region::Ucr)).unwrap();
        }
        c.push(Gate::cnot(0, 1, Region::Fanout)).unwrap();
        c.push(Gate::cnot(0, 2, Region::Fanout)).unwrap();
        let k = count_gates(&c);
        assert_eq!((k.rotations_ucr, k.cnots_ucr), (3, 0));
        assert_eq!(k.total_by_kind[&GateKind::Cnot], 2);
        assert_eq!(k.total(), 5);
    }

    #[test]
    fn invalid_gates_rejected() {
        let mut c = Circuit::<f64>::new(2);
        assert!(c.push(Gate::cnot(1, 1, Region::Ucr)).is_err());
        assert!(c.push(Gate::ry(2, 0.0, Region::Ucr)).is_err());
        let bad = Gate { kind: GateKind::H, target: 0, control: None, angle: Some(1.0), region: Region::Iqft };
        assert!(c.push(bad).is_err());
    }

    #[test]
    fn reduction_examples() {
        let p = Percent::reduction(32766, 8190).unwrap();
        assert_eq!(p.rounded, 75.0);
        assert_eq!(Percent::reduction(32764, 8188).unwrap().rounded, 75.01);
        let p = Percent::reduction(32764, 5741).unwrap();
        assert_eq!(p.rounded, 82.48);
        assert_eq!(p.truncated, 82.47);
        assert!((p.raw - 82.4777).abs() < 1e-4);
        let (r, c) = reduction_percent(&counts(10, 10), &counts(10, 10)).unwrap();
        assert_eq!((r.rounded, c.rounded), (0.0, 0.0));
        assert!(reduction_percent(&counts(0, 1), &counts(0, 1)).is_err());
        assert_eq!(Percent::reduction(3, 2).unwrap().rounded, 33.33);
        assert_eq!(Percent::reduction(3, 1).unwrap().rounded, 66.67);
        assert_eq!(Percent::reduction(8, 9).unwrap().rounded, -12.5);
    }

    #[test]
    fn dump_format() {
        let mut c = Circuit::<f64>::new(3);
        c.push(Gate::ry(0, 0.5, Region::Ucr)).unwrap();
        c.push(Gate::cnot(0, 2, Region::Fanout)).unwrap();
        c.push(Gate::cphase(1, 0, 1.25, Region::Iqft)).unwrap();
        c.push(Gate::swap(0, 2, Region::Iqft)).unwrap();
        c.push(Gate::h(1, Region::Iqft)).unwrap();
        let text = c.dump();
        assert_eq!(
            text,
            "WIDTH 3\nRY 0 0.5 ucr\nCNOT 2 0 fanout\nCPHASE 0 1 1.25 iqft\nSWAP 0 2 iqft\nH 1 iqft\n"
        );
        assert_eq!(Circuit::<f64>::parse(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Circuit::<f64>::parse("WIDTH 2\nRY 0 ucr\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
