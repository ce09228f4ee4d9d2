//! Two-step compression of UCR cascades.
//!
//! 1. [`prune_rotations`] drops the rotations with the smallest `|angle|`
//!    across the whole UCR region (RY and RZ pooled).
//! 2. [`cancel_cnots`] collapses each run of adjacent UCR CNOTs sharing a
//!    target to its control parity. CNOTs with a common target commute, and
//!    a control appearing an even number of times cancels.
//!
//! Only [`Region::Ucr`] gates are touched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{count_gates, Circuit, Gate, GateCounts, GateKind, Region};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_PRUNE_FRACTION: f64 = 0.30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionOptions {
    /// Fraction in `[0, 1)` of UCR rotations to drop, smallest `|angle|` first.
    pub prune_fraction: f64,
    /// Additionally drop UCR rotations with `|angle| < prune_abs`.
    pub prune_abs: Option<f64>,
    pub parity_cancel: bool,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        Self { prune_fraction: DEFAULT_PRUNE_FRACTION, prune_abs: None, parity_cancel: true }
    }
}

impl CompressionOptions {
    pub fn new(prune_fraction: f64) -> Result<Self> {
        let opts = Self { prune_fraction, ..Self::default() };
        opts.validate()?;
        Ok(opts)
    }

    /// No pruning; parity cancellation stays enabled.
    pub fn none() -> Self {
        Self { prune_fraction: 0.0, prune_abs: None, parity_cancel: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.prune_fraction) {
            return Err(Error::InvalidArgument(format!(
                "prune fraction {} not in [0, 1)",
                self.prune_fraction
            )));
        }
        if let Some(a) = self.prune_abs {
            if a.is_nan() || a < 0.0 {
                return Err(Error::InvalidArgument(format!("prune threshold {a} is negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionStats {
    pub rotations_removed: usize,
    pub cnots_removed: usize,
    pub counts_before: GateCounts,
    pub counts_after: GateCounts,
}

fn is_ucr_rotation<T: Real>(g: &Gate<T>) -> bool {
    g.region == Region::Ucr && g.kind.is_rotation()
}

pub fn prune_rotations<T: Real>(c: &Circuit<T>, opts: &CompressionOptions) -> Result<Circuit<T>> {
    opts.validate()?;
    let gates = c.gates();
    let mut candidates: Vec<(usize, T)> = gates
        .iter()
        .enumerate()
        .filter(|(_, g)| is_ucr_rotation(g))
        .map(|(i, g)| (i, g.angle_or_zero().abs()))
        .collect();
    let mut drop = vec![false; gates.len()];
    if let Some(limit) = opts.prune_abs {
        let limit = T::of(limit);
        for &(i, a) in &candidates {
            drop[i] |= a < limit;
        }
    }
    let quota = (opts.prune_fraction * candidates.len() as f64).floor() as usize;
    if quota > 0 {
        // stable sort: equal magnitudes keep position order
        candidates.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        for &(i, _) in &candidates[..quota] {
            drop[i] = true;
        }
    }
    let kept = gates.iter().zip(&drop).filter(|(_, &d)| !d).map(|(g, _)| *g).collect();
    Ok(c.with_gates(kept))
}

/// Repeats the parity collapse until nothing changes: removing one run can
/// make two runs on another target adjacent.
pub fn cancel_cnots<T: Real>(c: &Circuit<T>) -> Circuit<T> {
    let mut cur = cancel_pass(c);
    loop {
        let next = cancel_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn cancel_pass<T: Real>(c: &Circuit<T>) -> Circuit<T> {
    let gates = c.gates();
    let is_run_member = |g: &Gate<T>| g.region == Region::Ucr && g.kind == GateKind::Cnot;
    let mut out = Vec::with_capacity(gates.len());
    let mut i = 0;
    while i < gates.len() {
        let g = gates[i];
        if !is_run_member(&g) {
            out.push(g);
            i += 1;
            continue;
        }
        let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
        let mut j = i;
        while j < gates.len() && is_run_member(&gates[j]) && gates[j].target == g.target {
            *parity.entry(gates[j].control.expect("validated")).or_default() ^= true;
            j += 1;
        }
        out.extend(
            parity
                .into_iter()
                .filter(|&(_, odd)| odd)
                .map(|(ctl, _)| Gate::cnot(ctl, g.target, Region::Ucr)),
        );
        i = j;
    }
    c.with_gates(out)
}

/// Prune, then (unless disabled) cancel CNOTs.
pub fn compress<T: Real>(c: &Circuit<T>, opts: &CompressionOptions) -> Result<(Circuit<T>, CompressionStats)> {
    let pruned = prune_rotations(c, opts)?;
    let out = if opts.parity_cancel { cancel_cnots(&pruned) } else { pruned };
    let counts_before = count_gates(c);
    let counts_after = count_gates(&out);
    let stats = CompressionStats {
        rotations_removed: counts_before.rotations_ucr - counts_after.rotations_ucr,
        cnots_removed: counts_before.cnots_ucr - counts_after.cnots_ucr,
        counts_before,
        counts_after,
    };
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnots(width: usize, pairs: &[(usize, usize)]) -> Circuit<f64> {
        Circuit::from_gates(width, pairs.iter().map(|&(c, t)| Gate::cnot(c, t, Region::Ucr)).collect()).unwrap()
    }

    #[test]
    fn zero_fraction_is_identity() {
        let mut c = Circuit::new(2);
        c.push(Gate::ry(0, 0.0, Region::Ucr)).unwrap();
        c.push(Gate::cnot(0, 1, Region::Ucr)).unwrap();
        assert_eq!(prune_rotations(&c, &CompressionOptions::none()).unwrap(), c);
    }

    #[test]
    fn drops_smallest_three_of_ten() {
        let mut c = Circuit::new(1);
        for a in [5.0, 1.0, 9.0, 3.0, 10.0, 2.0, 8.0, 4.0, 7.0, 6.0] {
            c.push(Gate::rz(0, a / 10.0, Region::Ucr)).unwrap();
        }
        let p = prune_rotations(&c, &CompressionOptions::new(0.3).unwrap()).unwrap();
        let left: Vec<f64> = p.gates().iter().map(|g| (g.angle_or_zero() * 10.0f64).round()).collect();
        assert_eq!(left, [5.0, 9.0, 10.0, 8.0, 4.0, 7.0, 6.0]);
    }

    #[test]
    fn ties_break_earliest_first() {
        let mut c = Circuit::new(1);
        for _ in 0..4 {
            c.push(Gate::ry(0, 0.5, Region::Ucr)).unwrap();
        }
        c.gates_mut()[3].angle = Some(-0.5);
        let p = prune_rotations(&c, &CompressionOptions::new(0.5).unwrap()).unwrap();
        assert_eq!(p.gates(), &c.gates()[2..]);
    }

    #[test]
    fn abs_threshold() {
        let mut c = Circuit::new(1);
        for a in [1e-9, 0.3, -1e-12, 0.0] {
            c.push(Gate::ry(0, a, Region::Ucr)).unwrap();
        }
        let opts = CompressionOptions { prune_fraction: 0.0, prune_abs: Some(1e-6), parity_cancel: true };
        assert_eq!(prune_rotations(&c, &opts).unwrap().len(), 1);
    }

    #[test]
    fn fraction_out_of_range() {
        assert!(CompressionOptions::new(1.0).is_err());
        assert!(CompressionOptions::new(-0.1).is_err());
    }

    #[test]
    fn pair_cancels() {
        assert!(cancel_cnots(&cnots(3, &[(0, 2), (0, 2)])).is_empty());
    }

    #[test]
    fn odd_parity_survives() {
        assert_eq!(cancel_cnots(&cnots(3, &[(0, 2), (1, 2), (0, 2)])), cnots(3, &[(1, 2)]));
    }

    #[test]
    fn cancellation_exposes_new_runs() {
        assert!(cancel_cnots(&cnots(3, &[(1, 2), (0, 1), (0, 1), (1, 2)])).is_empty());
    }

    #[test]
    fn different_targets_untouched() {
        let c = cnots(3, &[(0, 2), (0, 1), (0, 2)]);
        assert_eq!(cancel_cnots(&c), c);
    }

    #[test]
    fn other_regions_untouched() {
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::cnot(0, 2, Region::Fanout),
                Gate::cnot(0, 2, Region::Fanout),
                Gate::<f64>::h(1, Region::Iqft),
                Gate::ry(0, 1e-3, Region::Iqft),
            ],
        )
        .unwrap();
        assert_eq!(cancel_cnots(&c), c);
        assert_eq!(prune_rotations(&c, &CompressionOptions::new(0.9).unwrap()).unwrap(), c);
    }

    #[test]
    fn stats_add_up() {
        let mut c = Circuit::new(2);
        c.extend([
            Gate::ry(1, 0.01, Region::Ucr),
            Gate::cnot(0, 1, Region::Ucr),
            Gate::ry(1, 0.02, Region::Ucr),
            Gate::cnot(0, 1, Region::Ucr),
            Gate::ry(1, 1.0, Region::Ucr),
        ])
        .unwrap();
        let (out, stats) = compress(&c, &CompressionOptions::new(0.67).unwrap()).unwrap();
        assert_eq!(stats.rotations_removed, 2);
        assert_eq!(stats.cnots_removed, 2);
        assert_eq!(out.len(), 1);
        assert_eq!(stats.counts_after, count_gates(&out));
    }
}
