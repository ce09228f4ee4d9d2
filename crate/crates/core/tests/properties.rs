mod common;

use common::*;
use faqpie::circuit::{count_gates, Circuit, Region};
use faqpie::compress::{cancel_cnots, compress, prune_rotations, CompressionOptions};
use faqpie::fsl::{build_fsl_2d, FslLayout};
use faqpie::image_io::{crop_and_merge, decode_image, encode_png, encode_ppm, to_planes, zero_pad, Grid, ImagePlane, RgbImage};
use faqpie::partition::{reassemble, split};
use faqpie::simulator::run;
use faqpie::spectrum::{fidelity, forward_dft, retained_energy_ratio, truncate_spectrum, TruncationMode};
use faqpie::ucr::ucr_angles;
use proptest::prelude::*;

fn plane_strategy(max_n: u32) -> impl Strategy<Value = ImagePlane<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        let side = 1usize << n;
        prop::collection::vec(0u8..=255, side * side)
            .prop_map(move |v| ImagePlane::new(Grid::from_vec(side, side, v.into_iter().map(f64::from).collect()).unwrap()).unwrap())
    })
}

fn rgb_strategy() -> impl Strategy<Value = RgbImage> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h * 3).prop_map(move |d| RgbImage::new(w, h, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(p in plane_strategy(5)) {
        let spec = forward_dft(&p);
        let pixel_energy = p.frobenius_norm().powi(2);
        let side2 = (p.side() * p.side()) as f64;
        let spectral = spec.norm().powi(2) / side2;
        prop_assert!((spectral - pixel_energy).abs() <= 1e-9 * pixel_energy.max(1.0));
    }

    #[test]
    fn truncation_nests_and_fidelity_grows(p in plane_strategy(5).prop_filter("n >= 3", |p| p.n() >= 3 && p.frobenius_norm() > 0.0)) {
        let spec = forward_dft(&p);
        let n = p.n();
        let mut last_f = 0.0;
        let mut last_r = 0.0;
        for m in 0..=n - 2 {
            let small = truncate_spectrum(&spec, m, TruncationMode::Centered).unwrap();
            let f = fidelity(&small, &spec).unwrap().value();
            let r = retained_energy_ratio(&small, &spec).unwrap();
            prop_assert!(f + 1e-12 >= last_f && r + 1e-12 >= last_r);
            prop_assert!((f - r).abs() < 1e-9);
            last_f = f;
            last_r = r;
            if m < n - 2 {
                let big = truncate_spectrum(&spec, m + 1, TruncationMode::Centered).unwrap();
                for i in 0..small.side() {
                    for j in 0..small.side() {
                        let (fi, fj) = (small.frequency(i), small.frequency(j));
                        let bi = fi.rem_euclid(big.side() as i64) as usize;
                        let bj = fj.rem_euclid(big.side() as i64) as usize;
                        prop_assert_eq!(small.get(i, j), big.get(bi, bj));
                    }
                }
            }
        }
    }

    #[test]
    fn padding_keeps_norm_and_crops_back(img in rgb_strategy()) {
        let n = faqpie::image_io::required_log_side(img.height(), img.width());
        let mut padded = Vec::new();
        let mut rec = None;
        for g in to_planes::<f64>(&img) {
            let (p, r) = zero_pad(&g, n).unwrap();
            prop_assert!((p.frobenius_norm() - g.frobenius_norm()).abs() < 1e-9);
            padded.push(p);
            rec = Some(r);
        }
        let planes: [ImagePlane<f64>; 3] = padded.try_into().unwrap();
        prop_assert_eq!(crop_and_merge(&planes, rec.unwrap()).unwrap(), img);
    }

    #[test]
    fn codecs_round_trip(img in rgb_strategy()) {
        prop_assert_eq!(&decode_image(&encode_ppm(&img)).unwrap(), &img);
        prop_assert_eq!(&decode_image(&encode_png(&img).unwrap()).unwrap(), &img);
    }

    #[test]
    fn partition_round_trip(p in plane_strategy(5).prop_filter("n >= 2", |p| p.n() >= 2), split_at in 1u32..4) {
        let n0 = split_at.min(p.n() - 1);
        let (plan, tiles) = split(&p, n0).unwrap();
        let unit: Vec<Grid<f64>> = tiles.iter().map(|t| {
            let norm = t.frobenius_norm();
            Grid::from_vec(t.side(), t.side(), t.grid().data().iter().map(|v| if norm > 0.0 { v / norm } else { 0.0 }).collect()).unwrap()
        }).collect();
        let back = reassemble(&unit, &plan).unwrap();
        let dev = back.grid().data().iter().zip(p.grid().data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-8);
        let w2: f64 = plan.blocks().iter().map(|b| b.weight * b.weight).sum();
        prop_assert!(p.frobenius_norm() == 0.0 || (w2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dump_parse_round_trip(seed in any::<u64>(), width in 2usize..6, len in 0usize..60) {
        let c = random_circuit(width, len, seed);
        let text = c.dump();
        let back = Circuit::<f64>::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.dump(), text);
    }

    #[test]
    fn cnot_cancellation_is_idempotent_and_unitary(seed in any::<u64>(), k in 2usize..=4, mask in any::<u64>()) {
        let target = normalize(&random_state(k, seed));
        let reg: Vec<usize> = (0..k).collect();
        let gates = ucr_angles(&target).unwrap().to_gates(&reg, Region::Ucr).unwrap();
        // drop an arbitrary subset of rotations to create cancellable CNOT runs
        let mut i = 0;
        let kept: Vec<_> = gates.into_iter().filter(|g| {
            if !g.kind.is_rotation() { return true; }
            i += 1;
            mask >> (i % 64) & 1 == 1
        }).collect();
        let pruned = Circuit::from_gates(k, kept).unwrap();
        let once = cancel_cnots(&pruned);
        prop_assert_eq!(&cancel_cnots(&once), &once);
        let dev = max_abs_diff(&flatten(&circuit_unitary(&once)), &flatten(&circuit_unitary(&pruned)));
        prop_assert!(dev < 1e-12);
        prop_assert!(count_gates(&once).cnots_ucr <= count_gates(&pruned).cnots_ucr);
    }

    #[test]
    fn counts_monotone_in_prune_fraction(p in plane_strategy(4).prop_filter("n >= 3", |p| p.n() >= 3 && p.frobenius_norm() > 0.0)) {
        let layout = FslLayout::new(p.n(), 1).unwrap();
        let block = truncate_spectrum(&forward_dft(&p), 1, TruncationMode::Centered).unwrap();
        let c = build_fsl_2d(&block, &layout).unwrap();
        let mut last = (usize::MAX, usize::MAX);
        for step in 0..10 {
            let opts = CompressionOptions::new(step as f64 / 10.0).unwrap();
            let (out, _) = compress(&c, &opts).unwrap();
            let k = count_gates(&out);
            prop_assert!(k.rotations_ucr <= last.0 && k.cnots_ucr <= last.1);
            last = (k.rotations_ucr, k.cnots_ucr);
            let only_pruned = prune_rotations(&c, &opts).unwrap();
            prop_assert!(count_gates(&only_pruned).rotations_ucr == k.rotations_ucr);
        }
    }

    #[test]
    fn simulation_preserves_norm(seed in any::<u64>(), width in 1usize..8, len in 0usize..80) {
        let c = if width == 1 {
            let mut c = Circuit::new(1);
            c.push(faqpie::circuit::Gate::ry(0, 0.3 + seed as f64 % 3.0, Region::Ucr)).unwrap();
            c
        } else {
            random_circuit(width, len, seed)
        };
        let sv = run(&c, None).unwrap();
        prop_assert!((sv.norm() - 1.0).abs() < 1e-12);
    }
}
