use std::path::PathBuf;

use faqpie::circuit::{count_gates, Circuit, GateKind, Region};
use faqpie::fsl::{build_fsl_2d, FslLayout};
use faqpie::image_io::{Grid, ImagePlane};
use faqpie::spectrum::{forward_dft, truncate_spectrum, TruncationMode};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Set `FAQPIE_BLESS=1` to rewrite the file after an intended change.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("FAQPIE_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn dc_circuit() -> Circuit<f64> {
    let plane = ImagePlane::new(Grid::from_fn(8, 8, |_, _| 5.0)).unwrap();
    let block = truncate_spectrum(&forward_dft(&plane), 1, TruncationMode::Centered).unwrap();
    build_fsl_2d(&block, &FslLayout::new(3, 1).unwrap()).unwrap()
}

#[test]
fn dc_only_n3_m1() {
    let c = dc_circuit();
    check_golden("dc_n3_m1.circuit", &c.dump());
}

#[test]
fn dc_only_rotations_are_zero() {
    // the whole state sits on the loaded |0…0⟩, so every UCR angle vanishes
    let c = dc_circuit();
    assert!(c.gates().iter().filter(|g| g.kind.is_rotation()).all(|g| g.angle_or_zero() == 0.0));
    let k = count_gates(&c);
    assert_eq!((k.rotations_ucr, k.cnots_ucr), (30, 28));
    let fanout: Vec<_> = c.gates().iter().filter(|g| g.region == Region::Fanout).collect();
    assert_eq!(fanout.len(), 2);
    assert!(fanout.iter().all(|g| g.kind == GateKind::Cnot));
    assert_eq!(Circuit::<f64>::parse(&c.dump()).unwrap(), c);
}
