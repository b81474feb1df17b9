mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use eulersim::graph::*;
use eulersim::optics::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_encoding(n: usize, sign: Sign, rng: &mut ChaCha8Rng) -> Rank2Encoding {
    let alpha = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
    let beta = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
    Rank2Encoding::with_identity(alpha, beta, sign).unwrap()
}

fn small_geometry() -> OpticalGeometry {
    OpticalGeometry::square(80)
}

fn phase_eq(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) < 1e-12
}

#[test]
fn layout_examples() {
    let two_by_two = build_layout(4, &small_geometry()).unwrap();
    assert_eq!((two_by_two.grid_rows(), two_by_two.grid_cols()), (2, 2));
    let cells: Vec<_> = (0..4).map(|l| two_by_two.cell(l)).collect();
    assert_eq!(cells, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);

    let three = build_layout(3, &small_geometry()).unwrap();
    assert_eq!(three.dark_cells(), 1);
    assert_eq!(three.spin_at(1, 1), None);

    let full = build_layout(20736, &OpticalGeometry::square(1440)).unwrap();
    assert_eq!((full.grid_rows(), full.grid_cols(), full.dark_cells()), (144, 144, 0));

    assert!(build_layout(17, &OpticalGeometry::square(40)).is_err());
    assert!(build_layout(16, &OpticalGeometry::square(40)).is_ok());
    assert!(build_layout(0, &small_geometry()).is_err());
    let odd = OpticalGeometry { macropixel: 5, ..OpticalGeometry::default() };
    assert!(build_layout(4, &odd).is_err());
}

#[test]
fn layout_assignment_is_injective() {
    for n in [1, 7, 50, 1000, 20736] {
        let layout = build_layout(n, &OpticalGeometry::default()).unwrap();
        assert!(layout.grid_rows() * layout.grid_cols() >= n);
        let mut seen = std::collections::HashSet::new();
        for l in 0..n {
            let (r, c) = layout.cell(l);
            assert!(seen.insert((r, c)));
            assert_eq!(layout.spin_at(r, c), Some(l));
        }
    }
}

#[test]
fn mask_cell_examples() {
    let layout = build_layout(2, &small_geometry()).unwrap();
    let enc = Rank2Encoding::with_identity(vec![0.0, PI / 4.0], vec![FRAC_PI_2, 1.0], Sign::Plus).unwrap();
    let x = SpinConfig::new(vec![1, -1]).unwrap();
    let mask = synthesize_mask(&enc, &x, &layout).unwrap();
    let c0 = mask.cell_phases(&layout, 0);
    for (got, want) in c0.iter().zip([0.0, 0.0, 0.0, PI]) {
        assert!(phase_eq(*got, want));
    }
    let c1 = mask.cell_phases(&layout, 1);
    assert!(phase_eq(c1[0], PI - PI / 4.0));
    assert!(phase_eq(c1[2], PI + PI / 4.0));
}

#[test]
fn cell_average_realizes_both_quadratures() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 30;
    let layout = build_layout(n, &small_geometry()).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let enc = random_encoding(n, sign, &mut rng);
        let x = SpinConfig::random(n, &mut rng);
        let y = enc.quadrature_spins(&x).unwrap();
        let mask = synthesize_mask(&enc, &x, &layout).unwrap();
        for l in 0..n {
            let sum: Complex64 = mask.cell_phases(&layout, l).iter().map(|&p| Complex64::from_polar(1.0, p)).sum();
            let want = Complex64::new(x.value(l) * enc.alpha()[l].cos(), y.value(l) * enc.beta()[l].cos());
            assert!((sum / 2.0 - want).norm() < 1e-12);
        }
    }
}

#[test]
fn propagate_matches_naive_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (rows, cols) = (6, 10);
    let phase: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(0.0..TAU)).collect();
    let live: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(0.7)).collect();
    let mask = PhaseMask::from_phases(rows, cols, phase.clone(), live.clone()).unwrap();
    let field = propagate(&mask);
    let amp: Vec<Complex64> = phase
        .iter()
        .zip(&live)
        .map(|(&p, &on)| if on { Complex64::from_polar(1.0, p) } else { Complex64::default() })
        .collect();
    let want = common::naive_centered_dft(rows, cols, &amp);
    for (a, b) in field.data().iter().zip(&want) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn propagate_uniform_dc() {
    let layout = build_layout(12, &small_geometry()).unwrap();
    let mask = PhaseMask::uniform(&layout);
    let m = mask.live_count() as f64;
    let field = propagate(&mask);
    assert!((field.center() - Complex64::new(m, 0.0)).norm() < 1e-9);
    assert!((field.intensity().center() - m * m).abs() < 1e-9 * m * m);
}

#[test]
fn propagate_parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [1, 5, 64, 200] {
        let layout = build_layout(n, &OpticalGeometry::default()).unwrap();
        let enc = random_encoding(n, Sign::Minus, &mut rng);
        let mask = synthesize_mask(&enc, &SpinConfig::random(n, &mut rng), &layout).unwrap();
        let field = propagate(&mask);
        let g = (field.rows() * field.cols()) as f64;
        let want = g * mask.live_count() as f64;
        assert!((field.energy() - want).abs() <= 1e-9 * want);
    }
}

#[test]
fn propagate_shift_theorem() {
    let (rows, cols) = (8, 16);
    let ramp: Vec<f64> = (0..rows * cols).map(|i| TAU * (i % cols) as f64 / cols as f64).collect();
    let mask = PhaseMask::from_phases(rows, cols, ramp, vec![true; rows * cols]).unwrap();
    let img = propagate(&mask).intensity();
    let (r, c) = (img.argmax() / cols, img.argmax() % cols);
    assert_eq!((r, c), (rows / 2, cols / 2 + 1));
}

#[test]
fn dc_readout_examples() {
    let n = 7;
    let enc = Rank2Encoding::with_identity(vec![0.0; n], vec![FRAC_PI_2; n], Sign::Plus).unwrap();
    let r = dc_readout(&enc, &SpinConfig::aligned(n, true)).unwrap();
    assert_eq!((r.p_x, r.p_y), ((n * n) as f64, 0.0));

    let enc = Rank2Encoding::with_identity(vec![0.3, 0.3, 1.0, 1.0], vec![0.5; 4], Sign::Minus).unwrap();
    let x = SpinConfig::new(vec![1, -1, 1, -1]).unwrap();
    assert!(dc_readout(&enc, &x).unwrap().p_x.abs() < 1e-30);
    assert!(dc_readout(&enc, &SpinConfig::aligned(3, true)).is_err());
}

#[test]
fn dc_readout_matches_center_pixel() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let n = [64, 1, 2, 37][trial % 4];
        let layout = build_layout(n, &OpticalGeometry::default()).unwrap();
        let enc = random_encoding(n, if trial % 2 == 0 { Sign::Plus } else { Sign::Minus }, &mut rng);
        let x = SpinConfig::random(n, &mut rng);
        let r = dc_readout(&enc, &x).unwrap();
        let center = propagate(&synthesize_mask(&enc, &x, &layout).unwrap()).intensity().center();
        let area = CELL_FIELD_GAIN * CELL_FIELD_GAIN;
        assert!((center / area - r.intensity()).abs() <= 1e-9 * r.intensity().max(1.0));
    }
}

#[test]
fn quadrature_hamiltonian_examples() {
    let enc = Rank2Encoding::with_identity(vec![0.0, 0.0], vec![FRAC_PI_2; 2], Sign::Plus).unwrap();
    let h = quadrature_hamiltonian_readout(&enc, &SpinConfig::aligned(2, true)).unwrap();
    assert!((h + 1.0).abs() < 1e-15);
}

#[test]
fn quadrature_hamiltonian_matches_pair_loop_and_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let n = rng.random_range(2..40);
        let sign = if trial % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let enc = random_encoding(n, sign, &mut rng);
        let x = SpinConfig::random(n, &mut rng);
        let h4 = quadrature_hamiltonian_readout(&enc, &x).unwrap();
        let scale = n as f64 * n as f64;
        assert!((h4 - common::quadrature_loop(&enc, &x)).abs() < 1e-12 * scale);
        let h6 = hamiltonian(&weights_from_encoding(&enc), &x).unwrap();
        assert!((h4 + h6).abs() < 1e-12 * scale);
        if sign == Sign::Plus {
            let (ce, ch) = incoherent_sums(&enc);
            let i0 = dc_readout(&enc, &x).unwrap().intensity();
            assert!((h4 + 0.5 * (i0 - ce - ch)).abs() < 1e-12 * scale);
        }
    }
}

#[test]
fn quadrature_hamiltonian_with_signed_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 12;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.reverse();
    let sigma: Vec<i8> = (0..n).map(|l| if l % 3 == 0 { -1 } else { 1 }).collect();
    let aux = AuxMap::new(perm, sigma).unwrap();
    let alpha = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
    let beta = (0..n).map(|_| rng.random_range(0.0..PI)).collect();
    let enc = Rank2Encoding::new(alpha, beta, Sign::Minus, aux).unwrap();
    for _ in 0..20 {
        let x = SpinConfig::random(n, &mut rng);
        let h4 = quadrature_hamiltonian_readout(&enc, &x).unwrap();
        let h6 = hamiltonian(&weights_from_encoding(&enc), &x).unwrap();
        assert!((h4 + h6).abs() < 1e-12);
    }
}

#[test]
fn intensity_ranking_is_hamiltonian_ranking() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let enc = random_encoding(10, Sign::Plus, &mut rng);
    let mut pairs: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let x = SpinConfig::random(10, &mut rng);
            (dc_readout(&enc, &x).unwrap().intensity(), quadrature_hamiltonian_readout(&enc, &x).unwrap())
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-12));
}

#[test]
fn target_image_examples() {
    let layout = build_layout(9, &small_geometry()).unwrap();
    let t = target_image(&layout);
    assert!(t.is_normalized());
    assert_eq!(t.center(), 1.0);
    let (rows, cols) = (t.rows(), t.cols());
    for r in 1..rows {
        for c in 1..cols {
            let mirrored = t.at(rows - r, cols - c);
            assert!((t.at(r, c) - mirrored).abs() < 1e-12);
        }
    }
}

#[test]
fn target_image_is_dirichlet_profile() {
    for n in [16, 30] {
        let layout = build_layout(n, &small_geometry()).unwrap();
        let t = target_image(&layout);
        let (ar, ac) = layout.aperture();
        let (fr, fc) = layout.frame();
        let peak = ((ar * ac) as f64).powi(2);
        for r in 0..fr {
            for c in 0..fc {
                let want = common::dirichlet_sq(ar, fr, r as i64 - (fr / 2) as i64)
                    * common::dirichlet_sq(ac, fc, c as i64 - (fc / 2) as i64)
                    / peak;
                assert!((t.at(r, c) - want).abs() < 1e-9, "n {n} at ({r}, {c})");
            }
        }
    }
}

#[test]
fn image_distance_examples() {
    let a = IntensityImage::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!(image_distance(&a, &a).unwrap(), 0.0);
    let b = IntensityImage::new(2, 2, vec![0.1, 1.2, 0.3, 0.4]).unwrap();
    assert!((image_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    let c = IntensityImage::new(1, 4, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    assert!(image_distance(&a, &c).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let img = |rng: &mut ChaCha8Rng| IntensityImage::new(3, 3, (0..9).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
        let (p, q, r) = (img(&mut rng), img(&mut rng), img(&mut rng));
        let lhs = image_distance(&p, &r).unwrap();
        let rhs = image_distance(&p, &q).unwrap() + image_distance(&q, &r).unwrap();
        assert!(lhs <= rhs + 1e-12);
    }
}

#[test]
fn image_exports() {
    let layout = build_layout(9, &small_geometry()).unwrap();
    let t = target_image(&layout);
    let raw = encode_raw_image(&t);
    assert_eq!(&raw[..8], RAW_MAGIC);
    let back = parse_raw_image(&raw).unwrap();
    assert_eq!(back, t);
    assert!(parse_raw_image(&raw[..raw.len() - 1]).is_err());

    let pgm = encode_pgm16(&t);
    let header = format!("P5\n{} {}\n65535\n", t.cols(), t.rows());
    assert!(pgm.starts_with(header.as_bytes()));
    assert_eq!(pgm.len(), header.len() + 2 * t.rows() * t.cols());
    let c = header.len() + 2 * (t.rows() / 2 * t.cols() + t.cols() / 2);
    assert_eq!(u16::from_be_bytes([pgm[c], pgm[c + 1]]), 65535);
}
