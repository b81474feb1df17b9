mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use eulersim::graph::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k(n: usize) -> MaxCutInstance {
    MaxCutInstance::from_fn(n, |_, _| 1.0).unwrap()
}

fn spins(v: &[i8]) -> SpinConfig {
    SpinConfig::new(v.to_vec()).unwrap()
}

#[test]
fn cut_value_small_cases() {
    assert_eq!(cut_value(&k(3), &spins(&[1, 1, -1])).unwrap(), 2.0);
    let (inst, _) = generate_instance(10, 1.0, Sign::Minus, 7).unwrap();
    assert_eq!(cut_value(&inst, &SpinConfig::aligned(10, true)).unwrap(), 0.0);
    assert_eq!(cut_value(&inst, &SpinConfig::aligned(10, false)).unwrap(), 0.0);
    assert!(cut_value(&inst, &SpinConfig::aligned(9, true)).is_err());
}

#[test]
fn cut_value_matches_double_loop() {
    let (inst, _) = generate_instance(10, 1.0, Sign::Plus, 7).unwrap();
    let w = common::dense(&inst);
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    for _ in 0..50 {
        let x = SpinConfig::random(10, &mut rng);
        let got = cut_value(&inst, &x).unwrap();
        let want = common::cut_loop(&w, x.as_slice());
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
    }
    let s = total_weight(&inst);
    assert!((s - common::total_loop(&w)).abs() <= 1e-12 * s.abs().max(1.0));
}

#[test]
fn hamiltonian_small_cases() {
    let one = MaxCutInstance::from_edges(2, vec![(0, 1, 1.0)]).unwrap();
    assert_eq!(hamiltonian(&one, &spins(&[1, 1])).unwrap(), 1.0);
    assert_eq!(hamiltonian(&one, &spins(&[1, -1])).unwrap(), -1.0);
    assert!(hamiltonian(&one, &spins(&[1])).is_err());
}

#[test]
fn cut_identity_on_n12() {
    for seed in 0..20 {
        let (inst, _) = generate_instance(12, 0.75, Sign::Minus, seed).unwrap();
        let w = common::dense(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = SpinConfig::random(12, &mut rng);
        let h = common::hamiltonian_loop(&w, x.as_slice());
        let c = common::cut_loop(&w, x.as_slice());
        let s = common::total_loop(&w);
        assert!((hamiltonian(&inst, &x).unwrap() - h).abs() <= 1e-12 * s.abs().max(1.0));
        assert!((0.5 * (s - h) - c).abs() <= 1e-12 * s.abs().max(1.0));
    }
}

#[test]
fn total_weight_small_cases() {
    assert_eq!(total_weight(&k(3)), 3.0);
    let empty = MaxCutInstance::from_edges(5, Vec::<(usize, usize, f64)>::new()).unwrap();
    assert_eq!(total_weight(&empty), 0.0);
    assert_eq!(empty.density(), 0.0);
}

#[test]
fn weights_from_encoding_examples() {
    let enc = Rank2Encoding::with_identity(vec![0.0, 0.0], vec![FRAC_PI_2; 2], Sign::Plus).unwrap();
    assert_eq!(weights_from_encoding(&enc).weight(0, 1), 1.0);

    let enc = Rank2Encoding::with_identity(vec![FRAC_PI_2; 4], vec![FRAC_PI_2; 4], Sign::Plus).unwrap();
    let inst = weights_from_encoding(&enc);
    assert_eq!(inst.nonzero_pairs(), 0);
    assert_eq!(inst.density(), 0.0);

    let enc = Rank2Encoding::with_identity(vec![FRAC_PI_3, 0.0], vec![0.0, FRAC_PI_3], Sign::Minus).unwrap();
    assert!(weights_from_encoding(&enc).weight(0, 1).abs() < 1e-15);
}

#[test]
fn single_amplitude_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alpha: Vec<f64> = (0..9).map(|_| rng.random_range(0.0..PI)).collect();
    let enc = Rank2Encoding::with_identity(alpha.clone(), vec![FRAC_PI_2; 9], Sign::Plus).unwrap();
    let inst = weights_from_encoding(&enc);
    for l in 0..9 {
        for m in l + 1..9 {
            assert!((inst.weight(l, m) - alpha[l].cos() * alpha[m].cos()).abs() < 1e-15);
        }
    }
}

#[test]
fn aux_map_couples_through_permutation() {
    let alpha = vec![0.3, 1.1, 2.0];
    let beta = vec![0.4, 1.9, 2.7];
    let aux = AuxMap::new(vec![2, 0, 1], vec![1, -1, 1]).unwrap();
    let enc = Rank2Encoding::new(alpha.clone(), beta.clone(), Sign::Minus, aux).unwrap();
    let inst = weights_from_encoding(&enc);
    let (p, sigma) = ([2usize, 0, 1], [1.0, -1.0, 1.0]);
    for l in 0..3 {
        for m in l + 1..3 {
            let want = alpha[l].cos() * alpha[m].cos() - sigma[l] * sigma[m] * beta[p[l]].cos() * beta[p[m]].cos();
            assert!((inst.weight(l, m) - want).abs() < 1e-15);
        }
    }
    assert!(AuxMap::new(vec![0, 0, 1], vec![1, 1, 1]).is_err());
    assert!(AuxMap::new(vec![0, 1, 2], vec![1, 0, 1]).is_err());
}

#[test]
fn diagonal_slack_leaves_optimum_unchanged() {
    // the encoded matrix carries eps^2 + s eta^2 on its diagonal; including it
    // shifts every configuration's energy by the same constant
    for seed in 0..10 {
        let n = 6 + seed as usize % 5;
        let (inst, enc) = generate_instance(n, 1.0, if seed % 2 == 0 { Sign::Plus } else { Sign::Minus }, seed).unwrap();
        let diag = enc.diagonal();
        let w = common::dense(&inst);
        let mut best_plain = (f64::INFINITY, 0u64);
        let mut best_full = (f64::INFINITY, 0u64);
        for bits in 0u64..(1 << (n - 1)) {
            let x: Vec<i8> = (0..n).map(|l| if bits >> l & 1 == 1 { -1 } else { 1 }).collect();
            let h = common::hamiltonian_loop(&w, &x);
            let full = 2.0 * h + diag.iter().sum::<f64>();
            if h < best_plain.0 - 1e-12 {
                best_plain = (h, bits);
            }
            if full < best_full.0 - 1e-12 {
                best_full = (full, bits);
            }
        }
        assert_eq!(best_plain.1, best_full.1, "seed {seed}");
    }
}

#[test]
fn generator_examples() {
    let (full, _) = generate_instance(40, 1.0, Sign::Plus, 3).unwrap();
    assert_eq!(full.nonzero_pairs(), 40 * 39 / 2);
    for family in [Family::Encodable, Family::Threshold] {
        let spec = GeneratorSpec { n: 100, density: 0.5, sign: Sign::Minus, seed: 5, family };
        let (inst, _) = generate(&spec).unwrap();
        assert_eq!(inst.nonzero_pairs(), 2475, "{family:?}");
        let (again, _) = generate(&spec).unwrap();
        assert_eq!(serialize_instance(&inst), serialize_instance(&again));
    }
    assert!(generate_instance(10, 0.01, Sign::Plus, 0).is_err());
    assert!(generate_instance(1, 1.0, Sign::Plus, 0).is_err());
    assert!(generate_instance(10, 0.0, Sign::Plus, 0).is_err());
}

#[test]
fn threshold_family_keeps_largest_parent_weights() {
    let spec = GeneratorSpec { n: 30, density: 0.6, sign: Sign::Plus, seed: 9, family: Family::Threshold };
    let (inst, enc) = generate(&spec).unwrap();
    let parent = weights_from_encoding(&enc);
    let kept_min = inst.edges().map(|e| e.w.abs()).fold(f64::INFINITY, f64::min);
    for e in parent.edges() {
        if inst.weight(e.l, e.k) == 0.0 {
            assert!(e.w.abs() <= kept_min);
        } else {
            assert_eq!(inst.weight(e.l, e.k), e.w);
        }
    }
}

#[test]
fn encodable_family_is_its_own_encoding() {
    for density in [0.5, 0.75, 0.9] {
        let (inst, enc) = generate_instance(50, density, Sign::Minus, 2).unwrap();
        let rebuilt = weights_from_encoding(&enc);
        assert_eq!(serialize_instance(&inst.to_sparse()).lines().skip_while(|l| l.starts_with('#')).collect::<Vec<_>>(),
            serialize_instance(&rebuilt.to_sparse()).lines().skip_while(|l| l.starts_with('#')).collect::<Vec<_>>());
    }
}

#[test]
fn parse_examples() {
    let inst = parse_instance("3 2\n1 2 1.0\n2 3 -0.5").unwrap();
    assert_eq!(inst.n(), 3);
    assert_eq!(inst.weight(0, 1), 1.0);
    assert_eq!(inst.weight(2, 1), -0.5);
    let a = parse_instance("2 1\n1 2 1").unwrap();
    let b = parse_instance("2 1\n1 2 1.0").unwrap();
    assert_eq!(a.weight(0, 1), b.weight(0, 1));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let cases = [
        ("3 1\n1 2 x", 2),
        ("3 1\n1 4 1.0", 2),
        ("3 2\n1 2 1.0\n2 1 1.0", 3),
        ("# c\n3 1\n1 1 1.0", 3),
        ("3 2\n1 2 1.0", 2),
    ];
    for (text, line) in cases {
        match parse_instance(text) {
            Err(eulersim::Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn serialization_round_trips() {
    for seed in 0..5 {
        let (inst, enc) = generate_instance(25, 0.75, Sign::Minus, seed).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(serialize_instance(&back), text);
        assert_eq!(back.metadata().get("seed"), Some(seed.to_string().as_str()));
        for e in inst.edges() {
            assert_eq!(back.weight(e.l, e.k), e.w);
        }
        let etext = serialize_encoding(&enc);
        let eback = parse_encoding(&etext).unwrap();
        assert_eq!(eback.alpha(), enc.alpha());
        assert_eq!(eback.beta(), enc.beta());
        assert_eq!(eback.sign(), enc.sign());
    }
}

#[test]
fn fit_in_family_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..30 {
        let n = rng.random_range(2..24);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-0.99..0.99)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-0.99..0.99)).collect();
        let (inst, sign) = if trial % 3 == 0 {
            (MaxCutInstance::from_fn(n, |l, k| a[l] * a[k]).unwrap(), Sign::Plus)
        } else if trial % 3 == 1 {
            (MaxCutInstance::from_fn(n, |l, k| a[l] * a[k] - b[l] * b[k]).unwrap(), Sign::Minus)
        } else {
            (MaxCutInstance::from_fn(n, |l, k| a[l] * a[k] + b[l] * b[k]).unwrap(), Sign::Plus)
        };
        let fit = fit_rank2(&inst).unwrap();
        assert!(fit.residual <= 1e-9, "trial {trial} n {n} {sign}: {}", fit.residual);
        let back = weights_from_encoding(&fit.encoding);
        let s2 = fit.scale * fit.scale;
        for l in 0..n {
            for m in l + 1..n {
                assert!((back.weight(l, m) / s2 - inst.weight(l, m)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn fit_matches_spectral_truncation_of_completed_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let n = 8;
        let mut w = vec![vec![0.0; n]; n];
        for l in 0..n {
            for m in l + 1..n {
                let v = rng.random_range(-1.0..1.0);
                w[l][m] = v;
                w[m][l] = v;
            }
        }
        let inst = MaxCutInstance::from_fn(n, |l, m| w[l][m]).unwrap();
        let fit = fit_rank2(&inst).unwrap();
        let mut completed = w.clone();
        for l in 0..n {
            completed[l][l] = fit.diagonal[l];
        }
        let plus = fit.encoding.sign() == Sign::Plus;
        let oracle = common::truncation_residual(&w, &completed, plus);
        assert!((fit.residual - oracle).abs() <= 1e-9, "{} vs {oracle}", fit.residual);
        let plain = common::truncation_residual(&w, &w, true).min(common::truncation_residual(&w, &w, false));
        assert!(fit.residual <= plain + 1e-9);
    }
}

#[test]
fn fit_rejects_degenerate_input() {
    let one = MaxCutInstance::from_edges(1, Vec::<(usize, usize, f64)>::new()).unwrap();
    assert!(fit_rank2(&one).is_err());
    let two = MaxCutInstance::from_edges(2, vec![(0, 1, -3.0)]).unwrap();
    let fit = fit_rank2(&two).unwrap();
    assert!(fit.residual <= 1e-12);
}
