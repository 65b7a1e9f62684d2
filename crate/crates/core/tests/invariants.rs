use hollowsep::concurrence::{
    flip_spectrum, is_hollowisable, mixed_concurrence, mixed_concurrences, pure_concurrence, wootters_concurrence,
    MixedAnalysis, PreconcurrenceMatrix,
};
use hollowsep::hollowizer::{hollowise_simultaneous, objective, p_sweep, HollowisationProblem, HollowiseOptions};
use hollowsep::linalg::{self, CMatrix};
use hollowsep::operators::generate_minimal;
use hollowsep::random::{
    random_density_matrix, random_density_matrix_of_rank, random_product_state, random_pure_state,
    random_separable_mixture, random_symmetric, seeded_rng, symmetric_with_singular_values,
};
use hollowsep::separability::{
    classify, classify_rank2, extract_decomposition, ppt_scan, ClassifyOptions, Evidence, VerdictStatus,
};
use hollowsep::states::{self, eigendecompose_rho, is_product, sum_of_projectors, SystemShape};
use rand::Rng;

fn shape(d: &[usize]) -> SystemShape {
    SystemShape::new(d.to_vec()).unwrap()
}

fn tau(m: CMatrix) -> PreconcurrenceMatrix {
    let n = m.nrows();
    PreconcurrenceMatrix {
        alpha: None,
        tau: m,
        base_rank: n,
    }
}

#[test]
fn eigendecomposition_reconstructs_rho() {
    let mut rng = seeded_rng(1);
    for dims in [[2, 2].as_slice(), &[2, 2, 2], &[2, 3]] {
        let s = shape(dims);
        for k in 0..100 {
            let rho = random_density_matrix_of_rank(&s, 1 + k % s.total_dim(), &mut rng);
            let parts = eigendecompose_rho(&rho, states::DEFAULT_RANK_TOL).unwrap();
            assert!((sum_of_projectors(&s, &parts) - rho.matrix()).norm() < 1e-9);
        }
    }
}

#[test]
fn tau_singular_values_match_flip_spectrum() {
    let mut rng = seeded_rng(2);
    for dims in [[2, 2].as_slice(), &[2, 2, 2], &[2, 3]] {
        let s = shape(dims);
        let cat = generate_minimal(&s).unwrap();
        for k in 0..30 {
            let rho = random_density_matrix_of_rank(&s, 1 + k % s.total_dim(), &mut rng);
            let a = MixedAnalysis::new(&rho, &cat, states::DEFAULT_RANK_TOL).unwrap();
            for (op, sv) in cat.iter().zip(&a.singular_values) {
                let flip = flip_spectrum(rho.matrix(), &op.to_dense(s.total_dim())).unwrap();
                for (x, y) in sv.iter().zip(&flip) {
                    assert!((x - y).abs() < 1e-8, "{dims:?}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn projector_concurrence_equals_pure_concurrence() {
    let mut rng = seeded_rng(3);
    for dims in [[2, 2].as_slice(), &[2, 2, 2], &[2, 3], &[3, 3]] {
        let s = shape(dims);
        let cat = generate_minimal(&s).unwrap();
        for _ in 0..20 {
            let psi = random_pure_state(&s, &mut rng);
            let rho = psi.projector();
            for op in cat.iter() {
                let a = pure_concurrence(&psi, op).unwrap();
                let b = mixed_concurrence(&rho, op).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn separable_mixtures_have_vanishing_concurrences() {
    let mut rng = seeded_rng(4);
    for dims in [[2, 2].as_slice(), &[2, 2, 2]] {
        let s = shape(dims);
        let cat = generate_minimal(&s).unwrap();
        for k in 0..200 {
            let rho = random_separable_mixture(&s, 1 + k % 10, &mut rng);
            let max = mixed_concurrences(&rho, &cat).unwrap().into_iter().fold(0.0, f64::max);
            assert!(max <= 1e-8, "{dims:?} #{k}: {max:e}");
        }
    }
}

#[test]
fn concurrence_is_a_lower_bound_over_congruences() {
    let mut rng = seeded_rng(5);
    let s = shape(&[2, 3]);
    let cat = generate_minimal(&s).unwrap();
    for _ in 0..30 {
        let rho = random_density_matrix_of_rank(&s, rng.random_range(1..=6), &mut rng);
        let a = MixedAnalysis::new(&rho, &cat, states::DEFAULT_RANK_TOL).unwrap();
        let conc = a.concurrences();
        for _ in 0..10 {
            let p = a.rank() + rng.random_range(0..3);
            let u = linalg::random_unitary(p, rng.random());
            for (t, c) in a.taus.iter().zip(&conc) {
                let moved = linalg::congruence(&u, &t.extended(p).tau).unwrap();
                let sum: f64 = (0..p).map(|k| moved[(k, k)].norm()).sum();
                assert!(sum >= c - 1e-8);
            }
        }
    }
}

#[test]
fn hollowisability_is_congruence_invariant() {
    let mut rng = seeded_rng(6);
    for n in 2..7 {
        for _ in 0..20 {
            let m = random_symmetric(n, rng.random());
            let u = linalg::random_unitary(n, rng.random());
            let moved = linalg::congruence(&u, &m).unwrap();
            assert_eq!(is_hollowisable(&tau(m), 1e-9), is_hollowisable(&tau(moved), 1e-9));
        }
    }
}

#[test]
fn found_results_are_unitary_and_hollow() {
    let mut rng = seeded_rng(7);
    for k in 0..30u64 {
        let p = 3 + (k as usize % 4);
        // a common hollow pair moved by a random unitary
        let v = linalg::random_unitary(p, rng.random());
        let matrices: Vec<PreconcurrenceMatrix> = (0..2)
            .map(|_| {
                let mut h = random_symmetric(p, rng.random());
                for i in 0..p {
                    h[(i, i)] = Default::default();
                }
                tau(linalg::congruence(&v, &h).unwrap())
            })
            .collect();
        let problem = HollowisationProblem::new(matrices, &HollowiseOptions::default());
        let out = hollowise_simultaneous(&problem);
        assert!(out.found(), "#{k}: residual {:e}", out.residual);
        assert!(linalg::unitarity_deviation(&out.unitary) < 1e-10);
        for m in &problem.matrices {
            let moved = linalg::congruence(&out.unitary, &m.tau).unwrap();
            let diag = (0..p).map(|i| moved[(i, i)].norm()).fold(0.0, f64::max);
            assert!(diag <= problem.tolerance);
        }
    }
}

#[test]
fn objective_respects_thompson_lower_bound() {
    let mut rng = seeded_rng(8);
    for _ in 0..50 {
        let p = rng.random_range(2..6);
        let mut s: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..1.0)).collect();
        s[0] += 2.0;
        let matrices = vec![
            tau(symmetric_with_singular_values(&s, rng.random())),
            tau(random_symmetric(p, rng.random())),
        ];
        let bound: f64 = matrices
            .iter()
            .map(|m| m.thompson_gap().max(0.0).powi(2) / p as f64)
            .sum();
        let problem = HollowisationProblem::new(matrices, &HollowiseOptions::default());
        for _ in 0..10 {
            let u = linalg::random_unitary(p, rng.random());
            assert!(objective(&problem, &u) >= bound - 1e-12);
        }
    }
}

#[test]
fn hollowisation_is_deterministic() {
    let mut rng = seeded_rng(9);
    let s = shape(&[2, 2, 2]);
    let cat = generate_minimal(&s).unwrap();
    let rho = random_separable_mixture(&s, 6, &mut rng);
    let a = MixedAnalysis::new(&rho, &cat, states::DEFAULT_RANK_TOL).unwrap();
    let opts = HollowiseOptions::default();
    let first = p_sweep(&a.taus, None, &opts);
    let second = p_sweep(&a.taus, None, &opts);
    let (p1, r1) = first.success.unwrap();
    let (p2, r2) = second.success.unwrap();
    assert_eq!(p1, p2);
    assert_eq!(r1.residual.to_bits(), r2.residual.to_bits());
    assert_eq!(r1.unitary, r2.unitary);
}

#[test]
fn verdicts_are_sound() {
    let mut rng = seeded_rng(10);
    let s = shape(&[2, 2, 2]);
    let cat = generate_minimal(&s).unwrap();
    let opts = ClassifyOptions {
        p_max: Some(10),
        hollowise: HollowiseOptions {
            restarts: 8,
            ..HollowiseOptions::default()
        },
        ..ClassifyOptions::default()
    };
    for k in 0..60 {
        let rho = match k % 3 {
            0 => random_separable_mixture(&s, 1 + k % 7, &mut rng),
            1 => random_density_matrix_of_rank(&s, 1 + k % 4, &mut rng),
            _ => random_density_matrix(&s, &mut rng),
        };
        let v = classify(&rho, &cat, &opts).unwrap();
        match &v.evidence {
            Evidence::Decomposition(d) => {
                assert_eq!(v.status, VerdictStatus::Separable);
                let parts: Vec<_> = d.components.iter().map(|c| c.state.weighted(c.weight)).collect();
                assert!((sum_of_projectors(&s, &parts) - rho.matrix()).norm() <= 1e-8);
                assert!(d
                    .components
                    .iter()
                    .all(|c| is_product(&c.state, states::DEFAULT_RANK_TOL)));
            }
            Evidence::Concurrence {
                alpha,
                value,
                tolerance,
            } => {
                assert_eq!(v.status, VerdictStatus::Entangled);
                let again = mixed_concurrence(&rho, &cat.operators()[*alpha]).unwrap();
                assert!((again - value).abs() < 1e-12 && again > *tolerance);
            }
            Evidence::Ppt {
                partition,
                min_eigenvalue,
            } => {
                assert_eq!(v.status, VerdictStatus::Entangled);
                let entry = ppt_scan(&rho)
                    .unwrap()
                    .into_iter()
                    .find(|e| &e.partition == partition)
                    .unwrap();
                assert_eq!(entry.min_eigenvalue, *min_eigenvalue);
                assert!(*min_eigenvalue < -opts.tol);
            }
            Evidence::Proportionality { .. } => assert_eq!(v.status, VerdictStatus::Entangled),
            Evidence::Diagnostics { .. } => assert_eq!(v.status, VerdictStatus::Undecided),
        }
    }
}

#[test]
fn rank2_agrees_with_general_sweep() {
    let s = shape(&[2, 2, 2]);
    let cat = generate_minimal(&s).unwrap();
    let opts = ClassifyOptions::default();
    for seed in 0..100u64 {
        let mut rng = seeded_rng(11_000 + seed);
        let rho = if seed % 2 == 0 {
            random_separable_mixture(&s, 2, &mut rng)
        } else {
            random_density_matrix_of_rank(&s, 2, &mut rng)
        };
        let fast = classify_rank2(&rho, &cat, &opts).unwrap();
        assert_ne!(fast.status, VerdictStatus::Undecided);
        let a = MixedAnalysis::new(&rho, &cat, states::DEFAULT_RANK_TOL).unwrap();
        let sweep = p_sweep(&a.taus, None, &opts.hollowise);
        if let Some((_, result)) = sweep.success {
            assert_eq!(fast.status, VerdictStatus::Separable, "seed {seed}");
            let (parts, _) = extract_decomposition(&result.unitary, &a.eigenstates).unwrap();
            assert!((sum_of_projectors(&s, &parts) - rho.matrix()).norm() < 1e-8);
        }
        if seed % 2 == 0 {
            assert_eq!(fast.status, VerdictStatus::Separable);
        }
    }
}

#[test]
fn ppt_and_wootters_agree_on_two_qubits() {
    let s = shape(&[2, 2]);
    let mut rng = seeded_rng(12);
    let (mut entangled, mut separable) = (0, 0);
    for k in 0..500 {
        let rho = match k % 5 {
            0 => random_density_matrix(&s, &mut rng),
            1 => random_separable_mixture(&s, 3, &mut rng),
            r => random_density_matrix_of_rank(&s, r - 1, &mut rng),
        };
        let by_ppt = ppt_scan(&rho).unwrap()[0].min_eigenvalue < -1e-9;
        let by_wootters = wootters_concurrence(&rho).unwrap() > 1e-9;
        assert_eq!(by_ppt, by_wootters, "#{k}");
        if by_ppt {
            entangled += 1;
        } else {
            separable += 1;
        }
    }
    assert!(entangled > 50 && separable > 50);
}

#[test]
fn product_and_generic_states_by_matricization() {
    let mut rng = seeded_rng(13);
    let s = shape(&[2, 2]);
    for _ in 0..50 {
        assert!(is_product(
            &random_product_state(&s, &mut rng),
            states::DEFAULT_RANK_TOL
        ));
        let m = states::matricize(&random_pure_state(&s, &mut rng), 0).unwrap();
        assert_eq!(states::numeric_rank(&m, states::DEFAULT_RANK_TOL), 2);
    }
}
