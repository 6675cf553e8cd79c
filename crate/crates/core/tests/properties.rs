//! Cross-module randomized properties: independent oracles for the matrix
//! kernel, and consistency between the spectral verdicts and time-domain
//! simulation away from the stability boundary.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use passinet::digraph::{self, WeightedDigraph};
use passinet::gains::{
    exact_consensus_test_identical, general_threshold, GainAssignment,
};
use passinet::linalg::{self, kron, DenseMatrix};
use passinet::netfile::NetworkFile;
use passinet::passify::AgentModel;
use passinet::poly::{routh_hurwitz, Polynomial};
use passinet::sim::{simulate, NetworkSpec, SimOptions};

fn random_spanning_digraph(rng: &mut ChaCha8Rng, n: usize) -> WeightedDigraph {
    let mut arcs = Vec::new();
    for v in 2..=n {
        let parent = rng.gen_range(1..v);
        arcs.push((v, parent, rng.gen_range(0.3..2.0)));
    }
    for i in 1..=n {
        for j in 1..=n {
            if i != j && rng.gen_bool(0.2) && !arcs.iter().any(|a| a.0 == i && a.1 == j) {
                arcs.push((i, j, rng.gen_range(0.3..2.0)));
            }
        }
    }
    WeightedDigraph::new(n, arcs).unwrap()
}

/// Bottom-row companion matrix of a monic real polynomial.
fn companion(monic: &[f64]) -> DenseMatrix {
    let d = monic.len() - 1;
    let mut m = DenseMatrix::zeros(d, d);
    for i in 0..d - 1 {
        m[(i, i + 1)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..d {
        m[(d - 1, j)] = Complex64::new(-monic[j], 0.0);
    }
    m
}

#[test]
fn routh_agrees_with_companion_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut checked = 0;
    while checked < 300 {
        let degree = rng.gen_range(1..=6usize);
        let mut coeffs: Vec<f64> = (0..degree).map(|_| rng.gen_range(-3.0..3.0)).collect();
        coeffs.push(1.0); // monic
        let max_re = linalg::eigenvalues(&companion(&coeffs))
            .unwrap()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if max_re.abs() < 1e-6 {
            continue; // too close to the boundary to classify
        }
        checked += 1;
        let verdict = routh_hurwitz(&Polynomial::from_real(&coeffs)).unwrap();
        assert_eq!(
            verdict,
            max_re < 0.0,
            "degree {degree}, coeffs {coeffs:?}, companion max Re {max_re}"
        );
    }
}

/// Independent oracle: plain truncated Taylor series with aggressive
/// pre-scaling (the production path is a Pade approximant).
fn expm_series_oracle(m: &DenseMatrix, t: f64) -> DenseMatrix {
    let n = m.rows();
    let a = m.scale_real(t);
    let norm = a.norm_one();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings as i32));
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..60 {
        term = term.matmul(&a).unwrap().scale_real(1.0 / k as f64);
        sum = sum.add(&term).unwrap();
        if term.norm_one() < 1e-20 * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum).unwrap();
    }
    sum
}

#[test]
fn expm_matches_series_oracle_on_stable_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for _ in 0..40 {
        // random stable matrix: random entries shifted left by a margin
        let mut data: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for i in 0..4 {
            data[i * 4 + i] -= 2.5;
        }
        let m = DenseMatrix::from_real(4, 4, &data).unwrap();
        let t = rng.gen_range(0.0..10.0);
        let fast = linalg::expm(&m, t).unwrap();
        let oracle = expm_series_oracle(&m, t);
        let diff = fast.sub(&oracle).unwrap().norm_one();
        assert!(
            diff <= 1e-9 * fast.norm_one().max(1e-30),
            "expm mismatch {diff} at t = {t}"
        );
    }
}

#[test]
fn kron_eigenvalues_are_pairwise_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for _ in 0..20 {
        let a_data: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b_data: Vec<f64> = (0..9).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = DenseMatrix::from_real(3, 3, &a_data).unwrap();
        let b = DenseMatrix::from_real(3, 3, &b_data).unwrap();
        let mut products: Vec<Complex64> = Vec::new();
        for ea in linalg::eigenvalues(&a).unwrap() {
            for eb in linalg::eigenvalues(&b).unwrap() {
                products.push(ea * eb);
            }
        }
        let kron_eigs = linalg::eigenvalues(&kron(&a, &b)).unwrap();
        // greedy nearest matching, tolerant of conjugate-order differences
        let scale = 1.0 + products.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut used = vec![false; products.len()];
        for z in &kron_eigs {
            let (idx, dist) = products
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, p)| (i, (z - p).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[idx] = true;
            assert!(dist < 1e-6 * scale, "eigenvalue {z} unmatched ({dist})");
        }
    }
}

/// Simulation and the exact spectral test agree 20% away from the threshold
/// on either side; the horizon is stretched to let the slowest mode act.
#[test]
fn simulation_agrees_with_exact_verdict_off_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let agent = AgentModel::double_integrator();
    let mut tested = 0;
    while tested < 25 {
        let n = rng.gen_range(3..=5usize);
        let g = random_spanning_digraph(&mut rng, n);
        let rep = digraph::spectrum_report(&g, None).unwrap();
        let tol = digraph::zero_eigenvalue_tol(&g.laplace_matrix());
        let nonzero: Vec<Complex64> = rep
            .eigenvalues
            .iter()
            .copied()
            .filter(|z| z.norm() >= tol)
            .collect();
        let thr = general_threshold(&nonzero).unwrap();
        if !(0.05..=10.0).contains(&thr) {
            continue;
        }
        // a finite horizon can only witness convergence when the slowest
        // stable mode decays at a usable rate
        let stable_margin = exact_consensus_test_identical(&agent, &g, 1.2 * thr)
            .unwrap()
            .max_real_part;
        if stable_margin > -0.05 {
            continue;
        }
        tested += 1;
        let x0: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-5.0..5.0)).collect();

        for (factor, expect) in [(1.2, true), (0.8, false)] {
            let k = factor * thr;
            let verdict = exact_consensus_test_identical(&agent, &g, k).unwrap();
            assert_eq!(verdict.achieved, expect, "spectral verdict at {factor} x threshold");

            let spec =
                NetworkSpec::new(agent.clone(), g.clone(), vec![k; n], x0.clone()).unwrap();
            let decay = verdict.max_real_part.abs().max(0.05);
            let opts = SimOptions {
                t_end: (12.0 / decay).clamp(20.0, 240.0),
                dt: 5e-3,
                tol_conv: 1e-2,
            };
            match simulate(&spec, &opts) {
                Ok(trace) => {
                    assert_eq!(
                        trace.converged, expect,
                        "sim vs exact at {factor} x threshold: e(end) = {}",
                        trace.e.last().unwrap()
                    );
                    if trace.converged {
                        // realized states land on the predicted consensus vector
                        let c_end = trace.c_pred.as_ref().unwrap().last().unwrap().clone();
                        let c_norm =
                            c_end.iter().map(|x| x * x).sum::<f64>().sqrt();
                        let err = trace.final_error_to_c.unwrap();
                        assert!(
                            err <= 1e-2 * (1.0 + c_norm),
                            "converged but off the consensus vector: {err}"
                        );
                    }
                }
                Err(passinet::Error::Diverged { .. }) => {
                    assert!(!expect, "stable run hit the divergence guard")
                }
                Err(e) => panic!("simulation failure: {e}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Laplace rows sum to zero exactly and nonzero eigenvalues sit in the
    /// closed right half-plane for arbitrary digraphs.
    #[test]
    fn laplace_structure_holds(arcs in proptest::collection::vec((1usize..=6, 1usize..=6, 0.1f64..3.0), 0..18)) {
        let filtered: Vec<_> = {
            let mut seen = std::collections::HashSet::new();
            arcs.into_iter()
                .filter(|(s, d, _)| s != d && seen.insert((*s, *d)))
                .collect()
        };
        let g = WeightedDigraph::new(6, filtered).unwrap();
        let l = g.laplace_matrix();
        for i in 0..6 {
            let row_sum: f64 = (0..6).map(|j| l[(i, j)].re).sum();
            let row_scale: f64 = (0..6).map(|j| l[(i, j)].re.abs()).sum();
            // the diagonal is the rounded sum of the row weights, so the
            // residual is pure floating-point cancellation
            prop_assert!(row_sum.abs() <= 1e-13 * row_scale.max(1.0));
        }
        let tol = digraph::zero_eigenvalue_tol(&l);
        for z in linalg::eigenvalues(&l).unwrap() {
            if z.norm() >= tol {
                prop_assert!(z.re > -1e-10);
            }
        }
    }

    /// Gain split k * k' reconstructs the vector and k' has unit norm.
    #[test]
    fn gain_assignment_reconstructs(gains in proptest::collection::vec(0.01f64..100.0, 1..8)) {
        let ga = GainAssignment::new(gains.clone()).unwrap();
        let norm: f64 = ga.k_prime().iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        for (orig, (kp, k)) in gains.iter().zip(ga.k_prime().iter().zip(std::iter::repeat(ga.k()))) {
            prop_assert!((orig - kp * k).abs() <= 1e-12 * orig.max(1.0));
        }
    }

    /// Polynomial division reconstructs the dividend pointwise.
    #[test]
    fn poly_div_rem_reconstructs(
        num in proptest::collection::vec(-5.0f64..5.0, 1..7),
        den in proptest::collection::vec(-5.0f64..5.0, 1..5),
        s_re in -2.0f64..2.0,
        s_im in -2.0f64..2.0,
    ) {
        let p = Polynomial::from_real(&num);
        let d = Polynomial::from_real(&den);
        prop_assume!(!d.is_zero());
        let (q, r) = p.div_rem(&d).unwrap();
        let s = Complex64::new(s_re, s_im);
        let lhs = p.eval(s);
        let rhs = q.eval(s) * d.eval(s) + r.eval(s);
        let scale = 1.0 + lhs.norm() + q.eval(s).norm() * d.eval(s).norm();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * scale);
    }

    /// Network files survive a serialize/parse round trip bit-exactly.
    #[test]
    fn network_file_round_trip(
        gains in proptest::collection::vec(0.001f64..1000.0, 3),
        x0 in proptest::collection::vec(-1000.0f64..1000.0, 6),
        w in 0.001f64..100.0,
    ) {
        let file = NetworkFile {
            agent: passinet::netfile::AgentBlock {
                a: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                b: vec![vec![2.0], vec![0.0]],
                c: vec![vec![0.5], vec![0.5]],
                g: vec![1.0],
            },
            graph: passinet::netfile::GraphBlock {
                n: 3,
                arcs: vec![(2, 1, w), (3, 2, w), (3, 1, w)],
            },
            gains: Some(gains),
            x0: Some(x0),
            sim: None,
        };
        let reparsed = NetworkFile::parse_str(&file.to_json_string()).unwrap();
        prop_assert_eq!(file, reparsed);
    }
}
