//! The optimized right-hand-side evaluation against the brute-force
//! nested-sum oracle, on every small configuration and on randomized states.

mod common;

use common::{max_abs_diff, random_state, OracleModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taxkin::kinetics::{EnforcementParams, ModelConfig, TransitionTensors};

fn small_config(n: usize, m: usize) -> (ModelConfig, Vec<f64>, Vec<f64>) {
    let r: Vec<f64> = (1..=n).map(|j| 10.0 * j as f64).collect();
    let tau: Vec<f64> = (0..n)
        .map(|j| 0.23 + j as f64 / (n - 1) as f64 * 0.20)
        .collect();
    let theta_ev: Vec<f64> = match m {
        1 => vec![0.5],
        2 => vec![1.0, 0.25],
        _ => (0..m).map(|a| 1.0 - a as f64 / m as f64).collect(),
    };
    let weights = vec![1.0 / m as f64; m];
    let cfg = ModelConfig::new(r.clone(), 0.1, tau.clone(), theta_ev.clone(), weights).unwrap();
    (cfg, tau, theta_ev)
}

#[test]
fn c_tensor_matches_literal_transcription_on_three_classes() {
    let (cfg, tau, theta_ev) = small_config(3, 1);
    let enf = EnforcementParams::new(0.25, 1.85).unwrap();
    let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
    let oracle = OracleModel::new(cfg.r(), cfg.s(), &tau, &theta_ev, 1.85);
    for audited in [false, true] {
        let th = if audited {
            &oracle.theta_audited
        } else {
            &oracle.theta
        };
        for h in 0..3 {
            for k in 0..3 {
                for j in 0..3 {
                    let ours = tensors.c_value((h, 0), (k, 0), (j, 0), audited);
                    let reference = oracle.c(th, h, 0, k, 0, j, 0);
                    assert!(
                        (ours - reference).abs() <= 1e-15,
                        "C mismatch at h={h} k={k} j={j} audited={audited}: {ours} vs {reference}"
                    );
                }
            }
        }
    }
}

#[test]
fn c_tensor_matches_on_multi_sector_configs() {
    for (n, m) in [(3usize, 2usize), (4, 2), (5, 3)] {
        let (cfg, tau, theta_ev) = small_config(n, m);
        let enf = EnforcementParams::new(0.5, 1.4).unwrap();
        let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
        let oracle = OracleModel::new(cfg.r(), cfg.s(), &tau, &theta_ev, 1.4);
        for audited in [false, true] {
            let th = if audited {
                &oracle.theta_audited
            } else {
                &oracle.theta
            };
            for h in 0..n {
                for b in 0..m {
                    for k in 0..n {
                        for g in 0..m {
                            for j in 0..n {
                                for a in 0..m {
                                    let ours = tensors.c_value((h, b), (k, g), (j, a), audited);
                                    let reference = oracle.c(th, h, b, k, g, j, a);
                                    assert!(
                                        (ours - reference).abs() <= 1e-15,
                                        "n={n} m={m} ({h},{b});({k},{g})->({j},{a})"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn t_values_match_literal_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (cfg, tau, theta_ev) = small_config(4, 2);
    let enf = EnforcementParams::new(0.25, 1.85).unwrap();
    let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
    let oracle = OracleModel::new(cfg.r(), cfg.s(), &tau, &theta_ev, 1.85);
    for _ in 0..5 {
        let x = random_state(&mut rng, 4, 2);
        for audited in [false, true] {
            let th = if audited {
                &oracle.theta_audited
            } else {
                &oracle.theta
            };
            for h in 0..4 {
                for b in 0..2 {
                    for k in 0..4 {
                        for g in 0..2 {
                            let ours = tensors.t_values((h, b), (k, g), &x, audited).unwrap();
                            for j in 0..4 {
                                for a in 0..2 {
                                    let reference = oracle.t(th, h, b, k, g, j, a, &x);
                                    assert!(
                                        (ours[j * 2 + a] - reference).abs() <= 1e-15,
                                        "T mismatch at ({h},{b});({k},{g})->({j},{a})"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn rhs_matches_oracle_on_all_small_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in [3usize, 4] {
        for m in [1usize, 2] {
            let (cfg, tau, theta_ev) = small_config(n, m);
            let sigma = 0.25;
            let xi = 1.85;
            let enf = EnforcementParams::new(sigma, xi).unwrap();
            let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
            let oracle = OracleModel::new(cfg.r(), cfg.s(), &tau, &theta_ev, xi);
            for _ in 0..20 {
                let x = random_state(&mut rng, n, m);
                let base = tensors.rhs_base(&x).unwrap();
                let base_ref = oracle.rhs_base(&x);
                let d = max_abs_diff(&base, &base_ref);
                assert!(d <= 1e-12, "base rhs differs by {d} at n={n} m={m}");
                let audit = tensors.rhs_audit(&enf, &x).unwrap();
                let audit_ref = oracle.rhs_audit(sigma, &x);
                let d = max_abs_diff(&audit, &audit_ref);
                assert!(d <= 1e-12, "audit rhs differs by {d} at n={n} m={m}");
            }
        }
    }
}

#[test]
fn rhs_matches_oracle_on_paper_scale_config() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let r: Vec<f64> = (1..=9).map(|j| 25.0 * j as f64).collect();
    let tau: Vec<f64> = (0..9).map(|j| 0.23 + j as f64 / 8.0 * 0.20).collect();
    let theta_ev = vec![1.0, 0.5, 0.25];
    let cfg = ModelConfig::new(r.clone(), 0.1, tau.clone(), theta_ev.clone(), vec![1.0 / 3.0; 3])
        .unwrap();
    let enf = EnforcementParams::new(8.0 / 56.0, 1.55).unwrap();
    let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
    let oracle = OracleModel::new(&r, 0.1, &tau, &theta_ev, 1.55);
    for _ in 0..3 {
        let x = random_state(&mut rng, 9, 3);
        let audit = tensors.rhs_audit(&enf, &x).unwrap();
        let audit_ref = oracle.rhs_audit(8.0 / 56.0, &x);
        let d = max_abs_diff(&audit, &audit_ref);
        assert!(d <= 1e-12, "audit rhs differs by {d}");
    }
}

#[test]
fn two_class_single_sector_rhs_vanishes_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = ModelConfig::new(vec![10.0, 20.0], 0.1, vec![0.2, 0.4], vec![0.6], vec![1.0]).unwrap();
    let enf = EnforcementParams::new(0.3, 1.7).unwrap();
    let tensors = TransitionTensors::build(&cfg, &enf).unwrap();
    let oracle = OracleModel::new(cfg.r(), 0.1, cfg.tau(), cfg.theta_ev(), 1.7);
    for _ in 0..20 {
        let x = random_state(&mut rng, 2, 1);
        for v in tensors.rhs_base(&x).unwrap() {
            assert!(v.abs() <= 1e-15, "base rhs component {v}");
        }
        for v in tensors.rhs_audit(&enf, &x).unwrap() {
            assert!(v.abs() <= 1e-15, "audit rhs component {v}");
        }
        for v in oracle.rhs_audit(0.3, &x) {
            assert!(v.abs() <= 1e-15, "oracle rhs component {v}");
        }
    }
}
