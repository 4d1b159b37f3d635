//! Shared generators and oracles for the integration suites.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qmac_core::linalg::{Ket, Operator, Povm};
use qmac_core::lp::{simplex_solve, LpProblem};
use qmac_core::mac::{mac_from_quantum_strategy, validate_mac, MacShape, QuantumStrategy};
use qmac_core::strategies::{mixture_to_mac, strategy_to_mac, DeterministicStrategy, Encoding, StrategyMixture};
use qmac_core::witness::{encoding_payoff_table, Witness};
use qmac_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POVM_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A runner with a fixed seed so acceptance output is reproducible.
pub fn fixed_runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn complex_vector(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Orthonormal basis by Gram–Schmidt; `None` if the draw is degenerate.
pub fn orthonormal_basis(vectors: &[Vec<Complex64>]) -> Option<Vec<Ket>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let proj: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let norm = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        basis.push(w.into_iter().map(|a| a / norm).collect());
    }
    basis.into_iter().map(|v| Ket::normalized(v).ok()).collect()
}

pub fn random_basis(dim: usize) -> impl Strategy<Value = Vec<Ket>> {
    prop::collection::vec(complex_vector(dim), dim).prop_filter_map("degenerate draw", |v| orthonormal_basis(&v))
}

pub fn qubit_ket() -> impl Strategy<Value = Ket> {
    (0.0f64..PI, 0.0f64..2.0 * PI).prop_map(|(theta, phi)| {
        Ket::normalized(vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ])
        .expect("unit vector")
    })
}

/// Σ effects = I for a basis measurement, and outcome probabilities of a
/// random pure state sum to one.
pub fn povm_completeness_property(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(1usize..=3).prop_flat_map(|q| (random_basis(1 << q), complex_vector(1 << q))), |(basis, psi)| {
            let dim = basis[0].dim();
            let povm = Povm::from_basis(&basis).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let mut sum = Operator::zeros(dim);
            for e in povm.effects() {
                sum = sum.add(e).unwrap();
            }
            prop_assert!(sum.max_abs_diff(&Operator::identity(dim)).unwrap() <= POVM_TOL);
            let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let ket = Ket::normalized(psi.iter().map(|a| a / norm).collect()).unwrap();
            let rho = qmac_core::linalg::DensityOperator::pure(&ket).unwrap();
            let total: f64 = povm.probabilities(&rho).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() <= POVM_TOL);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Channels built from random qubit encodings and a random basis
/// measurement are normalized and valid.
pub fn mac_normalization_property(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (1usize..=3, 2usize..=4).prop_flat_map(|(k, n)| {
        (prop::collection::vec(prop::collection::vec(qubit_ket(), n), k), random_basis(1 << k))
    });
    runner
        .run(&strategy, |(encodings, basis)| {
            let qs = QuantumStrategy::new(encodings, Povm::from_basis(&basis).unwrap()).unwrap();
            let mac = mac_from_quantum_strategy(&qs).unwrap();
            let shape = mac.shape().clone();
            for c in 0..shape.columns() {
                let total: f64 = mac.column(c).iter().sum();
                prop_assert!((total - 1.0).abs() <= NORMALIZATION_TOL);
            }
            prop_assert!(validate_mac(&mac).is_valid());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Random deterministic strategy for a shape given as input cardinalities
/// and an output count.
pub fn deterministic_strategy(inputs: Vec<usize>, outputs: usize) -> impl Strategy<Value = DeterministicStrategy> {
    let k = inputs.len();
    let encodings: Vec<_> = inputs.iter().map(|&n| prop::collection::vec(0u8..2, n)).collect();
    (encodings, prop::collection::vec(0..outputs, 1 << k)).prop_map(|(bits, decoding)| {
        DeterministicStrategy::new(bits.into_iter().map(|b| Encoding::new(b).unwrap()).collect(), decoding).unwrap()
    })
}

/// mixture_to_mac equals the weighted sum of strategy channels exactly, and
/// exact witness values are linear in the mixture.
pub fn mixture_linearity_property(runner: &mut TestRunner) -> Result<(), String> {
    let inputs = vec![3, 2];
    let outputs = 3;
    let strategy = (
        prop::collection::vec((deterministic_strategy(inputs.clone(), outputs), 1i64..20), 1..6),
        prop::collection::vec(-5i64..6, 3 * 6),
    );
    runner
        .run(&strategy, |(picks, coefficients)| {
            let shape = MacShape::new(inputs.clone(), outputs).unwrap();
            let total: i64 = picks.iter().map(|(_, w)| w).sum();
            let weighted: Vec<(DeterministicStrategy, Rational)> = picks
                .iter()
                .map(|(s, w)| (s.clone(), Rational::new((*w).into(), total.into())))
                .collect();
            let mix = mixture_to_mac(&StrategyMixture::new(weighted.clone()).unwrap(), &shape).unwrap();
            let mut expected = vec![Rational::zero(); shape.entries()];
            for (s, w) in &weighted {
                let m = strategy_to_mac(s, &shape).unwrap();
                for (e, p) in expected.iter_mut().zip(m.exact().unwrap()) {
                    *e += w * p;
                }
            }
            prop_assert_eq!(mix.exact().unwrap(), &expected[..]);
            let w = Witness::from_integers("random", shape.clone(), &coefficients).unwrap();
            let value = qmac_core::witness::witness_value_exact(&w, &mix).unwrap().unwrap();
            let parts: Rational = weighted
                .iter()
                .map(|(s, wt)| {
                    let m = strategy_to_mac(s, &shape).unwrap();
                    wt * qmac_core::witness::witness_value_exact(&w, &m).unwrap().unwrap()
                })
                .sum();
            prop_assert_eq!(value, parts);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Every simplex answer on a random small system verifies exactly, and a
/// system built around a nonnegative point is reported feasible.
pub fn certificate_property(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (1usize..5, 1usize..7).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..4, n), m),
            prop::collection::vec(0i64..4, n),
            prop::collection::vec(-6i64..7, m),
            any::<bool>(),
        )
    });
    runner
        .run(&strategy, |(matrix, q0, random_b, planted)| {
            let a: Vec<Vec<Rational>> = matrix.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let b: Vec<Rational> = if planted {
                matrix.iter().map(|r| int(r.iter().zip(&q0).map(|(x, y)| x * y).sum())).collect()
            } else {
                random_b.iter().map(|&v| int(v)).collect()
            };
            let lp = LpProblem::from_dense(&a, b).unwrap();
            let res = simplex_solve(&lp).unwrap();
            prop_assert!(res.verify(&lp));
            if planted {
                prop_assert!(res.is_feasible());
            }
            // Deterministic: the same input gives the same certificate.
            prop_assert_eq!(simplex_solve(&lp).unwrap(), res);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// `count` encoding triples for the SHIFT shape, drawn from all 16
/// encodings per sender with a fixed seed.
pub fn random_shift_tuples(count: usize, seed: u64) -> Vec<Vec<Encoding>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..3).map(|_| Encoding::from_code(rng.gen_range(0..16), 4)).collect())
        .collect()
}

/// Best total over all 8^8 decodings for a fixed encoding triple, found by
/// splitting the messages by the first sender's bit: the two halves share
/// no input tuple, so each half is searched over its 8^4 decodings directly.
pub fn half_split_oracle(w: &Witness, encodings: &[Encoding]) -> Rational {
    let shape = w.shape();
    let exact: Vec<i64> = w
        .exact()
        .expect("exact witness")
        .iter()
        .map(|r| r.to_integer().try_into().expect("small integer coefficient"))
        .collect();
    let columns = shape.columns();
    let message = |col: usize| {
        let x = shape.unflatten(col);
        encodings.iter().zip(&x).fold(0usize, |acc, (e, &xi)| (acc << 1) | e.apply(xi) as usize)
    };
    let messages: Vec<usize> = (0..columns).map(message).collect();
    let mut total = 0i64;
    for half in 0..2 {
        let mut best: Option<i64> = None;
        for d in 0..8usize.pow(4) {
            let decode = |m: usize| (d >> (3 * (m & 3))) & 7;
            let value: i64 = messages
                .iter()
                .enumerate()
                .filter(|(_, &m)| m >> 2 == half)
                .map(|(col, &m)| exact[decode(m) * columns + col])
                .sum();
            if best.is_none_or(|b| value > b) {
                best = Some(value);
            }
        }
        total += best.expect("nonempty search");
    }
    Rational::from_integer(total.into())
}

/// Decomposed totals equal the half-split oracle on sampled triples.
pub fn decomposition_matches_oracle(w: &Witness, tuples: &[Vec<Encoding>]) -> Result<(), String> {
    for t in tuples {
        let fast = encoding_payoff_table(w, t).map_err(|e| e.to_string())?.total;
        let slow = half_split_oracle(w, t);
        if fast != slow {
            let names: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            return Err(format!("tuple {names:?}: decomposed {fast}, oracle {slow}"));
        }
    }
    Ok(())
}
