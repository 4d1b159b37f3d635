//! The three channel families: the two-sender PBR channel, the polygon
//! channels, and the three-sender SHIFT channel.
//!
//! Bit-string inputs and outputs are packed into integers with the first
//! bit most significant, so the 2-bit input `x₁x₂` is `2·x₁ + x₂` and the
//! 3-bit output `a₁a₂a₃` is `4·a₁ + 2·a₂ + a₃`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{projector, Ket, Operator, Povm, TensorProduct};
use crate::mac::{mac_from_quantum_strategy, rational, Mac, MacShape, QuantumStrategy};

#[inline]
fn bit(value: usize, width: usize, position: usize) -> usize {
    (value >> (width - 1 - position)) & 1
}

fn bell_like(terms: &[(Ket, Ket)]) -> Ket {
    let mut acc: Option<Ket> = None;
    for (a, b) in terms {
        let t = a.tensor(b);
        acc = Some(match acc {
            None => t,
            Some(s) => s.add(&t).expect("two-qubit terms"),
        });
    }
    acc.expect("non-empty").scaled(FRAC_1_SQRT_2.into())
}

pub fn pbr_shape() -> MacShape {
    MacShape::new(vec![4, 4], 4).expect("static shape")
}

/// p(a|x,y) = ½ if a = x⊕y, 0 if a = ¬(x⊕y), ¼ otherwise, stored exactly.
pub fn build_pbr_mac() -> Mac {
    let shape = pbr_shape();
    let mut exact = Vec::with_capacity(shape.entries());
    for a in 0..4 {
        for x in 0..4 {
            for y in 0..4 {
                let xor = x ^ y;
                exact.push(if a == xor {
                    rational(1, 2)
                } else if a == xor ^ 0b11 {
                    rational(0, 1)
                } else {
                    rational(1, 4)
                });
            }
        }
    }
    Mac::from_exact(shape, exact).expect("PBR channel is stochastic")
}

/// The entangled decoding basis, indexed as listed:
/// (|01⟩+|10⟩)/√2, (|0−⟩+|1+⟩)/√2, (|+1⟩+|−0⟩)/√2, (|+−⟩+|−+⟩)/√2.
fn pbr_basis() -> [Ket; 4] {
    let (k0, k1, kp, km) = (Ket::zero(), Ket::one(), Ket::plus(), Ket::minus());
    [
        bell_like(&[(k0.clone(), k1.clone()), (k1.clone(), k0.clone())]),
        bell_like(&[(k0.clone(), km.clone()), (k1.clone(), kp.clone())]),
        bell_like(&[(kp.clone(), k1), (km.clone(), k0)]),
        bell_like(&[(kp.clone(), km.clone()), (km, kp)]),
    ]
}

/// Qubit strategy realizing [`build_pbr_mac`].
///
/// Sender 1 encodes 00,01,10,11 as |0⟩,|+⟩,|−⟩,|1⟩ and sender 2 as
/// |0⟩,|−⟩,|+⟩,|1⟩. The receiver measures in the entangled basis of
/// [`pbr_basis`] and announces
/// (|+−⟩+|−+⟩)/√2 ↦ 00, (|0−⟩+|1+⟩)/√2 ↦ 01, (|+1⟩+|−0⟩)/√2 ↦ 10,
/// (|01⟩+|10⟩)/√2 ↦ 11.
pub fn pbr_strategy() -> QuantumStrategy {
    let (k0, k1, kp, km) = (Ket::zero(), Ket::one(), Ket::plus(), Ket::minus());
    let [psi_11, psi_0m, psi_p1, psi_pm] = pbr_basis();
    let povm = Povm::from_basis(&[psi_pm, psi_0m, psi_p1, psi_11]).expect("orthonormal basis");
    QuantumStrategy::new(
        vec![
            vec![k0.clone(), kp.clone(), km.clone(), k1.clone()],
            vec![k0, km, kp, k1],
        ],
        povm,
    )
    .expect("valid strategy")
}

/// The alternative assignment 00,01,10,11 ↦ |0⟩,|1⟩,|+⟩,|−⟩ (sender 1),
/// |0⟩,|1⟩,|−⟩,|+⟩ (sender 2), decoding (|0−⟩+|1+⟩)/√2 ↦ 00,
/// (|+−⟩+|−+⟩)/√2 ↦ 01. It uses the same states and basis as
/// [`pbr_strategy`] but yields a relabeled channel, not [`build_pbr_mac`].
pub fn pbr_strategy_as_printed() -> QuantumStrategy {
    let (k0, k1, kp, km) = (Ket::zero(), Ket::one(), Ket::plus(), Ket::minus());
    let [psi_11, psi_0m, psi_p1, psi_pm] = pbr_basis();
    let povm = Povm::from_basis(&[psi_0m, psi_pm, psi_p1, psi_11]).expect("orthonormal basis");
    QuantumStrategy::new(
        vec![
            vec![k0.clone(), k1.clone(), kp.clone(), km.clone()],
            vec![k0, k1, km, kp],
        ],
        povm,
    )
    .expect("valid strategy")
}

/// Bloch angle of polygon vertex `u`: θᵤ = 2πu/m on the xz great circle.
pub fn polygon_angle(u: usize, m: usize) -> f64 {
    2.0 * PI * u as f64 / m as f64
}

fn phi_plus() -> Ket {
    bell_like(&[(Ket::zero(), Ket::zero()), (Ket::one(), Ket::one())])
}

pub fn polygon_strategy(m: usize) -> Result<QuantumStrategy> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("polygon needs m ≥ 3, got {m}")));
    }
    let vertices: Vec<Ket> = (0..m).map(|u| Ket::xz_circle(polygon_angle(u, m))).collect();
    let hit = projector(&phi_plus(), true)?;
    let miss = Operator::identity(4).sub(&hit)?;
    let povm = Povm::new(vec![hit, miss])?;
    QuantumStrategy::new(vec![vertices.clone(), vertices], povm)
}

/// Binary-output channel p(0|x,y) = ⟨φ⁺|ρₓ ⊗ ρ_y|φ⁺⟩ with ρᵤ at θᵤ = 2πu/m.
pub fn build_polygon_mac(m: usize) -> Result<Mac> {
    mac_from_quantum_strategy(&polygon_strategy(m)?)
}

/// Closed forms of the polygon witness values on [`build_polygon_mac`].
pub fn polygon_quantum_closed_form(m: usize) -> Option<f64> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    Some(match m {
        5 => 15.0 * (s5 - 1.0) / 4.0,
        6 => 6.75,
        7 => 3.5 * (-1.0 + (PI / 7.0).cos() + (PI / 14.0).sin() + (3.0 * PI / 14.0).sin()),
        8 => 12.0 * s2 - 8.0,
        9 => {
            s3 / 2.0 * ((PI / 18.0).cos() - (PI / 9.0).sin())
                + 3.0 * ((PI / 9.0).cos() + (PI / 18.0).sin())
                + s3 * (2.0 * PI / 9.0).sin()
                - 2.25
        }
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftConstants {
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl ShiftConstants {
    pub fn new() -> Self {
        Self {
            zeta_plus: 0.5 * (1.0 + FRAC_1_SQRT_2),
            zeta_minus: 0.5 * (1.0 - FRAC_1_SQRT_2),
        }
    }
}

impl Default for ShiftConstants {
    fn default() -> Self {
        Self::new()
    }
}

pub fn shift_shape() -> MacShape {
    MacShape::new(vec![4, 4, 4], 8).expect("static shape")
}

/// Encoding state for the 2-bit input `s₁s₂`: Bloch vector
/// ((−1)^{s₂}/√2, 0, (−1)^{s₁}/√2).
pub fn shift_encoding(s: usize) -> Ket {
    let z = if bit(s, 2, 0) == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let x = if bit(s, 2, 1) == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Ket::xz_circle(x.atan2(z))
}

/// The SHIFT product basis in output order 000…111:
/// |000⟩, |01−⟩, |1−0⟩, |+01⟩, |−01⟩, |1+0⟩, |01+⟩, |111⟩.
pub fn shift_basis() -> [Ket; 8] {
    let (k0, k1, kp, km) = (Ket::zero(), Ket::one(), Ket::plus(), Ket::minus());
    let t = |a: &Ket, b: &Ket, c: &Ket| a.tensor(b).tensor(c);
    [
        t(&k0, &k0, &k0),
        t(&k0, &k1, &km),
        t(&k1, &km, &k0),
        t(&kp, &k0, &k1),
        t(&km, &k0, &k1),
        t(&k1, &kp, &k0),
        t(&k0, &k1, &kp),
        t(&k1, &k1, &k1),
    ]
}

pub fn shift_strategy() -> QuantumStrategy {
    let encodings: Vec<Ket> = (0..4).map(shift_encoding).collect();
    let povm = Povm::from_basis(&shift_basis()).expect("SHIFT basis is orthonormal");
    QuantumStrategy::new(vec![encodings.clone(), encodings.clone(), encodings], povm).expect("valid strategy")
}

pub fn build_shift_mac() -> Mac {
    mac_from_quantum_strategy(&shift_strategy()).expect("SHIFT channel is stochastic")
}

/// The agreement count η(a, x, y, z) ∈ {0,1,2,3}, case-split on which bits
/// of the 3-bit output coincide.
pub fn shift_eta(a: usize, x: usize, y: usize, z: usize) -> u32 {
    let (a1, a2, a3) = (bit(a, 3, 0), bit(a, 3, 1), bit(a, 3, 2));
    let (x1, x2) = (bit(x, 2, 0), bit(x, 2, 1));
    let (y1, y2) = (bit(y, 2, 0), bit(y, 2, 1));
    let (z1, z2) = (bit(z, 2, 0), bit(z, 2, 1));
    let d = |p: usize, q: usize| u32::from(p == q);
    if a1 == a2 && a2 == a3 {
        d(x1, a1) + d(y1, a2) + d(z1, a3)
    } else if a1 == a2 {
        d(x1, 0) + d(y1, 1) + d(z2, a3)
    } else if a1 == a3 {
        d(x1, 1) + d(y2, a2) + d(z1, 0)
    } else {
        d(x2, a1) + d(y1, 0) + d(z1, 1)
    }
}

/// ζ₊^η ζ₋^(3−η).
pub fn shift_compact_probability(a: usize, x: usize, y: usize, z: usize) -> f64 {
    let k = ShiftConstants::new();
    let eta = shift_eta(a, x, y, z) as i32;
    k.zeta_plus.powi(eta) * k.zeta_minus.powi(3 - eta)
}

pub fn build_shift_mac_compact() -> Mac {
    let shape = shift_shape();
    let mut probabilities = Vec::with_capacity(shape.entries());
    for a in 0..8 {
        for column in 0..shape.columns() {
            let xs = shape.unflatten(column);
            probabilities.push(shift_compact_probability(a, xs[0], xs[1], xs[2]));
        }
    }
    Mac::from_probabilities(shape, probabilities).expect("compact SHIFT channel is stochastic")
}

/// 10(5√2 − 6), the SHIFT witness value of [`build_shift_mac`].
pub fn shift_quantum_closed_form() -> f64 {
    10.0 * (5.0 * 2f64.sqrt() - 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::validate_mac;
    use num_traits::Zero;

    #[test]
    fn pbr_exact_entries() {
        let mac = build_pbr_mac();
        let shape = mac.shape().clone();
        let at = |a, x, y| mac.exact_at(a, shape.flatten(&[x, y])).unwrap().clone();
        assert!(at(0b11, 0, 0).is_zero());
        assert_eq!(at(0b00, 3, 3), rational(1, 2));
        assert_eq!(at(0b01, 0, 0), rational(1, 4));
        let col = shape.flatten(&[0b10, 0b01]);
        let total: crate::Rational = (0..4).map(|a| mac.exact_at(a, col).unwrap().clone()).sum();
        assert_eq!(total, rational(1, 1));
    }

    #[test]
    fn pbr_strategy_realizes_table() {
        let direct = mac_from_quantum_strategy(&pbr_strategy()).unwrap();
        let built = build_pbr_mac();
        assert!(direct.max_abs_diff(&built).unwrap() < 1e-12);
        assert!((direct.prob(0, &[0, 0]) - 0.5).abs() < 1e-12);
        assert!(direct.prob(3, &[0, 0]).abs() < 1e-12);
        assert!((direct.prob(1, &[0, 0]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn printed_assignment_gives_a_different_channel() {
        let printed = mac_from_quantum_strategy(&pbr_strategy_as_printed()).unwrap();
        assert!(validate_mac(&printed).is_valid());
        assert!(printed.max_abs_diff(&build_pbr_mac()).unwrap() > 0.2);
        // same value multiset per column: one ½, two ¼, one 0
        for col in 0..16 {
            let mut column = printed.column(col);
            column.sort_by(f64::total_cmp);
            let want = [0.0, 0.25, 0.25, 0.5];
            for (got, w) in column.iter().zip(want) {
                assert!((got - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polygon_examples() {
        for m in 3..10 {
            let mac = build_polygon_mac(m).unwrap();
            for x in 0..m {
                assert!((mac.prob(0, &[x, x]) - 0.5).abs() < 1e-12);
            }
        }
        let mac = build_polygon_mac(4).unwrap();
        assert!(mac.prob(0, &[0, 2]).abs() < 1e-12);
        assert!(matches!(build_polygon_mac(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn polygon_matches_cosine_formula() {
        let m = 7;
        let mac = build_polygon_mac(m).unwrap();
        for x in 0..m {
            for y in 0..m {
                let want = (1.0 + (polygon_angle(x, m) - polygon_angle(y, m)).cos()) / 4.0;
                assert!((mac.prob(0, &[x, y]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_constants_sum_to_one() {
        let k = ShiftConstants::new();
        assert!((k.zeta_plus + k.zeta_minus - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn shift_first_column() {
        let k = ShiftConstants::new();
        let mac = build_shift_mac();
        let (p, m) = (k.zeta_plus, k.zeta_minus);
        let want = [p * p * p, m * m * p, m * m * p, p * p * m, m * m * p, p * p * m, p * p * m, m * m * m];
        for (a, w) in want.iter().enumerate() {
            assert!((mac.prob(a, &[0, 0, 0]) - w).abs() < 1e-12, "a = {a:03b}");
        }
        assert!((p * p * p - 0.621_859_216_769_114_5).abs() < 1e-15);
    }

    #[test]
    fn shift_eta_cases() {
        assert_eq!(shift_eta(0b000, 0, 0, 0), 3);
        assert_eq!(shift_eta(0b111, 0, 0, 0), 0);
        // a₁ = a₂ ≠ a₃: δ(x₁,0) + δ(y₁,1) + δ(z₂,a₃)
        assert_eq!(shift_eta(0b001, 0, 0, 0), 1);
        assert_eq!(shift_eta(0b001, 0, 0b10, 0b01), 3);
    }

    #[test]
    fn shift_encodings_are_real_and_on_the_circle() {
        for s in 0..4 {
            let k = shift_encoding(s);
            assert_eq!(k.max_imaginary(), 0.0);
            let a = k.amplitudes();
            let z = a[0].re * a[0].re - a[1].re * a[1].re;
            let x = 2.0 * a[0].re * a[1].re;
            let sign = |b| if b == 0 { 1.0 } else { -1.0 };
            assert!((z - sign(s >> 1) * FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((x - sign(s & 1) * FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }
}
