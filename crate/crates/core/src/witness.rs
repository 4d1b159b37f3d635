//! Linear witnesses on channels and their exact classical bounds.
//!
//! A witness assigns a coefficient to every entry p(a | x⃗). Classical
//! correlated strategies are convex mixtures of deterministic ones and a
//! witness is linear, so its maximum over the classical set is attained at a
//! deterministic strategy. Mixtures are never enumerated.
//!
//! For a fixed encoding tuple every input tuple is sent to one K-bit message,
//! and the decoder's choice for one message does not interact with any other.
//! The best decoder therefore picks, per message, the output with the largest
//! summed coefficient. The bound is the maximum of these totals over encoding
//! tuples.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{shift_eta, shift_shape};
use crate::mac::{format_decimal, parse_decimals, parse_rationals, rational_to_f64, Mac, MacShape, TableFile};
use crate::mac::{serialize_display, serialize_display_all, FLATTENING_TAG, WITNESS_FORMAT};
use crate::strategies::{DeterministicStrategy, Encoding, EncodingFamily, StrategySpace, DEFAULT_STRATEGY_CAP};
use crate::Rational;

/// A quantum value counts as a violation only above bound + this margin.
pub const VIOLATION_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    id: String,
    shape: MacShape,
    coefficients: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl Witness {
    pub fn from_exact(id: impl Into<String>, shape: MacShape, exact: Vec<Rational>) -> Result<Self> {
        if exact.len() != shape.entries() {
            return Err(Error::DimensionMismatch { expected: shape.entries(), found: exact.len() });
        }
        let coefficients = exact.iter().map(rational_to_f64).collect();
        Ok(Self { id: id.into(), shape, coefficients, exact: Some(exact) })
    }

    pub fn from_integers(id: impl Into<String>, shape: MacShape, coefficients: &[i64]) -> Result<Self> {
        Self::from_exact(id, shape, coefficients.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn from_floats(id: impl Into<String>, shape: MacShape, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != shape.entries() {
            return Err(Error::DimensionMismatch { expected: shape.entries(), found: coefficients.len() });
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("witness coefficient {bad} is not finite")));
        }
        Ok(Self { id: id.into(), shape, coefficients, exact: None })
    }

    pub fn zero(shape: MacShape) -> Self {
        let n = shape.entries();
        Self { id: "zero".into(), shape, coefficients: vec![0.0; n], exact: Some(vec![Rational::zero(); n]) }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn shape(&self) -> &MacShape {
        &self.shape
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn coefficient(&self, output: usize, column: usize) -> f64 {
        self.coefficients[self.shape.entry_index(output, column)]
    }

    /// Exact coefficients; decimal ones are converted to the rational they denote.
    pub fn exact_coefficients(&self) -> Result<Vec<Rational>> {
        match &self.exact {
            Some(e) => Ok(e.clone()),
            None => self
                .coefficients
                .iter()
                .map(|&c| {
                    Rational::from_f64(c)
                        .ok_or_else(|| Error::InvalidArgument(format!("witness coefficient {c} is not finite")))
                })
                .collect(),
        }
    }

    pub fn to_file_string(&self) -> Result<String> {
        let (encoding, entries) = match &self.exact {
            Some(exact) => ("exact", exact.iter().map(|r| r.to_string()).collect()),
            None => ("decimal", self.coefficients.iter().map(|c| format_decimal(*c)).collect()),
        };
        let file = TableFile {
            format: WITNESS_FORMAT.into(),
            id: Some(self.id.clone()),
            shape: self.shape.clone(),
            flattening: FLATTENING_TAG.into(),
            encoding: encoding.into(),
            entries,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        file.check(WITNESS_FORMAT)?;
        let shape = MacShape::new(file.shape.input_cardinalities().to_vec(), file.shape.output_cardinality())?;
        let id = file.id.unwrap_or_else(|| "imported".into());
        match file.encoding.as_str() {
            "exact" => Self::from_exact(id, shape, parse_rationals(&file.entries)?),
            "decimal" => Self::from_floats(id, shape, parse_decimals(&file.entries)?),
            other => Err(Error::Parse(format!("unknown entry encoding {other:?}"))),
        }
    }
}

const POLYGON_W5: [[i64; 5]; 5] = [
    [0, 1, -3, -5, 3],
    [3, 0, 1, -3, -5],
    [-5, 3, 0, 1, -3],
    [-3, -5, 3, 0, 1],
    [1, -3, -5, 3, 0],
];

const POLYGON_W6: [[i64; 6]; 6] = [
    [0, 4, -4, -4, -5, 2],
    [2, 0, 4, -4, -4, -2],
    [-5, 2, 0, 4, -7, -10],
    [-4, -5, 2, 0, 4, -4],
    [-4, -4, -2, 2, 0, 4],
    [4, -7, -4, -5, 2, 0],
];

const POLYGON_W7: [[i64; 7]; 7] = [
    [0, 1, -1, -1, -1, -1, 1],
    [1, 0, 1, -1, -1, -1, -1],
    [-1, 1, 0, 1, -1, -1, -1],
    [-1, -1, 1, 0, 1, -1, -1],
    [-1, -1, -1, 1, 0, 1, -1],
    [-1, -1, -1, -1, 1, 0, 1],
    [1, -1, -1, -1, -1, 1, 0],
];

const POLYGON_W8: [[i64; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 7, 0, -11, 0, -5, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [-5, 0, 1, 0, 7, 0, -11, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [-11, 0, -5, 0, 1, 0, 7, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [7, 0, -11, 0, -5, 0, 1, 0],
];

const POLYGON_W9: [[i64; 9]; 9] = [
    [0, 0, 1, -1, -1, -1, -1, 1, 0],
    [0, 0, 0, 1, -1, -1, -1, -1, 1],
    [1, 0, 0, 0, 1, -1, -1, -1, -1],
    [-1, 1, 0, 0, 0, 1, -1, -1, -1],
    [-1, -1, 1, 0, 0, 0, 1, -1, -1],
    [-1, -1, -1, 1, 0, 0, 0, 1, -1],
    [-1, -1, -1, -1, 1, 0, 0, 0, 1],
    [1, -1, -1, -1, -1, 1, 0, 0, 0],
    [0, 1, -1, -1, -1, -1, 1, 0, 0],
];

/// The m×m integer matrix w[x][y] of the polygon witness, m ∈ 5..=9.
pub fn polygon_witness_matrix(m: usize) -> Result<Vec<Vec<i64>>> {
    fn rows<const N: usize>(t: &[[i64; N]; N]) -> Vec<Vec<i64>> {
        t.iter().map(|r| r.to_vec()).collect()
    }
    match m {
        5 => Ok(rows(&POLYGON_W5)),
        6 => Ok(rows(&POLYGON_W6)),
        7 => Ok(rows(&POLYGON_W7)),
        8 => Ok(rows(&POLYGON_W8)),
        9 => Ok(rows(&POLYGON_W9)),
        _ => Err(Error::InvalidArgument(format!("polygon witnesses exist for m = 5..=9, got {m}"))),
    }
}

/// The polygon witness on the binary-output shape: w[x][y] weighs p(0 | x, y)
/// and outcome 1 carries no weight.
pub fn polygon_witness(m: usize) -> Result<Witness> {
    let matrix = polygon_witness_matrix(m)?;
    let shape = MacShape::new(vec![m, m], 2)?;
    let mut coefficients = vec![0i64; shape.entries()];
    for (x, row) in matrix.iter().enumerate() {
        for (y, &w) in row.iter().enumerate() {
            coefficients[shape.entry_index(0, shape.flatten(&[x, y]))] = w;
        }
    }
    Witness::from_integers(format!("polygon-{m}"), shape, &coefficients)
}

/// Coefficient of the three-sender witness for a given overlap count η.
pub fn shift_witness_coefficient(eta: u32) -> i64 {
    match eta {
        3 => 2,
        2 => -3,
        _ => -2,
    }
}

pub fn shift_witness() -> Witness {
    let shape = shift_shape();
    let mut coefficients = vec![0i64; shape.entries()];
    for column in 0..shape.columns() {
        let x = shape.unflatten(column);
        for a in 0..8 {
            coefficients[shape.entry_index(a, column)] = shift_witness_coefficient(shift_eta(a, x[0], x[1], x[2]));
        }
    }
    Witness::from_integers("shift", shape, &coefficients).expect("shape matches")
}

fn check_shapes(w: &Witness, mac: &Mac) -> Result<()> {
    if w.shape() != mac.shape() {
        return Err(Error::ShapeMismatch(format!(
            "witness {} does not match the channel shape",
            w.id()
        )));
    }
    Ok(())
}

/// Σ_{a,x⃗} w(a, x⃗) p(a | x⃗).
pub fn witness_value(w: &Witness, mac: &Mac) -> Result<f64> {
    check_shapes(w, mac)?;
    Ok(w.coefficients.iter().zip(mac.probabilities()).map(|(c, p)| c * p).sum())
}

/// Exact contraction, available when both sides carry exact entries.
pub fn witness_value_exact(w: &Witness, mac: &Mac) -> Result<Option<Rational>> {
    check_shapes(w, mac)?;
    Ok(match (&w.exact, mac.exact()) {
        (Some(c), Some(p)) => Some(c.iter().zip(p).map(|(c, p)| c * p).sum()),
        _ => None,
    })
}

/// Witness coefficients scaled by a common denominator to machine integers.
struct ScaledWitness {
    shape: MacShape,
    values: Vec<i64>,
    denominator: BigInt,
}

impl ScaledWitness {
    fn new(w: &Witness) -> Result<Self> {
        let exact = w.exact_coefficients()?;
        let denominator = exact.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let values = exact
            .iter()
            .map(|r| {
                let scaled = r.numer() * (&denominator / r.denom());
                scaled.to_i64().filter(|v| v.abs() < 1 << 40).ok_or_else(|| {
                    Error::InvalidArgument("witness coefficients are too large for exact maximization".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape: w.shape.clone(), values, denominator })
    }

    #[inline]
    fn at(&self, a: usize, column: usize) -> i64 {
        self.values[a * self.shape.columns() + column]
    }

    fn unscale(&self, v: i64) -> Rational {
        Rational::new(v.into(), self.denominator.clone())
    }
}

/// Message sent for every column under a fixed encoding tuple.
fn message_table(shape: &MacShape, encodings: &[Encoding]) -> Vec<usize> {
    let k = shape.senders();
    (0..shape.columns())
        .map(|column| {
            let x = shape.unflatten(column);
            encodings
                .iter()
                .zip(&x)
                .enumerate()
                .fold(0, |acc, (i, (e, &xi))| acc | (e.apply(xi) as usize) << (k - 1 - i))
        })
        .collect()
}

/// Per-message, per-output coefficient sums χ(m, a) for one encoding tuple.
fn message_sums(w: &ScaledWitness, messages: &[usize]) -> Vec<Vec<i64>> {
    let outputs = w.shape.output_cardinality();
    let mut sums = vec![vec![0i64; outputs]; 1 << w.shape.senders()];
    for (column, &m) in messages.iter().enumerate() {
        for (a, s) in sums[m].iter_mut().enumerate() {
            *s += w.at(a, column);
        }
    }
    sums
}

/// Best decoding (lowest output on ties) and its total.
fn best_decoding(sums: &[Vec<i64>]) -> (i64, Vec<usize>) {
    let mut total = 0;
    let decoding = sums
        .iter()
        .map(|row| {
            let (best_a, best) = row
                .iter()
                .enumerate()
                .fold((0, row[0]), |(ba, bv), (a, &v)| if v > bv { (a, v) } else { (ba, bv) });
            total += best;
            best_a
        })
        .collect();
    (total, decoding)
}

/// Higher value wins; on ties the lower index wins. Associative and
/// commutative, so parallel reductions are deterministic.
fn better(l: (i64, u128), r: (i64, u128)) -> (i64, u128) {
    match l.0.cmp(&r.0) {
        Ordering::Greater => l,
        Ordering::Less => r,
        Ordering::Equal => {
            if l.1 <= r.1 {
                l
            } else {
                r
            }
        }
    }
}

/// Encoding lists for each sender, by default every possible encoding.
fn sender_families(shape: &MacShape, families: Option<&[EncodingFamily]>) -> Result<Vec<Vec<Encoding>>> {
    match families {
        Some(f) => {
            if f.len() != shape.senders() {
                return Err(Error::ShapeMismatch("one encoding family per sender is required".into()));
            }
            for (fam, &n) in f.iter().zip(shape.input_cardinalities()) {
                if fam.is_empty() || fam.encodings().any(|e| e.inputs() != n) {
                    return Err(Error::ShapeMismatch("encoding family does not fit the sender's inputs".into()));
                }
            }
            Ok(f.iter().map(|fam| fam.encodings().cloned().collect()).collect())
        }
        None => shape
            .input_cardinalities()
            .iter()
            .map(|&n| {
                if n >= 24 {
                    return Err(Error::TooManyStrategies { count: u128::MAX, cap: DEFAULT_STRATEGY_CAP });
                }
                Ok((0..1u128 << n).map(|c| Encoding::from_code(c, n)).collect())
            })
            .collect(),
    }
}

fn tuple_at(lists: &[Vec<Encoding>], mut index: u128) -> (Vec<usize>, Vec<Encoding>) {
    let mut picks = vec![0usize; lists.len()];
    for (slot, list) in picks.iter_mut().zip(lists).rev() {
        *slot = (index % list.len() as u128) as usize;
        index /= list.len() as u128;
    }
    let encodings = picks.iter().zip(lists).map(|(&p, l)| l[p].clone()).collect();
    (picks, encodings)
}

fn tuple_count(lists: &[Vec<Encoding>]) -> Result<u128> {
    let count = lists
        .iter()
        .try_fold(1u128, |acc, l| acc.checked_mul(l.len() as u128))
        .unwrap_or(u128::MAX);
    if count > DEFAULT_STRATEGY_CAP {
        return Err(Error::TooManyStrategies { count, cap: DEFAULT_STRATEGY_CAP });
    }
    Ok(count)
}

/// Exact maximum of the witness over deterministic strategies, with one
/// maximizer. Among equal totals the earliest encoding tuple wins.
pub fn classical_bound(w: &Witness) -> Result<(Rational, DeterministicStrategy)> {
    classical_bound_over(w, None)
}

/// As [`classical_bound`], restricting each sender to the given encodings.
pub fn classical_bound_over(
    w: &Witness,
    families: Option<&[EncodingFamily]>,
) -> Result<(Rational, DeterministicStrategy)> {
    let scaled = ScaledWitness::new(w)?;
    let lists = sender_families(&w.shape, families)?;
    let count = tuple_count(&lists)?;
    let (best, index) = (0..count)
        .into_par_iter()
        .map(|t| {
            let (_, encodings) = tuple_at(&lists, t);
            let sums = message_sums(&scaled, &message_table(&w.shape, &encodings));
            (best_decoding(&sums).0, t)
        })
        .reduce_with(better)
        .expect("at least one encoding tuple");
    let (_, encodings) = tuple_at(&lists, index);
    let sums = message_sums(&scaled, &message_table(&w.shape, &encodings));
    let (total, decoding) = best_decoding(&sums);
    debug_assert_eq!(total, best);
    Ok((scaled.unscale(best), DeterministicStrategy::new(encodings, decoding)?))
}

/// Maximum over every deterministic strategy by direct evaluation, without
/// the per-message decomposition. Intended as an oracle for small shapes.
pub fn exhaustive_bound(w: &Witness, cap: u128) -> Result<(Rational, DeterministicStrategy)> {
    let space = StrategySpace::new(&w.shape);
    if space.count() > cap {
        return Err(Error::TooManyStrategies { count: space.count(), cap });
    }
    let scaled = ScaledWitness::new(w)?;
    let decodings = space.decoding_count();
    let (best, index) = (0..space.encoding_tuple_count())
        .into_par_iter()
        .map(|t| {
            let messages = message_table(&w.shape, &space.encoding_tuple(t));
            (0..decodings)
                .map(|d| {
                    let decoding = space.decoding(d);
                    let value: i64 =
                        messages.iter().enumerate().map(|(col, &m)| scaled.at(decoding[m], col)).sum();
                    (value, t * decodings + d)
                })
                .reduce(better)
                .expect("at least one decoding")
        })
        .reduce_with(better)
        .expect("at least one encoding tuple");
    Ok((scaled.unscale(best), space.strategy(index)))
}

/// Payoffs of every candidate output for one message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessagePayoff {
    pub message: usize,
    /// χ(a): summed coefficients over the inputs sent to this message.
    #[serde(serialize_with = "serialize_display_all")]
    pub chi: Vec<Rational>,
    #[serde(serialize_with = "serialize_display")]
    pub best: Rational,
    /// Every output attaining `best`, ascending.
    pub best_outputs: Vec<usize>,
    /// Whether any input tuple is sent to this message.
    pub reachable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingPayoffTable {
    pub encodings: Vec<Encoding>,
    pub messages: Vec<MessagePayoff>,
    #[serde(serialize_with = "serialize_display")]
    pub total: Rational,
}

/// The per-message payoff table for a fixed encoding tuple.
pub fn encoding_payoff_table(w: &Witness, encodings: &[Encoding]) -> Result<EncodingPayoffTable> {
    let shape = &w.shape;
    if encodings.len() != shape.senders()
        || encodings.iter().zip(shape.input_cardinalities()).any(|(e, &n)| e.inputs() != n)
    {
        return Err(Error::ShapeMismatch("encodings do not fit the witness shape".into()));
    }
    let scaled = ScaledWitness::new(w)?;
    let messages = message_table(shape, encodings);
    let sums = message_sums(&scaled, &messages);
    let (total, _) = best_decoding(&sums);
    let rows = sums
        .iter()
        .enumerate()
        .map(|(m, row)| {
            let best = *row.iter().max().expect("nonempty output set");
            MessagePayoff {
                message: m,
                chi: row.iter().map(|&v| scaled.unscale(v)).collect(),
                best: scaled.unscale(best),
                best_outputs: (0..row.len()).filter(|&a| row[a] == best).collect(),
                reachable: messages.contains(&m),
            }
        })
        .collect();
    Ok(EncodingPayoffTable { encodings: encodings.to_vec(), messages: rows, total: scaled.unscale(total) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    /// Position of each sender's encoding in the family.
    pub indices: Vec<usize>,
    #[serde(serialize_with = "serialize_display")]
    pub total: Rational,
}

/// Optimal-decode totals for all |family|^K encoding tuples, sorted by
/// descending total; equal totals keep enumeration order.
pub fn full_bound_scan(w: &Witness, family: &EncodingFamily, senders: usize) -> Result<Vec<ScanEntry>> {
    if senders != w.shape.senders() {
        return Err(Error::ShapeMismatch(format!(
            "witness has {} senders, scan requested {senders}",
            w.shape.senders()
        )));
    }
    let scaled = ScaledWitness::new(w)?;
    let lists = sender_families(&w.shape, Some(&vec![family.clone(); senders]))?;
    let count = tuple_count(&lists)?;
    let mut entries: Vec<(i64, Vec<usize>)> = (0..count)
        .into_par_iter()
        .map(|t| {
            let (picks, encodings) = tuple_at(&lists, t);
            let sums = message_sums(&scaled, &message_table(&w.shape, &encodings));
            (best_decoding(&sums).0, picks)
        })
        .collect();
    entries.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(entries
        .into_iter()
        .map(|(v, indices)| ScanEntry { indices, total: scaled.unscale(v) })
        .collect())
}

/// A witness's classical bound set against its value on a channel.
#[derive(Debug, Clone, Serialize)]
pub struct PayoffReport {
    pub witness_id: String,
    #[serde(serialize_with = "serialize_display")]
    pub classical_bound: Rational,
    pub quantum_value: f64,
    pub violating: bool,
    #[serde(serialize_with = "serialize_display")]
    pub argmax_strategy: DeterministicStrategy,
}

impl PayoffReport {
    pub fn margin(&self) -> f64 {
        self.quantum_value - rational_to_f64(&self.classical_bound)
    }
}

pub fn payoff_report(w: &Witness, mac: &Mac) -> Result<PayoffReport> {
    let quantum_value = witness_value(w, mac)?;
    let (classical_bound, argmax_strategy) = classical_bound(w)?;
    let violating = quantum_value > rational_to_f64(&classical_bound) + VIOLATION_MARGIN;
    Ok(PayoffReport {
        witness_id: w.id.clone(),
        classical_bound,
        quantum_value,
        violating,
        argmax_strategy,
    })
}

/// Convenience for callers holding integer bounds.
pub fn rational_to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_polygon_mac, build_shift_mac};

    #[test]
    fn polygon_matrix_rows() {
        assert_eq!(polygon_witness_matrix(5).unwrap()[0], vec![0, 1, -3, -5, 3]);
        assert!(polygon_witness_matrix(8).unwrap()[0].iter().all(|&v| v == 0));
        assert!(polygon_witness_matrix(4).is_err());
        assert!(polygon_witness_matrix(10).is_err());
    }

    #[test]
    fn circulant_witnesses() {
        for m in [5, 7, 9] {
            let w = polygon_witness_matrix(m).unwrap();
            for r in 0..m {
                for c in 0..m {
                    assert_eq!(w[r][c], w[0][(c + m - r) % m], "m = {m}");
                }
            }
        }
    }

    #[test]
    fn polygon_lifting_weighs_outcome_zero() {
        let w = polygon_witness(5).unwrap();
        let shape = w.shape().clone();
        assert_eq!(w.coefficient(0, shape.flatten(&[0, 2])), -3.0);
        assert!((0..shape.columns()).all(|c| w.coefficient(1, c) == 0.0));
    }

    #[test]
    fn shift_coefficients() {
        let w = shift_witness();
        let s = w.shape().clone();
        let origin = s.flatten(&[0, 0, 0]);
        assert_eq!(w.coefficient(0b000, origin), 2.0);
        assert_eq!(w.coefficient(0b111, origin), -2.0);
        assert_eq!(w.coefficient(0b001, origin), -2.0);
        assert_eq!(w.coefficient(0b011, origin), -3.0);
    }

    #[test]
    fn witness_values() {
        let v = witness_value(&shift_witness(), &build_shift_mac()).unwrap();
        assert!((v - 10.0 * (5.0 * 2f64.sqrt() - 6.0)).abs() < 1e-9);
        let v5 = witness_value(&polygon_witness(5).unwrap(), &build_polygon_mac(5).unwrap()).unwrap();
        assert!((v5 - 15.0 * (5f64.sqrt() - 1.0) / 4.0).abs() < 1e-9);
        let mac = build_polygon_mac(5).unwrap();
        assert_eq!(witness_value(&Witness::zero(mac.shape().clone()), &mac).unwrap(), 0.0);
        assert!(witness_value(&shift_witness(), &mac).is_err());
    }

    #[test]
    fn decomposed_bound_matches_direct_search() {
        for m in [5, 6] {
            let w = polygon_witness(m).unwrap();
            let (fast, arg) = classical_bound(&w).unwrap();
            let (slow, _) = exhaustive_bound(&w, 1 << 20).unwrap();
            assert_eq!(fast, slow);
            let mac = crate::strategies::strategy_to_mac(&arg, w.shape()).unwrap();
            assert_eq!(witness_value_exact(&w, &mac).unwrap(), Some(fast));
        }
    }

    #[test]
    fn fractional_coefficients_are_scaled() {
        let shape = MacShape::new(vec![2], 2).unwrap();
        let exact = vec![
            Rational::new(1.into(), 3.into()),
            Rational::new((-1).into(), 2.into()),
            Rational::zero(),
            Rational::new(1.into(), 6.into()),
        ];
        let w = Witness::from_exact("frac", shape, exact).unwrap();
        // best: output 0 on input 0 (1/3), output 1 on input 1 (1/6)
        assert_eq!(classical_bound(&w).unwrap().0, Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn non_finite_rejected() {
        let shape = MacShape::new(vec![2], 2).unwrap();
        assert!(Witness::from_floats("bad", shape, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn witness_file_round_trip() {
        let w = polygon_witness(6).unwrap();
        let back = Witness::from_file_str(&w.to_file_string().unwrap()).unwrap();
        assert_eq!(back, w);
    }
}
