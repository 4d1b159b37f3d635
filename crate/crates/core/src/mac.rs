//! Multiple access channels and their construction from qubit strategies.
//!
//! A channel `p(a | x₁,…,x_K)` is stored as a flat table with the output as
//! the outermost index: entry `(a, column)` lives at `a * columns + column`,
//! where `column` flattens the input tuple with `x₁` as the most significant
//! digit.

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{born_probability, projector, tensor_all, DensityOperator, Ket, Povm, STRUCTURAL_TOL};
use crate::Rational;

/// Tolerance for per-column normalization of floating-point channels.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Tag written into channel and witness files describing the flattening order.
pub const FLATTENING_TAG: &str = "a-major;x1-most-significant";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MacShape {
    inputs: Vec<usize>,
    outputs: usize,
}

impl MacShape {
    pub fn new(inputs: Vec<usize>, outputs: usize) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidShape("at least one sender is required".into()));
        }
        if outputs == 0 || inputs.contains(&0) {
            return Err(Error::InvalidShape("all cardinalities must be positive".into()));
        }
        Ok(Self { inputs, outputs })
    }

    pub fn senders(&self) -> usize {
        self.inputs.len()
    }

    pub fn input_cardinalities(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_cardinality(&self) -> usize {
        self.outputs
    }

    /// Number of input tuples (columns of the stochastic matrix).
    pub fn columns(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn entries(&self) -> usize {
        self.columns() * self.outputs
    }

    pub fn flatten(&self, inputs: &[usize]) -> usize {
        debug_assert_eq!(inputs.len(), self.inputs.len());
        inputs.iter().zip(&self.inputs).fold(0, |acc, (&x, &n)| {
            debug_assert!(x < n);
            acc * n + x
        })
    }

    pub fn unflatten(&self, mut column: usize) -> Vec<usize> {
        let mut out = vec![0; self.inputs.len()];
        for (slot, &n) in out.iter_mut().zip(&self.inputs).rev() {
            *slot = column % n;
            column /= n;
        }
        out
    }

    #[inline]
    pub fn entry_index(&self, output: usize, column: usize) -> usize {
        output * self.columns() + column
    }

    /// Human-readable label such as `p(10|00,01)`, using bit strings for
    /// power-of-two cardinalities.
    pub fn entry_label(&self, output: usize, column: usize) -> String {
        let inputs = self.unflatten(column);
        let xs: Vec<String> = inputs
            .iter()
            .zip(&self.inputs)
            .map(|(&x, &n)| format_symbol(x, n))
            .collect();
        format!("p({}|{})", format_symbol(output, self.outputs), xs.join(","))
    }
}

/// Formats `value` as a fixed-width bit string when `cardinality` is a power
/// of two greater than one, and in decimal otherwise.
pub fn format_symbol(value: usize, cardinality: usize) -> String {
    if cardinality > 1 && cardinality.is_power_of_two() {
        let width = cardinality.trailing_zeros() as usize;
        format!("{value:0width$b}")
    } else {
        value.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mac {
    shape: MacShape,
    probabilities: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl Mac {
    /// Wraps raw tables without validating them. Use [`validate_mac`] to
    /// inspect the result.
    pub fn from_raw(shape: MacShape, probabilities: Vec<f64>, exact: Option<Vec<Rational>>) -> Result<Self> {
        let n = shape.entries();
        if probabilities.len() != n || exact.as_ref().is_some_and(|e| e.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: probabilities.len(),
            });
        }
        Ok(Self { shape, probabilities, exact })
    }

    pub fn from_probabilities(shape: MacShape, probabilities: Vec<f64>) -> Result<Self> {
        Self::from_raw(shape, probabilities, None)?.validated()
    }

    pub fn from_exact(shape: MacShape, exact: Vec<Rational>) -> Result<Self> {
        let probabilities = exact.iter().map(rational_to_f64).collect();
        Self::from_raw(shape, probabilities, Some(exact))?.validated()
    }

    fn validated(self) -> Result<Self> {
        let report = validate_mac(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidMac(report.summary()))
        }
    }

    pub fn shape(&self) -> &MacShape {
        &self.shape
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    #[inline]
    pub fn prob_at(&self, output: usize, column: usize) -> f64 {
        self.probabilities[self.shape.entry_index(output, column)]
    }

    pub fn prob(&self, output: usize, inputs: &[usize]) -> f64 {
        self.prob_at(output, self.shape.flatten(inputs))
    }

    pub fn exact_at(&self, output: usize, column: usize) -> Option<&Rational> {
        self.exact.as_ref().map(|e| &e[self.shape.entry_index(output, column)])
    }

    /// The output distribution for one input tuple.
    pub fn column(&self, column: usize) -> Vec<f64> {
        (0..self.shape.outputs).map(|a| self.prob_at(a, column)).collect()
    }

    pub fn max_abs_diff(&self, other: &Mac) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("channels have different shapes".into()));
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Exact entrywise equality; `None` when either side lacks exact entries.
    pub fn exact_eq(&self, other: &Mac) -> Option<bool> {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(self.shape == other.shape && a == b),
            _ => None,
        }
    }

    pub fn to_file_string(&self) -> Result<String> {
        let (encoding, entries) = match &self.exact {
            Some(exact) => ("exact", exact.iter().map(|r| r.to_string()).collect()),
            None => ("decimal", self.probabilities.iter().map(|p| format_decimal(*p)).collect()),
        };
        let file = TableFile {
            format: MAC_FORMAT.into(),
            id: None,
            shape: self.shape.clone(),
            flattening: FLATTENING_TAG.into(),
            encoding: encoding.into(),
            entries,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        file.check(MAC_FORMAT)?;
        let shape = MacShape::new(file.shape.inputs.clone(), file.shape.outputs)?;
        match file.encoding.as_str() {
            "exact" => Self::from_exact(shape, parse_rationals(&file.entries)?),
            "decimal" => Self::from_probabilities(shape, parse_decimals(&file.entries)?),
            other => Err(Error::Parse(format!("unknown entry encoding {other:?}"))),
        }
    }
}

pub(crate) const MAC_FORMAT: &str = "qmac-channel/1";
pub(crate) const WITNESS_FORMAT: &str = "qmac-witness/1";

/// On-disk layout shared by channels and witnesses.
#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct TableFile {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub shape: MacShape,
    pub flattening: String,
    pub encoding: String,
    pub entries: Vec<String>,
}

impl TableFile {
    pub(crate) fn check(&self, format: &str) -> Result<()> {
        if self.format != format {
            return Err(Error::Parse(format!("expected format {format:?}, found {:?}", self.format)));
        }
        if self.flattening != FLATTENING_TAG {
            return Err(Error::Parse(format!("unsupported flattening {:?}", self.flattening)));
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn format_decimal(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_decimals(entries: &[String]) -> Result<Vec<f64>> {
    entries
        .iter()
        .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
        .collect()
}

pub(crate) fn parse_rationals(entries: &[String]) -> Result<Vec<Rational>> {
    entries
        .iter()
        .map(|s| s.trim().parse::<Rational>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
        .collect()
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub max_normalization_residual: f64,
    /// (column, Σₐ p(a|column) − 1) for columns outside tolerance.
    pub normalization_failures: Vec<(usize, f64)>,
    /// (output, column, value) for entries outside [0, 1].
    pub range_violations: Vec<(usize, usize, f64)>,
    /// (output, column) where the float and exact tables disagree by more than 1e-12.
    pub exact_mismatches: Vec<(usize, usize)>,
    /// Columns whose exact entries do not sum to exactly one.
    pub exact_normalization_failures: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.normalization_failures.is_empty()
            && self.range_violations.is_empty()
            && self.exact_mismatches.is_empty()
            && self.exact_normalization_failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "max normalization residual {:e}; {} normalization failures, {} range violations, \
             {} exact/float mismatches, {} exact normalization failures",
            self.max_normalization_residual,
            self.normalization_failures.len(),
            self.range_violations.len(),
            self.exact_mismatches.len(),
            self.exact_normalization_failures.len()
        )
    }
}

pub fn validate_mac(mac: &Mac) -> ValidationReport {
    let shape = &mac.shape;
    let mut report = ValidationReport {
        max_normalization_residual: 0.0,
        normalization_failures: Vec::new(),
        range_violations: Vec::new(),
        exact_mismatches: Vec::new(),
        exact_normalization_failures: Vec::new(),
    };
    for column in 0..shape.columns() {
        let mut total = 0.0;
        for a in 0..shape.outputs {
            let p = mac.prob_at(a, column);
            total += p;
            if !(-STRUCTURAL_TOL..=1.0 + STRUCTURAL_TOL).contains(&p) {
                report.range_violations.push((a, column, p));
            }
        }
        let residual = total - 1.0;
        if !residual.is_finite() || residual.abs() > NORMALIZATION_TOL {
            report.normalization_failures.push((column, residual));
        }
        report.max_normalization_residual = report.max_normalization_residual.max(residual.abs());

        if let Some(exact) = &mac.exact {
            let mut sum = Rational::zero();
            for a in 0..shape.outputs {
                let q = &exact[shape.entry_index(a, column)];
                sum += q;
                if (rational_to_f64(q) - mac.prob_at(a, column)).abs() > STRUCTURAL_TOL {
                    report.exact_mismatches.push((a, column));
                }
            }
            if !sum.is_one() {
                report.exact_normalization_failures.push(column);
            }
        }
    }
    report
}

/// Per-sender qubit encodings plus a joint decoding measurement on the
/// composite of all senders' qubits (sender 1 is the leftmost factor).
#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    encodings: Vec<Vec<Ket>>,
    decoding: Povm,
}

impl QuantumStrategy {
    pub fn new(encodings: Vec<Vec<Ket>>, decoding: Povm) -> Result<Self> {
        if encodings.is_empty() || encodings.iter().any(|e| e.is_empty()) {
            return Err(Error::InvalidShape("every sender needs at least one input".into()));
        }
        for ket in encodings.iter().flatten() {
            if ket.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: ket.dim() });
            }
            if !ket.is_normalized() {
                return Err(Error::NotNormalized { norm_sqr: ket.norm_sqr() });
            }
        }
        let expected = 1usize << encodings.len();
        if decoding.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: decoding.dim() });
        }
        Ok(Self { encodings, decoding })
    }

    pub fn encodings(&self) -> &[Vec<Ket>] {
        &self.encodings
    }

    pub fn decoding(&self) -> &Povm {
        &self.decoding
    }

    pub fn shape(&self) -> MacShape {
        MacShape {
            inputs: self.encodings.iter().map(Vec::len).collect(),
            outputs: self.decoding.len(),
        }
    }

    /// The encoded product state for one input tuple.
    pub fn encoded_state(&self, inputs: &[usize]) -> Result<DensityOperator> {
        let factors = self
            .encodings
            .iter()
            .zip(inputs)
            .map(|(enc, &x)| DensityOperator::new(projector(&enc[x], true)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(tensor_all(&factors).expect("at least one sender"))
    }
}

/// p(a|x⃗) = Tr[Π_a · ⊗ᵢ |ψ^{xᵢ}⟩⟨ψ^{xᵢ}|].
pub fn mac_from_quantum_strategy(strategy: &QuantumStrategy) -> Result<Mac> {
    let shape = strategy.shape();
    let columns = shape.columns();
    let mut probabilities = vec![0.0; shape.entries()];
    for column in 0..columns {
        let state = strategy.encoded_state(&shape.unflatten(column))?;
        for (a, effect) in strategy.decoding.effects().iter().enumerate() {
            probabilities[a * columns + column] = born_probability(effect, &state)?;
        }
    }
    Mac::from_probabilities(shape, probabilities)
}

/// Serializes a value through its `Display` form, e.g. rationals as "3/4".
pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn serialize_display_all<T: std::fmt::Display, S: serde::Serializer>(
    v: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_flattening_is_x1_major() {
        let shape = MacShape::new(vec![4, 3, 2], 2).unwrap();
        assert_eq!(shape.columns(), 24);
        assert_eq!(shape.flatten(&[1, 0, 0]), 6);
        assert_eq!(shape.flatten(&[0, 1, 1]), 3);
        for col in 0..24 {
            assert_eq!(shape.flatten(&shape.unflatten(col)), col);
        }
    }

    #[test]
    fn shape_rejects_degenerate() {
        assert!(MacShape::new(vec![], 2).is_err());
        assert!(MacShape::new(vec![2, 0], 2).is_err());
        assert!(MacShape::new(vec![2], 0).is_err());
    }

    #[test]
    fn entry_labels() {
        let shape = MacShape::new(vec![4, 4], 4).unwrap();
        assert_eq!(shape.entry_label(2, 0), "p(10|00,00)");
        assert_eq!(shape.entry_label(3, shape.flatten(&[1, 2])), "p(11|01,10)");
        let odd = MacShape::new(vec![5, 5], 2).unwrap();
        assert_eq!(odd.entry_label(0, 7), "p(0|1,2)");
    }

    #[test]
    fn identity_channel_from_single_sender() {
        let povm = Povm::from_basis(&[Ket::zero(), Ket::one()]).unwrap();
        let strategy = QuantumStrategy::new(vec![vec![Ket::zero(), Ket::one()]], povm).unwrap();
        let mac = mac_from_quantum_strategy(&strategy).unwrap();
        assert_eq!(mac.prob(0, &[0]), 1.0);
        assert_eq!(mac.prob(1, &[0]), 0.0);
        assert_eq!(mac.prob(0, &[1]), 0.0);
        assert_eq!(mac.prob(1, &[1]), 1.0);
    }

    #[test]
    fn strategy_dimension_mismatch() {
        let povm = Povm::from_basis(&[Ket::zero(), Ket::one()]).unwrap();
        let err = QuantumStrategy::new(vec![vec![Ket::zero()], vec![Ket::one()]], povm).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 4, found: 2 }));
    }

    #[test]
    fn validation_flags_bad_column() {
        let shape = MacShape::new(vec![2], 2).unwrap();
        let mac = Mac::from_raw(shape.clone(), vec![0.5, 1.0, 0.4, 0.0], None).unwrap();
        let report = validate_mac(&mac);
        assert!(!report.is_valid());
        assert_eq!(report.normalization_failures.len(), 1);
        assert_eq!(report.normalization_failures[0].0, 0);
        assert!((report.normalization_failures[0].1 + 0.1).abs() < 1e-12);
        assert!(Mac::from_probabilities(shape, vec![0.5, 1.0, 0.4, 0.0]).is_err());
    }

    #[test]
    fn validation_flags_exact_inconsistency() {
        let shape = MacShape::new(vec![1], 2).unwrap();
        let exact = vec![rational(1, 3), rational(2, 3)];
        let mac = Mac::from_raw(shape, vec![0.3, 0.7], Some(exact)).unwrap();
        let report = validate_mac(&mac);
        assert_eq!(report.exact_mismatches.len(), 2);
        assert!(report.normalization_failures.is_empty());
    }

    #[test]
    fn file_round_trip_exact_and_decimal() {
        let shape = MacShape::new(vec![2, 1], 2).unwrap();
        let exact = vec![rational(1, 4), rational(1, 1), rational(3, 4), rational(0, 1)];
        let mac = Mac::from_exact(shape.clone(), exact).unwrap();
        let text = mac.to_file_string().unwrap();
        assert!(text.contains("\"1/4\""));
        assert_eq!(Mac::from_file_str(&text).unwrap(), mac);

        let third = 1.0 / 3.0;
        let float = Mac::from_probabilities(shape, vec![third, 0.1, 1.0 - third, 0.9]).unwrap();
        let back = Mac::from_file_str(&float.to_file_string().unwrap()).unwrap();
        assert_eq!(back.probabilities(), float.probabilities());
    }

    #[test]
    fn file_rejects_wrong_format() {
        let text = r#"{"format":"other","shape":{"inputs":[1],"outputs":1},"flattening":"a-major;x1-most-significant","encoding":"exact","entries":["1"]}"#;
        assert!(matches!(Mac::from_file_str(text), Err(Error::Parse(_))));
    }
}
