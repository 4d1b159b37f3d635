//! Classical deterministic strategies with one bit per sender, their
//! enumeration, and shared-randomness mixtures of them.
//!
//! Enumeration order is fixed: the encoding tuple is the outer loop and the
//! decoding the inner one. Within each, sender 1 (resp. message 0) is the
//! most significant digit, and an encoding's code lists its bits with input
//! 0 as the most significant bit, so `E:0011` has code 3.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mac::{Mac, MacShape};
use crate::Rational;

/// Refuse to enumerate more strategies than this unless the caller raises the cap.
pub const DEFAULT_STRATEGY_CAP: u128 = 100_000_000;

/// A deterministic map from a sender's inputs to one bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding {
    bits: Vec<u8>,
}

impl Encoding {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!("encoding bits must be 0/1, got {bits:?}")));
        }
        Ok(Self { bits })
    }

    pub fn from_code(code: u128, inputs: usize) -> Self {
        let bits = (0..inputs).map(|x| ((code >> (inputs - 1 - x)) & 1) as u8).collect();
        Self { bits }
    }

    pub fn code(&self) -> u128 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | u128::from(b))
    }

    #[inline]
    pub fn apply(&self, input: usize) -> u8 {
        self.bits[input]
    }

    pub fn inputs(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Normalized encodings send input 0 to bit 0.
    pub fn is_normalized(&self) -> bool {
        self.bits[0] == 0
    }

    pub fn flipped(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| 1 - b).collect() }
    }

    pub fn normalized(&self) -> Self {
        if self.is_normalized() {
            self.clone()
        } else {
            self.flipped()
        }
    }

    /// Number of inputs sent to bit 0.
    pub fn zeros(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 0).count()
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Encoding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    encodings: Vec<Encoding>,
    /// Output for each K-bit message, sender 1's bit most significant.
    decoding: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(encodings: Vec<Encoding>, decoding: Vec<usize>) -> Result<Self> {
        if encodings.is_empty() {
            return Err(Error::InvalidArgument("strategy needs at least one sender".into()));
        }
        if encodings.len() >= usize::BITS as usize || decoding.len() != 1 << encodings.len() {
            return Err(Error::InvalidArgument(format!(
                "decoding must cover all {} messages",
                1u128 << encodings.len().min(127)
            )));
        }
        Ok(Self { encodings, decoding })
    }

    pub fn encodings(&self) -> &[Encoding] {
        &self.encodings
    }

    pub fn decoding(&self) -> &[usize] {
        &self.decoding
    }

    pub fn senders(&self) -> usize {
        self.encodings.len()
    }

    pub fn message(&self, inputs: &[usize]) -> usize {
        self.encodings
            .iter()
            .zip(inputs)
            .fold(0, |acc, (e, &x)| (acc << 1) | e.apply(x) as usize)
    }

    pub fn output(&self, inputs: &[usize]) -> usize {
        self.decoding[self.message(inputs)]
    }

    pub fn is_consistent_with(&self, shape: &MacShape) -> bool {
        self.encodings.len() == shape.senders()
            && self
                .encodings
                .iter()
                .zip(shape.input_cardinalities())
                .all(|(e, &n)| e.inputs() == n)
            && self.decoding.iter().all(|&a| a < shape.output_cardinality())
    }

    /// Flips every encoding that sends input 0 to bit 1 and absorbs the flip
    /// into the decoding. The induced channel is unchanged.
    pub fn normalized(&self) -> Self {
        let k = self.senders();
        let mut mask = 0usize;
        let encodings = self
            .encodings
            .iter()
            .enumerate()
            .map(|(i, e)| {
                if e.is_normalized() {
                    e.clone()
                } else {
                    mask |= 1 << (k - 1 - i);
                    e.flipped()
                }
            })
            .collect();
        let decoding = (0..self.decoding.len()).map(|m| self.decoding[m ^ mask]).collect();
        Self { encodings, decoding }
    }

    pub fn is_normalized(&self) -> bool {
        self.encodings.iter().all(Encoding::is_normalized)
    }

    /// Compact text form `E:bits|…|E:bits|D:o,o,…`.
    pub fn to_compact_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.encodings {
            write!(f, "E:{e}|")?;
        }
        let outputs: Vec<String> = self.decoding.iter().map(usize::to_string).collect();
        write!(f, "D:{}", outputs.join(","))
    }
}

impl FromStr for DeterministicStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed strategy {s:?}"));
        let mut encodings = Vec::new();
        let mut decoding = None;
        for part in s.trim().split('|') {
            if let Some(bits) = part.strip_prefix("E:") {
                let bits = bits
                    .chars()
                    .map(|c| c.to_digit(2).map(|d| d as u8))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                encodings.push(Encoding::new(bits)?);
            } else if let Some(outputs) = part.strip_prefix("D:") {
                let outs = outputs
                    .split(',')
                    .map(|o| o.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                decoding = Some(outs);
            } else {
                return Err(bad());
            }
        }
        Self::new(encodings, decoding.ok_or_else(bad)?)
    }
}

/// The finite set of deterministic strategies for a shape.
#[derive(Debug, Clone)]
pub struct StrategySpace {
    shape: MacShape,
    encodings_per_sender: Vec<u128>,
    decodings: u128,
    count: u128,
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    u32::try_from(exp).ok().and_then(|e| base.checked_pow(e))
}

impl StrategySpace {
    pub fn new(shape: &MacShape) -> Self {
        let encodings_per_sender: Vec<u128> = shape
            .input_cardinalities()
            .iter()
            .map(|&n| checked_pow(2, n).unwrap_or(u128::MAX))
            .collect();
        let decodings =
            checked_pow(shape.output_cardinality() as u128, 1usize << shape.senders().min(63)).unwrap_or(u128::MAX);
        let count = encodings_per_sender
            .iter()
            .try_fold(decodings, |acc, &n| acc.checked_mul(n))
            .unwrap_or(u128::MAX);
        Self {
            shape: shape.clone(),
            encodings_per_sender,
            decodings,
            count,
        }
    }

    /// Total number of strategies, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn encoding_tuple_count(&self) -> u128 {
        self.encodings_per_sender
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n))
            .unwrap_or(u128::MAX)
    }

    pub fn decoding_count(&self) -> u128 {
        self.decodings
    }

    pub fn shape(&self) -> &MacShape {
        &self.shape
    }

    /// The encoding tuple with the given position in enumeration order.
    pub fn encoding_tuple(&self, mut index: u128) -> Vec<Encoding> {
        let mut codes = vec![0u128; self.encodings_per_sender.len()];
        for (slot, &n) in codes.iter_mut().zip(&self.encodings_per_sender).rev() {
            *slot = index % n;
            index /= n;
        }
        codes
            .into_iter()
            .zip(self.shape.input_cardinalities())
            .map(|(code, &n)| Encoding::from_code(code, n))
            .collect()
    }

    pub fn decoding(&self, mut index: u128) -> Vec<usize> {
        let base = self.shape.output_cardinality() as u128;
        let messages = 1usize << self.shape.senders();
        let mut out = vec![0usize; messages];
        for slot in out.iter_mut().rev() {
            *slot = (index % base) as usize;
            index /= base;
        }
        out
    }

    /// The strategy at position `index` in enumeration order.
    pub fn strategy(&self, index: u128) -> DeterministicStrategy {
        assert!(index < self.count, "strategy index out of range");
        DeterministicStrategy {
            encodings: self.encoding_tuple(index / self.decodings),
            decoding: self.decoding(index % self.decodings),
        }
    }

    pub fn iter(&self) -> StrategyIter {
        StrategyIter { space: self.clone(), next: 0 }
    }
}

/// Lazily yields every strategy of a [`StrategySpace`] in enumeration order.
#[derive(Debug, Clone)]
pub struct StrategyIter {
    space: StrategySpace,
    next: u128,
}

impl Iterator for StrategyIter {
    type Item = DeterministicStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.space.count {
            return None;
        }
        let s = self.space.strategy(self.next);
        self.next += 1;
        Some(s)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.space.count - self.next;
        match usize::try_from(left) {
            Ok(n) => (n, Some(n)),
            Err(_) => (usize::MAX, None),
        }
    }
}

/// Streams all ∏ᵢ 2^{|Xᵢ|} · |A|^{2^K} strategies, refusing when the count
/// exceeds `cap` ([`DEFAULT_STRATEGY_CAP`] when `None`).
pub fn enumerate_deterministic_strategies(shape: &MacShape, cap: Option<u128>) -> Result<StrategyIter> {
    let space = StrategySpace::new(shape);
    let cap = cap.unwrap_or(DEFAULT_STRATEGY_CAP);
    if space.count() > cap {
        return Err(Error::TooManyStrategies { count: space.count(), cap });
    }
    Ok(space.iter())
}

/// A named list of single-sender encodings.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingFamily {
    members: Vec<(String, Encoding)>,
}

impl EncodingFamily {
    pub fn new(members: Vec<(String, Encoding)>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, index: usize) -> &Encoding {
        &self.members[index].1
    }

    pub fn name(&self, index: usize) -> &str {
        &self.members[index].0
    }

    pub fn encodings(&self) -> impl Iterator<Item = &Encoding> {
        self.members.iter().map(|(_, e)| e)
    }
}

/// The eight encodings of a 2-bit input up to relabeling, indexed 0..7:
/// constant, first bit, second bit, parity, then the four 1-vs-3 splits
/// isolating 00, 01, 10, 11 (the isolated input maps to 0).
pub fn canonical_encodings() -> EncodingFamily {
    let table: [(&str, [u8; 4]); 8] = [
        ("e0:const", [0, 0, 0, 0]),
        ("e1:first-bit", [0, 0, 1, 1]),
        ("e2:second-bit", [0, 1, 0, 1]),
        ("e3:parity", [0, 1, 1, 0]),
        ("e4:split-00", [0, 1, 1, 1]),
        ("e5:split-01", [1, 0, 1, 1]),
        ("e6:split-10", [1, 1, 0, 1]),
        ("e7:split-11", [1, 1, 1, 0]),
    ];
    EncodingFamily::new(
        table
            .iter()
            .map(|(name, bits)| (name.to_string(), Encoding { bits: bits.to_vec() }))
            .collect(),
    )
}

/// Every one of the 2^n encodings of an n-input sender, in code order.
pub fn all_encodings(inputs: usize) -> EncodingFamily {
    assert!(inputs < 16, "refusing to list 2^{inputs} encodings");
    EncodingFamily::new(
        (0..1u128 << inputs)
            .map(|code| {
                let e = Encoding::from_code(code, inputs);
                (format!("E:{e}"), e)
            })
            .collect(),
    )
}

/// Index of `encoding` in the canonical family, if it is a member.
pub fn canonical_index(encoding: &Encoding) -> Option<usize> {
    canonical_encodings().encodings().position(|e| e == encoding)
}

/// A finite convex combination of deterministic strategies with exact weights.
#[derive(Debug, Clone)]
pub struct StrategyMixture {
    support: Vec<(DeterministicStrategy, Rational)>,
}

impl StrategyMixture {
    pub fn new(support: Vec<(DeterministicStrategy, Rational)>) -> Result<Self> {
        if support.iter().any(|(_, w)| w.is_negative()) {
            return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
        }
        let total: Rational = support.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { support })
    }

    pub fn uniform(strategies: Vec<DeterministicStrategy>) -> Result<Self> {
        let n = strategies.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty mixture".into()));
        }
        let w = Rational::new(1.into(), (n as i64).into());
        Self::new(strategies.into_iter().map(|s| (s, w.clone())).collect())
    }

    pub fn point(strategy: DeterministicStrategy) -> Self {
        Self { support: vec![(strategy, Rational::one())] }
    }

    pub fn support(&self) -> &[(DeterministicStrategy, Rational)] {
        &self.support
    }
}

fn check_consistent(s: &DeterministicStrategy, shape: &MacShape) -> Result<()> {
    if s.is_consistent_with(shape) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("strategy {s} does not fit the channel shape")))
    }
}

/// The 0/1 channel induced by a deterministic strategy, stored exactly.
pub fn strategy_to_mac(s: &DeterministicStrategy, shape: &MacShape) -> Result<Mac> {
    check_consistent(s, shape)?;
    let columns = shape.columns();
    let mut exact = vec![Rational::zero(); shape.entries()];
    for column in 0..columns {
        let a = s.output(&shape.unflatten(column));
        exact[a * columns + column] = Rational::one();
    }
    Mac::from_exact(shape.clone(), exact)
}

/// The exact convex combination Σ w_s · strategy_to_mac(s).
pub fn mixture_to_mac(mix: &StrategyMixture, shape: &MacShape) -> Result<Mac> {
    let columns = shape.columns();
    let mut exact = vec![Rational::zero(); shape.entries()];
    for (s, w) in &mix.support {
        check_consistent(s, shape)?;
        for column in 0..columns {
            let a = s.output(&shape.unflatten(column));
            exact[a * columns + column] += w;
        }
    }
    Mac::from_exact(shape.clone(), exact)
}

fn is_zero_entry(target: &Mac, a: usize, column: usize) -> bool {
    match target.exact_at(a, column) {
        Some(q) => q.is_zero(),
        None => target.prob_at(a, column) <= 0.0,
    }
}

/// All deterministic strategies whose induced channel vanishes wherever the
/// target does.
///
/// For each encoding tuple the admissible outputs of every message are those
/// never forbidden by an input tuple producing that message, so the
/// compatible decodings are a product set and are listed without scanning
/// incompatible ones. With `normalize`, only strategies whose encodings send
/// input 0 to bit 0 are reported; every compatible strategy is the relabeling
/// of exactly one of these.
pub fn zero_compatible_filter(target: &Mac, normalize: bool) -> Result<Vec<DeterministicStrategy>> {
    let shape = target.shape();
    let space = StrategySpace::new(shape);
    let tuples = space.encoding_tuple_count();
    if tuples > DEFAULT_STRATEGY_CAP {
        return Err(Error::TooManyStrategies { count: space.count(), cap: DEFAULT_STRATEGY_CAP });
    }
    let outputs = shape.output_cardinality();
    let messages = 1usize << shape.senders();
    let mut found = Vec::new();
    for t in 0..tuples {
        let encodings = space.encoding_tuple(t);
        if normalize && !encodings.iter().all(Encoding::is_normalized) {
            continue;
        }
        let probe = DeterministicStrategy { encodings, decoding: vec![0; messages] };
        let mut allowed = vec![vec![true; outputs]; messages];
        for column in 0..shape.columns() {
            let m = probe.message(&shape.unflatten(column));
            for (a, ok) in allowed[m].iter_mut().enumerate() {
                if is_zero_entry(target, a, column) {
                    *ok = false;
                }
            }
        }
        let allowed: Vec<Vec<usize>> = allowed
            .into_iter()
            .map(|row| row.iter().enumerate().filter(|(_, &ok)| ok).map(|(a, _)| a).collect())
            .collect();
        if allowed.iter().any(Vec::is_empty) {
            continue;
        }
        // odometer over the product of admissible outputs, message 0 most significant
        let mut digits = vec![0usize; messages];
        loop {
            let decoding = digits.iter().zip(&allowed).map(|(&d, row)| row[d]).collect();
            found.push(DeterministicStrategy { encodings: probe.encodings.clone(), decoding });
            let mut pos = messages;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < allowed[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_pbr_mac, pbr_shape};
    use crate::mac::rational;

    #[test]
    fn counts() {
        assert_eq!(StrategySpace::new(&pbr_shape()).count(), 65_536);
        let one = MacShape::new(vec![2], 2).unwrap();
        assert_eq!(enumerate_deterministic_strategies(&one, None).unwrap().count(), 16);
        let shift = crate::families::shift_shape();
        let err = enumerate_deterministic_strategies(&shift, None).unwrap_err();
        match err {
            Error::TooManyStrategies { count, cap } => {
                assert_eq!(count, 4096 * 16_777_216);
                assert_eq!(cap, DEFAULT_STRATEGY_CAP);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_ordered_and_unique() {
        let shape = MacShape::new(vec![2, 3], 2).unwrap();
        let all: Vec<_> = enumerate_deterministic_strategies(&shape, None).unwrap().collect();
        assert_eq!(all.len(), 4 * 8 * 16);
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all[0].to_string(), "E:00|E:000|D:0,0,0,0");
        assert_eq!(all[1].to_string(), "E:00|E:000|D:0,0,0,1");
        assert_eq!(all[16].to_string(), "E:00|E:001|D:0,0,0,0");
    }

    #[test]
    fn canonical_family_members() {
        let fam = canonical_encodings();
        assert_eq!(fam.len(), 8);
        assert_eq!(fam.get(1).apply(0b01), 0);
        assert_eq!(fam.get(3).apply(0b11), 0);
        assert_eq!(fam.get(7).apply(0b11), 0);
        for i in 1..=3 {
            assert_eq!(fam.get(i).zeros(), 2);
        }
        for i in 4..=7 {
            assert_eq!(fam.get(i).zeros(), 1);
        }
        // pairwise distinct up to flipping
        let normalized: std::collections::HashSet<_> = fam.encodings().map(Encoding::normalized).collect();
        assert_eq!(normalized.len(), 8);
    }

    #[test]
    fn compact_string_round_trip() {
        let s: DeterministicStrategy = "E:0011|E:0110|D:0,3,3,1".parse().unwrap();
        assert_eq!(s.to_string(), "E:0011|E:0110|D:0,3,3,1");
        assert!("E:0021|D:0,1".parse::<DeterministicStrategy>().is_err());
        assert!("E:01|D:0".parse::<DeterministicStrategy>().is_err());
    }

    #[test]
    fn normalization_preserves_channel() {
        let shape = pbr_shape();
        let s: DeterministicStrategy = "E:1100|E:0110|D:0,1,2,3".parse().unwrap();
        let n = s.normalized();
        assert!(n.is_normalized());
        assert_eq!(
            strategy_to_mac(&s, &shape).unwrap().exact_eq(&strategy_to_mac(&n, &shape).unwrap()),
            Some(true)
        );
    }

    #[test]
    fn constant_strategy_has_one_full_row() {
        let shape = MacShape::new(vec![3, 2], 3).unwrap();
        let s = DeterministicStrategy::new(
            vec![Encoding::new(vec![0, 0, 0]).unwrap(), Encoding::new(vec![0, 0]).unwrap()],
            vec![2, 2, 2, 2],
        )
        .unwrap();
        let mac = strategy_to_mac(&s, &shape).unwrap();
        for col in 0..6 {
            assert_eq!(mac.column(col), vec![0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn mismatched_strategy_is_rejected() {
        let s: DeterministicStrategy = "E:01|E:01|D:0,1,1,0".parse().unwrap();
        assert!(matches!(strategy_to_mac(&s, &pbr_shape()), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn mixture_weights_validated() {
        let s: DeterministicStrategy = "E:0011|E:0011|D:0,1,1,0".parse().unwrap();
        let bad = StrategyMixture::new(vec![(s.clone(), rational(1, 2))]);
        assert!(bad.is_err());
        let neg = StrategyMixture::new(vec![(s.clone(), rational(3, 2)), (s.clone(), rational(-1, 2))]);
        assert!(neg.is_err());
        let point = StrategyMixture::point(s.clone());
        assert_eq!(
            mixture_to_mac(&point, &pbr_shape()).unwrap().exact_eq(&strategy_to_mac(&s, &pbr_shape()).unwrap()),
            Some(true)
        );
    }

    #[test]
    fn disallowed_encoding_pair_has_no_decoding() {
        // first-bit encoding against a 1-vs-3 split: every output for message 00 hits a zero
        let target = build_pbr_mac();
        let found = zero_compatible_filter(&target, false).unwrap();
        let e1 = Encoding::new(vec![0, 0, 1, 1]).unwrap();
        let split = Encoding::new(vec![0, 0, 0, 1]).unwrap();
        assert!(!found.iter().any(|s| s.encodings()[0] == e1 && s.encodings()[1] == split));
    }

    #[test]
    fn all_positive_target_admits_everything() {
        let shape = MacShape::new(vec![2, 2], 2).unwrap();
        let exact = vec![rational(1, 2); shape.entries()];
        let target = Mac::from_exact(shape.clone(), exact).unwrap();
        let found = zero_compatible_filter(&target, false).unwrap();
        assert_eq!(found.len() as u128, StrategySpace::new(&shape).count());
    }
}
