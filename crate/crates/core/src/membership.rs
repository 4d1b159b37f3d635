//! Membership of an exact channel in the classical polytope, and the
//! restricted shared-randomness no-go for the two-sender PBR channel.
//!
//! A channel is classically simulable with global shared randomness iff it
//! is a convex combination of deterministic strategy channels:
//! Σ_s q_s P_s(a | x⃗) = p(a | x⃗), q ≥ 0, Σ_s q_s = 1.
//!
//! Row layout of the membership system: row `column * |A| + a` holds the
//! constraint for p(a | column); the last row is the normalization.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::build_pbr_mac;
use crate::lp::{simplex_solve, FeasibilityResult, LpProblem};
use crate::mac::{serialize_display_all, Mac, MacShape};
use crate::strategies::{
    canonical_encodings, canonical_index, mixture_to_mac, zero_compatible_filter, DeterministicStrategy,
    StrategyMixture,
};
use crate::Rational;

/// Builds the membership system for `target` over the given strategy columns.
pub fn membership_problem(target: &Mac, strategies: &[DeterministicStrategy]) -> Result<LpProblem> {
    let exact = target.exact().ok_or(Error::IrrationalTarget)?;
    let shape = target.shape();
    let outputs = shape.output_cardinality();
    let columns = shape.columns();
    let mut rhs = Vec::with_capacity(shape.entries() + 1);
    for column in 0..columns {
        for a in 0..outputs {
            rhs.push(exact[shape.entry_index(a, column)].clone());
        }
    }
    rhs.push(Rational::one());
    let normalization = rhs.len() - 1;
    let mut lp = LpProblem::new(rhs);
    for s in strategies {
        if !s.is_consistent_with(shape) {
            return Err(Error::ShapeMismatch(format!("strategy {s} does not fit the channel shape")));
        }
        let mut col: Vec<(usize, Rational)> = (0..columns)
            .map(|column| (column * outputs + s.output(&shape.unflatten(column)), Rational::one()))
            .collect();
        col.push((normalization, Rational::one()));
        lp.add_column(col)?;
    }
    Ok(lp)
}

/// Human-readable name of a membership row, e.g. `p(10|00,00)`.
pub fn membership_row_label(shape: &MacShape, row: usize) -> String {
    let outputs = shape.output_cardinality();
    if row == shape.entries() {
        "normalization".into()
    } else {
        shape.entry_label(row % outputs, row / outputs)
    }
}

/// Decides whether `target` is a convex combination of the given strategies.
///
/// Restricting the columns to the strategies compatible with the target's
/// zeros loses nothing: a strategy placing weight on a zero entry can never
/// appear with positive weight in a decomposition.
pub fn mac_membership(target: &Mac, strategies: &[DeterministicStrategy]) -> Result<FeasibilityResult> {
    simplex_solve(&membership_problem(target, strategies)?)
}

/// Farkas certificates supported on a single row: every row `i` with all
/// column entries ≤ 0 and `b_i > 0` (after choosing the sign) proves
/// infeasibility alone. Returned in row order.
pub fn single_row_certificates(lp: &LpProblem) -> Vec<Vec<Rational>> {
    let mut max_entry = vec![Rational::zero(); lp.rows()];
    let mut min_entry = vec![Rational::zero(); lp.rows()];
    for j in 0..lp.num_columns() {
        for (i, v) in lp.column(j) {
            if *v > max_entry[*i] {
                max_entry[*i] = v.clone();
            }
            if *v < min_entry[*i] {
                min_entry[*i] = v.clone();
            }
        }
    }
    let mut found = Vec::new();
    for (i, b) in lp.rhs().iter().enumerate() {
        let sign = if b.is_positive() && !max_entry[i].is_positive() {
            Rational::one()
        } else if b.is_negative() && !min_entry[i].is_negative() {
            -Rational::one()
        } else {
            continue;
        };
        let mut y = vec![Rational::zero(); lp.rows()];
        y[i] = sign;
        found.push(y);
    }
    found
}

/// One encoding pair (e, e) with all 16 compatible decodings.
#[derive(Debug, Clone, Serialize)]
pub struct FixedEncodingCheck {
    pub canonical_index: usize,
    pub encoding: String,
    pub decodings: usize,
    pub feasible: bool,
    /// Farkas vector returned by the simplex.
    #[serde(serialize_with = "serialize_display_all")]
    pub farkas: Vec<Rational>,
    pub farkas_verified: bool,
    pub farkas_support: Vec<String>,
    /// Sparsest certificate: a single row the mixture can never fill.
    pub obstruction: Option<String>,
    pub obstruction_verified: bool,
}

/// A pair of encoding-class supports (S₁, S₂) for a product distribution.
#[derive(Debug, Clone, Serialize)]
pub struct SupportPair {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum NoGoStatus {
    NoGoConfirmed,
    Unverified(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct PbrNoGoReport {
    /// Compatible strategies counted with every encoding.
    pub compatible_raw: usize,
    /// Compatible strategies whose encodings send input 00 to bit 0.
    pub compatible_normalized: usize,
    /// Canonical indices of the encodings occurring in compatible strategies.
    pub encoding_classes: Vec<usize>,
    /// Every compatible strategy uses the same encoding for both senders
    /// (up to flipping the sent bit).
    pub diagonal_support: bool,
    pub fixed_encoding_checks: Vec<FixedEncodingCheck>,
    pub support_pairs_checked: usize,
    /// Product supports S₁ × S₂ contained in the diagonal.
    pub diagonal_products: Vec<SupportPair>,
    /// Diagonal product supports with two or more points (must be none).
    pub multi_point_diagonal_products: usize,
    pub lemma: String,
    /// With global shared randomness the target is reachable.
    pub globally_feasible: bool,
    pub global_point_verified: bool,
    /// The uniform mixture over the (e¹,e¹) and (e²,e²) compatible
    /// strategies reproduces the target exactly.
    pub uniform_mixture_reproduces_target: bool,
    pub status: NoGoStatus,
}

pub const PRODUCT_SUPPORT_LEMMA: &str = "If p1(E1)p2(E2) > 0 only on pairs with E1 = E2, then \
with S1, S2 the supports of p1, p2, S1 x S2 lies in the diagonal. For u in S1 and v in S2 this forces \
u = v, so S1 = S2 = {u} and the product is a point mass on (e_u, e_u). Every such point mass is \
infeasible by the fixed-encoding check, so no product distribution simulates the channel.";

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (1u32..1 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}

/// Runs the restricted shared-randomness analysis for the PBR channel:
/// (i) the compatible strategies pair each encoding with itself,
/// (ii) no mixture over the decodings of a fixed diagonal pair reproduces
/// the channel, and (iii) no product distribution over encoding pairs is
/// supported on the diagonal with more than one point.
pub fn pbr_restricted_sr_analysis() -> Result<PbrNoGoReport> {
    let target = build_pbr_mac();
    let shape = target.shape().clone();
    let raw = zero_compatible_filter(&target, false)?;
    let normalized = zero_compatible_filter(&target, true)?;

    let diagonal_support = raw
        .iter()
        .all(|s| s.encodings()[0].normalized() == s.encodings()[1].normalized());
    let mut encoding_classes: Vec<usize> = normalized
        .iter()
        .flat_map(|s| s.encodings().iter().map(|e| canonical_index(e).unwrap_or(usize::MAX)))
        .collect();
    encoding_classes.sort_unstable();
    encoding_classes.dedup();

    let family = canonical_encodings();
    let mut checks = Vec::new();
    for &u in &encoding_classes {
        let Some(enc) = (u < family.len()).then(|| family.get(u).clone()) else {
            continue;
        };
        let fixed: Vec<DeterministicStrategy> = normalized
            .iter()
            .filter(|s| s.encodings().iter().all(|e| *e == enc))
            .cloned()
            .collect();
        let lp = membership_problem(&target, &fixed)?;
        let result = simplex_solve(&lp)?;
        let farkas = result.farkas().map(<[Rational]>::to_vec).unwrap_or_default();
        let farkas_support = farkas
            .iter()
            .enumerate()
            .filter(|(_, y)| !y.is_zero())
            .map(|(i, _)| membership_row_label(&shape, i))
            .collect();
        let single = single_row_certificates(&lp).into_iter().next();
        let (obstruction, obstruction_verified) = match single {
            Some(y) => {
                let row = y.iter().position(|v| !v.is_zero()).expect("one nonzero entry");
                let cert = FeasibilityResult::Infeasible { farkas: y };
                (Some(membership_row_label(&shape, row)), cert.verify(&lp))
            }
            None => (None, false),
        };
        checks.push(FixedEncodingCheck {
            canonical_index: u,
            encoding: enc.to_string(),
            decodings: fixed.len(),
            feasible: result.is_feasible(),
            farkas_verified: !result.is_feasible() && result.verify(&lp),
            farkas,
            farkas_support,
            obstruction,
            obstruction_verified,
        });
    }

    let all_pairs: Vec<SupportPair> = subsets(&encoding_classes)
        .iter()
        .flat_map(|s1| {
            subsets(&encoding_classes)
                .into_iter()
                .map(move |s2| SupportPair { first: s1.clone(), second: s2 })
        })
        .collect();
    let diagonal_products: Vec<SupportPair> = all_pairs
        .iter()
        .filter(|p| p.first.iter().all(|u| p.second.iter().all(|v| u == v)))
        .cloned()
        .collect();
    let multi_point_diagonal_products =
        diagonal_products.iter().filter(|p| p.first.len() * p.second.len() >= 2).count();

    let global_lp = membership_problem(&target, &normalized)?;
    let global = simplex_solve(&global_lp)?;

    let uniform: Vec<DeterministicStrategy> = normalized
        .iter()
        .filter(|s| matches!(canonical_index(&s.encodings()[0]), Some(1 | 2)))
        .cloned()
        .collect();
    let uniform_mixture_reproduces_target = uniform.len() == 32
        && StrategyMixture::uniform(uniform)
            .and_then(|m| mixture_to_mac(&m, &shape))
            .is_ok_and(|mac| mac.exact_eq(&target) == Some(true));

    let mut failures = Vec::new();
    if normalized.len() != 48 {
        failures.push(format!("expected 48 compatible strategies, found {}", normalized.len()));
    }
    if !diagonal_support {
        failures.push("a compatible strategy uses different encodings".into());
    }
    for c in &checks {
        if c.feasible || !c.farkas_verified {
            failures.push(format!("encoding {} is not certified infeasible", c.encoding));
        }
    }
    if checks.len() != diagonal_products.len() {
        failures.push("diagonal point masses and fixed-encoding checks disagree".into());
    }
    if multi_point_diagonal_products != 0 {
        failures.push("a product support with several diagonal points exists".into());
    }
    let status = if failures.is_empty() {
        NoGoStatus::NoGoConfirmed
    } else {
        NoGoStatus::Unverified(failures.join("; "))
    };

    Ok(PbrNoGoReport {
        compatible_raw: raw.len(),
        compatible_normalized: normalized.len(),
        encoding_classes,
        diagonal_support,
        fixed_encoding_checks: checks,
        support_pairs_checked: all_pairs.len(),
        diagonal_products,
        multi_point_diagonal_products,
        lemma: PRODUCT_SUPPORT_LEMMA.into(),
        globally_feasible: global.is_feasible(),
        global_point_verified: global.is_feasible() && global.verify(&global_lp),
        uniform_mixture_reproduces_target,
        status,
    })
}

/// The exact channel Σ_s q_s P_s for a membership point.
pub fn combine_point(shape: &MacShape, strategies: &[DeterministicStrategy], point: &[Rational]) -> Result<Mac> {
    if strategies.len() != point.len() {
        return Err(Error::DimensionMismatch { expected: strategies.len(), found: point.len() });
    }
    let support = strategies
        .iter()
        .zip(point)
        .filter(|(_, q)| !q.is_zero())
        .map(|(s, q)| (s.clone(), q.clone()))
        .collect();
    mixture_to_mac(&StrategyMixture::new(support)?, shape)
}
