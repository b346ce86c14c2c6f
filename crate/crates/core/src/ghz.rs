// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The canonical N-qubit basis of conjugate pairs.
//!
//! A conjugate pair with coefficients α ≥ β ≥ 0 (α² + β² = 1) over an
//! N-bit string k and its bitwise complement k̄ consists of the two
//! orthogonal states
//!
//! ```text
//!   |ψ⁺⟩ = α|k⟩ + β|k̄⟩        |ψ⁻⟩ = β|k⟩ − α|k̄⟩
//! ```
//!
//! The 2^(N−1) pairs over all complement classes of bitstrings form a
//! complete orthonormal basis. Setting β = 0 degenerates a pair into the
//! two product states |k⟩, |k̄⟩; a basis with K entangled pairs and
//! 2^N − 2K product states is called hybrid.
//!
//! The canonical representative k of a complement class {k, k̄} is the
//! string whose leading bit (qubit 0) is 0, and pairs are enumerated in
//! lexicographic order of k — so pair `i` has k equal to the integer `i`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{StateVector, C64};

/// Coefficient normalization tolerance: α² + β² must equal 1 within this.
pub const COEFF_TOL: f64 = 1e-12;

/// Render a bitstring value as `n` characters, qubit 0 first.
pub fn bitstring(k: usize, n: usize) -> String {
    (0..n)
        .map(|q| {
            if (k >> (n - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parse an `n`-character bitstring, qubit 0 first.
pub fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n {
        return Err(Error::Parse(format!(
            "bitstring '{s}' has length {}, expected {n}",
            s.len()
        )));
    }
    let mut k = 0usize;
    for ch in s.chars() {
        k <<= 1;
        match ch {
            '0' => {}
            '1' => k |= 1,
            _ => return Err(Error::Parse(format!("bad character '{ch}' in bitstring"))),
        }
    }
    Ok(k)
}

/// Sign of an entangled pair member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which product state of a degenerate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Member {
    K,
    KBar,
}

/// Address of one basis member. `Entangled` addressing is valid only on
/// pairs with β > 0, `Product` addressing only on degenerate pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Entangled { pair: usize, sign: Sign },
    Product { pair: usize, member: Member },
}

impl StateLabel {
    pub fn plus(pair: usize) -> Self {
        StateLabel::Entangled {
            pair,
            sign: Sign::Plus,
        }
    }

    pub fn minus(pair: usize) -> Self {
        StateLabel::Entangled {
            pair,
            sign: Sign::Minus,
        }
    }

    pub fn product_k(pair: usize) -> Self {
        StateLabel::Product {
            pair,
            member: Member::K,
        }
    }

    pub fn product_kbar(pair: usize) -> Self {
        StateLabel::Product {
            pair,
            member: Member::KBar,
        }
    }

    pub fn pair(&self) -> usize {
        match self {
            StateLabel::Entangled { pair, .. } | StateLabel::Product { pair, .. } => *pair,
        }
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, StateLabel::Entangled { .. })
    }

    /// The other member of the same pair.
    pub fn partner(&self) -> StateLabel {
        match *self {
            StateLabel::Entangled { pair, sign } => StateLabel::Entangled {
                pair,
                sign: match sign {
                    Sign::Plus => Sign::Minus,
                    Sign::Minus => Sign::Plus,
                },
            },
            StateLabel::Product { pair, member } => StateLabel::Product {
                pair,
                member: match member {
                    Member::K => Member::KBar,
                    Member::KBar => Member::K,
                },
            },
        }
    }

    fn sort_key(&self) -> (usize, u8) {
        match *self {
            StateLabel::Entangled { pair, sign } => (pair, if sign == Sign::Plus { 0 } else { 1 }),
            StateLabel::Product { pair, member } => (pair, if member == Member::K { 0 } else { 1 }),
        }
    }
}

impl PartialOrd for StateLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StateLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Entangled { pair, sign } => {
                write!(
                    f,
                    "pair:{pair}:{}",
                    if *sign == Sign::Plus { "+" } else { "-" }
                )
            }
            StateLabel::Product { pair, member } => {
                write!(
                    f,
                    "prod:{pair}:{}",
                    if *member == Member::K { "k" } else { "kbar" }
                )
            }
        }
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "bad state label '{s}', expected pair:<i>:<+|-> or prod:<i>:<k|kbar>"
            )));
        }
        let pair: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad pair index in '{s}'")))?;
        match (parts[0], parts[2]) {
            ("pair", "+") => Ok(StateLabel::plus(pair)),
            ("pair", "-") => Ok(StateLabel::minus(pair)),
            ("prod", "k") => Ok(StateLabel::product_k(pair)),
            ("prod", "kbar") => Ok(StateLabel::product_kbar(pair)),
            _ => Err(Error::Parse(format!("bad state label '{s}'"))),
        }
    }
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateLabel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One conjugate pair: canonical string k, coefficients via α².
///
/// α² is the stored source of truth so that test inputs like α² = 0.9
/// survive serialization exactly; α and β are cached square roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugatePair {
    index: usize,
    k: usize,
    alpha_sq: f64,
    alpha: f64,
    beta: f64,
}

impl ConjugatePair {
    fn from_alpha_sq(index: usize, k: usize, alpha_sq: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&alpha_sq) {
            return Err(Error::invalid(format!(
                "pair {index}: alpha^2 = {alpha_sq} outside [1/2, 1] (need alpha >= beta >= 0)"
            )));
        }
        Ok(ConjugatePair {
            index,
            k,
            alpha_sq,
            alpha: alpha_sq.sqrt(),
            // For alpha_sq in [1/2, 1] the subtraction is exact.
            beta: (1.0 - alpha_sq).sqrt(),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Canonical bitstring as an integer (qubit 0 = most significant bit,
    /// always 0 here).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Complement string k̄ for an `n`-qubit basis.
    pub fn k_bar(&self, n: usize) -> usize {
        ((1usize << n) - 1) ^ self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn beta_sq(&self) -> f64 {
        1.0 - self.alpha_sq
    }

    /// β = 0 marks a pair degenerated into the products |k⟩, |k̄⟩.
    pub fn is_degenerate(&self) -> bool {
        self.alpha_sq == 1.0
    }

    /// Entanglement entropy in ebits: −α² log₂ α² − β² log₂ β².
    pub fn entanglement(&self) -> f64 {
        let a = self.alpha_sq;
        let b = self.beta_sq();
        let mut e = 0.0;
        if a > 0.0 {
            e -= a * a.log2();
        }
        if b > 0.0 {
            e -= b * b.log2();
        }
        e
    }
}

/// Make-up of a basis: all pairs entangled, or K entangled pairs plus
/// 2^N − 2K product states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    AllEntangled,
    Hybrid { entangled_pairs: usize },
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::AllEntangled => write!(f, "all_entangled"),
            BasisKind::Hybrid { entangled_pairs } => write!(f, "hybrid:{entangled_pairs}"),
        }
    }
}

/// A complete basis of 2^(N−1) conjugate pairs on N qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    num_qubits: usize,
    pairs: Vec<ConjugatePair>,
    kind: BasisKind,
}

impl Basis {
    /// Build from explicit (α, β) coefficient pairs, one per canonical
    /// bitstring in lexicographic order.
    pub fn build(num_qubits: usize, coefficients: &[(f64, f64)]) -> Result<Self> {
        let expected = Basis::pair_count_for(num_qubits)?;
        if coefficients.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} coefficient pairs for {num_qubits} qubits, got {}",
                coefficients.len()
            )));
        }
        let mut alpha_sqs = Vec::with_capacity(expected);
        for (i, &(alpha, beta)) in coefficients.iter().enumerate() {
            if beta < 0.0 || alpha < beta {
                return Err(Error::invalid(format!(
                    "pair {i}: need alpha >= beta >= 0, got ({alpha}, {beta})"
                )));
            }
            let norm = alpha * alpha + beta * beta;
            if (norm - 1.0).abs() > COEFF_TOL {
                return Err(Error::invalid(format!(
                    "pair {i}: alpha^2 + beta^2 = {norm}, must be 1 within {COEFF_TOL}"
                )));
            }
            alpha_sqs.push(alpha * alpha);
        }
        Basis::from_alpha_sq(num_qubits, &alpha_sqs)
    }

    /// Build from α² values, one per canonical bitstring in lexicographic
    /// order. The preferred constructor: exact α² inputs stay exact.
    pub fn from_alpha_sq(num_qubits: usize, alpha_sqs: &[f64]) -> Result<Self> {
        let expected = Basis::pair_count_for(num_qubits)?;
        if alpha_sqs.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} alpha^2 values for {num_qubits} qubits, got {}",
                alpha_sqs.len()
            )));
        }
        let pairs: Vec<ConjugatePair> = alpha_sqs
            .iter()
            .enumerate()
            .map(|(i, &a)| ConjugatePair::from_alpha_sq(i, i, a))
            .collect::<Result<_>>()?;
        let entangled = pairs.iter().filter(|p| !p.is_degenerate()).count();
        let kind = if entangled == expected {
            BasisKind::AllEntangled
        } else {
            BasisKind::Hybrid {
                entangled_pairs: entangled,
            }
        };
        let basis = Basis {
            num_qubits,
            pairs,
            kind,
        };
        debug_assert!(basis.verify_orthonormality_structure());
        Ok(basis)
    }

    fn pair_count_for(num_qubits: usize) -> Result<usize> {
        if num_qubits < 2 {
            return Err(Error::invalid(
                "a conjugate-pair basis needs at least 2 qubits",
            ));
        }
        if num_qubits > 20 {
            return Err(Error::invalid("more than 20 qubits is out of scope"));
        }
        Ok(1usize << (num_qubits - 1))
    }

    /// All pairs maximally entangled (α² = 1/2). For N = 2 this is the
    /// Bell basis.
    pub fn maximal(num_qubits: usize) -> Result<Self> {
        let count = Basis::pair_count_for(num_qubits)?;
        Basis::from_alpha_sq(num_qubits, &vec![0.5; count])
    }

    /// All pairs degenerate: the computational basis.
    pub fn computational(num_qubits: usize) -> Result<Self> {
        let count = Basis::pair_count_for(num_qubits)?;
        Basis::from_alpha_sq(num_qubits, &vec![1.0; count])
    }

    /// Hybrid basis: the first `entangled_pairs` pairs maximally
    /// entangled, the rest degenerate.
    pub fn hybrid(num_qubits: usize, entangled_pairs: usize) -> Result<Self> {
        let count = Basis::pair_count_for(num_qubits)?;
        if entangled_pairs >= count {
            return Err(Error::invalid(format!(
                "a hybrid basis needs K < {count} entangled pairs, got {entangled_pairs}"
            )));
        }
        let mut alpha_sqs = vec![0.5; entangled_pairs];
        alpha_sqs.resize(count, 1.0);
        Basis::from_alpha_sq(num_qubits, &alpha_sqs)
    }

    /// All-entangled basis with α² drawn uniformly from (1/2, 1),
    /// deterministically for a given seed.
    pub fn random(num_qubits: usize, seed: u64) -> Result<Self> {
        let count = Basis::pair_count_for(num_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha_sqs: Vec<f64> = (0..count)
            .map(|_| loop {
                let u: f64 = rng.gen();
                if u > 0.0 {
                    break 0.5 + 0.5 * u;
                }
            })
            .collect();
        Basis::from_alpha_sq(num_qubits, &alpha_sqs)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[ConjugatePair] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> Result<&ConjugatePair> {
        self.pairs
            .get(index)
            .ok_or_else(|| Error::invalid(format!("pair index {index} out of range")))
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn entangled_pair_count(&self) -> usize {
        match self.kind {
            BasisKind::AllEntangled => self.pairs.len(),
            BasisKind::Hybrid { entangled_pairs } => entangled_pairs,
        }
    }

    /// Every member label in canonical order; 2^N in total.
    pub fn labels(&self) -> Vec<StateLabel> {
        let mut out = Vec::with_capacity(self.dim());
        for p in &self.pairs {
            if p.is_degenerate() {
                out.push(StateLabel::product_k(p.index));
                out.push(StateLabel::product_kbar(p.index));
            } else {
                out.push(StateLabel::plus(p.index));
                out.push(StateLabel::minus(p.index));
            }
        }
        out
    }

    /// Check that a label addresses this basis consistently.
    pub fn validate_label(&self, label: &StateLabel) -> Result<()> {
        let pair = self.pair(label.pair())?;
        match label {
            StateLabel::Entangled { .. } if pair.is_degenerate() => Err(Error::invalid(format!(
                "pair {} is degenerate; sign addressing is invalid",
                pair.index
            ))),
            StateLabel::Product { .. } if !pair.is_degenerate() => Err(Error::invalid(format!(
                "pair {} is entangled; product addressing is invalid",
                pair.index
            ))),
            _ => Ok(()),
        }
    }

    /// Materialize one member as a state vector.
    pub fn state_vector(&self, label: &StateLabel) -> Result<StateVector> {
        self.validate_label(label)?;
        let pair = self.pair(label.pair())?;
        let dim = self.dim();
        let kbar = pair.k_bar(self.num_qubits);
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        match label {
            StateLabel::Entangled {
                sign: Sign::Plus, ..
            } => {
                amps[pair.k] = C64::new(pair.alpha, 0.0);
                amps[kbar] = C64::new(pair.beta, 0.0);
            }
            StateLabel::Entangled {
                sign: Sign::Minus, ..
            } => {
                amps[pair.k] = C64::new(pair.beta, 0.0);
                amps[kbar] = C64::new(-pair.alpha, 0.0);
            }
            StateLabel::Product {
                member: Member::K, ..
            } => {
                amps[pair.k] = C64::new(1.0, 0.0);
            }
            StateLabel::Product {
                member: Member::KBar,
                ..
            } => {
                amps[kbar] = C64::new(1.0, 0.0);
            }
        }
        StateVector::from_amplitudes(self.num_qubits, amps)
    }

    /// The pair whose support contains the computational bitstring `b`.
    pub fn pair_of_bitstring(&self, b: usize) -> &ConjugatePair {
        let msb = 1usize << (self.num_qubits - 1);
        let canonical = if b & msb == 0 {
            b
        } else {
            b ^ (self.dim() - 1)
        };
        &self.pairs[canonical]
    }

    /// Structural orthonormality: canonical strings are exactly
    /// 0..2^(N−1) and every pair is internally consistent. Together with
    /// per-pair normalization this implies the 2^N members are
    /// orthonormal, since distinct pairs have disjoint support.
    fn verify_orthonormality_structure(&self) -> bool {
        self.pairs.len() == 1 << (self.num_qubits - 1)
            && self
                .pairs
                .iter()
                .enumerate()
                .all(|(i, p)| p.index == i && p.k == i && (0.5..=1.0).contains(&p.alpha_sq))
    }
}

#[derive(Serialize, Deserialize)]
struct PairDoc {
    k: String,
    alpha_sq: f64,
}

#[derive(Serialize, Deserialize)]
struct BasisDoc {
    n: usize,
    kind: String,
    pairs: Vec<PairDoc>,
}

impl Serialize for Basis {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let doc = BasisDoc {
            n: self.num_qubits,
            kind: self.kind.to_string(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairDoc {
                    k: bitstring(p.k, self.num_qubits),
                    alpha_sq: p.alpha_sq,
                })
                .collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Basis {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let doc = BasisDoc::deserialize(deserializer)?;
        Basis::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

impl Basis {
    fn from_doc(doc: BasisDoc) -> Result<Self> {
        let expected = Basis::pair_count_for(doc.n)?;
        if doc.pairs.len() != expected {
            return Err(Error::invalid(format!(
                "basis file lists {} pairs, expected {expected}",
                doc.pairs.len()
            )));
        }
        let mut alpha_sqs = vec![f64::NAN; expected];
        for pd in &doc.pairs {
            let k = parse_bitstring(&pd.k, doc.n)?;
            if k >= expected {
                return Err(Error::invalid(format!(
                    "pair string '{}' is not canonical (leading bit must be 0)",
                    pd.k
                )));
            }
            if !alpha_sqs[k].is_nan() {
                return Err(Error::invalid(format!("duplicate pair string '{}'", pd.k)));
            }
            alpha_sqs[k] = pd.alpha_sq;
        }
        let basis = Basis::from_alpha_sq(doc.n, &alpha_sqs)?;
        let declared: BasisKind = doc.kind.parse()?;
        if declared != basis.kind {
            return Err(Error::invalid(format!(
                "declared kind '{}' does not match coefficients ({})",
                doc.kind, basis.kind
            )));
        }
        Ok(basis)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad basis JSON: {e}")))
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all_entangled" {
            return Ok(BasisKind::AllEntangled);
        }
        if let Some(k) = s.strip_prefix("hybrid:") {
            let entangled_pairs = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad kind '{s}'")))?;
            return Ok(BasisKind::Hybrid { entangled_pairs });
        }
        Err(Error::Parse(format!(
            "bad kind '{s}', expected all_entangled or hybrid:<K>"
        )))
    }
}

/// Which members of one pair a set holds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairOccupancy {
    pub plus: bool,
    pub minus: bool,
    pub prod_k: bool,
    pub prod_kbar: bool,
}

impl PairOccupancy {
    pub fn entangled_count(&self) -> usize {
        self.plus as usize + self.minus as usize
    }

    pub fn product_count(&self) -> usize {
        self.prod_k as usize + self.prod_kbar as usize
    }

    pub fn total(&self) -> usize {
        self.entangled_count() + self.product_count()
    }

    pub fn full_entangled_pair(&self) -> bool {
        self.plus && self.minus
    }
}

/// A subset of basis members.
#[derive(Clone, Debug)]
pub struct StateSet<'a> {
    basis: &'a Basis,
    labels: Vec<StateLabel>,
}

impl<'a> StateSet<'a> {
    /// Validates every label against the basis; duplicates are dropped.
    pub fn new(basis: &'a Basis, labels: impl IntoIterator<Item = StateLabel>) -> Result<Self> {
        let mut labels: Vec<StateLabel> = labels.into_iter().collect();
        labels.sort();
        labels.dedup();
        for label in &labels {
            basis.validate_label(label)?;
        }
        Ok(StateSet { basis, labels })
    }

    pub fn full(basis: &'a Basis) -> Self {
        StateSet {
            labels: basis.labels(),
            basis,
        }
    }

    pub fn basis(&self) -> &'a Basis {
        self.basis
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn cardinality(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, label: &StateLabel) -> bool {
        self.labels.binary_search(label).is_ok()
    }

    /// Set with one more label.
    pub fn with_label(&self, label: StateLabel) -> Result<StateSet<'a>> {
        let mut labels = self.labels.clone();
        labels.push(label);
        StateSet::new(self.basis, labels)
    }

    /// Set with one label removed.
    pub fn without_label(&self, label: &StateLabel) -> StateSet<'a> {
        StateSet {
            basis: self.basis,
            labels: self.labels.iter().copied().filter(|l| l != label).collect(),
        }
    }

    /// Per-pair membership table, indexed by pair.
    pub fn occupancy(&self) -> Vec<PairOccupancy> {
        let mut occ = vec![PairOccupancy::default(); self.basis.pair_count()];
        for label in &self.labels {
            let slot = &mut occ[label.pair()];
            match label {
                StateLabel::Entangled {
                    sign: Sign::Plus, ..
                } => slot.plus = true,
                StateLabel::Entangled {
                    sign: Sign::Minus, ..
                } => slot.minus = true,
                StateLabel::Product {
                    member: Member::K, ..
                } => slot.prod_k = true,
                StateLabel::Product {
                    member: Member::KBar,
                    ..
                } => slot.prod_kbar = true,
            }
        }
        occ
    }

    /// Mean entanglement over the members (product members contribute 0).
    pub fn average_entanglement(&self) -> Result<f64> {
        if self.labels.is_empty() {
            return Err(Error::invalid(
                "average entanglement of an empty set is undefined",
            ));
        }
        let sum: f64 = self
            .labels
            .iter()
            .map(|l| match l {
                StateLabel::Entangled { pair, .. } => self.basis.pairs[*pair].entanglement(),
                StateLabel::Product { .. } => 0.0,
            })
            .sum();
        Ok(sum / self.labels.len() as f64)
    }

    /// Parse the compact set language: comma-separated terms among
    /// `all`, `all-plus`, `pair:<i|a..b>:<+|-|both>`,
    /// `prod:<i|a..b>:<k|kbar|both>`; a leading `!` removes instead of
    /// adding. Terms apply left to right.
    pub fn parse(basis: &'a Basis, spec: &str) -> Result<Self> {
        let mut labels: Vec<StateLabel> = Vec::new();
        for raw in spec.split(',') {
            let term = raw.trim();
            if term.is_empty() {
                continue;
            }
            let (negate, term) = match term.strip_prefix('!') {
                Some(rest) => (true, rest),
                None => (false, term),
            };
            let expansion = expand_term(basis, term)?;
            if negate {
                labels.retain(|l| !expansion.contains(l));
            } else {
                labels.extend(expansion);
            }
        }
        StateSet::new(basis, labels)
    }
}

fn parse_index_range(s: &str, limit: usize) -> Result<std::ops::Range<usize>> {
    let range = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a
            .parse()
            .map_err(|_| Error::Parse(format!("bad index '{a}'")))?;
        let b: usize = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad index '{b}'")))?;
        a..b
    } else {
        let i: usize = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad index '{s}'")))?;
        i..i + 1
    };
    if range.end > limit || range.start >= range.end {
        return Err(Error::Parse(format!(
            "index range '{s}' out of bounds (pairs: 0..{limit})"
        )));
    }
    Ok(range)
}

fn expand_term(basis: &Basis, term: &str) -> Result<Vec<StateLabel>> {
    match term {
        "all" => return Ok(basis.labels()),
        "all-plus" => {
            // One member of every pair: '+' for entangled pairs, both
            // product states for degenerate ones.
            return Ok(basis
                .pairs()
                .iter()
                .flat_map(|p| {
                    if p.is_degenerate() {
                        vec![
                            StateLabel::product_k(p.index()),
                            StateLabel::product_kbar(p.index()),
                        ]
                    } else {
                        vec![StateLabel::plus(p.index())]
                    }
                })
                .collect());
        }
        _ => {}
    }
    let parts: Vec<&str> = term.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad set term '{term}'")));
    }
    let range = parse_index_range(parts[1], basis.pair_count())?;
    let mut out = Vec::new();
    for pair in range {
        match (parts[0], parts[2]) {
            ("pair", "+") => out.push(StateLabel::plus(pair)),
            ("pair", "-") => out.push(StateLabel::minus(pair)),
            ("pair", "both") => {
                out.push(StateLabel::plus(pair));
                out.push(StateLabel::minus(pair));
            }
            ("prod", "k") => out.push(StateLabel::product_k(pair)),
            ("prod", "kbar") => out.push(StateLabel::product_kbar(pair)),
            ("prod", "both") => {
                out.push(StateLabel::product_k(pair));
                out.push(StateLabel::product_kbar(pair));
            }
            _ => return Err(Error::Parse(format!("bad set term '{term}'"))),
        }
    }
    Ok(out)
}
