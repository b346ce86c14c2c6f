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

//! Bipartitions of the qubits and the block structure they induce.
//!
//! Fix a cut (A|B). Writing a pair's strings as (A-substring, B-substring),
//! every conjugate pair locks together with the unique partner pair that
//! shares its A-substring and carries the complemented B-substring. The
//! 2^(N−1) pairs therefore group into 2^(N−2) two-pair blocks, and the four
//! members of a block reduce — after relabeling each side's two substrings
//! to one effective qubit — to two conjugate pairs on two qubits, one
//! supported on {|00⟩, |11⟩} and one on {|01⟩, |10⟩}.
//!
//! Partner lookup is plain bitmask arithmetic on the canonical string:
//! XOR with the amplitude mask of the side that does not contain qubit 0
//! (this lands directly on the canonical representative).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ghz::{Basis, StateLabel};
use crate::qla::{QubitSubset, StateVector, C64};

/// A split of the qubits into two nonempty sides, canonicalized so that
/// |A| ≤ |B|, with ties broken by requiring qubit 0 ∈ A.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    num_qubits: usize,
    side_a: QubitSubset,
}

impl fmt::Debug for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bipartition({self})")
    }
}

const QUBIT_CHARS: &[u8] = b"0123456789abcdef";

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in self.side_a.indices() {
            write!(f, "{}", QUBIT_CHARS[q] as char)?;
        }
        write!(f, "|")?;
        for q in self.side_b().indices() {
            write!(f, "{}", QUBIT_CHARS[q] as char)?;
        }
        Ok(())
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Parse "0|12"-style cuts; both sides must be listed and together
    /// cover 0..N−1 exactly.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("bad bipartition '{s}', expected e.g. 0|12")))?;
        let parse_side = |side: &str| -> Result<QubitSubset> {
            let mut mask = 0u32;
            for ch in side.chars() {
                let q = QUBIT_CHARS
                    .iter()
                    .position(|&c| c as char == ch)
                    .ok_or_else(|| Error::Parse(format!("bad qubit character '{ch}'")))?;
                mask |= 1 << q;
            }
            Ok(QubitSubset::from_mask(mask))
        };
        let side_a = parse_side(a)?;
        let side_b = parse_side(b)?;
        if side_a.intersects(&side_b) {
            return Err(Error::Parse(format!(
                "bipartition '{s}' has overlapping sides"
            )));
        }
        let n = side_a.union(&side_b).len();
        if side_a.union(&side_b) != QubitSubset::full(n) {
            return Err(Error::Parse(format!(
                "bipartition '{s}' must cover qubits 0..{n} contiguously"
            )));
        }
        Bipartition::new(n, side_a)
    }
}

impl Bipartition {
    /// Canonicalizing constructor: either side of the cut may be passed.
    pub fn new(num_qubits: usize, side: QubitSubset) -> Result<Self> {
        if num_qubits < 2 {
            return Err(Error::invalid("a bipartition needs at least 2 qubits"));
        }
        let full = QubitSubset::full(num_qubits);
        if !side.is_subset_of(&full) {
            return Err(Error::invalid(
                "side references qubits outside the register",
            ));
        }
        if side.is_empty() || side.len() == num_qubits {
            return Err(Error::invalid(
                "both sides of a bipartition must be nonempty",
            ));
        }
        let comp = side.complement(num_qubits);
        let side_a = if side.len() < comp.len() {
            side
        } else if comp.len() < side.len() {
            comp
        } else if side.contains(0) {
            side
        } else {
            comp
        };
        Ok(Bipartition { num_qubits, side_a })
    }

    /// All canonical nontrivial bipartitions, one per complement class,
    /// ordered by ascending side-A mask: 2^(N−1) − 1 of them.
    pub fn enumerate(num_qubits: usize) -> Result<Vec<Bipartition>> {
        if num_qubits < 2 {
            return Err(Error::invalid("a bipartition needs at least 2 qubits"));
        }
        let full = (1u32 << num_qubits) - 1;
        let mut out = Vec::with_capacity((1 << (num_qubits - 1)) - 1);
        for mask in 1..full {
            let bp = Bipartition::new(num_qubits, QubitSubset::from_mask(mask))?;
            if bp.side_a.mask() == mask {
                out.push(bp);
            }
        }
        Ok(out)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Alice's side (the m qubits).
    pub fn side_a(&self) -> QubitSubset {
        self.side_a
    }

    pub fn side_b(&self) -> QubitSubset {
        self.side_a.complement(self.num_qubits)
    }

    pub fn m(&self) -> usize {
        self.side_a.len()
    }

    /// Amplitude mask of the side that does not contain qubit 0; XOR-ing a
    /// canonical string with it yields the canonical partner string.
    fn partner_mask(&self) -> usize {
        if self.side_a.contains(0) {
            self.side_b().amp_mask(self.num_qubits)
        } else {
            self.side_a.amp_mask(self.num_qubits)
        }
    }

    /// Partner pair index under this cut (pair indices coincide with
    /// canonical strings).
    pub fn partner_pair(&self, pair_index: usize) -> usize {
        debug_assert!(pair_index < 1 << (self.num_qubits - 1));
        pair_index ^ self.partner_mask()
    }
}

/// Hybrid classification of a block by how many of its pairs degenerated
/// into product states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    TwoEntangledPairs,
    OnePairTwoProducts,
    FourProducts,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::TwoEntangledPairs => write!(f, "two_entangled_pairs"),
            BlockKind::OnePairTwoProducts => write!(f, "one_pair_two_products"),
            BlockKind::FourProducts => write!(f, "four_products"),
        }
    }
}

/// Two conjugate pairs locked together under a bipartition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub bipartition: Bipartition,
    pub pair_i: usize,
    pub pair_j: usize,
    pub kind: BlockKind,
}

impl Block {
    pub fn contains_pair(&self, pair: usize) -> bool {
        self.pair_i == pair || self.pair_j == pair
    }

    pub fn pair_indices(&self) -> [usize; 2] {
        [self.pair_i, self.pair_j]
    }
}

/// Classify a block by the degeneracy of its two pairs.
pub fn classify_hybrid(basis: &Basis, pair_i: usize, pair_j: usize) -> Result<BlockKind> {
    let deg =
        basis.pair(pair_i)?.is_degenerate() as usize + basis.pair(pair_j)?.is_degenerate() as usize;
    Ok(match deg {
        0 => BlockKind::TwoEntangledPairs,
        1 => BlockKind::OnePairTwoProducts,
        _ => BlockKind::FourProducts,
    })
}

/// The unique block containing `pair_index` under `bp`.
pub fn block_of(basis: &Basis, bp: &Bipartition, pair_index: usize) -> Result<Block> {
    if bp.num_qubits() != basis.num_qubits() {
        return Err(Error::invalid("bipartition does not match basis size"));
    }
    basis.pair(pair_index)?;
    let partner = bp.partner_pair(pair_index);
    let (pair_i, pair_j) = (pair_index.min(partner), pair_index.max(partner));
    Ok(Block {
        bipartition: *bp,
        pair_i,
        pair_j,
        kind: classify_hybrid(basis, pair_i, pair_j)?,
    })
}

/// All 2^(N−2) blocks under `bp`, ordered by their lower pair index.
pub fn blocks_for(basis: &Basis, bp: &Bipartition) -> Result<Vec<Block>> {
    if bp.num_qubits() != basis.num_qubits() {
        return Err(Error::invalid("bipartition does not match basis size"));
    }
    let count = basis.pair_count();
    let mut seen = vec![false; count];
    let mut out = Vec::with_capacity(count / 2);
    for p in 0..count {
        if seen[p] {
            continue;
        }
        let q = bp.partner_pair(p);
        seen[p] = true;
        seen[q] = true;
        out.push(Block {
            bipartition: *bp,
            pair_i: p,
            pair_j: q,
            kind: classify_hybrid(basis, p, q)?,
        });
    }
    Ok(out)
}

/// A block's four members rewritten as two-qubit states: side A collapses
/// to one effective qubit (0 ↦ pair i's A-substring) and likewise side B.
#[derive(Clone, Debug)]
pub struct CompactForm {
    pub block: Block,
    /// The four members with their effective two-qubit vectors; pair i is
    /// supported on {|00⟩, |11⟩} and pair j on {|01⟩, |10⟩}.
    pub states: Vec<(StateLabel, StateVector)>,
}

/// Rewrite a block in its compact two-qubit form. The relabeling is
/// unitary on the block's support, so all inner products are preserved
/// exactly.
pub fn compact_form(basis: &Basis, block: &Block) -> Result<CompactForm> {
    let n = basis.num_qubits();
    let bp = &block.bipartition;
    let a_mask = bp.side_a().amp_mask(n);
    let b_mask = bp.side_b().amp_mask(n);
    let anchor = basis.pair(block.pair_i)?.k();

    let compact_index = |x: usize| -> usize {
        let bit_a = ((x & a_mask) != (anchor & a_mask)) as usize;
        let bit_b = ((x & b_mask) != (anchor & b_mask)) as usize;
        (bit_a << 1) | bit_b
    };

    let mut states = Vec::with_capacity(4);
    for pair_index in block.pair_indices() {
        let pair = basis.pair(pair_index)?;
        let idx_k = compact_index(pair.k());
        let idx_kbar = compact_index(pair.k_bar(n));
        debug_assert_eq!(idx_k ^ idx_kbar, 0b11);
        let mut push = |label: StateLabel, amp_k: f64, amp_kbar: f64| {
            let mut amps = vec![C64::new(0.0, 0.0); 4];
            amps[idx_k] = C64::new(amp_k, 0.0);
            amps[idx_kbar] = C64::new(amp_kbar, 0.0);
            states.push((label, StateVector::from_amplitudes(2, amps).unwrap()));
        };
        if pair.is_degenerate() {
            push(StateLabel::product_k(pair_index), 1.0, 0.0);
            push(StateLabel::product_kbar(pair_index), 0.0, 1.0);
        } else {
            push(StateLabel::plus(pair_index), pair.alpha(), pair.beta());
            push(StateLabel::minus(pair_index), pair.beta(), -pair.alpha());
        }
    }
    Ok(CompactForm {
        block: *block,
        states,
    })
}

impl CompactForm {
    pub fn state_for(&self, label: &StateLabel) -> Option<&StateVector> {
        self.states.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::Basis;

    fn bp(n: usize, qubits: &[usize]) -> Bipartition {
        Bipartition::new(n, QubitSubset::from_indices(qubits)).unwrap()
    }

    /// Brute-force partner oracle: scan every other pair for the
    /// substring relation "same A-part, complemented B-part" in either
    /// orientation of the candidate's two strings.
    fn partner_oracle(basis: &Basis, cut: &Bipartition, pair: usize) -> Vec<usize> {
        let n = basis.num_qubits();
        let full = (1usize << n) - 1;
        let am = cut.side_a().amp_mask(n);
        let bm = cut.side_b().amp_mask(n);
        let k = basis.pair(pair).unwrap().k();
        let mut found = Vec::new();
        for other in 0..basis.pair_count() {
            if other == pair {
                continue;
            }
            let ko = basis.pair(other).unwrap().k();
            for cand in [ko, ko ^ full] {
                if cand & am == k & am && (cand & bm) == (k ^ full) & bm {
                    found.push(other);
                }
            }
        }
        found.sort();
        found.dedup();
        found
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(Bipartition::enumerate(2).unwrap().len(), 1);
        assert_eq!(Bipartition::enumerate(3).unwrap().len(), 3);
        assert_eq!(Bipartition::enumerate(4).unwrap().len(), 7);
        assert!(Bipartition::enumerate(1).is_err());
    }

    #[test]
    fn three_qubit_bipartitions_are_single_qubit_cuts() {
        let cuts = Bipartition::enumerate(3).unwrap();
        let expected = ["0|12", "1|02", "2|01"];
        let shown: Vec<String> = cuts.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, expected);
    }

    #[test]
    fn canonicalization_handles_complements_and_ties() {
        // Passing either side yields the same bipartition.
        let a = bp(3, &[1]);
        let b = bp(3, &[0, 2]);
        assert_eq!(a, b);
        // Tie at N = 4: qubit 0 goes to side A.
        let t = bp(4, &[2, 3]);
        assert!(t.side_a().contains(0));
        assert_eq!(t.to_string(), "01|23");
    }

    #[test]
    fn bipartition_string_round_trip() {
        for s in ["0|12", "1|02", "01|23", "0|1"] {
            let cut: Bipartition = s.parse().unwrap();
            assert_eq!(cut.to_string(), s);
        }
        assert!("0|0".parse::<Bipartition>().is_err());
        assert!("0|2".parse::<Bipartition>().is_err()); // qubit 1 missing
        assert!("012".parse::<Bipartition>().is_err());
    }

    #[test]
    fn two_qubit_single_block() {
        let basis = Basis::maximal(2).unwrap();
        let cut = bp(2, &[0]);
        let blocks = blocks_for(&basis, &cut).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].pair_indices(), [0, 1]);
    }

    #[test]
    fn three_qubit_partners_match_worked_examples() {
        let basis = Basis::maximal(3).unwrap();
        // Cut {0}|{1,2}: partner of k=000 flips the B bits: 011.
        let cut_a = bp(3, &[0]);
        assert_eq!(cut_a.partner_pair(0b000), 0b011);
        // Cut {1}|{0,2}: flipping B bits of 000 gives 101, whose canonical
        // representative is 010.
        let cut_b = bp(3, &[1]);
        assert_eq!(cut_b.partner_pair(0b000), 0b010);
        // Both agree with the brute-force substring oracle.
        for cut in Bipartition::enumerate(3).unwrap() {
            for pair in 0..4 {
                let oracle = partner_oracle(&basis, &cut, pair);
                assert_eq!(
                    oracle,
                    vec![cut.partner_pair(pair)],
                    "cut {cut} pair {pair}"
                );
            }
        }
    }

    #[test]
    fn block_of_is_consistent_with_blocks_for() {
        let basis = Basis::maximal(4).unwrap();
        for cut in Bipartition::enumerate(4).unwrap() {
            let blocks = blocks_for(&basis, &cut).unwrap();
            for pair in 0..basis.pair_count() {
                let b = block_of(&basis, &cut, pair).unwrap();
                assert!(blocks.contains(&b));
                assert!(b.contains_pair(pair));
            }
        }
    }

    #[test]
    fn blocks_partition_pairs_with_expected_count() {
        for n in 2..=6 {
            let basis = Basis::maximal(n).unwrap();
            for cut in Bipartition::enumerate(n).unwrap() {
                let blocks = blocks_for(&basis, &cut).unwrap();
                assert_eq!(blocks.len(), 1 << (n - 2));
                let mut seen = vec![0usize; basis.pair_count()];
                for b in &blocks {
                    assert_ne!(b.pair_i, b.pair_j);
                    seen[b.pair_i] += 1;
                    seen[b.pair_j] += 1;
                }
                assert!(seen.iter().all(|&c| c == 1));
                // Partner relation is an involution.
                for p in 0..basis.pair_count() {
                    assert_eq!(cut.partner_pair(cut.partner_pair(p)), p);
                }
            }
        }
    }

    #[test]
    fn same_m_different_qubits_changes_partner_map() {
        let cuts = Bipartition::enumerate(3).unwrap();
        // All three cuts have m = 1 but different partner maps.
        let maps: Vec<Vec<usize>> = cuts
            .iter()
            .map(|c| (0..4).map(|p| c.partner_pair(p)).collect())
            .collect();
        assert_ne!(maps[0], maps[1]);
        assert_ne!(maps[1], maps[2]);
    }

    #[test]
    fn compact_form_of_bell_block_is_bell_basis() {
        let basis = Basis::maximal(2).unwrap();
        let cut = bp(2, &[0]);
        let block = block_of(&basis, &cut, 0).unwrap();
        let compact = compact_form(&basis, &block).unwrap();
        assert_eq!(compact.states.len(), 4);
        const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;
        let plus0 = compact.state_for(&StateLabel::plus(0)).unwrap();
        assert!((plus0.amp(0b00).re - SQRT_HALF).abs() < 1e-15);
        assert!((plus0.amp(0b11).re - SQRT_HALF).abs() < 1e-15);
        let plus1 = compact.state_for(&StateLabel::plus(1)).unwrap();
        assert!((plus1.amp(0b01).re - SQRT_HALF).abs() < 1e-15);
        assert!((plus1.amp(0b10).re - SQRT_HALF).abs() < 1e-15);
    }

    #[test]
    fn compact_form_preserves_gram_matrix() {
        let basis = Basis::from_alpha_sq(3, &[0.64, 0.9, 0.75, 0.81]).unwrap();
        let cut = bp(3, &[0]);
        let block = block_of(&basis, &cut, 0).unwrap();
        assert_eq!(block.pair_indices(), [0, 3]);
        let compact = compact_form(&basis, &block).unwrap();
        for (la, va) in &compact.states {
            for (lb, vb) in &compact.states {
                let full_a = basis.state_vector(la).unwrap();
                let full_b = basis.state_vector(lb).unwrap();
                let d = (va.inner(vb) - full_a.inner(&full_b)).norm();
                assert!(d < 1e-12, "{la} vs {lb}");
            }
        }
    }

    #[test]
    fn compact_form_swapped_orientation_also_preserves_gram() {
        // Cut {1}|{0,2} flips the A-substring between partners, so pair j
        // enters the compact space with support {10, 01}.
        let basis = Basis::from_alpha_sq(3, &[0.64, 0.9, 0.75, 0.81]).unwrap();
        let cut = bp(3, &[1]);
        let block = block_of(&basis, &cut, 0).unwrap();
        assert_eq!(block.pair_indices(), [0, 2]);
        let compact = compact_form(&basis, &block).unwrap();
        for (la, va) in &compact.states {
            for (lb, vb) in &compact.states {
                let full_a = basis.state_vector(la).unwrap();
                let full_b = basis.state_vector(lb).unwrap();
                let d = (va.inner(vb) - full_a.inner(&full_b)).norm();
                assert!(d < 1e-12, "{la} vs {lb}");
            }
        }
    }

    #[test]
    fn compact_form_degenerate_pair_gives_cross_products() {
        let basis = Basis::from_alpha_sq(2, &[0.8, 1.0]).unwrap();
        let cut = bp(2, &[0]);
        let block = block_of(&basis, &cut, 0).unwrap();
        assert_eq!(block.kind, BlockKind::OnePairTwoProducts);
        let compact = compact_form(&basis, &block).unwrap();
        let k = compact.state_for(&StateLabel::product_k(1)).unwrap();
        let kbar = compact.state_for(&StateLabel::product_kbar(1)).unwrap();
        assert!((k.amp(0b01).norm() - 1.0).abs() < 1e-15);
        assert!((kbar.amp(0b10).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classify_hybrid_kinds() {
        let basis = Basis::from_alpha_sq(3, &[0.8, 0.9, 1.0, 1.0]).unwrap();
        assert_eq!(
            classify_hybrid(&basis, 0, 1).unwrap(),
            BlockKind::TwoEntangledPairs
        );
        assert_eq!(
            classify_hybrid(&basis, 0, 2).unwrap(),
            BlockKind::OnePairTwoProducts
        );
        assert_eq!(
            classify_hybrid(&basis, 2, 3).unwrap(),
            BlockKind::FourProducts
        );
    }
}
