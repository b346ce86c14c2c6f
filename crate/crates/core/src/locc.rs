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

//! LOCC protocols as finite measurement trees, simulated exactly.
//!
//! A protocol is a tree: each inner node names the acting party and a
//! complete local measurement on that party's qubits, with one child per
//! outcome; leaves carry a guess (a state label, or "inconclusive").
//! Classical communication is implicit in the tree shape — every node sees
//! the full outcome history along its path.
//!
//! Simulation collapses the state branch by branch, pruning
//! zero-probability outcomes, and aggregates leaf probabilities by guess.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::blocks::Bipartition;
use crate::error::{Error, Result};
use crate::ghz::{Basis, StateLabel, StateSet};
use crate::qla::{
    computational_projectors, CMatrix, QubitSubset, StateVector, C64, NORM_TOL, ZERO_BRANCH_TOL,
};

/// A partition of the qubits into spatially separated parties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialConfiguration {
    num_qubits: usize,
    parties: Vec<QubitSubset>,
}

impl fmt::Display for SpatialConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const CHARS: &[u8] = b"0123456789abcdef";
        for (i, party) in self.parties.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for q in party.indices() {
                write!(f, "{}", CHARS[q] as char)?;
            }
        }
        Ok(())
    }
}

impl FromStr for SpatialConfiguration {
    type Err = Error;

    /// Parse "0|12"-style configurations: digit groups separated by `|`,
    /// covering qubits 0..N−1 exactly.
    fn from_str(s: &str) -> Result<Self> {
        const CHARS: &[u8] = b"0123456789abcdef";
        let mut parties = Vec::new();
        for group in s.split('|') {
            let mut mask = 0u32;
            for ch in group.chars() {
                let q = CHARS
                    .iter()
                    .position(|&c| c as char == ch)
                    .ok_or_else(|| Error::Parse(format!("bad qubit character '{ch}'")))?;
                mask |= 1 << q;
            }
            parties.push(QubitSubset::from_mask(mask));
        }
        let n = parties.iter().map(|p| p.len()).sum();
        SpatialConfiguration::new(n, parties)
    }
}

impl SpatialConfiguration {
    pub fn new(num_qubits: usize, parties: Vec<QubitSubset>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::invalid("a configuration needs at least one party"));
        }
        let mut union = QubitSubset::from_mask(0);
        for party in &parties {
            if party.is_empty() {
                return Err(Error::invalid("every party must hold at least one qubit"));
            }
            if union.intersects(party) {
                return Err(Error::invalid("parties must hold disjoint qubits"));
            }
            union = union.union(party);
        }
        if union != QubitSubset::full(num_qubits) {
            return Err(Error::invalid(format!(
                "parties must cover all {num_qubits} qubits"
            )));
        }
        Ok(SpatialConfiguration {
            num_qubits,
            parties,
        })
    }

    /// One party per qubit — the least favorable configuration.
    pub fn fully_separated(num_qubits: usize) -> Self {
        SpatialConfiguration {
            num_qubits,
            parties: (0..num_qubits).map(QubitSubset::single).collect(),
        }
    }

    pub fn from_bipartition(bp: &Bipartition) -> Self {
        SpatialConfiguration {
            num_qubits: bp.num_qubits(),
            parties: vec![bp.side_a(), bp.side_b()],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn parties(&self) -> &[QubitSubset] {
        &self.parties
    }

    pub fn party(&self, index: usize) -> &QubitSubset {
        &self.parties[index]
    }
}

/// Leaf verdict of a protocol branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Guess {
    State(StateLabel),
    Inconclusive,
}

impl fmt::Display for Guess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guess::State(label) => write!(f, "{label}"),
            Guess::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A node of the protocol tree.
#[derive(Clone, Debug)]
pub enum ProtocolNode {
    Measure {
        /// Index into the configuration's party list.
        party: usize,
        /// Measurement operators on that party's qubits; must satisfy
        /// Σ K†K = 1 within 1e-9.
        operators: Vec<CMatrix>,
        /// One child per operator.
        children: Vec<ProtocolNode>,
    },
    Leaf(Guess),
}

impl ProtocolNode {
    fn validate(&self, config: &SpatialConfiguration) -> Result<()> {
        match self {
            ProtocolNode::Leaf(_) => Ok(()),
            ProtocolNode::Measure {
                party,
                operators,
                children,
            } => {
                let subset = config
                    .parties()
                    .get(*party)
                    .ok_or_else(|| Error::invalid(format!("party index {party} out of range")))?;
                let dim = 1usize << subset.len();
                if operators.is_empty() {
                    return Err(Error::invalid("measurement node without operators"));
                }
                if operators.len() != children.len() {
                    return Err(Error::invalid(
                        "measurement node must have one child per operator",
                    ));
                }
                let mut sum = CMatrix::zeros(dim, dim);
                for op in operators {
                    if op.rows() != dim || op.cols() != dim {
                        return Err(Error::invalid(format!(
                            "operator is {}x{}, expected {dim}x{dim} for party {party}",
                            op.rows(),
                            op.cols()
                        )));
                    }
                    sum = sum.add(&op.adjoint().matmul(op));
                }
                if sum.sub(&CMatrix::identity(dim)).max_abs() > NORM_TOL {
                    return Err(Error::invalid(format!(
                        "party {party} measurement does not resolve the identity"
                    )));
                }
                for child in children {
                    child.validate(config)?;
                }
                Ok(())
            }
        }
    }
}

/// An LOCC protocol: a spatial configuration plus a measurement tree.
#[derive(Clone, Debug)]
pub struct ProtocolTree {
    config: SpatialConfiguration,
    root: ProtocolNode,
}

impl ProtocolTree {
    pub fn new(config: SpatialConfiguration, root: ProtocolNode) -> Result<Self> {
        root.validate(&config)?;
        Ok(ProtocolTree { config, root })
    }

    pub fn config(&self) -> &SpatialConfiguration {
        &self.config
    }

    /// Exact leaf distribution for one input state, aggregated by guess.
    /// Probabilities sum to 1 within 1e-9.
    pub fn simulate(&self, state: &StateVector) -> Result<BTreeMap<Guess, f64>> {
        if state.num_qubits() != self.config.num_qubits {
            return Err(Error::invalid(format!(
                "state has {} qubits, protocol expects {}",
                state.num_qubits(),
                self.config.num_qubits
            )));
        }
        let mut out = BTreeMap::new();
        self.walk(&self.root, state, 1.0, &mut out);
        Ok(out)
    }

    fn walk(
        &self,
        node: &ProtocolNode,
        state: &StateVector,
        weight: f64,
        out: &mut BTreeMap<Guess, f64>,
    ) {
        match node {
            ProtocolNode::Leaf(guess) => {
                *out.entry(*guess).or_insert(0.0) += weight;
            }
            ProtocolNode::Measure {
                party,
                operators,
                children,
            } => {
                let subset = self.config.party(*party);
                for (op, child) in operators.iter().zip(children.iter()) {
                    let branch = state.apply_local(subset, op);
                    let p = branch.norm_sqr();
                    if p <= ZERO_BRANCH_TOL {
                        continue; // pruned, never renormalized from zero
                    }
                    let renorm = C64::new(1.0 / p.sqrt(), 0.0);
                    self.walk(child, &branch.scaled(renorm), weight * p, out);
                }
            }
        }
    }
}

/// Per-input-state outcome probabilities of a protocol run.
#[derive(Clone, Debug, Serialize)]
pub struct RunEntry {
    pub label: StateLabel,
    pub success: f64,
    pub inconclusive: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub entries: Vec<RunEntry>,
}

impl RunReport {
    pub fn min_success(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.success)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn entry(&self, label: &StateLabel) -> Option<&RunEntry> {
        self.entries.iter().find(|e| &e.label == label)
    }
}

/// Simulate the protocol on every member of `set` and collect the raw
/// guess distributions.
pub fn guess_distributions(
    tree: &ProtocolTree,
    set: &StateSet,
) -> Result<Vec<(StateLabel, BTreeMap<Guess, f64>)>> {
    let mut out = Vec::with_capacity(set.cardinality());
    for label in set.labels() {
        let state = set.basis().state_vector(label)?;
        out.push((*label, tree.simulate(&state)?));
    }
    Ok(out)
}

/// Build the per-label success/inconclusive/error report.
pub fn run_report(tree: &ProtocolTree, set: &StateSet) -> Result<RunReport> {
    let dists = guess_distributions(tree, set)?;
    let entries = dists
        .into_iter()
        .map(|(label, dist)| {
            let total: f64 = dist.values().sum();
            let success = dist.get(&Guess::State(label)).copied().unwrap_or(0.0);
            let inconclusive = dist.get(&Guess::Inconclusive).copied().unwrap_or(0.0);
            RunEntry {
                label,
                success,
                inconclusive,
                error: total - success - inconclusive,
            }
        })
        .collect();
    Ok(RunReport { entries })
}

/// Perfect discrimination: every member identified with probability 1
/// within 1e-12.
pub fn verify_perfect(tree: &ProtocolTree, set: &StateSet) -> Result<(bool, RunReport)> {
    let report = run_report(tree, set)?;
    let ok = !report.entries.is_empty() && report.min_success() >= 1.0 - 1e-12;
    Ok((ok, report))
}

/// Conclusive discrimination: a member counts as conclusively identified
/// when some branch guesses it with nonzero probability and no other
/// member of the set ever reaches a branch guessing it.
pub fn verify_conclusive(
    tree: &ProtocolTree,
    set: &StateSet,
) -> Result<(bool, Vec<StateLabel>, RunReport)> {
    let dists = guess_distributions(tree, set)?;
    let mut identified = Vec::new();
    for (label, dist) in &dists {
        let own = dist.get(&Guess::State(*label)).copied().unwrap_or(0.0);
        if own <= 1e-12 {
            continue;
        }
        let clashed = dists.iter().any(|(other, other_dist)| {
            other != label
                && other_dist
                    .get(&Guess::State(*label))
                    .copied()
                    .unwrap_or(0.0)
                    > 1e-12
        });
        if !clashed {
            identified.push(*label);
        }
    }
    let entries = dists
        .into_iter()
        .map(|(label, dist)| {
            let total: f64 = dist.values().sum();
            let success = dist.get(&Guess::State(label)).copied().unwrap_or(0.0);
            let inconclusive = dist.get(&Guess::Inconclusive).copied().unwrap_or(0.0);
            RunEntry {
                label,
                success,
                inconclusive,
                error: total - success - inconclusive,
            }
        })
        .collect();
    Ok((!identified.is_empty(), identified, RunReport { entries }))
}

/// Local index of the bits of `global` on `subset`'s qubits (ascending
/// qubit order, lowest qubit index most significant).
fn local_index(global: usize, subset: &QubitSubset, n: usize) -> usize {
    let mut acc = 0usize;
    for q in subset.indices() {
        acc = (acc << 1) | ((global >> (n - 1 - q)) & 1);
    }
    acc
}

/// Scatter the bits of a party-local outcome back onto amplitude-index
/// positions.
fn global_bits(local: usize, subset: &QubitSubset, n: usize) -> usize {
    let qubits = subset.indices();
    let k = qubits.len();
    let mut acc = 0usize;
    for (i, q) in qubits.iter().enumerate() {
        if (local >> (k - 1 - i)) & 1 == 1 {
            acc |= 1 << (n - 1 - q);
        }
    }
    acc
}

/// Every party measures its qubits in the computational basis; the joint
/// outcome bitstring identifies one conjugate pair. Leaves guess the
/// matching product member on degenerate pairs, the set's unique member
/// of the pair when there is exactly one, and are inconclusive otherwise.
///
/// Works in any spatial configuration, including full separation.
pub fn build_pair_id_protocol(
    basis: &Basis,
    config: &SpatialConfiguration,
    set: &StateSet,
) -> Result<ProtocolTree> {
    if config.num_qubits() != basis.num_qubits() {
        return Err(Error::invalid("configuration does not match basis size"));
    }
    let n = basis.num_qubits();
    let occupancy = set.occupancy();

    fn build(
        basis: &Basis,
        config: &SpatialConfiguration,
        occupancy: &[crate::ghz::PairOccupancy],
        party: usize,
        acc_bits: usize,
        n: usize,
    ) -> ProtocolNode {
        if party == config.parties().len() {
            let pair = basis.pair_of_bitstring(acc_bits);
            let guess = if pair.is_degenerate() {
                if acc_bits == pair.k() {
                    Guess::State(StateLabel::product_k(pair.index()))
                } else {
                    Guess::State(StateLabel::product_kbar(pair.index()))
                }
            } else {
                let occ = &occupancy[pair.index()];
                match (occ.plus, occ.minus) {
                    (true, false) => Guess::State(StateLabel::plus(pair.index())),
                    (false, true) => Guess::State(StateLabel::minus(pair.index())),
                    _ => Guess::Inconclusive,
                }
            };
            return ProtocolNode::Leaf(guess);
        }
        let subset = config.party(party);
        let k = subset.len();
        let operators = computational_projectors(k);
        let children = (0..1usize << k)
            .map(|outcome| {
                let bits = acc_bits | global_bits(outcome, subset, n);
                build(basis, config, occupancy, party + 1, bits, n)
            })
            .collect();
        ProtocolNode::Measure {
            party,
            operators,
            children,
        }
    }

    let root = build(basis, config, &occupancy, 0, 0, n);
    ProtocolTree::new(config.clone(), root)
}

/// Two-party protocol for a selection spanning at most two conjugate
/// pairs, run across the cut `A|B`:
///
/// 1. if two pairs are involved, B projects onto the span of each pair's
///    side-B strings to identify the pair (this requires the two pairs'
///    side-B supports to be disjoint across this cut, i.e. the pairs must
///    not be block partners here);
/// 2. within a pair holding two selected members, A measures in the
///    {|k_A⟩ ± |k̄_A⟩} basis and B finishes in the correspondingly rotated
///    pair basis, which resolves the sign with certainty.
pub fn build_block_protocol(set: &StateSet, cut: &Bipartition) -> Result<ProtocolTree> {
    let basis = set.basis();
    let n = basis.num_qubits();
    if cut.num_qubits() != n {
        return Err(Error::invalid("cut does not match basis size"));
    }
    if set.cardinality() == 0 {
        return Err(Error::invalid("cannot build a protocol for an empty set"));
    }
    let mut pairs: Vec<usize> = set.labels().iter().map(|l| l.pair()).collect();
    pairs.dedup();
    if pairs.len() > 2 {
        return Err(Error::invalid(format!(
            "selection spans {} pairs; this protocol handles at most two",
            pairs.len()
        )));
    }

    let config = SpatialConfiguration::from_bipartition(cut);
    let side_a = cut.side_a();
    let side_b = cut.side_b();
    let dim_a = 1usize << side_a.len();
    let dim_b = 1usize << side_b.len();
    let full = (1usize << n) - 1;

    // Local side-B strings of a pair's two members.
    let b_support = |pair: usize| -> [usize; 2] {
        let k = basis.pairs()[pair].k();
        [
            local_index(k, &side_b, n),
            local_index(k ^ full, &side_b, n),
        ]
    };

    // Sign-resolution subtree for one pair, under the knowledge that the
    // input lies in this pair's support.
    let resolve_pair = |pair: usize| -> Result<ProtocolNode> {
        let members: Vec<StateLabel> = set
            .labels()
            .iter()
            .copied()
            .filter(|l| l.pair() == pair)
            .collect();
        match members.len() {
            0 => Ok(ProtocolNode::Leaf(Guess::Inconclusive)),
            1 => Ok(ProtocolNode::Leaf(Guess::State(members[0]))),
            _ => {
                let p = basis.pair(pair)?;
                let k_b = local_index(p.k(), &side_b, n);
                let kbar_b = local_index(p.k() ^ full, &side_b, n);
                if p.is_degenerate() {
                    // |k⟩ and |k̄⟩ differ on side B already.
                    let mut proj_k = CMatrix::zeros(dim_b, dim_b);
                    proj_k[(k_b, k_b)] = C64::new(1.0, 0.0);
                    let mut proj_kbar = CMatrix::zeros(dim_b, dim_b);
                    proj_kbar[(kbar_b, kbar_b)] = C64::new(1.0, 0.0);
                    let rest = CMatrix::identity(dim_b).sub(&proj_k).sub(&proj_kbar);
                    let mut operators = vec![proj_k, proj_kbar];
                    let mut children = vec![
                        ProtocolNode::Leaf(Guess::State(StateLabel::product_k(pair))),
                        ProtocolNode::Leaf(Guess::State(StateLabel::product_kbar(pair))),
                    ];
                    if rest.max_abs() > 1e-12 {
                        operators.push(rest);
                        children.push(ProtocolNode::Leaf(Guess::Inconclusive));
                    }
                    return Ok(ProtocolNode::Measure {
                        party: 1,
                        operators,
                        children,
                    });
                }
                let k_a = local_index(p.k(), &side_a, n);
                let kbar_a = local_index(p.k() ^ full, &side_a, n);
                let (alpha, beta) = (p.alpha(), p.beta());
                let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;

                let mut a_ops = Vec::new();
                let mut a_children = Vec::new();
                for s in [1.0f64, -1.0] {
                    // A projects on (|k_A⟩ + s|k̄_A⟩)/√2.
                    let mut u = vec![C64::new(0.0, 0.0); dim_a];
                    u[k_a] = C64::new(sqrt_half, 0.0);
                    u[kbar_a] = C64::new(s * sqrt_half, 0.0);
                    a_ops.push(CMatrix::outer(&u));

                    // Conditioned on s, B resolves {α|k_B⟩ + sβ|k̄_B⟩,
                    // β|k_B⟩ − sα|k̄_B⟩}, which identify ψ⁺ and ψ⁻.
                    let mut w_plus = vec![C64::new(0.0, 0.0); dim_b];
                    w_plus[k_b] = C64::new(alpha, 0.0);
                    w_plus[kbar_b] = C64::new(s * beta, 0.0);
                    let mut w_minus = vec![C64::new(0.0, 0.0); dim_b];
                    w_minus[k_b] = C64::new(beta, 0.0);
                    w_minus[kbar_b] = C64::new(-s * alpha, 0.0);
                    let proj_plus = CMatrix::outer(&w_plus);
                    let proj_minus = CMatrix::outer(&w_minus);
                    let rest = CMatrix::identity(dim_b).sub(&proj_plus).sub(&proj_minus);
                    let mut operators = vec![proj_plus, proj_minus];
                    let mut children = vec![
                        ProtocolNode::Leaf(Guess::State(StateLabel::plus(pair))),
                        ProtocolNode::Leaf(Guess::State(StateLabel::minus(pair))),
                    ];
                    if rest.max_abs() > 1e-12 {
                        operators.push(rest);
                        children.push(ProtocolNode::Leaf(Guess::Inconclusive));
                    }
                    a_children.push(ProtocolNode::Measure {
                        party: 1,
                        operators,
                        children,
                    });
                }
                let rest_a = {
                    let mut r = CMatrix::identity(dim_a);
                    for op in &a_ops {
                        r = r.sub(op);
                    }
                    r
                };
                if rest_a.max_abs() > 1e-12 {
                    a_ops.push(rest_a);
                    a_children.push(ProtocolNode::Leaf(Guess::Inconclusive));
                }
                Ok(ProtocolNode::Measure {
                    party: 0,
                    operators: a_ops,
                    children: a_children,
                })
            }
        }
    };

    let root = if pairs.len() == 1 {
        resolve_pair(pairs[0])?
    } else {
        let supports = [b_support(pairs[0]), b_support(pairs[1])];
        if supports[0].iter().any(|x| supports[1].contains(x)) {
            return Err(Error::invalid(format!(
                "pairs {} and {} share side-B support across cut {cut}; they are \
                 block partners here and cannot be split by this protocol",
                pairs[0], pairs[1]
            )));
        }
        let mut operators = Vec::new();
        let mut children = Vec::new();
        let mut covered = CMatrix::zeros(dim_b, dim_b);
        for (pair, support) in pairs.iter().zip(supports.iter()) {
            let mut proj = CMatrix::zeros(dim_b, dim_b);
            for &x in support {
                proj[(x, x)] = C64::new(1.0, 0.0);
            }
            covered = covered.add(&proj);
            operators.push(proj);
            children.push(resolve_pair(*pair)?);
        }
        let rest = CMatrix::identity(dim_b).sub(&covered);
        if rest.max_abs() > 1e-12 {
            operators.push(rest);
            children.push(ProtocolNode::Leaf(Guess::Inconclusive));
        }
        ProtocolNode::Measure {
            party: 1,
            operators,
            children,
        }
    };
    ProtocolTree::new(config, root)
}
