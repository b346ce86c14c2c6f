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

//! Optimal discrimination success probability under PPT-constrained (or
//! unconstrained, collective) measurements, as a dense SDP:
//!
//! ```text
//!   maximize   Σ p_i tr(M_i ρ_i)
//!   subject to M_i ⪰ 0,  Σ M_i = 1,  and (PPT mode) M_i^{T_A} ⪰ 0
//! ```
//!
//! PPT measurements contain all LOCC measurements, so a converged optimum
//! below 1 certifies that the ensemble is not perfectly LOCC
//! distinguishable across the cut. The converse does not hold: a value of
//! 1 only means the relaxation is inconclusive.
//!
//! The PPT constraint is modeled with slack blocks W_i tied to M_i by the
//! entry-permutation equalities W_i = M_i^{T_A}; both block families start
//! at exactly feasible interior points, which keeps the path following
//! well behaved.

pub mod solver;

use serde::Serialize;

use crate::blocks::{Bipartition, CompactForm};
use crate::error::{Error, Result};
use crate::ghz::{Basis, StateLabel};
use crate::qla::{partial_transpose_matrix, CMatrix, DensityOperator, C64};
use solver::{solve, BlockMatrix, SdpProblem, SolverOptions, SparseConstraint};

/// Primal values at least this close to 1 are not treated as evidence of
/// distinguishability: PPT strictly contains LOCC.
pub const INCONCLUSIVE_THRESHOLD: f64 = 1e-4;

/// An ensemble to discriminate: states, priors, and the cut for the PPT
/// constraint (ignored by the unconstrained solve).
#[derive(Clone, Debug)]
pub struct DiscriminationInstance {
    states: Vec<DensityOperator>,
    priors: Vec<f64>,
    cut: Option<Bipartition>,
}

impl DiscriminationInstance {
    pub fn new(
        states: Vec<DensityOperator>,
        priors: Vec<f64>,
        cut: Option<Bipartition>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("an instance needs at least one state"));
        }
        let n = states[0].num_qubits();
        if states.iter().any(|s| s.num_qubits() != n) {
            return Err(Error::invalid("all states must have the same dimension"));
        }
        if 1usize << n > 64 {
            return Err(Error::invalid("dimensions beyond 64 are out of scope"));
        }
        if priors.len() != states.len() {
            return Err(Error::invalid("need one prior per state"));
        }
        if priors.iter().any(|p| *p < 0.0) {
            return Err(Error::invalid("priors must be nonnegative"));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "priors sum to {total}, must be 1 within 1e-12"
            )));
        }
        if let Some(cut) = &cut {
            if cut.num_qubits() != n {
                return Err(Error::invalid("cut does not match the states' qubit count"));
            }
        }
        Ok(DiscriminationInstance {
            states,
            priors,
            cut,
        })
    }

    pub fn uniform(states: Vec<DensityOperator>, cut: Option<Bipartition>) -> Result<Self> {
        let k = states.len();
        if k == 0 {
            return Err(Error::invalid("an instance needs at least one state"));
        }
        DiscriminationInstance::new(states, vec![1.0 / k as f64; k], cut)
    }

    /// Uniform-prior instance over basis members.
    pub fn from_basis_labels(
        basis: &Basis,
        labels: &[StateLabel],
        cut: Option<Bipartition>,
    ) -> Result<Self> {
        let states = labels
            .iter()
            .map(|l| Ok(DensityOperator::from_state(&basis.state_vector(l)?)))
            .collect::<Result<Vec<_>>>()?;
        DiscriminationInstance::uniform(states, cut)
    }

    /// The dimension-4 instance of a block's compact form, with the
    /// one-qubit-per-side cut. This is the canonical way to certify a
    /// block pattern numerically.
    pub fn from_compact_form(compact: &CompactForm) -> Result<Self> {
        let states = compact
            .states
            .iter()
            .map(|(_, v)| DensityOperator::from_state(v))
            .collect();
        let cut = Bipartition::new(2, crate::qla::QubitSubset::single(0))?;
        DiscriminationInstance::uniform(states, Some(cut))
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.states[0].num_qubits()
    }

    pub fn dimension(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn cut(&self) -> Option<&Bipartition> {
        self.cut.as_ref()
    }
}

/// What a converged PPT solve allows one to conclude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SdpVerdict {
    /// Optimum provably below 1: not perfectly distinguishable by any
    /// PPT measurement, hence not by LOCC across this cut.
    #[serde(rename = "not_perfect_by_ppt")]
    NotPerfectByPpt,
    /// Optimum within threshold of 1: the relaxation proves nothing
    /// (PPT strictly contains LOCC).
    #[serde(rename = "relaxation_inconclusive")]
    RelaxationInconclusive,
}

/// Converged solve: objective values, the measurement operators, and
/// their feasibility diagnostics.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub measurements: Vec<CMatrix>,
    pub completeness_residual: f64,
    pub min_measurement_eigenvalue: f64,
    /// Smallest eigenvalue across the partially transposed measurement
    /// operators; only present for PPT-constrained solves.
    pub ppt_min_eigenvalue: Option<f64>,
}

impl SdpSolution {
    /// Only meaningful for PPT-constrained solves.
    pub fn verdict(&self) -> SdpVerdict {
        if self.primal_value < 1.0 - INCONCLUSIVE_THRESHOLD {
            SdpVerdict::NotPerfectByPpt
        } else {
            SdpVerdict::RelaxationInconclusive
        }
    }
}

/// Hermitian basis of d×d matrices as sparse entry lists, diagonal
/// elements first; returns (entries, trace) per element.
#[allow(clippy::type_complexity)]
fn hermitian_basis_entries(d: usize) -> Vec<(Vec<(usize, usize, C64)>, f64)> {
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        out.push((vec![(r, r, C64::new(1.0, 0.0))], 1.0));
    }
    for r in 0..d {
        for c in (r + 1)..d {
            out.push((
                vec![(r, c, C64::new(1.0, 0.0)), (c, r, C64::new(1.0, 0.0))],
                0.0,
            ));
            out.push((
                vec![(r, c, C64::new(0.0, 1.0)), (c, r, C64::new(0.0, -1.0))],
                0.0,
            ));
        }
    }
    out
}

/// Entry-level partial transpose over the amplitude mask `s`.
fn transpose_entry(r: usize, c: usize, s: usize, full: usize) -> (usize, usize) {
    let keep = full & !s;
    ((r & keep) | (c & s), (c & keep) | (r & s))
}

fn build_problem(
    instance: &DiscriminationInstance,
    ppt: bool,
) -> Result<(SdpProblem, BlockMatrix, Vec<f64>)> {
    let k = instance.num_states();
    let d = instance.dimension();
    let nq = instance.num_qubits();
    let blocks = if ppt { 2 * k } else { k };
    let dims = vec![d; blocks];

    // Cost: minimize −Σ p_i ⟨ρ_i, M_i⟩.
    let mut cost = BlockMatrix::zeros(&dims);
    for (i, (state, prior)) in instance
        .states
        .iter()
        .zip(instance.priors.iter())
        .enumerate()
    {
        cost.blocks[i].add_scaled_assign(C64::new(-prior, 0.0), state.matrix());
    }

    let elems = hermitian_basis_entries(d);
    let mut constraints = Vec::new();
    let mut b = Vec::new();

    // Σ_i M_i = 1: one constraint per Hermitian basis element.
    for (entries, trace) in &elems {
        let mut con = SparseConstraint::default();
        for block in 0..k {
            for &(r, c, v) in entries {
                con.push(block, r, c, v);
            }
        }
        constraints.push(con);
        b.push(*trace);
    }

    if ppt {
        let cut = instance
            .cut
            .as_ref()
            .ok_or_else(|| Error::invalid("a PPT solve needs a cut"))?;
        let s = cut.side_a().amp_mask(nq);
        let full = d - 1;
        // W_i − M_i^{T_A} = 0, entry family per measurement operator.
        for i in 0..k {
            for (entries, _) in &elems {
                let mut con = SparseConstraint::default();
                for &(r, c, v) in entries {
                    con.push(k + i, r, c, v);
                }
                for &(r, c, v) in entries {
                    let (tr, tc) = transpose_entry(r, c, s, full);
                    con.push(i, tr, tc, -v);
                }
                constraints.push(con);
                b.push(0.0);
            }
        }
    }

    // Exactly feasible interior starting points. Primal: M_i = 1/k (and
    // W_i = (1/k)^{T_A} = 1/k). Dual: y puts −τ on the diagonal elements
    // of the completeness family and −1 on those of each PPT family, so
    // S = C − A*(y) = (−p_i ρ_i + (τ−1)·1) ⊕ (1) stays well inside the
    // cone for τ = 2 + max p_i.
    let mut x0 = BlockMatrix::identity(&dims);
    x0.scale(1.0 / k as f64);
    let mut y0 = vec![0.0; constraints.len()];
    let max_prior = instance.priors.iter().cloned().fold(0.0, f64::max);
    let tau = 2.0 + max_prior;
    y0[..d].fill(-tau);
    if ppt {
        for i in 0..k {
            let offset = d * d + i * d * d;
            y0[offset..offset + d].fill(-1.0);
        }
    }

    Ok((
        SdpProblem {
            block_dims: dims,
            cost,
            constraints,
            b,
        },
        x0,
        y0,
    ))
}

fn run(instance: &DiscriminationInstance, ppt: bool) -> Result<SdpSolution> {
    let (problem, x0, y0) = build_problem(instance, ppt)?;
    let outcome = solve(&problem, x0, y0, &SolverOptions::default());
    if !outcome.converged {
        return Err(Error::SdpNotConverged {
            iterations: outcome.iterations,
            gap: outcome.relative_gap,
            primal_residual: outcome.primal_residual,
            dual_residual: outcome.dual_residual,
        });
    }

    let k = instance.num_states();
    let d = instance.dimension();
    let measurements: Vec<CMatrix> = outcome.x.blocks[..k].to_vec();

    let mut sum = CMatrix::zeros(d, d);
    let mut min_eig = f64::INFINITY;
    for m in &measurements {
        sum = sum.add(m);
        min_eig = min_eig.min(m.eigvalsh()[0]);
    }
    let completeness_residual = sum.sub(&CMatrix::identity(d)).max_abs();

    let ppt_min_eigenvalue = if ppt {
        let cut = instance.cut.as_ref().expect("checked in build");
        let mut min_pt = f64::INFINITY;
        for m in &measurements {
            let pt = partial_transpose_matrix(m, &cut.side_a(), instance.num_qubits())?;
            min_pt = min_pt.min(pt.eigvalsh()[0]);
        }
        Some(min_pt)
    } else {
        None
    };

    let primal_value = -outcome.primal_objective;
    let dual_value = -outcome.dual_objective;
    Ok(SdpSolution {
        primal_value,
        dual_value,
        gap: (dual_value - primal_value).abs(),
        iterations: outcome.iterations,
        converged: outcome.converged,
        measurements,
        completeness_residual,
        min_measurement_eigenvalue: min_eig,
        ppt_min_eigenvalue,
    })
}

/// Optimal success probability over PPT measurements across the
/// instance's cut. A converged value below 1 − 1e-4 certifies that the
/// ensemble is not perfectly LOCC distinguishable across that cut.
pub fn ppt_success_bound(instance: &DiscriminationInstance) -> Result<SdpSolution> {
    if instance.cut.is_none() {
        return Err(Error::invalid("a PPT solve needs a cut"));
    }
    run(instance, true)
}

/// Optimal success probability over unconstrained (collective)
/// measurements; equals 1 for any mutually orthogonal ensemble.
pub fn global_success_bound(instance: &DiscriminationInstance) -> Result<SdpSolution> {
    run(instance, false)
}
