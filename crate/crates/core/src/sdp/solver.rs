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

//! Primal-dual interior-point solver for small dense SDPs with Hermitian
//! block-diagonal matrix variables:
//!
//! ```text
//!   min ⟨C, X⟩   s.t.  ⟨A_j, X⟩ = b_j  (j = 1..m),   X ⪰ 0
//! ```
//!
//! Path following with the HKM direction and a Mehrotra
//! predictor-corrector step. Constraint matrices are Hermitian and very
//! sparse (a handful of entries each), so the Schur complement is
//! assembled from outer products of X columns and S⁻¹ rows and solved by
//! dense LU with partial pivoting. Everything is f64, deterministic, and
//! sized for blocks of dimension at most 64.

use crate::qla::{CMatrix, C64};

/// Hermitian block-diagonal matrix.
#[derive(Clone, Debug)]
pub struct BlockMatrix {
    pub blocks: Vec<CMatrix>,
}

impl BlockMatrix {
    pub fn zeros(dims: &[usize]) -> Self {
        BlockMatrix {
            blocks: dims.iter().map(|&d| CMatrix::zeros(d, d)).collect(),
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        BlockMatrix {
            blocks: dims.iter().map(|&d| CMatrix::identity(d)).collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rows()).collect()
    }

    /// Total real dimension of the underlying cone (sum of block sizes).
    pub fn cone_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.rows()).sum()
    }

    pub fn inner(&self, other: &BlockMatrix) -> f64 {
        self.blocks
            .iter()
            .zip(other.blocks.iter())
            .map(|(a, b)| a.re_trace_product(b))
            .sum()
    }

    pub fn add_scaled(&mut self, factor: f64, other: &BlockMatrix) {
        let f = C64::new(factor, 0.0);
        for (a, b) in self.blocks.iter_mut().zip(other.blocks.iter()) {
            a.add_scaled_assign(f, b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        let f = C64::new(factor, 0.0);
        for b in self.blocks.iter_mut() {
            *b = b.scale(f);
        }
    }

    pub fn hermitize(&mut self) {
        for b in self.blocks.iter_mut() {
            *b = b.hermitize();
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let f = b.frobenius_norm();
                f * f
            })
            .sum::<f64>()
            .sqrt()
    }

    fn cholesky_all(&self) -> Option<Vec<CMatrix>> {
        self.blocks.iter().map(|b| b.cholesky()).collect()
    }

    fn inverse_from(&self) -> Option<BlockMatrix> {
        let blocks: Option<Vec<CMatrix>> =
            self.blocks.iter().map(|b| b.cholesky_inverse()).collect();
        Some(BlockMatrix { blocks: blocks? })
    }

    /// Blockwise product of three block matrices.
    fn triple_product(a: &BlockMatrix, b: &BlockMatrix, c: &BlockMatrix) -> BlockMatrix {
        BlockMatrix {
            blocks: a
                .blocks
                .iter()
                .zip(b.blocks.iter())
                .zip(c.blocks.iter())
                .map(|((x, y), z)| x.matmul(y).matmul(z))
                .collect(),
        }
    }
}

/// One nonzero entry of a sparse Hermitian constraint matrix. Entries
/// list both triangles explicitly.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: C64,
}

/// Sparse Hermitian constraint ⟨A, X⟩ = b.
#[derive(Clone, Debug, Default)]
pub struct SparseConstraint {
    pub entries: Vec<ConstraintEntry>,
}

impl SparseConstraint {
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: C64) {
        self.entries.push(ConstraintEntry {
            block,
            row,
            col,
            value,
        });
    }

    /// tr(A Z) for a dense block matrix Z (real part).
    fn apply_to(&self, z: &BlockMatrix) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.value * z.blocks[e.block][(e.col, e.row)]).re)
            .sum()
    }

    fn touched_blocks(&self) -> Vec<usize> {
        let mut blocks: Vec<usize> = self.entries.iter().map(|e| e.block).collect();
        blocks.sort_unstable();
        blocks.dedup();
        blocks
    }
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub cost: BlockMatrix,
    pub constraints: Vec<SparseConstraint>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200,
            tolerance: 1e-7,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOutcome {
    pub x: BlockMatrix,
    pub y: Vec<f64>,
    pub s: BlockMatrix,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Dense LU with partial pivoting for the (mildly nonsymmetric) Schur
/// system.
struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    pivot: Vec<usize>,
}

impl DenseLu {
    fn factor(mut m: Vec<f64>, n: usize) -> Option<DenseLu> {
        let mut pivot = vec![0usize; n];
        for k in 0..n {
            let mut max_val = 0.0;
            let mut max_row = k;
            for r in k..n {
                let v = m[r * n + k].abs();
                if v > max_val {
                    max_val = v;
                    max_row = r;
                }
            }
            if max_val == 0.0 || !max_val.is_finite() {
                return None;
            }
            pivot[k] = max_row;
            if max_row != k {
                for c in 0..n {
                    m.swap(k * n + c, max_row * n + c);
                }
            }
            let pivot_val = m[k * n + k];
            for r in (k + 1)..n {
                let factor = m[r * n + k] / pivot_val;
                m[r * n + k] = factor;
                for c in (k + 1)..n {
                    m[r * n + c] -= factor * m[k * n + c];
                }
            }
        }
        Some(DenseLu { n, lu: m, pivot })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        // Row interchanges first (the stored L carries fully permuted
        // rows), then the two triangular solves.
        for k in 0..n {
            x.swap(k, self.pivot[k]);
        }
        for k in 0..n {
            for r in (k + 1)..n {
                x[r] -= self.lu[r * n + k] * x[k];
            }
        }
        for k in (0..n).rev() {
            for c in (k + 1)..n {
                x[k] -= self.lu[k * n + c] * x[c];
            }
            x[k] /= self.lu[k * n + k];
        }
        x
    }
}

fn apply_a(constraints: &[SparseConstraint], z: &BlockMatrix) -> Vec<f64> {
    constraints.iter().map(|c| c.apply_to(z)).collect()
}

fn apply_a_star(constraints: &[SparseConstraint], y: &[f64], dims: &[usize]) -> BlockMatrix {
    let mut out = BlockMatrix::zeros(dims);
    for (constraint, &yj) in constraints.iter().zip(y.iter()) {
        if yj == 0.0 {
            continue;
        }
        let f = C64::new(yj, 0.0);
        for e in &constraint.entries {
            out.blocks[e.block][(e.row, e.col)] += f * e.value;
        }
    }
    out
}

/// Largest α ≤ cap with P + α dP ⪰ 0, via λ_min of L⁻¹ dP L⁻†.
fn max_step(p: &BlockMatrix, dp: &BlockMatrix, cap: f64) -> f64 {
    let mut alpha = cap;
    for (pb, dpb) in p.blocks.iter().zip(dp.blocks.iter()) {
        let l = match pb.cholesky() {
            Some(l) => l,
            None => return 0.0,
        };
        let w = CMatrix::two_sided_lower_solve(&l, dpb);
        let lambda_min = w.eigvalsh()[0];
        if lambda_min < -1e-13 {
            alpha = alpha.min(-1.0 / lambda_min);
        }
    }
    alpha
}

pub fn solve(
    problem: &SdpProblem,
    x0: BlockMatrix,
    y0: Vec<f64>,
    options: &SolverOptions,
) -> SolverOutcome {
    let dims = &problem.block_dims;
    let m = problem.constraints.len();
    let ntot = x0.cone_dim() as f64;
    let b_norm = 1.0 + problem.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_norm = 1.0 + problem.cost.frobenius_norm();

    let mut x = x0;
    let mut y = y0;
    // S = C − A*(y); the caller's starting point must make this PD.
    let mut s = problem.cost.clone();
    s.add_scaled(-1.0, &apply_a_star(&problem.constraints, &y, dims));

    let mut iterations = 0;
    let mut converged = false;
    let (mut pobj, mut dobj, mut relgap, mut pinf, mut dinf) = (0.0, 0.0, 0.0, 0.0, 0.0);

    for iter in 0..options.max_iterations {
        iterations = iter;

        // Residuals and convergence metrics.
        let ax = apply_a(&problem.constraints, &x);
        let rp: Vec<f64> = problem
            .b
            .iter()
            .zip(ax.iter())
            .map(|(bj, axj)| bj - axj)
            .collect();
        let mut rd = problem.cost.clone();
        rd.add_scaled(-1.0, &s);
        rd.add_scaled(-1.0, &apply_a_star(&problem.constraints, &y, dims));

        pobj = problem.cost.inner(&x);
        dobj = problem.b.iter().zip(y.iter()).map(|(b, y)| b * y).sum();
        let mu = x.inner(&s) / ntot;
        relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
        dinf = rd.frobenius_norm() / c_norm;

        if relgap <= options.tolerance
            && pinf <= options.tolerance
            && dinf <= options.tolerance
            && mu <= options.tolerance
        {
            converged = true;
            break;
        }

        // Factorizations of the current iterates.
        let s_inv = match s.inverse_from() {
            Some(inv) => inv,
            None => break,
        };
        if x.cholesky_all().is_none() {
            break;
        }

        // Schur complement M[j][k] = Re tr(A_j X A_k S⁻¹), built from
        // outer products: X A_k S⁻¹ = Σ v · X[:,r] ⊗ S⁻¹[c,:].
        let mut bmats: Vec<Vec<(usize, CMatrix)>> = Vec::with_capacity(m);
        for constraint in &problem.constraints {
            let mut per_block: Vec<(usize, CMatrix)> = constraint
                .touched_blocks()
                .into_iter()
                .map(|bi| (bi, CMatrix::zeros(dims[bi], dims[bi])))
                .collect();
            for e in &constraint.entries {
                let slot = per_block
                    .iter_mut()
                    .find(|(bi, _)| *bi == e.block)
                    .expect("touched block present");
                let xb = &x.blocks[e.block];
                let sb = &s_inv.blocks[e.block];
                let d = dims[e.block];
                for u in 0..d {
                    let xc = xb[(u, e.row)] * e.value;
                    if xc.re == 0.0 && xc.im == 0.0 {
                        continue;
                    }
                    for w in 0..d {
                        slot.1[(u, w)] += xc * sb[(e.col, w)];
                    }
                }
            }
            bmats.push(per_block);
        }
        let mut schur = vec![0.0f64; m * m];
        for (k, per_block) in bmats.iter().enumerate() {
            for (j, constraint) in problem.constraints.iter().enumerate() {
                let mut acc = 0.0;
                for e in &constraint.entries {
                    if let Some((_, bk)) = per_block.iter().find(|(bi, _)| *bi == e.block) {
                        acc += (e.value * bk[(e.col, e.row)]).re;
                    }
                }
                schur[j * m + k] = acc;
            }
        }
        let lu = match DenseLu::factor(schur, m) {
            Some(lu) => lu,
            None => break,
        };

        // Predictor (affine scaling) direction.
        let z1 = BlockMatrix::triple_product(&x, &rd, &s_inv);
        let az1 = apply_a(&problem.constraints, &z1);
        let rhs_aff: Vec<f64> = problem
            .b
            .iter()
            .zip(az1.iter())
            .map(|(bj, zj)| bj + zj)
            .collect();
        let dy_aff = lu.solve(&rhs_aff);
        let mut ds_aff = rd.clone();
        ds_aff.add_scaled(-1.0, &apply_a_star(&problem.constraints, &dy_aff, dims));
        // dX_aff = −X − X dS_aff S⁻¹, then hermitized.
        let mut dx_aff = BlockMatrix::triple_product(&x, &ds_aff, &s_inv);
        dx_aff.scale(-1.0);
        dx_aff.add_scaled(-1.0, &x);
        dx_aff.hermitize();

        let ap_aff = max_step(&x, &dx_aff, 1.0);
        let ad_aff = max_step(&s, &ds_aff, 1.0);
        let mut x_aff = x.clone();
        x_aff.add_scaled(ap_aff, &dx_aff);
        let mut s_aff = s.clone();
        s_aff.add_scaled(ad_aff, &ds_aff);
        let mu_aff = (x_aff.inner(&s_aff) / ntot).max(0.0);
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-8, 1.0);

        // Corrector direction.
        let z2 = BlockMatrix::triple_product(&dx_aff, &ds_aff, &s_inv);
        let az2 = apply_a(&problem.constraints, &z2);
        let a_sinv = apply_a(&problem.constraints, &s_inv);
        let rhs: Vec<f64> = (0..m)
            .map(|j| problem.b[j] - sigma * mu * a_sinv[j] + az1[j] + az2[j])
            .collect();
        let dy = lu.solve(&rhs);
        let mut ds = rd.clone();
        ds.add_scaled(-1.0, &apply_a_star(&problem.constraints, &dy, dims));
        // dX = σμ S⁻¹ − X − dX_aff dS_aff S⁻¹ − X dS S⁻¹.
        let mut dx = s_inv.clone();
        dx.scale(sigma * mu);
        dx.add_scaled(-1.0, &x);
        dx.add_scaled(-1.0, &z2);
        dx.add_scaled(-1.0, &BlockMatrix::triple_product(&x, &ds, &s_inv));
        dx.hermitize();

        let ap = options.step_fraction * max_step(&x, &dx, 1.0 / options.step_fraction);
        let ad = options.step_fraction * max_step(&s, &ds, 1.0 / options.step_fraction);
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            break;
        }

        x.add_scaled(ap, &dx);
        for (yj, dyj) in y.iter_mut().zip(dy.iter()) {
            *yj += ad * dyj;
        }
        s.add_scaled(ad, &ds);
        x.hermitize();
        s.hermitize();
        iterations = iter + 1;
    }

    SolverOutcome {
        x,
        y,
        s,
        primal_objective: pobj,
        dual_objective: dobj,
        relative_gap: relgap,
        primal_residual: pinf,
        dual_residual: dinf,
        iterations,
        converged,
    }
}
