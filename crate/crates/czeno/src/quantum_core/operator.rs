use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{C64, PureState, Space};
use crate::{Result, SimError, TOL_EXACT};

/// A square matrix over a labeled space. Operators act on a state's
/// subsystems by name, identity elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Arc<Space>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: Arc<Space>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "space dimension {} vs matrix shape {}x{}",
                space.dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: &Arc<Space>) -> Self {
        Operator {
            space: space.clone(),
            matrix: DMatrix::identity(space.dim(), space.dim()),
        }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// U†U = I within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<C64>::identity(self.matrix.nrows(), self.matrix.ncols());
        (gram - id).iter().all(|x| x.norm() <= tol)
    }

    pub fn assert_unitary(&self) -> Result<()> {
        if !self.is_unitary(TOL_EXACT) {
            return Err(SimError::InvariantViolation(
                "operator flagged unitary fails U†U = I".into(),
            ));
        }
        Ok(())
    }

    /// Matrix product `self · other` on a shared space.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.space != other.space {
            return Err(SimError::SpaceMismatch(
                "composition of operators on different spaces".into(),
            ));
        }
        Ok(Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Kronecker product with concatenated labels.
    pub fn tensor(&self, other: &Operator) -> Result<Self> {
        let space = self.space.tensor(other.space())?;
        Ok(Operator {
            space,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Apply to `state`, acting on the named target subsystems (one name
    /// per operator subsystem, in operator order) and as identity on the
    /// rest.
    pub fn apply(&self, state: &PureState, targets: &[&str]) -> Result<PureState> {
        let map = EmbeddingMap::build(state.space(), &self.space, targets)?;
        let amps = state.amplitudes();
        let mut out = DVector::<C64>::zeros(amps.len());
        for r in 0..map.rest_dim {
            let block = &map.full_index[r * map.op_dim..(r + 1) * map.op_dim];
            for (ti, &fi) in block.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (tj, &fj) in block.iter().enumerate() {
                    let m = self.matrix[(ti, tj)];
                    if m != C64::new(0.0, 0.0) {
                        acc += m * amps[fj];
                    }
                }
                out[fi] = acc;
            }
        }
        PureState::new(state.space().clone(), out)
    }

    /// Row-wise nonzero entries, for the allocation-free cycle-loop fast
    /// path. Our gate matrices are very sparse (rotations on two levels,
    /// diagonal phases, single-entry jump operators), so skipping the
    /// structural zeros up front beats dense iteration.
    pub(crate) fn sparse_plan(&self) -> SparsePlan {
        let n = self.matrix.nrows();
        let mut rows = Vec::with_capacity(n);
        for ti in 0..n {
            let mut row = Vec::new();
            for tj in 0..n {
                let m = self.matrix[(ti, tj)];
                if m != C64::new(0.0, 0.0) {
                    row.push((tj, m));
                }
            }
            rows.push(row);
        }
        SparsePlan { rows }
    }

    /// The full matrix of this operator embedded into `space` on the named
    /// targets (identity on the rest). Used by the density-operator oracle.
    pub fn embed(&self, space: &Arc<Space>, targets: &[&str]) -> Result<DMatrix<C64>> {
        let map = EmbeddingMap::build(space, &self.space, targets)?;
        let dim = space.dim();
        let mut full = DMatrix::<C64>::zeros(dim, dim);
        for r in 0..map.rest_dim {
            let block = &map.full_index[r * map.op_dim..(r + 1) * map.op_dim];
            for (ti, &fi) in block.iter().enumerate() {
                for (tj, &fj) in block.iter().enumerate() {
                    full[(fi, fj)] = self.matrix[(ti, tj)];
                }
            }
        }
        Ok(full)
    }
}

/// Precomputed nonzero structure of an operator matrix, paired with an
/// [`EmbeddingMap`] to evaluate embedded applications without allocating.
pub(crate) struct SparsePlan {
    /// `rows[ti]` lists the (column, value) nonzeros of matrix row `ti`.
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparsePlan {
    /// Apply into `out`, overwriting every component.
    pub(crate) fn apply_into(
        &self,
        amps: &DVector<C64>,
        map: &EmbeddingMap,
        out: &mut DVector<C64>,
    ) {
        for r in 0..map.rest_dim {
            let block = &map.full_index[r * map.op_dim..(r + 1) * map.op_dim];
            for (ti, &fi) in block.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &(tj, m) in &self.rows[ti] {
                    acc += m * amps[block[tj]];
                }
                out[fi] = acc;
            }
        }
    }

    /// ‖K|ψ⟩‖² without materializing the output state; used for heralded
    /// failure branches, whose states are never evolved further.
    pub(crate) fn apply_norm_sqr(&self, amps: &DVector<C64>, map: &EmbeddingMap) -> f64 {
        let mut total = 0.0;
        for r in 0..map.rest_dim {
            let block = &map.full_index[r * map.op_dim..(r + 1) * map.op_dim];
            for row in &self.rows {
                let mut acc = C64::new(0.0, 0.0);
                for &(tj, m) in row {
                    acc += m * amps[block[tj]];
                }
                total += acc.norm_sqr();
            }
        }
        total
    }
}

/// Index bookkeeping for embedding an operator into a larger space:
/// `full_index[r * op_dim + t]` is the flat basis index of the state space
/// for rest-configuration `r` and operator basis index `t`.
pub(crate) struct EmbeddingMap {
    op_dim: usize,
    rest_dim: usize,
    full_index: Vec<usize>,
}

impl EmbeddingMap {
    pub(crate) fn build(state_space: &Arc<Space>, op_space: &Arc<Space>, targets: &[&str]) -> Result<Self> {
        let op_subs = op_space.subsystems();
        if targets.len() != op_subs.len() {
            return Err(SimError::DimensionMismatch(format!(
                "operator has {} subsystems but {} targets were given",
                op_subs.len(),
                targets.len()
            )));
        }
        let mut positions = Vec::with_capacity(targets.len());
        for (sub, target) in op_subs.iter().zip(targets) {
            let pos = state_space.position(target)?;
            if positions.contains(&pos) {
                return Err(SimError::NameCollision(format!(
                    "duplicate target subsystem '{target}'"
                )));
            }
            let state_sub = &state_space.subsystems()[pos];
            if state_sub.levels() != sub.levels() {
                return Err(SimError::DimensionMismatch(format!(
                    "levels of operator subsystem '{}' do not match state subsystem '{}'",
                    sub.name(),
                    target
                )));
            }
            positions.push(pos);
        }

        let strides = state_space.strides();
        let op_dim = op_space.dim();
        let rest_dim = state_space.dim() / op_dim;

        // Rest subsystems in state order, with their strides.
        let rest: Vec<(usize, usize)> = state_space
            .subsystems()
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(i, sub)| (sub.dim(), strides[i]))
            .collect();

        // Flat-index contribution of each rest configuration.
        let mut rest_offsets = vec![0usize; rest_dim];
        for (r, offset) in rest_offsets.iter_mut().enumerate() {
            let mut rem = r;
            let mut acc = 0;
            // Row-major over the rest subsystems.
            for &(dim, stride) in rest.iter().rev() {
                acc += (rem % dim) * stride;
                rem /= dim;
            }
            *offset = acc;
        }

        // Flat-index contribution of each operator basis index.
        let op_strides = op_space.strides();
        let mut op_offsets = vec![0usize; op_dim];
        for (t, offset) in op_offsets.iter_mut().enumerate() {
            let mut acc = 0;
            for (k, &pos) in positions.iter().enumerate() {
                let li = (t / op_strides[k]) % op_subs[k].dim();
                acc += li * strides[pos];
            }
            *offset = acc;
        }

        let mut full_index = Vec::with_capacity(rest_dim * op_dim);
        for &ro in &rest_offsets {
            for &to in &op_offsets {
                full_index.push(ro + to);
            }
        }
        Ok(EmbeddingMap {
            op_dim,
            rest_dim,
            full_index,
        })
    }
}
