use std::sync::Arc;

use nalgebra::DMatrix;

use super::{C64, Operator, PureState, QuantumChannel, Space};
use crate::{Result, SimError, TOL_EXACT};

/// Dense density operator over a labeled space. Used as the oracle
/// representation for incoherent loss: channels act on the full matrix
/// with no branch pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: Arc<Space>,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn new(space: Arc<Space>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(SimError::DimensionMismatch(format!(
                "space dimension {} vs matrix shape {}x{}",
                space.dim(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityOperator { space, matrix })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|x| x.re).sum()
    }

    /// Hermitian within 1e-12, positive semidefinite within 1e-10 and
    /// trace in [0, 1 + 1e-12].
    pub fn validate(&self) -> Result<()> {
        let herm_dev = (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|x| x.norm())
            .fold(0.0f64, f64::max);
        if herm_dev > TOL_EXACT {
            return Err(SimError::InvariantViolation(format!(
                "density matrix not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let eig = self.matrix.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(SimError::InvariantViolation(
                "density matrix not positive semidefinite".into(),
            ));
        }
        let tr = self.trace();
        if !(0.0..=1.0 + TOL_EXACT).contains(&tr) {
            return Err(SimError::InvariantViolation(format!(
                "density matrix trace {tr} outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// K ρ K† with the operator embedded on the named targets.
    pub fn apply_kraus(&self, op: &Operator, targets: &[&str]) -> Result<Self> {
        let full = op.embed(&self.space, targets)?;
        let matrix = &full * &self.matrix * full.adjoint();
        Ok(DensityOperator {
            space: self.space.clone(),
            matrix,
        })
    }

    /// Σ K ρ K† over all Kraus operators of the channel.
    pub fn apply_channel(&self, channel: &QuantumChannel, targets: &[&str]) -> Result<Self> {
        let mut matrix = DMatrix::<C64>::zeros(self.space.dim(), self.space.dim());
        for (op, _) in channel.kraus() {
            let full = op.embed(&self.space, targets)?;
            matrix += &full * &self.matrix * full.adjoint();
        }
        Ok(DensityOperator {
            space: self.space.clone(),
            matrix,
        })
    }

    /// Zero out every row and column whose basis index fails `keep`.
    pub fn project(&self, keep: impl Fn(usize) -> bool) -> Self {
        let dim = self.space.dim();
        let mut matrix = self.matrix.clone();
        for i in 0..dim {
            if !keep(i) {
                for j in 0..dim {
                    matrix[(i, j)] = C64::new(0.0, 0.0);
                    matrix[(j, i)] = C64::new(0.0, 0.0);
                }
            }
        }
        DensityOperator {
            space: self.space.clone(),
            matrix,
        }
    }

    /// Reduced density operator over the named subsystems (partial trace
    /// over everything else).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let keep_pos: Vec<usize> = keep
            .iter()
            .map(|name| self.space.position(name))
            .collect::<Result<_>>()?;
        let kept: Vec<super::Subsystem> = keep_pos
            .iter()
            .map(|&p| self.space.subsystems()[p].clone())
            .collect();
        let reduced_space = Space::new(kept)?;
        let rdim = reduced_space.dim();
        let mut matrix = DMatrix::<C64>::zeros(rdim, rdim);

        let dim = self.space.dim();
        // Map a full index to (kept index, rest index).
        let split = |idx: usize| -> (usize, usize) {
            let parts = self.space.split_index(idx);
            let mut k = 0;
            let mut r = 0;
            for (p, sub) in self.space.subsystems().iter().enumerate() {
                if let Some(slot) = keep_pos.iter().position(|&kp| kp == p) {
                    // Kept subsystems in `keep` order.
                    let _ = slot;
                    continue;
                }
                r = r * sub.dim() + parts[p];
            }
            for &p in &keep_pos {
                k = k * self.space.subsystems()[p].dim() + parts[p];
            }
            (k, r)
        };

        for i in 0..dim {
            let (ki, ri) = split(i);
            for j in 0..dim {
                let (kj, rj) = split(j);
                if ri == rj {
                    matrix[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        DensityOperator::new(reduced_space, matrix)
    }
}

/// |ψ⟩⟨ψ| of a (possibly sub-normalized) pure state.
pub fn to_density(state: &PureState) -> DensityOperator {
    let amps = state.amplitudes();
    let matrix = amps * amps.adjoint();
    DensityOperator {
        space: state.space().clone(),
        matrix,
    }
}

impl PureState {
    pub fn to_density(&self) -> DensityOperator {
        to_density(self)
    }
}

/// Incoherent mixture of branches: Σ |ψᵢ⟩⟨ψᵢ|. The trace equals the sum
/// of the branch squared norms.
pub fn mix(branches: &[PureState]) -> Result<DensityOperator> {
    let first = branches
        .first()
        .ok_or_else(|| SimError::InvalidConfig("mix of zero branches".into()))?;
    let space = first.space().clone();
    let mut matrix = DMatrix::<C64>::zeros(space.dim(), space.dim());
    for b in branches {
        if *b.space() != space {
            return Err(SimError::SpaceMismatch(
                "mixing branches on different spaces".into(),
            ));
        }
        matrix += b.amplitudes() * b.amplitudes().adjoint();
    }
    Ok(DensityOperator { space, matrix })
}

/// Trace distance ½‖ρ − σ‖₁ between two (possibly sub-normalized)
/// Hermitian matrices on the same space.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.space != b.space {
        return Err(SimError::SpaceMismatch(
            "trace distance between operators on different spaces".into(),
        ));
    }
    let diff = &a.matrix - &b.matrix;
    let eig = diff.symmetric_eigen();
    Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
