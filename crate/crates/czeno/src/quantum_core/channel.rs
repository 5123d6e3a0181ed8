use std::fmt;

use serde::{Deserialize, Serialize};

use super::{C64, Operator, PureState};
use crate::{Result, SimError, TOL_CHANNEL};

/// What a Kraus branch means for the run: the surviving branch keeps
/// evolving coherently, the rest are terminal heralded failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cause {
    Survive,
    Absorbed,
    Leaked,
    Lost,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Cause::Survive => "SURVIVE",
            Cause::Absorbed => "ABSORBED",
            Cause::Leaked => "LEAKED",
            Cause::Lost => "LOST",
        };
        write!(f, "{s}")
    }
}

/// One sub-normalized output branch of a channel application.
#[derive(Debug, Clone)]
pub struct Branch {
    pub state: PureState,
    pub cause: Cause,
}

/// A completely positive trace-preserving map in operator-sum form.
/// Trace preservation (Σ K†K = I) is checked at construction.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<(Operator, Cause)>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<(Operator, Cause)>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| SimError::InvalidConfig("channel needs at least one Kraus operator".into()))?;
        let space = first.0.space().clone();
        let dim = space.dim();
        let mut gram = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for (op, _) in &kraus {
            if *op.space() != space {
                return Err(SimError::SpaceMismatch(
                    "Kraus operators live on different spaces".into(),
                ));
            }
            gram += op.matrix().adjoint() * op.matrix();
        }
        let id = nalgebra::DMatrix::<C64>::identity(dim, dim);
        let deviation = (gram - id)
            .iter()
            .map(|x| x.norm())
            .fold(0.0f64, f64::max);
        if deviation > TOL_CHANNEL {
            return Err(SimError::NotTracePreserving(deviation));
        }
        Ok(QuantumChannel { kraus })
    }

    pub fn kraus(&self) -> &[(Operator, Cause)] {
        &self.kraus
    }

    /// Precomputed sparse form of every Kraus operator, for the cycle-loop
    /// fast path.
    pub(crate) fn sparse_plans(&self) -> Vec<(super::operator::SparsePlan, Cause)> {
        self.kraus
            .iter()
            .map(|(op, cause)| (op.sparse_plan(), *cause))
            .collect()
    }

    /// One sub-normalized branch per Kraus operator; the squared norms of
    /// the branches sum to the input squared norm (trace preservation).
    pub fn apply(&self, state: &PureState, targets: &[&str]) -> Result<Vec<Branch>> {
        self.kraus
            .iter()
            .map(|(op, cause)| {
                Ok(Branch {
                    state: op.apply(state, targets)?,
                    cause: *cause,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DMatrix;

    use super::super::{Space, Subsystem};
    use super::*;

    fn mode_space() -> Arc<Space> {
        Space::new(vec![Subsystem::new("m", &["empty", "occupied"])]).unwrap()
    }

    fn absorber(space: &Arc<Space>, p: f64) -> QuantumChannel {
        // occupied transmits with amplitude sqrt(1-p), jumps to empty with
        // probability p (toy two-level absorber for channel-level tests).
        let t = (1.0 - p).sqrt();
        let k0 = Operator::new(
            space.clone(),
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(1.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(t, 0.0),
                ],
            ),
        )
        .unwrap();
        let k1 = Operator::new(
            space.clone(),
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(0.0, 0.0),
                    C64::new(p.sqrt(), 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 0.0),
                ],
            ),
        )
        .unwrap();
        QuantumChannel::new(vec![(k0, Cause::Survive), (k1, Cause::Absorbed)]).unwrap()
    }

    #[test]
    fn identity_channel_single_branch() {
        let space = mode_space();
        let ch = QuantumChannel::new(vec![(Operator::identity(&space), Cause::Survive)]).unwrap();
        let s = PureState::basis(&space, &["occupied"]).unwrap();
        let branches = ch.apply(&s, &["m"]).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].state.amplitudes(), s.amplitudes());
    }

    #[test]
    fn full_absorber_moves_all_weight() {
        let space = mode_space();
        let ch = absorber(&space, 1.0);
        let s = PureState::basis(&space, &["occupied"]).unwrap();
        let branches = ch.apply(&s, &["m"]).unwrap();
        assert!(branches[0].state.norm_sqr() < 1e-30);
        assert!((branches[1].state.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(branches[1].cause, Cause::Absorbed);
    }

    #[test]
    fn half_absorber_splits_evenly() {
        let space = mode_space();
        let ch = absorber(&space, 0.5);
        let s = PureState::basis(&space, &["occupied"]).unwrap();
        let branches = ch.apply(&s, &["m"]).unwrap();
        assert!((branches[0].state.norm_sqr() - 0.5).abs() < 1e-12);
        assert!((branches[1].state.norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let space = mode_space();
        let half = Operator::new(
            space.clone(),
            DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0)),
        )
        .unwrap();
        let err = QuantumChannel::new(vec![(half, Cause::Survive)]).unwrap_err();
        assert!(matches!(err, SimError::NotTracePreserving(_)));
    }

    #[test]
    fn branch_norms_sum_to_input_norm() {
        let space = mode_space();
        let ch = absorber(&space, 0.3);
        let amp = 1.0 / 2f64.sqrt();
        let s = PureState::new(
            space,
            nalgebra::DVector::from_vec(vec![C64::new(amp, 0.0), C64::new(0.0, amp)]),
        )
        .unwrap();
        let total: f64 = ch
            .apply(&s, &["m"])
            .unwrap()
            .iter()
            .map(|b| b.state.norm_sqr())
            .sum();
        assert!((total - s.norm_sqr()).abs() < 1e-12);
    }
}
