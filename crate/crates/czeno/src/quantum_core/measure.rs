use nalgebra::{DMatrix, DVector};

use super::{C64, Operator, PureState, Space};
use crate::{Result, SimError, TOL_EXACT};

/// One branch of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub label: String,
    pub probability: f64,
    /// Renormalized post-measurement state; `None` for zero-probability
    /// outcomes.
    pub post_state: Option<PureState>,
}

/// Projective measurement of one subsystem in an orthonormal outcome
/// basis given as (label, amplitude vector) pairs. Probabilities sum to
/// the squared norm of the input state.
pub fn projective_measure(
    state: &PureState,
    subsystem: &str,
    outcome_basis: &[(String, Vec<C64>)],
) -> Result<Vec<MeasurementOutcome>> {
    let sub = state.space().subsystem(subsystem)?.clone();
    let d = sub.dim();
    if outcome_basis.len() != d || outcome_basis.iter().any(|(_, v)| v.len() != d) {
        return Err(SimError::DimensionMismatch(format!(
            "outcome basis must have {d} vectors of length {d}"
        )));
    }
    for (i, (_, vi)) in outcome_basis.iter().enumerate() {
        for (j, (_, vj)) in outcome_basis.iter().enumerate() {
            let dot: C64 = vi.iter().zip(vj).map(|(a, b)| a.conj() * b).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (dot - C64::new(expected, 0.0)).norm() > TOL_EXACT {
                return Err(SimError::NonOrthonormalBasis);
            }
        }
    }

    let sub_space = Space::new(vec![sub])?;
    let mut outcomes = Vec::with_capacity(d);
    for (label, v) in outcome_basis {
        let vv = DVector::from_vec(v.clone());
        let proj: DMatrix<C64> = &vv * vv.adjoint();
        let op = Operator::new(sub_space.clone(), proj)?;
        let branch = op.apply(state, &[subsystem])?;
        let probability = branch.norm_sqr();
        let post_state = if probability > 0.0 {
            Some(branch.normalized()?)
        } else {
            None
        };
        outcomes.push(MeasurementOutcome {
            label: label.clone(),
            probability,
            post_state,
        });
    }
    Ok(outcomes)
}

/// Projective measurement in the subsystem's canonical level basis.
pub fn measure_levels(state: &PureState, subsystem: &str) -> Result<Vec<MeasurementOutcome>> {
    let sub = state.space().subsystem(subsystem)?;
    let d = sub.dim();
    let basis: Vec<(String, Vec<C64>)> = sub
        .levels()
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[i] = C64::new(1.0, 0.0);
            (level.clone(), v)
        })
        .collect();
    projective_measure(state, subsystem, &basis)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::Subsystem;
    use super::*;

    fn atom() -> Arc<Space> {
        Space::new(vec![Subsystem::new("atom", &["g", "r"])]).unwrap()
    }

    #[test]
    fn basis_state_measures_deterministically() {
        let s = PureState::basis(&atom(), &["g"]).unwrap();
        let outcomes = measure_levels(&s, "atom").unwrap();
        assert!((outcomes[0].probability - 1.0).abs() < 1e-12);
        assert!(outcomes[1].probability < 1e-15);
        assert!(outcomes[1].post_state.is_none());
    }

    #[test]
    fn equal_superposition_splits_evenly() {
        let amp = C64::new(1.0 / 2f64.sqrt(), 0.0);
        let s = PureState::new(
            atom(),
            DVector::from_vec(vec![amp, amp]),
        )
        .unwrap();
        let outcomes = measure_levels(&s, "atom").unwrap();
        assert!((outcomes[0].probability - 0.5).abs() < 1e-12);
        assert!((outcomes[1].probability - 0.5).abs() < 1e-12);
        let post = outcomes[0].post_state.as_ref().unwrap();
        assert!((post.amplitude(&["g"]).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_state_norm() {
        let s = PureState::new(
            atom(),
            DVector::from_vec(vec![C64::new(0.5, 0.1), C64::new(-0.3, 0.2)]),
        )
        .unwrap();
        let total: f64 = measure_levels(&s, "atom")
            .unwrap()
            .iter()
            .map(|o| o.probability)
            .sum();
        assert!((total - s.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let s = PureState::basis(&atom(), &["g"]).unwrap();
        let bad = vec![
            ("a".to_string(), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            ("b".to_string(), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        ];
        assert!(matches!(
            projective_measure(&s, "atom", &bad),
            Err(SimError::NonOrthonormalBasis)
        ));
    }
}
