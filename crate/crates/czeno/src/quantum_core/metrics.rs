use super::{DensityOperator, PureState};
use crate::{Result, SimError};

/// |⟨ref|out⟩|² for a (possibly sub-normalized) pure output against a
/// normalized reference. Phase-invariant by construction.
pub fn fidelity(out: &PureState, reference: &PureState) -> Result<f64> {
    reference.assert_normalized()?;
    Ok(reference.inner(out)?.norm_sqr())
}

/// ⟨ref|ρ|ref⟩ for a density-operator output.
pub fn fidelity_density(out: &DensityOperator, reference: &PureState) -> Result<f64> {
    reference.assert_normalized()?;
    if out.space() != reference.space() {
        return Err(SimError::SpaceMismatch(
            "fidelity between operators on different spaces".into(),
        ));
    }
    let v = reference.amplitudes();
    Ok((v.adjoint() * out.matrix() * v)[(0, 0)].re)
}

/// Pure-state concurrence 2|ad − bc| of a normalized state on exactly two
/// 2-level subsystems with amplitudes (a, b, c, d).
pub fn concurrence(state: &PureState) -> Result<f64> {
    let subs = state.space().subsystems();
    if subs.len() != 2 || subs.iter().any(|s| s.dim() != 2) {
        return Err(SimError::DimensionMismatch(
            "concurrence requires exactly two 2-level subsystems".into(),
        ));
    }
    state.assert_normalized()?;
    let amps = state.amplitudes();
    Ok(2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::super::{C64, Space, Subsystem};
    use super::*;

    fn two_qubits() -> Arc<Space> {
        Space::new(vec![
            Subsystem::new("a", &["0", "1"]),
            Subsystem::new("b", &["0", "1"]),
        ])
        .unwrap()
    }

    fn state(amps: &[f64]) -> PureState {
        PureState::new(
            two_qubits(),
            DVector::from_iterator(4, amps.iter().map(|&x| C64::new(x, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn fidelity_with_self_is_one() {
        let psi = state(&[0.5, 0.5, 0.5, 0.5]);
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_orthogonal_is_zero() {
        let a = state(&[1.0, 0.0, 0.0, 0.0]);
        let b = state(&[0.0, 1.0, 0.0, 0.0]);
        assert!(fidelity(&a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn fidelity_cz_output_vs_plus_plus() {
        // |⟨++|CZ|++⟩|² = 0.25
        let out = state(&[0.5, 0.5, 0.5, -0.5]);
        let reference = state(&[0.5, 0.5, 0.5, 0.5]);
        assert!((fidelity(&out, &reference).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fidelity_density_matches_pure() {
        let out = state(&[0.5, 0.5, 0.5, -0.5]);
        let reference = state(&[0.5, 0.5, 0.5, 0.5]);
        let via_rho = fidelity_density(&out.to_density(), &reference).unwrap();
        assert!((via_rho - 0.25).abs() < 1e-12);
    }

    #[test]
    fn concurrence_product_state_is_zero() {
        assert!(concurrence(&state(&[1.0, 0.0, 0.0, 0.0])).unwrap() < 1e-15);
    }

    #[test]
    fn concurrence_cz_on_plus_plus_is_one() {
        assert!((concurrence(&state(&[0.5, 0.5, 0.5, -0.5])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concurrence_partially_entangled() {
        // √0.8|00⟩ + √0.2|11⟩ → 2·√(0.8·0.2) = 0.8
        let psi = state(&[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]);
        assert!((concurrence(&psi).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_wrong_dimension() {
        let space = Space::new(vec![Subsystem::new("a", &["0", "1", "2"])]).unwrap();
        let s = PureState::basis(&space, &["0"]).unwrap();
        assert!(concurrence(&s).is_err());
    }
}
