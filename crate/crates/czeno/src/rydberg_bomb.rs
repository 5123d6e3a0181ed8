//! The quantum bomb: a control Rydberg atom {g, r} gating photon
//! absorption in an atomic ensemble via dipole blockade.
//!
//! The ensemble is modeled as an effective two-level collective system
//! {G, R}: all atoms in the ground state, or exactly one collective
//! excitation. The number of ensemble atoms enters only as metadata.
//! Absorption is an incoherent heralded jump (photon → ABS, ensemble
//! G → R); no re-emission channel exists.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::optics::{LEVEL_ABS, LEVEL_U, PHOTON_LEVELS};
use crate::quantum_core::{
    measure_levels, C64, Cause, MeasurementOutcome, Operator, PureState, QuantumChannel, Space,
    Subsystem,
};
use crate::{Result, SimError};

pub const ATOM: &str = "atom";
pub const ENSEMBLE: &str = "ensemble";

pub const ATOM_G: &str = "g";
pub const ATOM_R: &str = "r";
pub const ENS_G: &str = "G";
pub const ENS_R: &str = "R";

pub fn atom_subsystem() -> Subsystem {
    Subsystem::new(ATOM, &[ATOM_G, ATOM_R])
}

pub fn ensemble_subsystem() -> Subsystem {
    Subsystem::new(ENSEMBLE, &[ENS_G, ENS_R])
}

pub fn atom_space() -> Arc<Space> {
    Space::new(vec![atom_subsystem()]).expect("atom subsystem is well formed")
}

/// Control atom ⊗ ensemble, the full bomb space.
pub fn bomb_space() -> Arc<Space> {
    Space::new(vec![atom_subsystem(), ensemble_subsystem()]).expect("bomb space is well formed")
}

/// |0_B⟩ ≡ |g⟩|G⟩: the absorbing bomb state.
pub fn bomb_zero() -> PureState {
    PureState::basis(&bomb_space(), &[ATOM_G, ENS_G]).expect("basis state")
}

/// |1_B⟩ ≡ |r⟩|G⟩: the blockaded (transparent) bomb state.
pub fn bomb_one() -> PureState {
    PureState::basis(&bomb_space(), &[ATOM_R, ENS_G]).expect("basis state")
}

/// Per-pass absorption probabilities of the bomb: `p_abs` when the
/// control atom is in |g⟩ (unblockaded), `p_leak` residual absorption
/// when it is in |r⟩ (blockaded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BombParams {
    pub p_abs: f64,
    pub p_leak: f64,
    /// Number of ensemble atoms, metadata only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_atoms: Option<u32>,
}

impl BombParams {
    pub fn ideal() -> Self {
        BombParams {
            p_abs: 1.0,
            p_leak: 0.0,
            n_atoms: None,
        }
    }

    pub fn new(p_abs: f64, p_leak: f64) -> Result<Self> {
        let params = BombParams {
            p_abs,
            p_leak,
            n_atoms: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p_abs, self.p_leak] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidProbability(p));
            }
        }
        Ok(())
    }

    /// Physically sensible configs have p_leak ≤ p_abs. Callers warn,
    /// the simulation runs either way.
    pub fn is_physical(&self) -> bool {
        self.p_leak <= self.p_abs
    }
}

/// π/2 pulse on the control atom: the real rotation
/// g → (g + r)/√2, r → (−g + r)/√2.
///
/// Sign convention: this is the single place the Rabi-pulse phase freedom
/// is fixed. The six-stage protocol uses this pulse at the initialization
/// and disentangling steps and its adjoint at the intermediate step, which
/// reproduces the displayed state sequence exactly.
pub fn pi_half_pulse() -> Operator {
    let s = 1.0 / 2f64.sqrt();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
        ],
    );
    Operator::new(atom_space(), m).expect("2x2 matrix on atom space")
}

/// Blockade-conditioned absorber on control atom ⊗ ensemble ⊗ photon.
///
/// Conditioned on the atom in |g⟩ the photon's U amplitude is absorbed
/// with probability `p_abs` (photon → ABS jointly with ensemble G → R);
/// conditioned on |r⟩ the residual probability is `p_leak`. Coherence
/// between the g and r branches is preserved on the non-absorbed sector.
pub fn blockaded_absorber(params: &BombParams) -> Result<QuantumChannel> {
    params.validate()?;
    let space = Space::new(vec![
        atom_subsystem(),
        ensemble_subsystem(),
        Subsystem::new("photon", &PHOTON_LEVELS),
    ])?;
    let dim = space.dim();

    // Surviving Kraus: photon-U amplitude scaled by the atom-conditioned
    // transmission, everything else untouched.
    let mut k0 = DMatrix::<C64>::identity(dim, dim);
    for (atom, p) in [(ATOM_G, params.p_abs), (ATOM_R, params.p_leak)] {
        for ens in [ENS_G, ENS_R] {
            let i = space.basis_index(&[atom, ens, LEVEL_U])?;
            k0[(i, i)] = C64::new((1.0 - p).sqrt(), 0.0);
        }
    }

    // Heralded jumps: |a, e, U⟩ → |a, R, ABS⟩ with the atom-conditioned
    // probability. One Kraus per source basis state keeps Σ K†K = I.
    let mut kraus = vec![(Operator::new(space.clone(), k0)?, Cause::Survive)];
    for (atom, p, cause) in [
        (ATOM_G, params.p_abs, Cause::Absorbed),
        (ATOM_R, params.p_leak, Cause::Leaked),
    ] {
        for ens in [ENS_G, ENS_R] {
            let mut k = DMatrix::<C64>::zeros(dim, dim);
            let src = space.basis_index(&[atom, ens, LEVEL_U])?;
            let dst = space.basis_index(&[atom, ENS_R, LEVEL_ABS])?;
            k[(dst, src)] = C64::new(p.sqrt(), 0.0);
            kraus.push((Operator::new(space.clone(), k)?, cause));
        }
    }
    QuantumChannel::new(kraus)
}

/// Deterministic readout of the control atom in the {g, r} basis: both
/// branches with their probabilities, for branch-resolved analysis.
pub fn measure_control_atom(state: &PureState) -> Result<Vec<MeasurementOutcome>> {
    measure_levels(state, ATOM)
}

/// Monte-Carlo readout: samples one outcome using the caller's seeded
/// random source, so parallel runs stay reproducible.
pub fn sample_control_atom<R: Rng>(
    state: &PureState,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let outcomes = measure_control_atom(state)?;
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let mut draw = rng.gen::<f64>() * total;
    for outcome in &outcomes {
        draw -= outcome.probability;
        if draw <= 0.0 && outcome.probability > 0.0 {
            return Ok(outcome.clone());
        }
    }
    Ok(outcomes
        .into_iter()
        .rev()
        .find(|o| o.probability > 0.0)
        .expect("state has positive norm"))
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use crate::optics::{photon_subsystem, LEVEL_D};
    use super::*;

    fn joint_space() -> Arc<Space> {
        Space::new(vec![
            atom_subsystem(),
            ensemble_subsystem(),
            photon_subsystem("photon"),
        ])
        .unwrap()
    }

    fn atom_state(g: f64, r: f64) -> PureState {
        PureState::new(
            atom_space(),
            DVector::from_vec(vec![C64::new(g, 0.0), C64::new(r, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn pulse_prepares_equal_superposition() {
        let out = pi_half_pulse().apply(&atom_state(1.0, 0.0), &[ATOM]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((out.amplitude(&[ATOM_G]).unwrap().re - s).abs() < 1e-15);
        assert!((out.amplitude(&[ATOM_R]).unwrap().re - s).abs() < 1e-15);
    }

    #[test]
    fn four_pulses_give_minus_identity() {
        let p = pi_half_pulse();
        let p4 = p.compose(&p).unwrap().compose(&p).unwrap().compose(&p).unwrap();
        for (i, x) in p4.matrix().iter().enumerate() {
            let expected = if i % 3 == 0 { -1.0 } else { 0.0 };
            assert!((x - C64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn eighth_power_is_identity_and_unitary() {
        let p = pi_half_pulse();
        assert!(p.is_unitary(1e-12));
        let mut acc = Operator::identity(&atom_space());
        for _ in 0..8 {
            acc = p.compose(&acc).unwrap();
        }
        for (a, b) in acc
            .matrix()
            .iter()
            .zip(DMatrix::<C64>::identity(2, 2).iter())
        {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pulse_disentangling_identities() {
        let s = 1.0 / 2f64.sqrt();
        let plus = atom_state(s, s);
        let minus = atom_state(s, -s);
        let p = pi_half_pulse();
        // (g+r)/√2 → r and (g−r)/√2 → g up to the documented sign.
        let out_plus = p.apply(&plus, &[ATOM]).unwrap();
        assert!(out_plus.amplitude(&[ATOM_G]).unwrap().norm() < 1e-15);
        assert!((out_plus.amplitude(&[ATOM_R]).unwrap().re - 1.0).abs() < 1e-15);
        let out_minus = p.apply(&minus, &[ATOM]).unwrap();
        assert!((out_minus.amplitude(&[ATOM_G]).unwrap().re - 1.0).abs() < 1e-15);
        assert!(out_minus.amplitude(&[ATOM_R]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn unblockaded_bomb_explodes() {
        // p_abs=1, p_leak=0, atom |g⟩, photon U → ABS with certainty,
        // ensemble in R
        let params = BombParams::ideal();
        let ch = blockaded_absorber(&params).unwrap();
        let s = PureState::basis(&joint_space(), &[ATOM_G, ENS_G, LEVEL_U]).unwrap();
        let branches = ch
            .apply(&s, &[ATOM, ENSEMBLE, "photon"])
            .unwrap();
        let absorbed: Vec<_> = branches
            .iter()
            .filter(|b| b.cause == Cause::Absorbed && b.state.norm_sqr() > 0.0)
            .collect();
        assert_eq!(absorbed.len(), 1);
        let b = &absorbed[0].state;
        assert!((b.amplitude(&[ATOM_G, ENS_R, LEVEL_ABS]).unwrap().re - 1.0).abs() < 1e-15);
        assert!(branches[0].state.norm_sqr() < 1e-30);
    }

    #[test]
    fn blockaded_bomb_is_transparent() {
        let params = BombParams::ideal();
        let ch = blockaded_absorber(&params).unwrap();
        let s = PureState::basis(&joint_space(), &[ATOM_R, ENS_G, LEVEL_U]).unwrap();
        let branches = ch.apply(&s, &[ATOM, ENSEMBLE, "photon"]).unwrap();
        assert_eq!(branches[0].state.amplitudes(), s.amplitudes());
        for b in &branches[1..] {
            assert!(b.state.norm_sqr() < 1e-30);
        }
    }

    #[test]
    fn superposed_bomb_entangles_with_photon() {
        // atom (|g⟩+|r⟩)/√2, photon U, ideal params → surviving branch
        // |r⟩⊗U with squared norm 0.5; absorbed branch records cause
        let s = 1.0 / 2f64.sqrt();
        let joint = joint_space();
        let mut amps = DVector::zeros(joint.dim());
        amps[joint.basis_index(&[ATOM_G, ENS_G, LEVEL_U]).unwrap()] = C64::new(s, 0.0);
        amps[joint.basis_index(&[ATOM_R, ENS_G, LEVEL_U]).unwrap()] = C64::new(s, 0.0);
        let state = PureState::new(joint.clone(), amps).unwrap();

        let ch = blockaded_absorber(&BombParams::ideal()).unwrap();
        let branches = ch.apply(&state, &[ATOM, ENSEMBLE, "photon"]).unwrap();
        let surviving = &branches[0].state;
        assert!((surviving.norm_sqr() - 0.5).abs() < 1e-12);
        assert!(
            (surviving.amplitude(&[ATOM_R, ENS_G, LEVEL_U]).unwrap().re - s).abs() < 1e-12
        );
        let absorbed: f64 = branches
            .iter()
            .filter(|b| b.cause == Cause::Absorbed)
            .map(|b| b.state.norm_sqr())
            .sum();
        assert!((absorbed - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trace_preserving_on_parameter_grid() {
        for &p_abs in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for &p_leak in &[0.0, 0.25, 0.5, 0.75, 1.0] {
                // Construction enforces Σ K†K = I within 1e-10.
                blockaded_absorber(&BombParams {
                    p_abs,
                    p_leak,
                    n_atoms: None,
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn measurement_examples() {
        let r = atom_state(0.0, 1.0);
        let outcomes = measure_control_atom(&r).unwrap();
        assert!(outcomes[0].probability < 1e-15);
        assert!((outcomes[1].probability - 1.0).abs() < 1e-12);

        let s = 1.0 / 2f64.sqrt();
        let plus = atom_state(s, s);
        let photon = PureState::basis(&crate::optics::photon_space("photon"), &[LEVEL_D]).unwrap();
        let joint = plus.tensor(&photon).unwrap();
        let outcomes = measure_control_atom(&joint).unwrap();
        for o in &outcomes {
            assert!((o.probability - 0.5).abs() < 1e-12);
            let post = o.post_state.as_ref().unwrap();
            // Rest of the state is unchanged.
            assert!(
                (post
                    .amplitude(&[if o.label == ATOM_G { ATOM_G } else { ATOM_R }, LEVEL_D])
                    .unwrap()
                    .re
                    - 1.0)
                    .abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        use rand::SeedableRng;
        let s = 1.0 / 2f64.sqrt();
        let plus = atom_state(s, s);
        let mut rng1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = sample_control_atom(&plus, &mut rng1).unwrap();
            let b = sample_control_atom(&plus, &mut rng2).unwrap();
            assert_eq!(a.label, b.label);
        }
    }
}
