//! Dual-rail photonic encoding and the optical elements of the
//! interrogation interferometer: beamsplitters, phase shifters and the
//! imperfection channels (uniform arm loss, partial absorption).
//!
//! A photon subsystem carries five levels: the two interferometer arms
//! `U`/`D`, the detour path `OUT` outside the interferometer, and the two
//! terminal records `ABS` (absorbed by the ensemble) and `LOST` (scattered
//! to the environment). No constructed element moves amplitude out of
//! `ABS` or `LOST`.
//!
//! The beamsplitter is a real rotation on the ordered arm basis (D, U).
//! The grey-side π phase of the physical splitter is absorbed into this
//! convention: the stated single-pass evolutions (cos kθ, sin kθ) are
//! exactly those of a real rotation, and the sign-mode output demands
//! R(π) = −1 on D. Mirrors are modeled as identity (equal path lengths).

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::quantum_core::{C64, Cause, Operator, PureState, QuantumChannel, Space, Subsystem};
use crate::{Result, SimError};

pub const LEVEL_U: &str = "U";
pub const LEVEL_D: &str = "D";
pub const LEVEL_OUT: &str = "OUT";
pub const LEVEL_ABS: &str = "ABS";
pub const LEVEL_LOST: &str = "LOST";

pub const PHOTON_LEVELS: [&str; 5] = [LEVEL_U, LEVEL_D, LEVEL_OUT, LEVEL_ABS, LEVEL_LOST];

const U: usize = 0;
const D: usize = 1;
const ABS: usize = 3;
const LOST: usize = 4;

pub fn photon_subsystem(name: &str) -> Subsystem {
    Subsystem::new(name, &PHOTON_LEVELS)
}

pub fn photon_space(name: &str) -> Arc<Space> {
    Space::new(vec![photon_subsystem(name)]).expect("photon subsystem is well formed")
}

fn generic_photon_space() -> Arc<Space> {
    photon_space("photon")
}

fn zeros5() -> DMatrix<C64> {
    DMatrix::zeros(5, 5)
}

fn identity5() -> DMatrix<C64> {
    DMatrix::identity(5, 5)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::InvalidProbability(p));
    }
    Ok(())
}

/// Beamsplitter of reflectivity cos²θ as a real rotation on (D, U):
/// D → cosθ·D + sinθ·U and U → −sinθ·D + cosθ·U, identity on
/// OUT/ABS/LOST.
pub fn beamsplitter(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    let mut m = identity5();
    m[(D, D)] = C64::new(c, 0.0);
    m[(U, D)] = C64::new(s, 0.0);
    m[(D, U)] = C64::new(-s, 0.0);
    m[(U, U)] = C64::new(c, 0.0);
    Operator::new(generic_photon_space(), m).expect("5x5 matrix on photon space")
}

/// Multiplies the amplitude of one photon level by e^{iφ}.
pub fn phase_shifter(level: &str, phi: f64) -> Result<Operator> {
    let space = generic_photon_space();
    let idx = space.subsystems()[0].level_index(level)?;
    let mut m = identity5();
    m[(idx, idx)] = C64::from_polar(1.0, phi);
    Operator::new(space, m)
}

/// A 50% beamsplitter, the Hadamard-equivalent element of the dual-rail
/// encoding. Two consecutive applications give R(π/2).
pub fn hadamard_equiv() -> Operator {
    beamsplitter(std::f64::consts::FRAC_PI_4)
}

/// Uniform per-cycle loss: each arm (U and D) transmits with amplitude
/// √(1−ε) and scatters to LOST with probability ε. OUT is untouched.
pub fn loss_channel(epsilon: f64) -> Result<QuantumChannel> {
    check_probability(epsilon)?;
    let space = generic_photon_space();
    let t = C64::new((1.0 - epsilon).sqrt(), 0.0);
    let j = C64::new(epsilon.sqrt(), 0.0);

    let mut k0 = identity5();
    k0[(U, U)] = t;
    k0[(D, D)] = t;

    let mut ju = zeros5();
    ju[(LOST, U)] = j;
    let mut jd = zeros5();
    jd[(LOST, D)] = j;

    QuantumChannel::new(vec![
        (Operator::new(space.clone(), k0)?, Cause::Survive),
        (Operator::new(space.clone(), ju)?, Cause::Lost),
        (Operator::new(space, jd)?, Cause::Lost),
    ])
}

/// Partial absorber on the upper arm: amplitude in U transmits with real
/// amplitude √(1−p_abs) and jumps to ABS with probability p_abs. D and
/// OUT are untouched. The optional transmitted phase defaults to zero.
pub fn absorber_channel(p_abs: f64) -> Result<QuantumChannel> {
    absorber_channel_with_phase(p_abs, 0.0)
}

/// Partial absorber with an explicit phase on the transmitted amplitude.
pub fn absorber_channel_with_phase(p_abs: f64, phase: f64) -> Result<QuantumChannel> {
    check_probability(p_abs)?;
    let space = generic_photon_space();

    let mut k0 = identity5();
    k0[(U, U)] = C64::from_polar((1.0 - p_abs).sqrt(), phase);
    let mut jump = zeros5();
    jump[(ABS, U)] = C64::new(p_abs.sqrt(), 0.0);

    QuantumChannel::new(vec![
        (Operator::new(space.clone(), k0)?, Cause::Survive),
        (Operator::new(space, jump)?, Cause::Absorbed),
    ])
}

/// The dual-rail logical map: which photon level carries logical 0 and
/// which carries logical 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalEncoding {
    zero_level: String,
    one_level: String,
}

impl LogicalEncoding {
    pub fn new(zero_level: &str, one_level: &str) -> Result<Self> {
        if zero_level == one_level {
            return Err(SimError::InvalidConfig(
                "logical 0 and 1 must map to distinct photon levels".into(),
            ));
        }
        for level in [zero_level, one_level] {
            if !PHOTON_LEVELS.contains(&level) {
                return Err(SimError::UnknownLevel {
                    subsystem: "photon".into(),
                    level: level.into(),
                });
            }
        }
        Ok(LogicalEncoding {
            zero_level: zero_level.into(),
            one_level: one_level.into(),
        })
    }

    /// The standard encoding: |0⟩_L ≡ photon in U, |1⟩_L ≡ photon in D.
    pub fn standard() -> Self {
        LogicalEncoding::new(LEVEL_U, LEVEL_D).expect("distinct levels")
    }

    /// The gate-side encoding: the upper rail is diverted around the
    /// interferometer, so |0⟩_L rides on OUT while |1⟩_L enters on D.
    pub fn detour() -> Self {
        LogicalEncoding::new(LEVEL_OUT, LEVEL_D).expect("distinct levels")
    }

    pub fn zero_level(&self) -> &str {
        &self.zero_level
    }

    pub fn one_level(&self) -> &str {
        &self.one_level
    }

    /// α on the logical-0 level, β on the logical-1 level.
    pub fn encode(&self, space: &Arc<Space>, alpha: C64, beta: C64) -> Result<PureState> {
        let zero = PureState::basis(space, &[&self.zero_level])?;
        let one = PureState::basis(space, &[&self.one_level])?;
        PureState::new(
            space.clone(),
            zero.amplitudes() * alpha + one.amplitudes() * beta,
        )
    }

    /// The (α, β) amplitudes of a photon state in this encoding.
    pub fn decode(&self, state: &PureState) -> Result<(C64, C64)> {
        Ok((
            state.amplitude(&[&self.zero_level])?,
            state.amplitude(&[&self.one_level])?,
        ))
    }
}
