//! The N-cycle quantum interrogation engine: Elitzur-Vaidman detection,
//! sign mode, quantum bombs, and the light-matter CZ.
//!
//! Each cycle applies beamsplitter → absorber → loss. Absorbed and lost
//! branches never re-interfere (they live in terminal sectors), so the
//! engine drops them from the coherent evolution and tracks them as
//! scalar probabilities in a [`FailureLedger`]. The density-operator
//! [`oracle`] keeps every branch and validates this optimization.

pub mod oracle;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::optics::{
    absorber_channel, beamsplitter, phase_shifter, photon_space, loss_channel, LogicalEncoding,
    LEVEL_D, LEVEL_OUT,
};
use crate::quantum_core::{
    Cause, DensityOperator, EmbeddingMap, Operator, PureState, QuantumChannel, SparsePlan,
};
use crate::rydberg_bomb::{blockaded_absorber, BombParams, ATOM, ENSEMBLE};
use crate::{Result, SimError, TOL_CHANNEL};

/// Beamsplitter-angle selection: the two standard operating points or an
/// explicit angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// θ = π/(2N): bomb-present output |0_U 1_D⟩, bomb-absent |1_U 0_D⟩.
    Detection,
    /// θ = π/N: bomb-present output +|0_U 1_D⟩, bomb-absent −|0_U 1_D⟩.
    Sign,
}

impl Mode {
    pub fn theta(&self, n_cycles: usize) -> f64 {
        match self {
            Mode::Detection => std::f64::consts::PI / (2.0 * n_cycles as f64),
            Mode::Sign => std::f64::consts::PI / n_cycles as f64,
        }
    }
}

/// How θ is specified: by operating mode, a fixed angle, or a per-cycle
/// schedule (the beamsplitter-readjustment hook for partial absorbers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaSpec {
    Mode(Mode),
    Fixed(f64),
    Schedule(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterrogationConfig {
    pub n_cycles: usize,
    pub theta: ThetaSpec,
    pub bomb: BombParams,
    /// Per-cycle loss probability, applied uniformly on both arms after
    /// the absorber.
    pub epsilon_loss: f64,
    /// Relative phase error of the detour path per cycle; zero models the
    /// equal-path-length adjustment exactly.
    pub detour_phase: f64,
}

impl InterrogationConfig {
    pub fn detection(n_cycles: usize) -> Self {
        InterrogationConfig {
            n_cycles,
            theta: ThetaSpec::Mode(Mode::Detection),
            bomb: BombParams::ideal(),
            epsilon_loss: 0.0,
            detour_phase: 0.0,
        }
    }

    pub fn sign(n_cycles: usize) -> Self {
        InterrogationConfig {
            theta: ThetaSpec::Mode(Mode::Sign),
            ..InterrogationConfig::detection(n_cycles)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cycles == 0 {
            return Err(SimError::InvalidConfig("n_cycles must be at least 1".into()));
        }
        self.bomb.validate()?;
        if !(0.0..=1.0).contains(&self.epsilon_loss) {
            return Err(SimError::InvalidProbability(self.epsilon_loss));
        }
        match &self.theta {
            ThetaSpec::Mode(_) => {}
            ThetaSpec::Fixed(theta) => {
                if !(*theta > 0.0 && *theta <= std::f64::consts::PI) {
                    return Err(SimError::InvalidConfig(format!(
                        "theta {theta} outside (0, π]"
                    )));
                }
            }
            ThetaSpec::Schedule(sched) => {
                if sched.len() != self.n_cycles {
                    return Err(SimError::InvalidConfig(format!(
                        "theta schedule has {} entries for {} cycles",
                        sched.len(),
                        self.n_cycles
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn theta_for_cycle(&self, cycle: usize) -> f64 {
        match &self.theta {
            ThetaSpec::Mode(mode) => mode.theta(self.n_cycles),
            ThetaSpec::Fixed(theta) => *theta,
            ThetaSpec::Schedule(sched) => sched[cycle],
        }
    }

    /// Constant θ for non-schedule configs.
    pub fn constant_theta(&self) -> Option<f64> {
        match &self.theta {
            ThetaSpec::Schedule(_) => None,
            _ => Some(self.theta_for_cycle(0)),
        }
    }

    pub(crate) fn require_sign_mode(&self) -> Result<()> {
        let expected = Mode::Sign.theta(self.n_cycles);
        match self.constant_theta() {
            Some(theta) if (theta - expected).abs() <= 1e-15 * expected.max(1.0) => Ok(()),
            _ => Err(SimError::InvalidConfig(format!(
                "sign mode requires θ = π/N = {expected}"
            ))),
        }
    }
}

/// Per-cause, per-cycle accumulated probability of heralded failures.
/// Cycle indices are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FailureLedger {
    entries: BTreeMap<(Cause, usize), f64>,
}

impl FailureLedger {
    pub fn record(&mut self, cause: Cause, cycle: usize, probability: f64) {
        debug_assert!(cause != Cause::Survive);
        debug_assert!(probability >= 0.0);
        if probability > 0.0 {
            *self.entries.entry((cause, cycle)).or_insert(0.0) += probability;
        }
    }

    pub fn entries(&self) -> &BTreeMap<(Cause, usize), f64> {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum::<f64>() + 0.0
    }

    pub fn total_for(&self, cause: Cause) -> f64 {
        self.entries
            .iter()
            .filter(|((c, _), _)| *c == cause)
            .map(|(_, p)| p)
            .sum::<f64>()
            + 0.0
    }

    /// Fold another ledger in, shifting its cycle indices.
    pub fn absorb(&mut self, other: &FailureLedger, cycle_offset: usize) {
        for (&(cause, cycle), &p) in &other.entries {
            self.record(cause, cycle + cycle_offset, p);
        }
    }
}

/// Result of one interrogation run. The surviving state is
/// sub-normalized; its squared norm is the success probability.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub surviving_state: PureState,
    pub ledger: FailureLedger,
    pub success_probability: f64,
    pub oracle_density: Option<DensityOperator>,
}

impl RunOutcome {
    /// success + Σ ledger = initial squared norm within 1e-10.
    pub fn check_conservation(&self, initial_norm_sqr: f64) -> Result<()> {
        let total = self.success_probability + self.ledger.total();
        if (total - initial_norm_sqr).abs() > TOL_CHANNEL {
            return Err(SimError::InvariantViolation(format!(
                "probability conservation violated: success + failures = {total}, expected {initial_norm_sqr}"
            )));
        }
        Ok(())
    }
}

/// What sits in the upper arm of the interferometer.
pub(crate) enum BombSetup<'a> {
    /// Empty upper arm.
    Absent,
    /// Classical absorber acting on the photon alone.
    Classical(&'a QuantumChannel),
    /// Blockade-conditioned absorber on atom ⊗ ensemble ⊗ photon.
    Quantum(&'a QuantumChannel),
}

/// The per-cycle loop shared by every run flavor. `photon` names the
/// photon subsystem currently routed through the interferometer.
pub(crate) fn interrogate(
    state: PureState,
    cfg: &InterrogationConfig,
    photon: &str,
    bomb: &BombSetup<'_>,
) -> Result<(PureState, FailureLedger)> {
    cfg.validate()?;
    let mut ledger = FailureLedger::default();
    let space = state.space().clone();
    let loss = if cfg.epsilon_loss > 0.0 {
        Some(loss_channel(cfg.epsilon_loss)?)
    } else {
        None
    };
    let detour = if cfg.detour_phase != 0.0 {
        Some(phase_shifter(LEVEL_OUT, cfg.detour_phase)?)
    } else {
        None
    };
    let constant_bs = cfg.constant_theta().map(beamsplitter);

    // Embedding maps depend only on the state space and target names, and
    // the sparse plans only on the matrix entries; building both once per
    // run keeps the cycle loop allocation-free.
    let bs_probe = beamsplitter(cfg.theta_for_cycle(0));
    let bs_map = EmbeddingMap::build(&space, bs_probe.space(), &[photon])?;
    let constant_bs_plan = constant_bs.as_ref().map(Operator::sparse_plan);
    let bomb_pair: Option<(Vec<(SparsePlan, Cause)>, EmbeddingMap)> = match bomb {
        BombSetup::Absent => None,
        BombSetup::Classical(ch) => {
            let map = EmbeddingMap::build(&space, ch.kraus()[0].0.space(), &[photon])?;
            Some((ch.sparse_plans(), map))
        }
        BombSetup::Quantum(ch) => {
            let map =
                EmbeddingMap::build(&space, ch.kraus()[0].0.space(), &[ATOM, ENSEMBLE, photon])?;
            Some((ch.sparse_plans(), map))
        }
    };
    let loss_pair = match &loss {
        Some(ch) => {
            let map = EmbeddingMap::build(&space, ch.kraus()[0].0.space(), &[photon])?;
            Some((ch.sparse_plans(), map))
        }
        None => None,
    };
    let detour_pair = match &detour {
        Some(op) => Some((op.sparse_plan(), EmbeddingMap::build(&space, op.space(), &[photon])?)),
        None => None,
    };

    let mut cur = state.amplitudes().clone();
    let mut tmp = cur.clone();

    for cycle in 0..cfg.n_cycles {
        let bs;
        let bs_plan = match &constant_bs_plan {
            Some(plan) => plan,
            None => {
                bs = beamsplitter(cfg.theta_for_cycle(cycle)).sparse_plan();
                &bs
            }
        };
        bs_plan.apply_into(&cur, &bs_map, &mut tmp);
        std::mem::swap(&mut cur, &mut tmp);

        if let Some((plans, map)) = &bomb_pair {
            apply_pruned(plans, map, &mut cur, &mut tmp, cycle + 1, &mut ledger);
        }
        if let Some((plans, map)) = &loss_pair {
            apply_pruned(plans, map, &mut cur, &mut tmp, cycle + 1, &mut ledger);
        }
        if let Some((plan, map)) = &detour_pair {
            plan.apply_into(&cur, map, &mut tmp);
            std::mem::swap(&mut cur, &mut tmp);
        }
    }
    Ok((PureState::new(space, cur)?, ledger))
}

/// Evolve the surviving Kraus branch `cur` → `tmp` (then swap) and record
/// the failure branches' probabilities without materializing their states.
fn apply_pruned(
    plans: &[(SparsePlan, Cause)],
    map: &EmbeddingMap,
    cur: &mut nalgebra::DVector<crate::quantum_core::C64>,
    tmp: &mut nalgebra::DVector<crate::quantum_core::C64>,
    cycle: usize,
    ledger: &mut FailureLedger,
) {
    for (plan, cause) in plans {
        if *cause == Cause::Survive {
            plan.apply_into(cur, map, tmp);
        } else {
            ledger.record(*cause, cycle, plan.apply_norm_sqr(cur, map));
        }
    }
    std::mem::swap(cur, tmp);
}

/// Elitzur-Vaidman test: photon enters on D, classical bomb of strength
/// `cfg.bomb.p_abs` present or absent in the upper arm.
pub fn run_ev_test(cfg: &InterrogationConfig, bomb_present: bool) -> Result<RunOutcome> {
    cfg.validate()?;
    let space = photon_space("photon");
    let input = PureState::basis(&space, &[LEVEL_D])?;
    let absorber;
    let bomb = if bomb_present {
        absorber = absorber_channel(cfg.bomb.p_abs)?;
        BombSetup::Classical(&absorber)
    } else {
        BombSetup::Absent
    };
    let (surviving_state, ledger) = interrogate(input, cfg, "photon", &bomb)?;
    let outcome = RunOutcome {
        success_probability: surviving_state.norm_sqr(),
        surviving_state,
        ledger,
        oracle_density: None,
    };
    outcome.check_conservation(1.0)?;
    Ok(outcome)
}

/// Sign-mode run (θ = π/N): no bomb gives −|0_U 1_D⟩, a bomb freezes the
/// photon at +|0_U 1_D⟩ with explosion probability 1 − cos²ᴺ(π/N).
pub fn run_sign_mode(cfg: &InterrogationConfig, bomb_present: bool) -> Result<RunOutcome> {
    cfg.require_sign_mode()?;
    run_ev_test(cfg, bomb_present)
}

/// Quantum-bomb interrogation: the joint state of the bomb (atom ⊗
/// ensemble) and a photon that may occupy U, D or the OUT detour.
pub fn run_quantum_bomb(
    cfg: &InterrogationConfig,
    bomb_state: &PureState,
    photon_state: &PureState,
) -> Result<RunOutcome> {
    cfg.validate()?;
    let photon_name = photon_state
        .space()
        .subsystems()
        .first()
        .map(|s| s.name().to_string())
        .ok_or_else(|| SimError::SpaceMismatch("photon state has no subsystem".into()))?;
    let joint = bomb_state.tensor(photon_state)?;
    let initial = joint.norm_sqr();
    let channel = blockaded_absorber(&cfg.bomb)?;
    let (surviving_state, ledger) =
        interrogate(joint, cfg, &photon_name, &BombSetup::Quantum(&channel))?;
    let outcome = RunOutcome {
        success_probability: surviving_state.norm_sqr(),
        surviving_state,
        ledger,
        oracle_density: None,
    };
    outcome.check_conservation(initial)?;
    Ok(outcome)
}

/// Light-matter CZ (sign mode): the photon's logical 0 rides the OUT
/// detour, logical 1 enters the interferometer on D. Bomb |0_B⟩ leaves
/// the state unchanged; bomb |1_B⟩ flips the sign of the D term.
pub fn run_light_matter_cz(
    cfg: &InterrogationConfig,
    bomb_state: &PureState,
    photon_logical: (crate::quantum_core::C64, crate::quantum_core::C64),
) -> Result<RunOutcome> {
    cfg.require_sign_mode()?;
    let space = photon_space("photon");
    let photon = LogicalEncoding::detour().encode(&space, photon_logical.0, photon_logical.1)?;
    run_quantum_bomb(cfg, bomb_state, &photon)
}
