//! Density-operator oracle: the same cycle sequence as the pure-state
//! engine, but composed as full channels with no branch pruning. Used to
//! cross-check the engine's surviving sector and failure accounting.

use crate::optics::{
    absorber_channel, beamsplitter, phase_shifter, photon_space, loss_channel, LEVEL_ABS,
    LEVEL_D, LEVEL_LOST, LEVEL_OUT,
};
use crate::quantum_core::{trace_distance, DensityOperator, PureState};
use crate::rydberg_bomb::{blockaded_absorber, ATOM, ENSEMBLE, ENS_R};
use crate::{Result, SimError};

use super::{BombSetup, InterrogationConfig};

/// Full final density operator and the probability accumulated in the
/// terminal (absorbed/leaked/lost) sectors.
#[derive(Debug, Clone)]
pub struct DensityOutcome {
    pub density: DensityOperator,
    pub failure_probability: f64,
}

/// Engine-vs-oracle comparison on the surviving sector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleReport {
    pub trace_distance: f64,
    pub failure_delta: f64,
}

use serde::Serialize;

pub(crate) fn evolve_density(
    mut rho: DensityOperator,
    cfg: &InterrogationConfig,
    photon: &str,
    bomb: &BombSetup<'_>,
) -> Result<DensityOutcome> {
    cfg.validate()?;
    let initial_trace = rho.trace();
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

    for cycle in 0..cfg.n_cycles {
        let bs = beamsplitter(cfg.theta_for_cycle(cycle));
        rho = rho.apply_kraus(&bs, &[photon])?;
        match bomb {
            BombSetup::Absent => {}
            BombSetup::Classical(ch) => {
                rho = rho.apply_channel(ch, &[photon])?;
            }
            BombSetup::Quantum(ch) => {
                rho = rho.apply_channel(ch, &[ATOM, ENSEMBLE, photon])?;
            }
        }
        if let Some(ch) = &loss {
            rho = rho.apply_channel(ch, &[photon])?;
        }
        if let Some(op) = &detour {
            rho = rho.apply_kraus(op, &[photon])?;
        }
    }

    let surviving = surviving_block(&rho);
    Ok(DensityOutcome {
        failure_probability: initial_trace - surviving.trace(),
        density: rho,
    })
}

/// Project onto the non-terminal sector: no photon subsystem in ABS or
/// LOST and the ensemble (when present) still in its collective ground
/// state. A populated collective excitation is a heralded failure record.
pub fn surviving_block(rho: &DensityOperator) -> DensityOperator {
    let space = rho.space().clone();
    rho.project(move |index| {
        let parts = space.split_index(index);
        for (sub, li) in space.subsystems().iter().zip(parts) {
            let level = &sub.levels()[li];
            if level == LEVEL_ABS || level == LEVEL_LOST {
                return false;
            }
            if sub.name() == ENSEMBLE && level == ENS_R {
                return false;
            }
        }
        true
    })
}

/// Density-route EV test, same setup as [`super::run_ev_test`].
pub fn run_ev_density(cfg: &InterrogationConfig, bomb_present: bool) -> Result<DensityOutcome> {
    let space = photon_space("photon");
    let input = PureState::basis(&space, &[LEVEL_D])?.to_density();
    let absorber;
    let bomb = if bomb_present {
        absorber = absorber_channel(cfg.bomb.p_abs)?;
        BombSetup::Classical(&absorber)
    } else {
        BombSetup::Absent
    };
    evolve_density(input, cfg, "photon", &bomb)
}

/// Density-route quantum-bomb run, same setup as
/// [`super::run_quantum_bomb`].
pub fn run_quantum_bomb_density(
    cfg: &InterrogationConfig,
    bomb_state: &PureState,
    photon_state: &PureState,
) -> Result<DensityOutcome> {
    let photon_name = photon_state
        .space()
        .subsystems()
        .first()
        .map(|s| s.name().to_string())
        .ok_or_else(|| SimError::SpaceMismatch("photon state has no subsystem".into()))?;
    let rho = bomb_state.tensor(photon_state)?.to_density();
    let channel = blockaded_absorber(&cfg.bomb)?;
    evolve_density(rho, cfg, &photon_name, &BombSetup::Quantum(&channel))
}

fn report(
    engine: &super::RunOutcome,
    density: &DensityOutcome,
) -> Result<OracleReport> {
    let engine_rho = engine.surviving_state.to_density();
    let oracle_surviving = surviving_block(&density.density);
    Ok(OracleReport {
        trace_distance: trace_distance(&engine_rho, &oracle_surviving)?,
        failure_delta: (engine.ledger.total() - density.failure_probability).abs(),
    })
}

/// Run the pure-state engine and the density oracle side by side for an
/// EV configuration and compare surviving sectors.
pub fn cross_check_ev(cfg: &InterrogationConfig, bomb_present: bool) -> Result<OracleReport> {
    let engine = super::run_ev_test(cfg, bomb_present)?;
    let density = run_ev_density(cfg, bomb_present)?;
    report(&engine, &density)
}

/// Engine-vs-oracle comparison for a quantum-bomb run.
pub fn cross_check_quantum(
    cfg: &InterrogationConfig,
    bomb_state: &PureState,
    photon_state: &PureState,
) -> Result<OracleReport> {
    let engine = super::run_quantum_bomb(cfg, bomb_state, photon_state)?;
    let density = run_quantum_bomb_density(cfg, bomb_state, photon_state)?;
    report(&engine, &density)
}
