//! Cartesian parameter sweeps. Axes are given as `--axis name=v1,v2,...`
//! and expanded in lexicographic order (the first axis varies slowest).
//! Grid points are independent, so execution is data-parallel when the
//! `parallel` feature is enabled, with a sequential fallback that
//! produces records in the identical order.

use std::str::FromStr;

use clap::Args;

use crate::interrogation::ThetaSpec;
use crate::{Result, SimError};

use super::config::{Resolved, RunArgs, RunKind};
use super::record::{execute, RunRecord};

/// Grids above this size are refused unless `--allow-large` is set.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// One swept parameter and its values, parsed from "name=v1,v2,...".
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, values) = s
            .split_once('=')
            .ok_or_else(|| format!("expected name=v1,v2,... in axis '{s}'"))?;
        let values: std::result::Result<Vec<f64>, String> = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad value '{v}' in axis '{name}': {e}"))
            })
            .collect();
        let values = values?;
        if values.is_empty() {
            return Err(format!("axis '{name}' has no values"));
        }
        Ok(Axis {
            name: name.trim().to_string(),
            values,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub base: RunArgs,
    /// Swept axis "name=v1,v2,..." (repeatable). Axis names: n, theta,
    /// p-abs, p-leak, loss, detour-phase, seed.
    #[arg(long = "axis", value_name = "NAME=V1,V2,...", required = true)]
    pub axes: Vec<Axis>,
    /// Computation executed at each grid point.
    #[arg(long = "run", value_enum, default_value = "photon-cz")]
    pub run: RunKind,
    /// Allow grids above the one-million-point safety cap.
    #[arg(long = "allow-large")]
    pub allow_large: bool,
}

fn apply_axis(r: &mut Resolved, name: &str, value: f64) -> Result<()> {
    match name {
        "n" => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(SimError::InvalidConfig(format!(
                    "axis n needs positive integers, got {value}"
                )));
            }
            r.n = value as usize;
        }
        "theta" => r.theta = ThetaSpec::Fixed(value),
        "p-abs" => r.bomb_params.p_abs = value,
        "p-leak" => r.bomb_params.p_leak = value,
        "loss" => r.loss = value,
        "detour-phase" => r.detour_phase = value,
        "seed" => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(SimError::InvalidConfig(format!(
                    "axis seed needs non-negative integers, got {value}"
                )));
            }
            r.seed = Some(value as u64);
        }
        other => {
            return Err(SimError::InvalidConfig(format!(
                "unknown sweep axis '{other}'"
            )))
        }
    }
    Ok(())
}

/// Total grid size with overflow and cap checks.
pub fn grid_size(axes: &[Axis], allow_large: bool) -> Result<usize> {
    let mut total: usize = 1;
    for axis in axes {
        total = total.checked_mul(axis.values.len()).ok_or_else(|| {
            SimError::InvalidConfig("sweep grid size overflows".into())
        })?;
    }
    if total > MAX_GRID_POINTS && !allow_large {
        return Err(SimError::InvalidConfig(format!(
            "sweep grid has {total} points (cap {MAX_GRID_POINTS}); pass --allow-large to proceed"
        )));
    }
    Ok(total)
}

/// The resolved configuration of grid point `index` (lexicographic, the
/// first axis varying slowest).
fn point(base: &Resolved, axes: &[Axis], index: usize) -> Result<Resolved> {
    let mut r = base.clone();
    let mut rem = index;
    for axis in axes.iter().rev() {
        let k = rem % axis.values.len();
        rem /= axis.values.len();
        apply_axis(&mut r, &axis.name, axis.values[k])?;
    }
    r.interrogation().validate()?;
    Ok(r)
}

/// Sequential execution; also the reference implementation the parallel
/// path is benchmarked against.
pub fn run_points_sequential(
    kind: RunKind,
    base: &Resolved,
    axes: &[Axis],
    total: usize,
    oracle: bool,
) -> Result<Vec<RunRecord>> {
    (0..total)
        .map(|i| execute(kind, &point(base, axes, i)?, oracle))
        .collect()
}

/// Data-parallel execution preserving grid order.
#[cfg(feature = "parallel")]
pub fn run_points_parallel(
    kind: RunKind,
    base: &Resolved,
    axes: &[Axis],
    total: usize,
    oracle: bool,
) -> Result<Vec<RunRecord>> {
    use rayon::prelude::*;
    (0..total)
        .into_par_iter()
        .map(|i| execute(kind, &point(base, axes, i)?, oracle))
        .collect()
}

/// Execute the whole grid with the best available strategy.
pub fn run_points(
    kind: RunKind,
    base: &Resolved,
    axes: &[Axis],
    total: usize,
    oracle: bool,
) -> Result<Vec<RunRecord>> {
    #[cfg(feature = "parallel")]
    {
        run_points_parallel(kind, base, axes, total, oracle)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_points_sequential(kind, base, axes, total, oracle)
    }
}
