//! Flag definitions, JSON config-file loading and resolution into the
//! engine configurations. Command-line flags override config-file
//! fields; defaults fill whatever remains.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::cz_protocol::ProtocolConfig;
use crate::interrogation::{InterrogationConfig, Mode, ThetaSpec};
use crate::rydberg_bomb::BombParams;
use crate::{Result, SimError};

/// Which computation a record describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunKind {
    /// Interaction-free bomb test at the detection operating point.
    Ev,
    /// Sign-mode interrogation (θ = π/N).
    Sign,
    /// Light-matter CZ between the bomb and a single photon.
    LmCz,
    /// Full two-photon CZ gate.
    PhotonCz,
}

impl RunKind {
    pub fn name(&self) -> &'static str {
        match self {
            RunKind::Ev => "ev",
            RunKind::Sign => "sign",
            RunKind::LmCz => "lm-cz",
            RunKind::PhotonCz => "photon-cz",
        }
    }

    fn default_mode(&self) -> Mode {
        match self {
            RunKind::Ev => Mode::Detection,
            _ => Mode::Sign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Detection,
    Sign,
}

impl From<ModeArg> for Mode {
    fn from(value: ModeArg) -> Mode {
        match value {
            ModeArg::Detection => Mode::Detection,
            ModeArg::Sign => Mode::Sign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

impl From<OnOff> for bool {
    fn from(value: OnOff) -> bool {
        value == OnOff::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Real logical amplitude pair parsed from "a,b".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpPair(pub f64, pub f64);

impl FromStr for AmpPair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("expected two comma-separated amplitudes, got '{s}'"));
        }
        let a = parts[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad amplitude '{}': {e}", parts[0]))?;
        let b = parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad amplitude '{}': {e}", parts[1]))?;
        Ok(AmpPair(a, b))
    }
}

/// Flags shared by all single-run subcommands.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON configuration file; explicit flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of interrogation cycles N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Fixed beamsplitter angle in radians.
    #[arg(long, conflicts_with = "mode")]
    pub theta: Option<f64>,
    /// Operating point: detection (θ = π/2N) or sign (θ = π/N).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Absorption probability per pass with the blockade open.
    #[arg(long = "p-abs")]
    pub p_abs: Option<f64>,
    /// Residual absorption per pass with the blockade closed.
    #[arg(long = "p-leak")]
    pub p_leak: Option<f64>,
    /// Per-cycle scattering loss on both interferometer arms.
    #[arg(long)]
    pub loss: Option<f64>,
    /// Detour-path phase error per cycle in radians.
    #[arg(long = "detour-phase")]
    pub detour_phase: Option<f64>,
    /// Control logical amplitudes "a,b" (bomb amplitudes for lm-cz).
    #[arg(long, value_name = "A,B")]
    pub control: Option<AmpPair>,
    /// Target logical amplitudes "a,b" (photon amplitudes for lm-cz).
    #[arg(long, value_name = "A,B")]
    pub target: Option<AmpPair>,
    /// Heralded π correction on the control photon after atom readout.
    #[arg(long = "feed-forward", value_enum)]
    pub feed_forward: Option<OnOff>,
    /// Whether a bomb sits in the upper arm (ev and sign runs).
    #[arg(long, value_enum)]
    pub bomb: Option<OnOff>,
    /// Run the density-operator oracle alongside and report deltas.
    #[arg(long)]
    pub oracle: bool,
    /// Sample the atom readout with this seed instead of reporting the
    /// most probable branch.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// The config-file schema; keys mirror the flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub mode: Option<ModeArg>,
    pub p_abs: Option<f64>,
    pub p_leak: Option<f64>,
    pub loss: Option<f64>,
    pub detour_phase: Option<f64>,
    pub control: Option<[f64; 2]>,
    pub target: Option<[f64; 2]>,
    pub feed_forward: Option<bool>,
    pub bomb: Option<bool>,
    pub seed: Option<u64>,
}

impl<'de> Deserialize<'de> for ModeArg {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let s = String::deserialize(deserializer)?;
        match s.as_str() {
            "detection" => Ok(ModeArg::Detection),
            "sign" => Ok(ModeArg::Sign),
            other => Err(serde::de::Error::custom(format!("unknown mode '{other}'"))),
        }
    }
}

/// Fully resolved run parameters after merging defaults, config file and
/// flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub n: usize,
    pub theta: ThetaSpec,
    pub bomb_params: BombParams,
    pub loss: f64,
    pub detour_phase: f64,
    pub control: (f64, f64),
    pub target: (f64, f64),
    pub feed_forward: bool,
    pub bomb_present: bool,
    pub seed: Option<u64>,
}

impl Resolved {
    pub fn interrogation(&self) -> InterrogationConfig {
        InterrogationConfig {
            n_cycles: self.n,
            theta: self.theta.clone(),
            bomb: self.bomb_params,
            epsilon_loss: self.loss,
            detour_phase: self.detour_phase,
        }
    }

    pub fn protocol(&self) -> ProtocolConfig {
        ProtocolConfig {
            interrogation: self.interrogation(),
            feed_forward: self.feed_forward,
            monte_carlo_seed: self.seed,
        }
    }

    /// The (constant) beamsplitter angle for the record columns.
    pub fn theta_value(&self) -> f64 {
        match &self.theta {
            ThetaSpec::Mode(mode) => mode.theta(self.n),
            ThetaSpec::Fixed(theta) => *theta,
            ThetaSpec::Schedule(sched) => sched.first().copied().unwrap_or(0.0),
        }
    }
}

fn load_file(path: &PathBuf) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| SimError::InvalidConfig(format!("{}: {e}", path.display())))
}

const DEFAULT_AMP: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Merge defaults ← config file ← flags into a [`Resolved`] run.
pub fn resolve(args: &RunArgs, kind: RunKind) -> Result<Resolved> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    // A flag silences the config file's competing angle selection; two
    // competing selections from the same layer are rejected.
    let theta = args.theta.or(if args.mode.is_some() { None } else { file.theta });
    let mode = args.mode.or(if args.theta.is_some() { None } else { file.mode });
    if theta.is_some() && mode.is_some() {
        return Err(SimError::InvalidConfig(
            "--theta and --mode select the beamsplitter angle twice; give one".into(),
        ));
    }
    let theta_spec = match (theta, mode) {
        (Some(t), None) => ThetaSpec::Fixed(t),
        (None, Some(m)) => ThetaSpec::Mode(m.into()),
        (None, None) => ThetaSpec::Mode(kind.default_mode()),
        (Some(_), Some(_)) => unreachable!(),
    };

    let control = args
        .control
        .map(|AmpPair(a, b)| (a, b))
        .or(file.control.map(|[a, b]| (a, b)))
        .unwrap_or((DEFAULT_AMP, DEFAULT_AMP));
    let target = args
        .target
        .map(|AmpPair(a, b)| (a, b))
        .or(file.target.map(|[a, b]| (a, b)))
        .unwrap_or((DEFAULT_AMP, DEFAULT_AMP));

    let resolved = Resolved {
        n: args.n.or(file.n).unwrap_or(100),
        theta: theta_spec,
        bomb_params: BombParams::new(
            args.p_abs.or(file.p_abs).unwrap_or(1.0),
            args.p_leak.or(file.p_leak).unwrap_or(0.0),
        )?,
        loss: args.loss.or(file.loss).unwrap_or(0.0),
        detour_phase: args.detour_phase.or(file.detour_phase).unwrap_or(0.0),
        control,
        target,
        feed_forward: args
            .feed_forward
            .map(bool::from)
            .or(file.feed_forward)
            .unwrap_or(true),
        bomb_present: args.bomb.map(bool::from).or(file.bomb).unwrap_or(true),
        seed: args.seed.or(file.seed),
    };
    resolved.interrogation().validate()?;
    Ok(resolved)
}
