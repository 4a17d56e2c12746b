//! Command-line and environment configuration.
//!
//! Every flag can also be supplied through a `BLINDQKD_`-prefixed
//! environment variable; explicit flags win over the environment, which
//! wins over the built-in defaults. Validation happens before any session
//! runs, and every rejected configuration exits with status 1.

use crate::emit::OutputFormat;
use blindqkd::harness::{FaultInjection, ProtocolParams, Scenario, Variant};
use blindqkd::photon::LabelSet;
use clap::{Parser, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Single pulse per round, no blocking or shuffling.
    Basic,
    /// Two pulses, shuffles, blocking factor, and block disclosure.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    /// No adversary on either channel.
    Honest,
    /// Two-agent interceptor with no label information; blocking guessed.
    Impersonation,
    /// Wavelength-tagging interceptor reading both secrets.
    Labeling,
    /// Labeling interceptor against label-scrubbing defenders.
    #[value(alias = "labeling_vs_scrub")]
    LabelingVsScrub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    /// Run normally.
    None,
    /// Corrupt the first prepared polarization norm (first round only).
    CorruptNorm,
    /// Swap two events in the first round's trace before the audit.
    ReorderTrace,
}

impl From<VariantArg> for Variant {
    fn from(arg: VariantArg) -> Self {
        match arg {
            VariantArg::Basic => Variant::Basic,
            VariantArg::Strong => Variant::Strong,
        }
    }
}

impl From<ScenarioArg> for Scenario {
    fn from(arg: ScenarioArg) -> Self {
        match arg {
            ScenarioArg::Honest => Scenario::Honest,
            ScenarioArg::Impersonation => Scenario::Impersonation,
            ScenarioArg::Labeling => Scenario::Labeling,
            ScenarioArg::LabelingVsScrub => Scenario::LabelingVsScrub,
        }
    }
}

impl From<FaultArg> for FaultInjection {
    fn from(arg: FaultArg) -> Self {
        match arg {
            FaultArg::None => FaultInjection::None,
            FaultArg::CorruptNorm => FaultInjection::CorruptNorm,
            FaultArg::ReorderTrace => FaultInjection::ReorderTrace,
        }
    }
}

/// Deterministic simulator of a blind three-way QKD protocol (KKKP), the
/// wavelength-labeling interception attack against it, and the
/// label-scrubbing countermeasure.
#[derive(Debug, Parser)]
#[command(name = "blindqkd", version, about)]
pub struct Cli {
    /// Protocol variant to simulate.
    #[arg(long, value_enum, default_value_t = VariantArg::Strong, env = "BLINDQKD_VARIANT")]
    pub variant: VariantArg,

    /// Channel scenario for a single run.
    #[arg(long, value_enum, default_value_t = ScenarioArg::Honest, env = "BLINDQKD_SCENARIO", conflicts_with = "matrix")]
    pub scenario: ScenarioArg,

    /// Run all four scenarios (seeds seed, seed+1, seed+2, seed+3).
    #[arg(long, env = "BLINDQKD_MATRIX")]
    pub matrix: bool,

    /// Number of protocol rounds per session.
    #[arg(long, default_value_t = 10_000, env = "BLINDQKD_ROUNDS")]
    pub rounds: u64,

    /// RNG seed; identical configurations reproduce identical reports.
    #[arg(long, default_value_t = 42, env = "BLINDQKD_SEED")]
    pub seed: u64,

    /// Wavelength tag offset applied by the interceptor, in nm.
    #[arg(
        long,
        default_value_t = 0.1,
        allow_negative_numbers = true,
        env = "BLINDQKD_DELTA"
    )]
    pub delta: f64,

    /// Canonical pulse wavelength, in nm.
    #[arg(
        long,
        default_value_t = 1550.0,
        allow_negative_numbers = true,
        env = "BLINDQKD_WAVELENGTH"
    )]
    pub wavelength: f64,

    /// Fraction of the sifted key publicly compared for error estimation.
    #[arg(
        long,
        default_value_t = 0.2,
        allow_negative_numbers = true,
        env = "BLINDQKD_SAMPLE_FRACTION"
    )]
    pub sample_fraction: f64,

    /// Error-rate threshold above which the session is aborted.
    #[arg(
        long,
        default_value_t = 0.05,
        allow_negative_numbers = true,
        env = "BLINDQKD_QBER_THRESHOLD"
    )]
    pub qber_threshold: f64,

    /// Absolute tolerance for pulse intensity checks.
    #[arg(
        long,
        default_value_t = 0.01,
        allow_negative_numbers = true,
        env = "BLINDQKD_INTENSITY_TOL"
    )]
    pub intensity_tol: f64,

    /// Probability of running an intensity check at each receive point.
    #[arg(
        long,
        default_value_t = 0.25,
        allow_negative_numbers = true,
        env = "BLINDQKD_INTENSITY_CHECK_PROB"
    )]
    pub intensity_check_prob: f64,

    /// Report rendering.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, env = "BLINDQKD_FORMAT")]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, env = "BLINDQKD_OUT")]
    pub out: Option<PathBuf>,

    /// Deliberately break one internal invariant (diagnostics; exits 2).
    #[arg(long, value_enum, default_value_t = FaultArg::None, env = "BLINDQKD_INJECT_FAULT")]
    pub inject_fault: FaultArg,
}

impl Cli {
    /// Session parameters for one scenario, validated.
    pub fn params_for(&self, scenario: Scenario, seed: u64) -> Result<ProtocolParams, String> {
        let canonical = LabelSet::new(self.wavelength, 0.0, 1.0).map_err(|e| e.to_string())?;
        let params = ProtocolParams {
            variant: self.variant.into(),
            scenario,
            rounds: self.rounds,
            seed,
            delta: self.delta,
            canonical,
            sample_fraction: self.sample_fraction,
            qber_threshold: self.qber_threshold,
            intensity_tol: self.intensity_tol,
            intensity_check_prob: self.intensity_check_prob,
            fault: self.inject_fault.into(),
        };
        params.validate().map_err(|e| e.to_string())?;
        Ok(params)
    }

    /// The scenarios this invocation runs, with their per-session seeds.
    pub fn scenario_plan(&self) -> Vec<(Scenario, u64)> {
        if self.matrix {
            Scenario::ALL
                .iter()
                .enumerate()
                .map(|(i, &s)| (s, self.seed.wrapping_add(i as u64)))
                .collect()
        } else {
            vec![(self.scenario.into(), self.seed)]
        }
    }

    /// A zero tag offset makes both stored pulses read identically, so the
    /// labeling attack degenerates to blind guessing of the blocked pulse.
    pub fn degenerate_labeling(&self) -> bool {
        self.delta == 0.0 && (self.matrix || self.scenario == ScenarioArg::Labeling)
    }
}
