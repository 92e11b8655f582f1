//! Run configuration: a JSON document mirroring [`RunConfig`], with command
//! line flags layered on top.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use twomode_core::schedule::{DEFAULT_ASPECT, DEFAULT_RATIO, DEFAULT_SEPARATION_WIDTHS};
use twomode_core::states::DEFAULT_TAIL_MASS;
use twomode_core::{Direction, EvolutionConfig, MergeSchedule, MixtureState, TrapGeometry};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Merge,
    Spectrum,
    Sweep,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Radial,
    Axial,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Radial => Direction::Radial,
            DirectionArg::Axial => Direction::Axial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    /// Atoms in trap 1 (Fock state).
    pub n1: u64,
    /// Atoms in trap 2 for a Fock input.
    pub n2: Option<u64>,
    /// Mean atom number of a coherent input in trap 2.
    pub alpha_sq: Option<f64>,
    /// Total atom number for `spectrum`; defaults to n1 + n2.
    pub n: Option<u64>,
    /// Merge duration in units of 1/U₀.
    pub t_merge: f64,
    pub t_merge_list: Vec<f64>,
    /// N·U₀/J₀.
    pub ratio: f64,
    /// Atom number used for calibration; defaults to the (rounded) mean total.
    pub n_cal: Option<u64>,
    pub sigma_r: f64,
    /// σ_z/σ_ρ.
    pub sigma_ratio: f64,
    /// Initial separation in units of the merge-axis width.
    pub sep0: f64,
    pub direction: DirectionArg,
    pub steps_per_unit_time: usize,
    pub samples: usize,
    pub norm_tolerance: f64,
    pub tail_mass: f64,
    /// Explicit J/U grid for `spectrum`.
    pub ratios: Option<Vec<f64>>,
    pub grid_points: usize,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            n1: 51,
            n2: None,
            alpha_sq: None,
            n: None,
            t_merge: 4.0,
            t_merge_list: vec![0.04, 0.4, 4.0, 40.0],
            ratio: DEFAULT_RATIO,
            n_cal: None,
            sigma_r: 1.0,
            sigma_ratio: DEFAULT_ASPECT,
            sep0: DEFAULT_SEPARATION_WIDTHS,
            direction: DirectionArg::Radial,
            steps_per_unit_time: 2000,
            samples: 201,
            norm_tolerance: 1e-9,
            tail_mass: DEFAULT_TAIL_MASS,
            ratios: None,
            grid_points: twomode_core::spectrum::DEFAULT_GRID_POINTS,
            out: None,
            plot: None,
        }
    }
}

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Atoms in the first trap.
    #[arg(long)]
    pub n1: Option<u64>,
    /// Atoms in the second trap (Fock state).
    #[arg(long, conflicts_with = "alpha_sq")]
    pub n2: Option<u64>,
    /// Mean atom number of a coherent second trap, replacing --n2.
    #[arg(long = "alpha-sq")]
    pub alpha_sq: Option<f64>,
    /// Total atom number (spectrum only).
    #[arg(long)]
    pub n: Option<u64>,
    /// Merge duration U₀·t_m.
    #[arg(long = "tm")]
    pub t_merge: Option<f64>,
    /// Comma-separated merge durations (sweep).
    #[arg(long = "tm-list", value_delimiter = ',')]
    pub t_merge_list: Option<Vec<f64>>,
    /// Calibration ratio N·U₀/J₀.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Atom number used for calibration (default: rounded mean).
    #[arg(long = "n-cal")]
    pub n_cal: Option<u64>,
    /// Merge direction.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Axial to radial trap width ratio.
    #[arg(long = "sigma-ratio")]
    pub sigma_ratio: Option<f64>,
    /// Initial separation in merge-axis widths.
    #[arg(long)]
    pub sep0: Option<f64>,
    /// Minimum propagation steps per unit time.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Number of trajectory samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Poisson mass allowed outside the truncated coherent state.
    #[arg(long = "tail-mass")]
    pub tail_mass: Option<f64>,
    /// Comma-separated J/U grid (spectrum).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub ratios: Option<Vec<f64>>,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG plot path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// File values (if any) with flag overrides applied.
    pub fn resolve(scenario: Scenario, o: &Overrides) -> Result<Self, CliError> {
        let mut c = match &o.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        c.scenario = Some(scenario);
        if let Some(v) = o.n1 {
            c.n1 = v;
        }
        if let Some(v) = o.n2 {
            c.n2 = Some(v);
            c.alpha_sq = None;
        }
        if let Some(v) = o.alpha_sq {
            c.alpha_sq = Some(v);
            c.n2 = None;
        }
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        apply!(t_merge, t_merge_list, ratio, direction, sigma_ratio, sep0, tail_mass, samples);
        if let Some(v) = o.steps {
            c.steps_per_unit_time = v;
        }
        if o.n.is_some() {
            c.n = o.n;
        }
        if o.n_cal.is_some() {
            c.n_cal = o.n_cal;
        }
        if o.ratios.is_some() {
            c.ratios = o.ratios.clone();
        }
        if o.out.is_some() {
            c.out = o.out.clone();
        }
        if o.plot.is_some() {
            c.plot = o.plot.clone();
        }
        if c.n2.is_none() && c.alpha_sq.is_none() {
            c.n2 = Some(49);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.n2.is_some() && self.alpha_sq.is_some() {
            return bad("give exactly one of n2 and alpha_sq".into());
        }
        if !(self.t_merge.is_finite() && self.t_merge > 0.0) {
            return bad(format!("t_merge must be positive, got {}", self.t_merge));
        }
        if let Some(a) = self.alpha_sq {
            if !(a.is_finite() && a > 0.0) {
                return bad(format!("alpha_sq must be positive, got {a}"));
            }
        }
        for (name, v) in [
            ("ratio", self.ratio),
            ("sigma_r", self.sigma_r),
            ("sigma_ratio", self.sigma_ratio),
            ("sep0", self.sep0),
            ("norm_tolerance", self.norm_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.steps_per_unit_time == 0 {
            return bad("steps must be positive".into());
        }
        if self.samples < 2 {
            return bad("samples must be at least 2".into());
        }
        Ok(())
    }

    pub fn geometry(&self, direction: Direction, t_merge: f64) -> TrapGeometry {
        let mut g = TrapGeometry::cigar(direction, self.sigma_ratio, self.sep0, t_merge);
        g.sigma_r = self.sigma_r;
        g.sigma_z = self.sigma_r * self.sigma_ratio;
        g.separation0 = self.sep0 * g.merge_width();
        g
    }

    pub fn initial_state(&self) -> Result<MixtureState, CliError> {
        let state = match (self.n2, self.alpha_sq) {
            (Some(n2), None) => twomode_core::fock_fock(self.n1, n2),
            (None, Some(a)) => twomode_core::fock_coherent(self.n1, a, self.tail_mass),
            _ => return Err(CliError::Config("give exactly one of n2 and alpha_sq".into())),
        };
        state.map_err(CliError::from_core)
    }

    pub fn calibration_n(&self, mixture: &MixtureState) -> u64 {
        self.n_cal.unwrap_or_else(|| mixture.n_mean().round() as u64)
    }

    pub fn schedule(&self, mixture: &MixtureState, direction: Direction, t_merge: f64) -> Result<MergeSchedule, CliError> {
        MergeSchedule::calibrate(self.geometry(direction, t_merge), self.calibration_n(mixture), self.ratio)
            .map_err(CliError::from_core)
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            steps_per_unit_time: self.steps_per_unit_time,
            sample_count: self.samples,
            norm_tolerance: self.norm_tolerance,
            track_levels: true,
        }
    }

    /// Total N for spectrum runs.
    pub fn spectrum_n(&self) -> Result<u64, CliError> {
        if let Some(n) = self.n {
            return Ok(n);
        }
        match self.n2 {
            Some(n2) => Ok(self.n1 + n2),
            None => Err(CliError::Config("spectrum needs --n or --n2".into())),
        }
    }
}
