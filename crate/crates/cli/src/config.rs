use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use lilbound::bound::{BoundOptions, BoundProblem, NormingSequence, QSumOptions, SigmaProfile};
use lilbound::grid::{parse_grid, require_increasing};
use lilbound::models::MartingaleModel;
use lilbound::phi::PhiFunction;
use lilbound::registry;

use crate::error::{code, CliError, CliResult};

/// Fields of a JSON config file; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub phi: Option<String>,
    pub norming: Option<String>,
    pub sigma: Option<String>,
    pub u_grid: Option<String>,
    pub horizon: Option<u64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub ratio_grid: Option<String>,
    pub tolerance: Option<f64>,
    pub c: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Run settings; flags override the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model id, e.g. chaos:d=2.
    #[arg(long)]
    pub model: Option<String>,
    /// Generator id; defaults to the model's own.
    #[arg(long)]
    pub phi: Option<String>,
    /// Norming sequence, e.g. lil:r=2 or const:c=1.
    #[arg(long)]
    pub norming: Option<String>,
    /// Variance profile: model, powerlaw:gamma=G[:m=..] or csv:PATH.
    #[arg(long)]
    pub sigma: Option<String>,
    /// u grid: a,b,c or lin:LO:HI:N or log:LO:HI:N.
    #[arg(long = "u")]
    pub u_grid: Option<String>,
    /// Horizon N of the sup.
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Number of Monte Carlo paths M.
    #[arg(long)]
    pub paths: Option<u64>,
    /// Base seed of the path streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Geometric ratio grid.
    #[arg(long = "ratios")]
    pub ratio_grid: Option<String>,
    /// Block-sum tolerance.
    #[arg(long = "tol")]
    pub tolerance: Option<f64>,
    /// Constant C of the bound.
    #[arg(long)]
    pub c: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: String,
    pub phi: String,
    pub norming: String,
    pub sigma: String,
    pub u_grid: Vec<f64>,
    pub horizon: u64,
    pub paths: u64,
    pub seed: u64,
    pub ratio_grid: Vec<f64>,
    pub tolerance: f64,
    pub c: f64,
    #[serde(skip)]
    pub out: PathBuf,
}

pub const DEFAULT_MODEL: &str = "chaos:d=1";
pub const DEFAULT_NORMING: &str = "lil:r=2";
pub const DEFAULT_U_GRID: &str = "log:1:8:16";
pub const DEFAULT_RATIOS: &str = "log:1.05:16:12";

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::new(code::IO, format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::domain(format!("bad config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let pick = |flag: &Option<String>, file: &Option<String>, default: &str| {
            flag.clone().or_else(|| file.clone()).unwrap_or_else(|| default.to_string())
        };
        let model = pick(&args.model, &file.model, DEFAULT_MODEL);
        let parsed_model = registry::parse_model(&model)?;
        let phi = match args.phi.clone().or(file.phi) {
            Some(id) => id,
            None => parsed_model
                .phi()
                .map(|p| p.label().to_string())
                .ok_or_else(|| CliError::domain(format!("model {model} has no associated phi; pass --phi")))?,
        };
        let u_grid = parse_grid(&pick(&args.u_grid, &file.u_grid, DEFAULT_U_GRID))?;
        require_increasing(&u_grid, "u grid")?;
        let ratio_grid = parse_grid(&pick(&args.ratio_grid, &file.ratio_grid, DEFAULT_RATIOS))?;
        let cfg = RunConfig {
            model,
            phi,
            norming: pick(&args.norming, &file.norming, DEFAULT_NORMING),
            sigma: pick(&args.sigma, &file.sigma, "model"),
            u_grid,
            horizon: args.horizon.or(file.horizon).unwrap_or(1 << 14),
            paths: args.paths.or(file.paths).unwrap_or(100_000),
            seed: args.seed.or(file.seed).unwrap_or(1),
            ratio_grid,
            tolerance: args.tolerance.or(file.tolerance).unwrap_or(1e-9),
            c: args.c.or(file.c).unwrap_or(1.0),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        };
        if cfg.horizon == 0 || cfg.paths == 0 || cfg.seed == 0 {
            return Err(CliError::domain("horizon, paths and seed must be positive"));
        }
        if !(cfg.tolerance > 0.0 && cfg.tolerance < 1.0) {
            return Err(CliError::domain(format!("tolerance must lie in (0, 1), got {}", cfg.tolerance)));
        }
        if !(cfg.c > 0.0) || !cfg.c.is_finite() {
            return Err(CliError::domain(format!("C must be positive, got {}", cfg.c)));
        }
        // Resolve every id up front so bad input fails before any work.
        cfg.problem()?;
        Ok(cfg)
    }

    pub fn model(&self) -> CliResult<MartingaleModel> {
        Ok(registry::parse_model(&self.model)?)
    }

    pub fn norming(&self) -> CliResult<NormingSequence> {
        Ok(registry::parse_norming(&self.norming)?)
    }

    pub fn phi(&self) -> CliResult<PhiFunction> {
        Ok(registry::parse_phi(&self.phi)?)
    }

    pub fn sigma(&self) -> CliResult<SigmaProfile> {
        Ok(match registry::parse_sigma(&self.sigma)? {
            Some(s) => s,
            None => self.model()?.sigma_profile(),
        })
    }

    pub fn problem(&self) -> CliResult<BoundProblem> {
        Ok(BoundProblem::new(self.norming()?, self.sigma()?, self.phi()?))
    }

    pub fn bound_options(&self) -> BoundOptions {
        BoundOptions {
            ratio_grid: self.ratio_grid.clone(),
            qsum: QSumOptions {
                tol: self.tolerance,
                ..QSumOptions::default()
            },
            ..BoundOptions::default()
        }
    }
}
