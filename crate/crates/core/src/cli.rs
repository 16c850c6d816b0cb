//! Command-line front end. Every command writes its artifacts plus a
//! `manifest.json` into `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{load_feature_set, FeatureSet, LoadError};
use crate::game::{game_by_name, GameRules};
use crate::gen::{evaluate_feature_set, generate_candidates, hill_climb_weights, Evaluator, GenConfig, GenError};
use crate::instance::FeatureIndex;
use crate::render::render_feature_set;
use crate::search::{play_match, Agent, SearchConfig, SearchError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::OddGames(_) | SearchError::ZeroGames | SearchError::ZeroPlayouts => CliError::Usage(e.to_string()),
            SearchError::TerminalState => CliError::Internal(e.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Search(s) => s.into(),
            GenError::InvalidConfig(_) | GenError::ZeroBudget | GenError::Instance(_) => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "geoweave", version, about = "Pattern features for board games: render, match, generate, evaluate, tune")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Draw every feature of a feature set as an SVG file.
    Render(RenderArgs),
    /// Play two agents against each other with sides swapped.
    Match(MatchArgs),
    /// Enumerate candidate features for a game.
    Generate(GenerateArgs),
    /// Score a feature set against the unbiased baseline.
    Evaluate(EvalArgs),
    /// Hill-climb the weights of a feature set.
    Tune(TuneArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Game name: hexN or line4-WxH.
    #[arg(long, default_value = "hex7")]
    pub game: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, env = "GEOWEAVE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 1000)]
    pub playouts: u32,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub exploration: f64,
    /// Search agents, or single samples from the playout policy.
    #[arg(long, value_enum, default_value_t = AgentArg::Mcts)]
    pub agent: AgentArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentArg {
    Mcts,
    Policy,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            playouts_per_move: self.playouts,
            workers: self.workers,
            uct_exploration: self.exploration,
            ..Default::default()
        }
    }

    fn evaluator(&self) -> Evaluator {
        match self.agent {
            AgentArg::Mcts => Evaluator::Mcts(self.config()),
            AgentArg::Policy => Evaluator::Policy,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub features: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Feature set for agent A; unbiased if omitted.
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Feature set for agent B; unbiased if omitted.
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub games: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub max_elements: usize,
    #[arg(long, default_value_t = 2)]
    pub max_walk_length: usize,
    #[arg(long)]
    pub include_reactive: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Feature set to evaluate; an empty set if omitted.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub games: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub features: PathBuf,
    /// Evaluations allowed, including the starting set.
    #[arg(long, default_value_t = 10)]
    pub budget: u32,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Games per evaluation.
    #[arg(long, default_value_t = 100)]
    pub games: u32,
}

#[derive(Debug, Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'static str,
    config: &'a Command,
    seed: u64,
    version: &'static str,
    wall_time_secs: f64,
    outputs: Vec<OutputEntry>,
}

struct OutDir {
    dir: PathBuf,
    written: Vec<OutputEntry>,
}

impl OutDir {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        self.written.push(OutputEntry { path: name.to_string(), sha256: hex::encode(Sha256::digest(bytes)) });
        Ok(())
    }
}

fn rules_for(name: &str) -> Result<Arc<dyn GameRules>, CliError> {
    game_by_name(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn load(path: &Path) -> Result<FeatureSet, CliError> {
    load_feature_set(path).map_err(|e| match e {
        LoadError::Io(io) => CliError::Usage(format!("{}: {io}", path.display())),
        e => CliError::Usage(format!("{}: {e}", path.display())),
    })
}

fn json_line<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string(v)? + "\n")
}

fn pretty<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn agent_for(label: String, path: Option<&Path>, rules: &dyn GameRules, search: &SearchArgs) -> Result<Agent, CliError> {
    let features = match path {
        Some(p) => {
            let fs = load(p)?;
            Some(Arc::new(FeatureIndex::build(&fs, rules.board(), rules.pieces()).map_err(|e| CliError::Usage(e.to_string()))?))
        }
        None => None,
    };
    Ok(match search.agent {
        AgentArg::Mcts => Agent::mcts(label, search.config(), features),
        AgentArg::Policy => Agent::policy(label, features),
    })
}

fn label(path: Option<&Path>) -> String {
    path.and_then(|p| p.file_stem()).map_or("uniform".to_string(), |s| s.to_string_lossy().into_owned())
}

fn execute(cmd: &Command) -> Result<(&'static str, u64, OutDir), CliError> {
    match cmd {
        Command::Render(a) => {
            let rules = rules_for(&a.common.game)?;
            let fs = load(&a.features)?;
            let mut out = OutDir::create(&a.common.out)?;
            let pics = render_feature_set(rules.as_ref(), &fs).map_err(|e| CliError::Usage(e.to_string()))?;
            for (name, svg) in pics {
                out.write(&name, svg.as_bytes())?;
            }
            Ok(("render", a.common.seed, out))
        }
        Command::Match(a) => {
            if a.games == 0 || a.games % 2 == 1 {
                return Err(CliError::Usage(format!("--games must be even and positive, got {}", a.games)));
            }
            let rules = rules_for(&a.common.game)?;
            let pa = agent_for(label(a.a.as_deref()), a.a.as_deref(), rules.as_ref(), &a.search)?;
            let pb = agent_for(label(a.b.as_deref()), a.b.as_deref(), rules.as_ref(), &a.search)?;
            let report = play_match(rules.as_ref(), &pa, &pb, a.games, a.common.seed)?;
            let mut out = OutDir::create(&a.common.out)?;
            out.write("match.json", &pretty(&report)?)?;
            Ok(("match", a.common.seed, out))
        }
        Command::Generate(a) => {
            let rules = rules_for(&a.common.game)?;
            let cfg = GenConfig {
                max_elements: a.max_elements,
                max_walk_length: a.max_walk_length,
                turn_vocabulary: None,
                include_reactive: a.include_reactive,
            };
            let fs = FeatureSet::new(format!("{}-candidates", rules.name()), generate_candidates(rules.as_ref(), &cfg)?);
            let mut out = OutDir::create(&a.common.out)?;
            out.write("candidates.fs", fs.to_text().as_bytes())?;
            Ok(("generate", a.common.seed, out))
        }
        Command::Evaluate(a) => {
            let rules = rules_for(&a.common.game)?;
            let fs = match &a.features {
                Some(p) => load(p)?,
                None => FeatureSet::new("empty", vec![]),
            };
            let rec = evaluate_feature_set(&fs, rules.as_ref(), a.games, a.common.seed, &a.search.evaluator())?;
            let mut out = OutDir::create(&a.common.out)?;
            out.write("eval.json", &pretty(&rec)?)?;
            out.write("eval.jsonl", json_line(&rec)?.as_bytes())?;
            Ok(("evaluate", a.common.seed, out))
        }
        Command::Tune(a) => {
            let rules = rules_for(&a.common.game)?;
            let fs = load(&a.features)?;
            let res = hill_climb_weights(&fs, rules.as_ref(), a.budget, a.step, a.games, a.common.seed, &a.search.evaluator())?;
            let mut out = OutDir::create(&a.common.out)?;
            out.write("tuned.fs", res.best.to_text().as_bytes())?;
            let log: String = res.history.iter().map(json_line).collect::<Result<_, _>>()?;
            out.write("tune.jsonl", log.as_bytes())?;
            Ok(("tune", a.common.seed, out))
        }
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 for usage and input errors, 1 for anything else.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let start = Instant::now();
    match execute(&cli.command).and_then(|(name, seed, mut out)| {
        let outputs = std::mem::take(&mut out.written);
        for o in &outputs {
            println!("{}", out.dir.join(&o.path).display());
        }
        let manifest = Manifest {
            command: name,
            config: &cli.command,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_secs: start.elapsed().as_secs_f64(),
            outputs,
        };
        let mut f = fs::File::create(out.dir.join("manifest.json"))?;
        f.write_all(&pretty(&manifest)?)?;
        Ok(())
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
