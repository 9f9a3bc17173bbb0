//! Command-line front end: argument parsing and the `run` driver.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::invariants::{
    check_modular_invariance, check_nondegenerate_symmetry, check_statistics_symmetry, enumerate_invariants,
    load_coupling_matrix, EntryBound, EnumerationConstraints, TMatching,
};
use crate::linalg::{matrix_to_rows, max_abs_diff, ComplexEntry, DEFAULT_TOLERANCE};
use crate::modular_data::{load_modular_data, su2_modular_data, verlinde_fusion, FusionRing, ModularData, ModularDataDocument};
use crate::report::{AlgebraSummary, Report, Settings};
use crate::statistics::{
    load_statistics, statistics_from_modular_data, statistics_from_parts, statistics_representation,
    verify_statistics_relations, StatisticsData, SubSystem,
};
use crate::structure::{
    check_normality, check_permutation_fusion_iso, classify, BlockSearchLimits, ClassificationContext,
};

#[derive(Debug, Parser)]
#[command(name = "modinv", version, about = "Modular data, statistics matrices and modular invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print modular data as a JSON document
    Gen(CommonArgs),
    /// Fusion rules from the Verlinde formula
    Fusion(CommonArgs),
    /// Statistics matrices X, Y, their relations and the statistics representation
    Stats(StatsArgs),
    /// Enumerate all modular-invariant coupling matrices
    Enumerate(EnumerateArgs),
    /// Check modular invariance, statistics symmetry and normality of coupling matrices
    Check(MatrixArgs),
    /// Full structural classification of coupling matrices
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    /// Built-in SU(2) data at level K (also used for the right side unless overridden)
    #[arg(long, value_name = "K", conflicts_with = "left")]
    pub su2: Option<i64>,
    /// Modular data file for the left side
    #[arg(long, value_name = "FILE")]
    pub left: Option<PathBuf>,
    /// Modular data file for the right side
    #[arg(long, value_name = "FILE", conflicts_with = "right_su2")]
    pub right: Option<PathBuf>,
    /// Built-in SU(2) data at level K for the right side
    #[arg(long, value_name = "K")]
    pub right_su2: Option<i64>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Write the report here instead of standard output
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated sector indices of a subsystem (must contain 0)
    #[arg(long, value_delimiter = ',')]
    pub subsystem: Option<Vec<usize>>,
    /// Statistics file (phases, dimensions, fusion table) instead of modular data
    #[arg(long, value_name = "FILE", conflicts_with_all = ["su2", "left"])]
    pub statistics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Match T only up to a common phase between the two sides
    #[arg(long)]
    pub relaxed_t: bool,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[arg(long)]
    pub max_solutions: Option<usize>,
    /// Explicit cap on every entry instead of the bound derived from the global index
    #[arg(long, value_name = "N")]
    pub entry_cap: Option<u32>,
    /// Node budget of the block-factorization search
    #[arg(long)]
    pub block_budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Coupling matrix file; may be repeated
    #[arg(long, value_name = "FILE", required = true)]
    pub matrix: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub matrices: MatrixArgs,
    #[arg(long)]
    pub block_budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Gen,
    Fusion,
    Stats,
    Enumerate,
    Check,
    Classify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Gen => "gen",
            CommandKind::Fusion => "fusion",
            CommandKind::Stats => "stats",
            CommandKind::Enumerate => "enumerate",
            CommandKind::Check => "check",
            CommandKind::Classify => "classify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraSource {
    Su2(i64),
    File(PathBuf),
    Statistics(PathBuf),
}

impl AlgebraSource {
    fn describe(&self) -> String {
        match self {
            AlgebraSource::Su2(k) => format!("su2 k={k}"),
            AlgebraSource::File(p) => format!("modular data {}", p.display()),
            AlgebraSource::Statistics(p) => format!("statistics {}", p.display()),
        }
    }
}

/// A fully resolved invocation. The right side defaults to the left.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub left: AlgebraSource,
    pub right: Option<AlgebraSource>,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub relaxed_t: bool,
    pub workers: Option<usize>,
    pub node_budget: Option<u64>,
    pub max_solutions: Option<usize>,
    pub entry_cap: Option<u32>,
    pub block_budget: Option<u64>,
    pub matrices: Vec<PathBuf>,
    pub subsystem: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn new(command: CommandKind, left: AlgebraSource) -> Self {
        RunConfig {
            command,
            left,
            right: None,
            tolerance: DEFAULT_TOLERANCE,
            output: None,
            format: OutputFormat::Json,
            relaxed_t: false,
            workers: None,
            node_budget: None,
            max_solutions: None,
            entry_cap: None,
            block_budget: None,
            matrices: Vec::new(),
            subsystem: None,
        }
    }

    fn constraints(&self) -> EnumerationConstraints {
        let defaults = EnumerationConstraints::default();
        EnumerationConstraints {
            entry_bound: self.entry_cap.map_or(EntryBound::DerivedFromIndex, EntryBound::Explicit),
            max_solutions: self.max_solutions,
            tolerance: self.tolerance,
            node_budget: self.node_budget.unwrap_or(defaults.node_budget),
            t_matching: if self.relaxed_t { TMatching::Relaxed } else { TMatching::Strict },
            workers: self.workers,
        }
    }

    fn block_limits(&self) -> BlockSearchLimits {
        let defaults = BlockSearchLimits::default();
        BlockSearchLimits {
            node_budget: self.block_budget.unwrap_or(defaults.node_budget),
            ..defaults
        }
    }
}

impl CommonArgs {
    fn config(&self, command: CommandKind, statistics: Option<&PathBuf>) -> Result<RunConfig> {
        let a = &self.algebra;
        let left = match (a.su2, &a.left, statistics) {
            (Some(k), None, None) => AlgebraSource::Su2(k),
            (None, Some(p), None) => AlgebraSource::File(p.clone()),
            (None, None, Some(p)) => AlgebraSource::Statistics(p.clone()),
            _ => {
                return Err(Error::Parse(
                    "exactly one of --su2, --left (or --statistics for stats) is required".into(),
                ))
            }
        };
        let right = match (&a.right, a.right_su2) {
            (Some(p), None) => Some(AlgebraSource::File(p.clone())),
            (None, Some(k)) => Some(AlgebraSource::Su2(k)),
            _ => None,
        };
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Parse(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        let mut config = RunConfig::new(command, left);
        config.right = right;
        config.tolerance = self.tolerance;
        config.output = self.output.clone();
        config.format = self.format;
        Ok(config)
    }
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        match self.command {
            Command::Gen(c) => c.config(CommandKind::Gen, None),
            Command::Fusion(c) => c.config(CommandKind::Fusion, None),
            Command::Stats(s) => {
                let mut config = s.common.config(CommandKind::Stats, s.statistics.as_ref())?;
                config.subsystem = s.subsystem;
                Ok(config)
            }
            Command::Enumerate(e) => {
                let mut config = e.common.config(CommandKind::Enumerate, None)?;
                config.relaxed_t = e.relaxed_t;
                config.workers = e.workers;
                config.node_budget = e.node_budget;
                config.max_solutions = e.max_solutions;
                config.entry_cap = e.entry_cap;
                config.block_budget = e.block_budget;
                Ok(config)
            }
            Command::Check(m) => {
                let mut config = m.common.config(CommandKind::Check, None)?;
                config.matrices = m.matrix;
                Ok(config)
            }
            Command::Classify(c) => {
                let mut config = c.matrices.common.config(CommandKind::Classify, None)?;
                config.matrices = c.matrices.matrix;
                config.block_budget = c.block_budget;
                Ok(config)
            }
        }
    }
}

/// What a run produces: a report, or for `gen` the modular data itself.
#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Report(Report),
    ModularData(ModularDataDocument),
}

impl RunOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match (self, format) {
            (RunOutput::Report(r), OutputFormat::Json) => r.to_json(),
            (RunOutput::Report(r), OutputFormat::Table) => r.to_table(),
            (RunOutput::ModularData(doc), OutputFormat::Json) => {
                let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
                s.push('\n');
                s
            }
            (RunOutput::ModularData(doc), OutputFormat::Table) => {
                let mut s = format!("# modular data (table view is lossy), c = {}\n", doc.c);
                let s00 = doc.s[0][0].re;
                for (i, (label, h)) in doc.labels.iter().zip(&doc.h).enumerate() {
                    s.push_str(&format!("{i:>3}  {label:<10} h = {h:<22} d = {}\n", doc.s[0][i].re / s00));
                }
                s
            }
        }
    }

    pub fn report(&self) -> Option<&Report> {
        match self {
            RunOutput::Report(r) => Some(r),
            RunOutput::ModularData(_) => None,
        }
    }
}

fn load_algebra(source: &AlgebraSource, tol: f64) -> Result<ModularData> {
    match source {
        AlgebraSource::Su2(k) => su2_modular_data(*k),
        AlgebraSource::File(p) => load_modular_data(p, tol),
        AlgebraSource::Statistics(_) => Err(Error::Parse(
            "a statistics file can only be used with the stats command".into(),
        )),
    }
}

fn summary(source: &AlgebraSource, md: &ModularData, tol: f64) -> AlgebraSummary {
    AlgebraSummary {
        source: source.describe(),
        rank: md.rank(),
        central_charge: Some(md.central_charge()),
        su2_level: md.su2_level(tol),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Modular data, fusion ring and full statistics for one side.
struct Side {
    source: AlgebraSource,
    md: ModularData,
    fr: FusionRing,
    sd: StatisticsData,
}

impl Side {
    fn load(source: &AlgebraSource, tol: f64) -> Result<Self> {
        let md = load_algebra(source, tol)?;
        let fr = verlinde_fusion(&md, tol)?;
        fr.check_axioms()?;
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr))?;
        Ok(Side {
            source: source.clone(),
            md,
            fr,
            sd,
        })
    }
}

struct Sides {
    left: Side,
    right: Option<Side>,
}

impl Sides {
    fn load(config: &RunConfig) -> Result<Self> {
        let left = Side::load(&config.left, config.tolerance)?;
        let right = match &config.right {
            Some(src) if src != &config.left => Some(Side::load(src, config.tolerance)?),
            _ => None,
        };
        Ok(Sides { left, right })
    }

    fn right(&self) -> &Side {
        self.right.as_ref().unwrap_or(&self.left)
    }

    fn context(&self) -> ClassificationContext<'_> {
        let (l, r) = (&self.left, self.right());
        ClassificationContext {
            md_l: &l.md,
            md_r: &r.md,
            fr_l: &l.fr,
            fr_r: &r.fr,
            sd_l: &l.sd,
            sd_r: &r.sd,
        }
    }

    fn report(&self, config: &RunConfig, settings: Settings) -> Report {
        let tol = config.tolerance;
        Report {
            command: config.command.name().into(),
            left: summary(&self.left.source, &self.left.md, tol),
            right: self.right.as_ref().map(|r| summary(&r.source, &r.md, tol)),
            settings,
            summary: None,
            results: Vec::new(),
            notes: Vec::new(),
        }
    }
}

fn base_settings(tol: f64) -> Settings {
    Settings {
        tolerance: tol,
        t_matching: None,
        entry_bound: None,
        node_budget: None,
        max_solutions: None,
        block_search: None,
    }
}

/// Executes one command. The result does not depend on the worker count.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        CommandKind::Gen => run_gen(config),
        CommandKind::Fusion => run_fusion(config),
        CommandKind::Stats => run_stats(config),
        CommandKind::Enumerate => run_enumerate(config),
        CommandKind::Check | CommandKind::Classify => run_matrices(config),
    }
}

fn run_gen(config: &RunConfig) -> Result<RunOutput> {
    if config.right.is_some() {
        return Err(Error::Parse("gen emits a single modular data document; drop the right side".into()));
    }
    let md = load_algebra(&config.left, config.tolerance)?;
    Ok(RunOutput::ModularData(ModularDataDocument::from(&md)))
}

fn run_fusion(config: &RunConfig) -> Result<RunOutput> {
    let sides = Sides::load(config)?;
    let mut report = sides.report(config, base_settings(config.tolerance));
    let mut emit = |name: &str, side: &Side| {
        report.results.push(json!({
            "side": name,
            "labels": side.md.label_names(),
            "quantum_dimensions": side.md.quantum_dimensions(),
            "conjugation": side.fr.conj(),
            "N": side.fr.to_table(),
        }));
    };
    emit("left", &sides.left);
    if let Some(r) = &sides.right {
        emit("right", r);
    }
    Ok(RunOutput::Report(report))
}

fn statistics_result(
    sd: &StatisticsData,
    labels: &[String],
    md: Option<&ModularData>,
    tol: f64,
    notes: &mut Vec<String>,
) -> Value {
    if !sd.closed {
        notes.push(format!(
            "subsystem {:?} is not closed under fusion; the relations need not hold",
            sd.members
        ));
    }
    let relations = match verify_statistics_relations(sd, tol) {
        Ok(r) => to_value(&r),
        Err(e) => {
            notes.push(format!("statistics relations not evaluated: {e}"));
            Value::Null
        }
    };
    let representation = match statistics_representation(sd, tol) {
        Ok(rep) => {
            let mut v = json!({
                "S_stat": matrix_to_rows(&rep.s),
                "T_stat": matrix_to_rows(&rep.t),
                "cube_root_branch": rep.branch,
            });
            if let Some(md) = md.filter(|md| md.rank() == sd.len()) {
                v["s_residual_vs_modular_data"] = max_abs_diff(&rep.s, md.s()).into();
                v["t_residual_vs_modular_data"] = max_abs_diff(&rep.t, md.t()).into();
            }
            v
        }
        Err(e) => {
            notes.push(format!("statistics representation not built: {e}"));
            Value::Null
        }
    };
    json!({
        "members": sd.members,
        "member_labels": sd.members.iter().map(|&m| labels[m].clone()).collect::<Vec<_>>(),
        "closed": sd.closed,
        "kappa": sd.kappa.iter().map(|&k| ComplexEntry::from(k)).collect::<Vec<_>>(),
        "d": sd.dims,
        "Y": matrix_to_rows(&sd.y),
        "z": ComplexEntry::from(sd.z),
        "w": sd.w,
        "abs_z_squared_minus_w": sd.z.norm_sqr() - sd.w,
        "degenerate": sd.degenerate,
        "smallest_singular_value": sd.smallest_singular_value,
        "relations": relations,
        "representation": representation,
    })
}

fn run_stats(config: &RunConfig) -> Result<RunOutput> {
    let tol = config.tolerance;
    if let AlgebraSource::Statistics(path) = &config.left {
        if config.right.is_some() {
            return Err(Error::Parse("a statistics file describes one side only".into()));
        }
        let input = load_statistics(path, tol)?;
        input.fusion.check_axioms()?;
        let delta = subsystem(config, &input.fusion)?;
        let sd = statistics_from_parts(&input.kappa, &input.dims, &input.fusion, &delta, None)?;
        let mut notes = Vec::new();
        let result = statistics_result(&sd, &input.labels, None, tol, &mut notes);
        return Ok(RunOutput::Report(Report {
            command: config.command.name().into(),
            left: AlgebraSummary {
                source: config.left.describe(),
                rank: input.fusion.rank(),
                central_charge: None,
                su2_level: None,
            },
            right: None,
            settings: base_settings(tol),
            summary: None,
            results: vec![result],
            notes,
        }));
    }
    let sides = Sides::load(config)?;
    let mut report = sides.report(config, base_settings(tol));
    let mut sides_list = vec![("left", &sides.left)];
    if let Some(r) = &sides.right {
        sides_list.push(("right", r));
    }
    for (name, side) in sides_list {
        let delta = subsystem(config, &side.fr)?;
        let sd = statistics_from_modular_data(&side.md, &side.fr, &delta)?;
        let mut result = statistics_result(&sd, &side.md.label_names(), Some(&side.md), tol, &mut report.notes);
        result["side"] = name.into();
        report.results.push(result);
    }
    Ok(RunOutput::Report(report))
}

fn subsystem(config: &RunConfig, fr: &FusionRing) -> Result<SubSystem> {
    match &config.subsystem {
        Some(members) => SubSystem::new(members.iter().copied(), fr),
        None => Ok(SubSystem::full(fr)),
    }
}

fn run_enumerate(config: &RunConfig) -> Result<RunOutput> {
    let tol = config.tolerance;
    let sides = Sides::load(config)?;
    let constraints = config.constraints();
    let limits = config.block_limits();
    let settings = Settings {
        t_matching: Some(format!("{:?}", constraints.t_matching).to_lowercase()),
        entry_bound: Some(to_value(&constraints.entry_bound)),
        node_budget: Some(constraints.node_budget),
        max_solutions: constraints.max_solutions,
        block_search: Some(to_value(&limits)),
        ..base_settings(tol)
    };
    let mut report = sides.report(config, settings);
    let found = enumerate_invariants(&sides.left.md, &sides.right().md, &constraints)?;
    let ctx = sides.context();
    for inv in &found.invariants {
        let classification = classify(&inv.matrix, &ctx, tol, &limits)?;
        report.results.push(json!({
            "s_residual": inv.s_residual,
            "t_residual": inv.t_residual,
            "dimension_sum": inv.dimension_sum,
            "classification": to_value(&classification),
        }));
    }
    report.summary = Some(json!({
        "count": found.invariants.len(),
        "suspect": found.suspect.iter().map(|s| json!({
            "matrix": s.matrix.rows(),
            "s_residual": s.s_residual,
        })).collect::<Vec<_>>(),
        "support_size": found.support.len(),
        "free_dimension": found.free_dimension,
        "index": found.index,
        "max_entry_bound": found.max_entry_bound,
        "nodes": found.nodes,
    }));
    let mismatch = found.support.phase_mismatch;
    if !config.relaxed_t && mismatch.min(1.0 - mismatch) > tol {
        report.notes.push(format!(
            "central charges differ by {mismatch} turns of the T phase modulo 24; see --relaxed-t"
        ));
    }
    report
        .notes
        .push("locality realizability of the listed invariants is undecided".into());
    Ok(RunOutput::Report(report))
}

fn run_matrices(config: &RunConfig) -> Result<RunOutput> {
    let tol = config.tolerance;
    let sides = Sides::load(config)?;
    let limits = config.block_limits();
    let settings = if config.command == CommandKind::Classify {
        Settings {
            block_search: Some(to_value(&limits)),
            ..base_settings(tol)
        }
    } else {
        base_settings(tol)
    };
    let mut report = sides.report(config, settings);
    let ctx = sides.context();
    for path in &config.matrices {
        let (z, conversions) =
            load_coupling_matrix(path, sides.left.md.label_names(), sides.right().md.label_names())?;
        let mut result = if config.command == CommandKind::Classify {
            to_value(&classify(&z, &ctx, tol, &limits)?)
        } else {
            check_result(&z, &ctx, tol)?
        };
        result["file"] = display_path(path).into();
        result["labeling_conversions"] = to_value(&conversions);
        report.results.push(result);
    }
    Ok(RunOutput::Report(report))
}

fn display_path(path: &Path) -> String {
    path.display().to_string()
}

fn check_result(z: &crate::invariants::CouplingMatrix, ctx: &ClassificationContext<'_>, tol: f64) -> Result<Value> {
    let modular_invariant = check_modular_invariance(z, ctx.md_l, ctx.md_r, tol)?;
    let statistics_symmetry = check_statistics_symmetry(z, ctx.sd_l, ctx.sd_r, tol)?;
    let nondegenerate = if statistics_symmetry.pass && !ctx.sd_l.degenerate && !ctx.sd_r.degenerate {
        Some(check_nondegenerate_symmetry(z, ctx.sd_l, ctx.sd_r, tol)?)
    } else {
        None
    };
    let permutation_iso = match check_permutation_fusion_iso(z, ctx.fr_l, ctx.fr_r) {
        Ok(v) => Some(v),
        Err(Error::Inapplicable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "matrix": z.rows(),
        "modular_invariant": modular_invariant,
        "statistics_symmetry": statistics_symmetry,
        "nondegenerate_symmetry": nondegenerate,
        "normal": check_normality(z),
        "permutation_iso": permutation_iso,
    }))
}
