//! `dt`: validate posets, build and check towers, run law suites and
//! denote λ-terms in D∞.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dcpo_core::constructions::ExponentialPoset;
use dcpo_core::dinfty::{dn_levels, DEFAULT_DEPTH_CAP};
use dcpo_core::laws::{self, LawReport};
use dcpo_core::maps::{DEFAULT_CONTINUITY_BOUND, DEFAULT_ENUMERATION_BUDGET};
use dcpo_core::{denote, parse_term, CompactElement, DInfinity, Env, Poset, PosetJson, Tower, TowerJson, TowerOptions};

#[derive(Parser, Debug)]
#[command(name = "dt", version, about = "Finite domain theory toolkit")]
struct Cli {
    /// Maximum number of elements any enumeration may produce.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET, value_parser = positive)]
    budget: usize,
    /// Largest source poset for exhaustive continuity checks.
    #[arg(long, global = true, default_value_t = DEFAULT_CONTINUITY_BOUND, value_parser = positive)]
    continuity_bound: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a poset file describes a partial order.
    Validate { file: PathBuf },
    /// Build or verify a D_n tower.
    Tower {
        #[command(subcommand)]
        action: TowerCommand,
    },
    /// Check the D∞ ≅ [D∞ → D∞] isomorphism on a tower file.
    Iso {
        #[command(subcommand)]
        action: IsoCommand,
    },
    /// Denote a λ-term at a cutoff level.
    Denote {
        term: String,
        /// Bindings `name=spec`, spec one of `bot`, `eta`, `level:index`.
        #[arg(long, value_delimiter = ',')]
        env: Vec<String>,
        /// Abstractions are tabulated over D_cutoff; defaults to depth - 1.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        allow_deep: bool,
        /// Also print every component σ_0 … σ_depth.
        #[arg(long)]
        components: bool,
    },
    /// Run an exhaustive law suite.
    Laws {
        suite: Suite,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Export a poset in another format.
    Export {
        #[command(subcommand)]
        action: ExportCommand,
    },
}

#[derive(Subcommand, Debug)]
enum TowerCommand {
    Build {
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        allow_deep: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full bilimit invariant suite.
    Verify {
        file: PathBuf,
        #[arg(long)]
        allow_deep: bool,
    },
}

#[derive(Subcommand, Debug)]
enum IsoCommand {
    Verify {
        file: PathBuf,
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long)]
        allow_deep: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ExportCommand {
    Dot { file: PathBuf },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Poset,
    Continuity,
    Monad,
    Free,
    Product,
    Exponential,
    Lfp,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Why a command did not succeed.
enum Failure {
    /// A check found a counterexample; exit 1.
    Verification(Vec<Value>),
    /// Bad invocation or unreadable input; exit 2.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn violation(law: &str, witness: Value) -> Failure {
    Failure::Verification(vec![json!({ "law": law, "witness": witness })])
}

fn report_outcome(report: &LawReport) -> Outcome {
    if report.passed() {
        return Ok(());
    }
    Err(Failure::Verification(
        report
            .failures
            .iter()
            .map(|f| serde_json::to_value(f).expect("witnesses serialize"))
            .collect(),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(witnesses)) => {
            for w in &witnesses {
                println!("{w}");
            }
            eprintln!("verification failed: {} counterexample(s)", witnesses.len());
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { file } => validate(cli, file),
        Command::Tower { action } => match action {
            TowerCommand::Build { depth, allow_deep, out } => tower_build(cli, *depth, *allow_deep, out.as_deref()),
            TowerCommand::Verify { file, allow_deep } => tower_verify(cli, file, *allow_deep),
        },
        Command::Iso {
            action: IsoCommand::Verify { file, max_level, allow_deep },
        } => iso_verify(cli, file, *max_level, *allow_deep),
        Command::Denote {
            term,
            env,
            cutoff,
            depth,
            allow_deep,
            components,
        } => denote_cmd(cli, term, env, *cutoff, *depth, *allow_deep, *components),
        Command::Laws { suite, max_size } => run_laws(cli, *suite, *max_size),
        Command::Export {
            action: ExportCommand::Dot { file },
        } => {
            let poset = read_poset(file)?.map_err(|e| violation("order-axioms", json!({ "error": e.to_string() })))?;
            print!("{}", poset.to_dot());
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The outer error is an unreadable file, the inner one an invalid order.
fn read_poset(path: &Path) -> anyhow::Result<dcpo_core::Result<Poset>> {
    let json: PosetJson = read_json(path)?;
    Ok(Poset::from_json(&json))
}

fn validate(cli: &Cli, file: &Path) -> Outcome {
    let poset = read_poset(file)?.map_err(|e| violation("order-axioms", json!({ "error": e.to_string() })))?;
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string(&poset.to_json()).expect("poset serializes")),
        Format::Dot => print!("{}", poset.to_dot()),
        Format::Text => println!("valid poset with {} elements", poset.size()),
    }
    Ok(())
}

fn options(cli: &Cli, allow_deep: bool) -> TowerOptions {
    TowerOptions {
        budget: cli.budget,
        allow_deep,
    }
}

fn level_ids(depth: usize) -> Vec<String> {
    (0..=depth).map(|n| format!("D{n}")).collect()
}

fn tower_build(cli: &Cli, depth: usize, allow_deep: bool, out: Option<&Path>) -> Outcome {
    let model = DInfinity::build_with(depth, options(cli, allow_deep)).map_err(|e| anyhow!(e))?;
    let json = model.tower().to_json(&level_ids(depth), None);
    let text = serde_json::to_string(&json).expect("tower serializes");
    if let Some(path) = out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.format == Format::Json && out.is_none() {
        println!("{text}");
    } else {
        let sizes: Vec<String> = model.sizes().iter().map(|s| s.to_string()).collect();
        println!("{}", sizes.join(" "));
    }
    Ok(())
}

/// Reads a tower file. Level ids `D0 … Dn` are rebuilt as the D_n tower, in
/// which case the function spaces come back too; any other id must be
/// defined in the file's `posets` table.
fn load_tower(cli: &Cli, file: &Path, allow_deep: bool) -> Result<(Tower, Option<Vec<ExponentialPoset>>), Failure> {
    let json: TowerJson = read_json(file)?;
    if json.levels.len() != json.depth + 1 {
        return Err(Failure::Usage(anyhow!(
            "tower of depth {} needs {} levels, found {}",
            json.depth,
            json.depth + 1,
            json.levels.len()
        )));
    }
    let generated = json.levels == level_ids(json.depth);
    let mut spaces = None;
    let mut resolved: Vec<Arc<Poset>> = Vec::new();
    if generated {
        let cap_ok = allow_deep || json.depth <= DEFAULT_DEPTH_CAP;
        if !cap_ok {
            return Err(Failure::Usage(anyhow!(
                "depth {} exceeds the cap of {DEFAULT_DEPTH_CAP}; pass --allow-deep",
                json.depth
            )));
        }
        let (d0, sp) = dn_levels(json.depth, options(cli, allow_deep)).map_err(|e| anyhow!(e))?;
        resolved.push(d0);
        resolved.extend(sp.iter().map(|s| s.poset().clone()));
        spaces = Some(sp);
    } else {
        let table: BTreeMap<String, PosetJson> = json.posets.clone().unwrap_or_default();
        for id in &json.levels {
            let pj = table
                .get(id)
                .ok_or_else(|| Failure::Usage(anyhow!("level `{id}` is not defined in `posets`")))?;
            let p = Poset::from_json(pj).map_err(|e| violation("order-axioms", json!({ "level": id, "error": e.to_string() })))?;
            resolved.push(Arc::new(p));
        }
    }
    let tower = Tower::from_json(&json, |_| Ok(resolved))
        .map_err(|e| violation("tower-valid", json!({ "error": e.to_string() })))?;
    Ok((tower, spaces))
}

fn tower_verify(cli: &Cli, file: &Path, allow_deep: bool) -> Outcome {
    let (tower, _) = load_tower(cli, file, allow_deep)?;
    let report = laws::tower_laws(&tower);
    report_outcome(&report)?;
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string(&report).expect("report serializes")),
        _ => println!("tower verified: depth {}, {} checks", tower.depth(), report.checks),
    }
    Ok(())
}

fn iso_verify(cli: &Cli, file: &Path, max_level: Option<usize>, allow_deep: bool) -> Outcome {
    let (tower, spaces) = load_tower(cli, file, allow_deep)?;
    let spaces = spaces.ok_or_else(|| Failure::Usage(anyhow!("iso verify needs a D_n tower (levels D0 … Dn)")))?;
    let max_level = max_level.unwrap_or(tower.depth());
    let model = DInfinity::from_parts(tower, spaces).map_err(|e| anyhow!(e))?;
    let report = model.verify_iso(max_level).map_err(|e| anyhow!(e))?;
    if !report.passed() {
        return Err(Failure::Verification(
            report
                .failures
                .iter()
                .map(|f| serde_json::to_value(f).expect("witnesses serialize"))
                .collect(),
        ));
    }
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string(&report).expect("report serializes")),
        _ => println!(
            "isomorphism verified: {} compacts, {} finitary functions, order {}",
            report.compacts_checked,
            report.finfuns_checked,
            if report.order_checked { "checked" } else { "skipped" }
        ),
    }
    Ok(())
}

fn parse_binding(model: &DInfinity, binding: &str) -> anyhow::Result<(String, CompactElement)> {
    let (name, spec) = binding
        .split_once('=')
        .ok_or_else(|| anyhow!("binding `{binding}` is not of the form name=spec"))?;
    let value = match spec {
        "bot" => model.bottom(),
        "eta" => model.embed(0, 1)?,
        _ => {
            let (level, index) = spec
                .split_once(':')
                .ok_or_else(|| anyhow!("unknown value `{spec}`; expected bot, eta or level:index"))?;
            model.embed(level.parse().context("level")?, index.parse().context("index")?)?
        }
    };
    Ok((name.to_string(), value))
}

fn denote_cmd(
    cli: &Cli,
    source: &str,
    bindings: &[String],
    cutoff: Option<usize>,
    depth: usize,
    allow_deep: bool,
    with_components: bool,
) -> Outcome {
    let depth = cutoff.map_or(depth, |c| depth.max(c + 1));
    let cutoff = cutoff.unwrap_or(depth.saturating_sub(1));
    if depth == 0 {
        return Err(Failure::Usage(anyhow!("denotation needs depth at least 1")));
    }
    let term = parse_term(source).map_err(|e| anyhow!(e))?;
    let model = DInfinity::build_with(depth, options(cli, allow_deep)).map_err(|e| anyhow!(e))?;
    let mut env = Env::new();
    for b in bindings {
        let (name, value) = parse_binding(&model, b)?;
        env.insert(name, value);
    }
    let value = denote(&model, &term, &env, cutoff).map_err(|e| anyhow!(e))?;
    let components = model.tower().components(value);
    match cli.format {
        Format::Json => {
            let mut out = json!({
                "level": value.level,
                "elem": value.elem,
                "label": model.tower().level(value.level).label(value.elem),
            });
            if with_components {
                out["components"] = json!(components);
            }
            println!("{out}");
        }
        _ => {
            println!("{}", model.describe(value));
            if with_components {
                let parts: Vec<String> = components.iter().map(|c| c.to_string()).collect();
                println!("components: {}", parts.join(" "));
            }
        }
    }
    Ok(())
}

fn run_laws(cli: &Cli, suite: Suite, max_size: Option<usize>) -> Outcome {
    let default = match suite {
        Suite::Poset | Suite::Lfp => 4,
        Suite::Continuity | Suite::Free => 3,
        Suite::Monad | Suite::Product | Suite::Exponential => 2,
    };
    let k = max_size.unwrap_or(default);
    if k > 6 {
        bail_usage(format!("--max-size {k} is beyond exhaustive reach (at most 6)"))?;
    }
    let report = match suite {
        Suite::Poset => laws::poset_laws(k),
        Suite::Continuity => laws::continuity_laws_bounded(k, cli.continuity_bound),
        Suite::Monad => laws::monad_laws(k),
        Suite::Free => laws::freeness_laws(k),
        Suite::Product => laws::product_laws(k),
        Suite::Exponential => laws::exponential_laws(k),
        Suite::Lfp => laws::lfp_laws(k),
    };
    report_outcome(&report)?;
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string(&report).expect("report serializes")),
        _ => println!("all laws pass"),
    }
    Ok(())
}

fn bail_usage(msg: String) -> Outcome {
    Err(Failure::Usage(anyhow::Error::msg(msg)))
}
