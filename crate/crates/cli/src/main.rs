use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relhyp_cli::{
    load_config, run, CliError, Construction, ExportSpec, ModelSource, PeripheralSpec, RunConfig,
};

#[derive(Parser)]
#[command(version, about = "Build balls in Cayley-Abels graphs and trees of spaces, then analyze them")]
struct Cli {
    /// Run config (TOML, or JSON when it starts with '{').
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled analyzers; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<i64>,
    /// Progress on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

/// Quick builds without a config file: the graph is exported, no analyzers run.
#[derive(Subcommand)]
enum Command {
    /// Cayley-Abels ball of a model over U with generators S, optionally relative to H.
    Cayley(CayleyArgs),
    /// Tree of spaces for an amalgam A *_C B.
    Amalgam(TreeArgs),
    /// Tree of spaces for an HNN extension.
    Hnn(TreeArgs),
    /// Tree of spaces for a general graph of finite groups.
    Graphofgroups(TreeArgs),
}

#[derive(Args)]
struct CayleyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Elements of the finite subgroup U of the base vertex group.
    #[arg(long, value_delimiter = ',')]
    u: Vec<usize>,
    /// Generator words, e.g. --s t --s "t^-1".
    #[arg(long, required = true)]
    s: Vec<String>,
    /// Infinite cyclic peripheral generators; with any, the coned-off graph is built,
    /// or the augmented graph when --horoball-depth is given.
    #[arg(long)]
    h: Vec<String>,
    #[arg(long, short)]
    r: i64,
    #[arg(long)]
    horoball_depth: Option<i64>,
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    tree_radius: i64,
    #[arg(long)]
    space_radius: i64,
    /// Cap on distance from the base in the assembled space.
    #[arg(long)]
    radius: Option<i64>,
}

fn quick(command: Command) -> RunConfig {
    let (model, construction) = match command {
        Command::Cayley(a) => {
            let peripherals: Vec<PeripheralSpec> = a.h.into_iter().map(PeripheralSpec::Cyclic).collect();
            let c = match (peripherals.is_empty(), a.horoball_depth) {
                (true, _) => Construction::Cayley { u: a.u, s: a.s, radius: a.r },
                (false, None) => Construction::Coned { u: a.u, s: a.s, peripherals, radius: a.r },
                (false, d) => Construction::Augmented { u: a.u, s: a.s, peripherals, radius: a.r, horoball_depth: d },
            };
            (a.model, c)
        }
        Command::Amalgam(a) => (
            a.model,
            Construction::Amalgam {
                a: Default::default(),
                b: Default::default(),
                tree_radius: a.tree_radius,
                space_radius: a.space_radius,
                radius: a.radius,
            },
        ),
        Command::Hnn(a) => (
            a.model,
            Construction::Hnn { space: Default::default(), tree_radius: a.tree_radius, space_radius: a.space_radius, radius: a.radius },
        ),
        Command::Graphofgroups(a) => (
            a.model,
            Construction::Graphofgroups {
                spaces: Vec::new(),
                tree_radius: a.tree_radius,
                space_radius: a.space_radius,
                radius: a.radius,
            },
        ),
    };
    RunConfig {
        name: construction.kind().to_string(),
        model: Some(ModelSource::Path(model)),
        construction,
        analyzers: Vec::new(),
        output: None,
        seed: None,
        export: ExportSpec::default(),
    }
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let mut config = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path)?,
        (None, Some(cmd)) => quick(cmd),
        (Some(_), Some(_)) => return Err(CliError::Invalid("give either --config or a subcommand, not both".into())),
        (None, None) => return Err(CliError::Invalid("nothing to do: pass --config FILE or a subcommand".into())),
    };
    if let Some(s) = cli.seed {
        config.seed = Some(s);
    }
    let out = cli.out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("relhyp-out"));
    let outcome = run(&config, &out, cli.verbose)?;
    for line in outcome.lines() {
        println!("{line}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
