use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::{parse_entries, CliError, CliResult, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "mht", version, about = "Predator-prey experiments with multiple Allee effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Parameter or option override, KEY=VAL; repeatable.
    #[arg(long = "param", global = true)]
    params: Vec<String>,

    /// u0,u1,v0,v1
    #[arg(long, global = true)]
    window: Option<String>,

    /// NX,NY
    #[arg(long, global = true)]
    res: Option<String>,

    #[arg(long, global = true)]
    tol: Option<String>,

    #[arg(long, global = true)]
    tmax: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Discriminant, equilibria, eigenvalues and classifications.
    Equilibria,
    /// One trajectory from `start = u,v`.
    Simulate,
    /// Phase portrait with nullclines, manifolds and sample orbits.
    Portrait,
    /// Saddle-node, Hopf and homoclinic curves in the (Q,C) or (B,C) plane.
    Diagram,
    /// Basin-of-attraction map.
    Basin,
    /// Homoclinic value of C.
    Homoclinic,
    /// Basin area against the non-fertile population b.
    ScanB,
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let mut entries = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_entries(&text)?
        }
        None => Default::default(),
    };
    for (k, v) in [("window", &cli.window), ("res", &cli.res), ("tol", &cli.tol), ("tmax", &cli.tmax)] {
        if let Some(v) = v {
            entries.insert(k.to_string(), v.clone());
        }
    }
    RunConfig::from_entries(entries, &cli.params)
}

fn run(cli: &Cli) -> CliResult<String> {
    let cfg = load(cli)?;
    let out = match cli.command {
        Command::Equilibria => commands::equilibria(&cfg),
        Command::Simulate => commands::simulate(&cfg),
        Command::Portrait => commands::portrait(&cfg),
        Command::Diagram => commands::diagram(&cfg),
        Command::Basin => commands::basin(&cfg),
        Command::Homoclinic => commands::homoclinic(&cfg),
        Command::ScanB => commands::scan_b_cmd(&cfg),
    }?;
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", cli.out.display())))?;
    for (name, content) in &out.files {
        let path = cli.out.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(out.stdout)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mht: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
