use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use poidc::{
    build, check, finish, fmt, load_config, variants, BuildOptions, CheckOptions, CliError, Exit, VariantsOptions,
};

#[derive(Parser)]
#[command(name = "poidc", version, about = "Compile instructional-design pattern repositories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite .poid files in canonical form.
    Fmt {
        /// Files or directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Report files that would change and exit 1 instead of writing.
        #[arg(long)]
        check: bool,
    },
    /// Validate patterns, compositions and all their variants.
    Check {
        #[arg(default_value = ".")]
        repo: PathBuf,
        #[arg(long)]
        deny_warnings: bool,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Count or list the variants of a composition.
    Variants {
        composition: String,
        #[arg(long, default_value = ".")]
        repo: PathBuf,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        pick: Option<u64>,
    },
    /// Build the course package and HTML for one variant.
    Build {
        composition: String,
        #[arg(long, default_value = ".")]
        repo: PathBuf,
        #[arg(long, default_value_t = 0)]
        pick: u64,
        #[arg(long)]
        locale: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, CliError> {
    let config = load_config()?;
    match cli.command {
        Command::Fmt { paths, check } => fmt(&paths, check, out, err),
        Command::Check { repo, deny_warnings, limit, json } => {
            let opts = CheckOptions {
                deny_warnings: deny_warnings || config.deny_warnings,
                limit: limit.unwrap_or(config.limit),
                json,
            };
            check(&repo, &opts, out, err)
        }
        Command::Variants { composition, repo, limit, count_only, pick } => {
            let opts = VariantsOptions { limit: limit.unwrap_or(config.limit), count_only, pick };
            variants(&repo, &composition, &opts, out, err)
        }
        Command::Build { composition, repo, pick, locale, out: dir } => {
            let opts = BuildOptions { pick, locale, out: dir, mapping: config.mapping };
            build(&repo, &composition, &opts, out, err)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage.code() as u8 } else { 0 });
        }
    };
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = finish(run(cli, &mut out, &mut err), &mut err);
    ExitCode::from(code.code() as u8)
}
