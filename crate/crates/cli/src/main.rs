use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qclass_cli::report::Status;
use qclass_cli::{exit, load_manifest, run_tasks, RunOptions};
use qclass_core::cocycles::DEFAULT_MAX_ORDER;

#[derive(Parser)]
#[command(name = "qclass", version, about = "Exact characteristic classes of Q-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a manifest and run its tasks.
    Run {
        manifest: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run independent tasks concurrently.
        #[arg(long)]
        parallel: bool,
        /// Highest series order accepted.
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Load a manifest and certify its homological field only.
    Check { manifest: PathBuf },
    /// Print the sign-convention handbook.
    ExplainConventions,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ExplainConventions => {
            print!("{}", qclass_cli::conventions::HANDBOOK);
            code(exit::SUCCESS)
        }
        Command::Check { manifest } => match load_manifest(&manifest) {
            Ok(m) => {
                println!("{}: Q is homological on chart {}", m.name, m.chart());
                println!("{} connection(s), {} task(s)", m.connections.len(), m.tasks.len());
                code(exit::SUCCESS)
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(exit::LOAD_ERROR)
            }
        },
        Command::Run {
            manifest,
            out,
            parallel,
            max_order,
        } => {
            let m = match load_manifest(&manifest) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(exit::LOAD_ERROR);
                }
            };
            let report = run_tasks(&m, RunOptions { parallel, max_order });
            for t in &report.tasks {
                let status = match t.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Error => "ERROR",
                };
                match &t.message {
                    Some(msg) => eprintln!("[{}] {} {}: {status}: {msg}", t.index + 1, t.id, t.kind),
                    None => eprintln!("[{}] {} {}: {status}", t.index + 1, t.id, t.kind),
                }
            }
            let s = &report.summary;
            eprintln!("{} passed, {} failed, {} errors", s.passed, s.failed, s.errors);
            let json = report.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return code(exit::LOAD_ERROR);
                    }
                }
                None => print!("{json}"),
            }
            code(if report.success() { exit::SUCCESS } else { exit::FAILURE })
        }
    }
}
