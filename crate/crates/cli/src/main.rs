use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use qcorr_cli::{parse_scenario, run_scenario, Kind, Outcome, Scenario};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Run classical/quantum correspondence scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files and write their CSV output.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Output file, or output directory when several scenarios are given.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized scenarios; overrides the file's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of scenarios to run concurrently.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
    },
    /// List scenario kinds and their keys.
    ListKinds,
    /// Parse and validate scenario files without running them.
    Validate {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
}

fn load(path: &Path) -> anyhow::Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

enum Destination {
    File(PathBuf),
    Stdout,
}

fn destination(path: &Path, scenario: &Scenario, out: Option<&Path>, many: bool) -> Destination {
    match (out, many) {
        (Some(dir), true) => {
            let stem = path.file_stem().unwrap_or(path.as_os_str());
            Destination::File(dir.join(stem).with_extension("csv"))
        }
        (Some(file), false) => Destination::File(file.to_path_buf()),
        (None, _) => match &scenario.output_path {
            Some(p) if p.is_relative() => {
                Destination::File(path.parent().unwrap_or(Path::new(".")).join(p))
            }
            Some(p) => Destination::File(p.clone()),
            None => Destination::Stdout,
        },
    }
}

fn execute(path: &Path, seed: Option<u64>) -> anyhow::Result<(Scenario, Outcome)> {
    let scenario = load(path)?;
    let outcome = run_scenario(&scenario, seed).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((scenario, outcome))
}

fn run(scenarios: &[PathBuf], out: Option<&Path>, seed: Option<u64>, jobs: usize) -> ExitCode {
    let results: Vec<Mutex<Option<anyhow::Result<(Scenario, Outcome)>>>> =
        scenarios.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(scenarios.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = scenarios.get(i) else { break };
                *results[i].lock().unwrap() = Some(execute(path, seed));
            });
        }
    });

    let many = scenarios.len() > 1;
    if let (Some(dir), true) = (out, many) {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("qcorr: creating {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    let (mut errors, mut failures) = (0, 0);
    let stdout = std::io::stdout();
    for (path, slot) in scenarios.iter().zip(results) {
        let (scenario, outcome) = match slot.into_inner().unwrap().expect("every scenario ran") {
            Ok(v) => v,
            Err(e) => {
                eprintln!("qcorr: {e:#}");
                errors += 1;
                continue;
            }
        };
        let csv = outcome.csv();
        let written = match destination(path, &scenario, out, many) {
            Destination::File(target) => {
                std::fs::write(&target, csv).with_context(|| format!("writing {}", target.display()))
            }
            Destination::Stdout => stdout.lock().write_all(csv.as_bytes()).context("writing stdout"),
        };
        if let Err(e) = written {
            eprintln!("qcorr: {e:#}");
            errors += 1;
        }
        for check in &outcome.checks {
            let status = if check.passed { "pass" } else { "FAIL" };
            eprintln!("{}: {} {status}: {}", path.display(), check.name, check.detail);
        }
        if !outcome.passed() {
            failures += 1;
        }
    }
    if errors > 0 {
        ExitCode::from(1)
    } else if failures > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn list_kinds() {
    for kind in Kind::ALL {
        println!("{:<22} {}", kind.name(), kind.summary());
        let keys: Vec<String> = kind
            .keys()
            .iter()
            .map(|k| match k.default {
                Some(d) => format!("{}={d}", k.name),
                None => format!("{} (required)", k.name),
            })
            .collect();
        println!("{:<22} keys: {}", "", keys.join("; "));
    }
}

fn validate(scenarios: &[PathBuf]) -> ExitCode {
    let mut ok = true;
    for path in scenarios {
        match load(path) {
            Ok(s) => println!("{}: ok ({})", path.display(), s.kind),
            Err(e) => {
                eprintln!("qcorr: {e:#}");
                ok = false;
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenarios,
            out,
            seed,
            jobs,
        } => run(&scenarios, out.as_deref(), seed, jobs as usize),
        Command::ListKinds => {
            list_kinds();
            ExitCode::SUCCESS
        }
        Command::Validate { scenarios } => validate(&scenarios),
    }
}
