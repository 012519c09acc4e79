use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use saabf::bench::{
    complexity_counts, export_csv, read_csv, render_plots, run_experiment_with_threads, ExperimentSpec,
};
use saabf::Error;

#[derive(Parser)]
#[command(name = "saabf", version, about = "Reduced-rank DS-UWB receiver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec and write `<name>.csv` and `<name>.json`.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print complex additions and multiplications per bit.
    Complexity {
        #[arg(long)]
        algo: String,
        #[arg(short = 'M')]
        m: usize,
        #[arg(short = 'D', default_value_t = 1)]
        d: usize,
        #[arg(short = 'q', default_value_t = 1)]
        q: usize,
        #[arg(short = 'C', default_value_t = 1)]
        c: usize,
    },
    /// Render SVG plots next to a CSV written by `run`.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        /// Output directory; defaults to the CSV's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Spec(Error),
    Runtime(Error),
}

fn run(
    spec_path: &Path,
    out: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<(), Failure> {
    let mut spec = ExperimentSpec::load(spec_path).map_err(Failure::Spec)?;
    if let Some(n) = trials {
        spec.num_trials = n;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate().map_err(Failure::Spec)?;
    let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let result = run_experiment_with_threads(&spec, threads).map_err(Failure::Runtime)?;
    std::fs::create_dir_all(out).map_err(|e| Failure::Runtime(e.into()))?;
    let csv_path = out.join(format!("{}.csv", spec.name));
    export_csv(&result, &csv_path).map_err(Failure::Runtime)?;
    let json = serde_json::to_string_pretty(&result).expect("result serializes");
    std::fs::write(out.join(format!("{}.json", spec.name)), json).map_err(|e| Failure::Runtime(e.into()))?;
    for p in &result.points {
        let at = p.sweep_value.map(|v| format!(" at {v}")).unwrap_or_default();
        println!("mean Wiener MMSE{at}: {:.4e}", p.mean_mmse);
        for a in &p.algorithms {
            let ber = a.data_ber().map(|b| format!(", data BER {b:.3e}")).unwrap_or_default();
            println!(
                "  {}: final MSE {:.4e} ± {:.1e}{ber}",
                a.label, a.final_mse, a.final_mse_stderr
            );
        }
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            spec,
            out,
            trials,
            seed,
            threads,
        } => run(&spec, &out, trials, seed, threads),
        Command::Complexity { algo, m, d, q, c } => {
            let ops = complexity_counts(&algo, m, d, q, c).map_err(Failure::Spec)?;
            println!("adds {} mults {}", ops.adds, ops.mults);
            Ok(())
        }
        Command::Plot { csv, out } => {
            let table = read_csv(&csv).map_err(Failure::Spec)?;
            let dir = out.unwrap_or_else(|| csv.parent().map(Path::to_path_buf).unwrap_or_default());
            let stem = csv
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "plot".into());
            std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(e.into()))?;
            for path in render_plots(&table, &dir, &stem).map_err(Failure::Runtime)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Spec(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
