use clap::Parser;
use corona_spectra::{init_threads, run_file, Overrides, Task};
use std::path::PathBuf;
use std::process::ExitCode;

/// Essential spectra and Fredholm certificates of convolution-dominated
/// operators on discrete groups.
///
/// Exit codes: 0 success, 1 error, 2 inconclusive Fredholm verdict,
/// 3 validation failure.
#[derive(Parser)]
#[command(name = "corona-spectra", version, allow_negative_numbers = true)]
struct Args {
    /// ess-spectrum, fredholm, crosscheck, verify-algebra or verify-fourier
    task: Task,
    /// Problem definition (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Torus grid points per dimension
    #[arg(long)]
    dual_grid: Option<usize>,
    /// Window radius of the finite section
    #[arg(long)]
    window: Option<usize>,
    /// Extra ring of group elements around the window
    #[arg(long)]
    margin: Option<usize>,
    /// Neighbourhood and pseudospectrum level for crosscheck
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        dual_grid: args.dual_grid,
        window: args.window,
        margin: args.margin,
        epsilon: args.epsilon,
        out: args.out.map(|p| p.display().to_string()),
    };
    let result = init_threads().and_then(|()| run_file(args.task, &args.config, &overrides));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            println!("artifacts: {}", outcome.out_dir.display());
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
