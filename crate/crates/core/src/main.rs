use clap::Parser;

use gcs::cli_io::{run, Cli, Outcome};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("GCS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("GCS_THREADS ignored: {e}");
        }
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(outcome) => {
            match &outcome {
                Outcome::Degenerate(msg) => eprintln!("gcs: degenerate input: {msg}"),
                Outcome::ChecksFailed(n) => eprintln!("gcs: {n} invariant check(s) failed"),
                Outcome::Done => {}
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("gcs: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
