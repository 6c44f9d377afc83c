use clap::Parser;
use plasmon_entangle::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // machine-readable error on stderr, nonzero exit
        let payload = serde_json::json!({
            "error": e.to_string(),
            "kind": e.kind(),
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}
