use clap::Parser;
use polysym::cli::{self, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cfg = RunConfig::parse();
    std::process::exit(cli::run(&cfg));
}
