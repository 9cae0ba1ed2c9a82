use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = fsosf_cli::app::Cli::parse();
    std::process::exit(fsosf_cli::app::run(cli));
}
