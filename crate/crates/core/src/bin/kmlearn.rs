use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = kmlearn::cli::run(kmlearn::cli::Cli::parse()) {
        eprintln!("{e}");
        std::process::exit(e.code);
    }
}
