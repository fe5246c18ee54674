use clap::Parser;

fn main() {
    let cli = kdq_cli::Cli::parse();
    std::process::exit(kdq_cli::run(&cli));
}
