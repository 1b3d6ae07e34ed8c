use clap::Parser;

fn main() {
    let cli = collab_tamp_cli::Cli::parse();
    std::process::exit(collab_tamp_cli::run(cli));
}
