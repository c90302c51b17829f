use clap::Parser;

fn main() {
    let cli = qes_cli::Cli::parse();
    std::process::exit(qes_cli::run(cli));
}
