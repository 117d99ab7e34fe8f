use clap::Parser;

fn main() {
    let cli = qbessel::cli::Cli::parse();
    std::process::exit(qbessel::cli::run(cli));
}
