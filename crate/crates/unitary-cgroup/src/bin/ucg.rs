use clap::Parser;

fn main() {
    let cli = ucg::cli::Cli::parse();
    std::process::exit(ucg::cli::main_with(&cli));
}
