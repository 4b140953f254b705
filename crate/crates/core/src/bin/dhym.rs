use clap::Parser;

fn main() {
    std::process::exit(dhym::cli::main_with(dhym::cli::Args::parse()));
}
