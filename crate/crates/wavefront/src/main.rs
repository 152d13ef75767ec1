use clap::Parser;

fn main() {
    std::process::exit(wavefront::cli::run(wavefront::cli::Cli::parse()));
}
