use clap::Parser;
use daemonic_cli::{run, Cli};

fn main() {
    // clap exits with 2 on usage errors and 0 for --help.
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
