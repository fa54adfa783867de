use clap::Parser;

use flyaround::cli::{run, Cli};

fn main() {
    // clap itself exits 2 on usage errors, matching the contract
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
