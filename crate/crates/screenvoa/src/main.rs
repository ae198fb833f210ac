use clap::Parser;
use screenvoa::cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    init_threads();
    let (code, out) = run(&cli);
    if code == 2 {
        eprint!("{}", out);
    } else {
        print!("{}", out);
    }
    std::process::exit(code);
}
