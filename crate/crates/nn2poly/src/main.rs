use clap::Parser;

fn main() {
    let cli = nn2poly::cli::Cli::parse();
    if let Err(e) = nn2poly::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
