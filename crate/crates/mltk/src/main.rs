use clap::Parser;

fn main() {
    let cli = mltk::cli::Cli::parse();
    std::process::exit(mltk::cli::run(cli));
}
