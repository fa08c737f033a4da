use clap::Parser;

fn main() {
    let cli = anderson_cli::config::Cli::parse();
    let (text, code) = anderson_cli::run(&cli);
    if code == 0 || code == 1 && !text.starts_with("error:") {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    std::process::exit(code);
}
