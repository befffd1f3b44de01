use clap::Parser;

fn main() {
    let cli = dcmndp::cli::Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = dcmndp::cli::execute(cli, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
