use clap::Parser;

fn main() {
    let cli = recres::Cli::parse();
    let code = recres::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code.code());
}
