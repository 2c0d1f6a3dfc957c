use clap::Parser;
use puf_trng_cli::args::Cli;

fn main() {
    // clap exits with status 2 on its own for malformed arguments
    let cli = Cli::parse();
    let code = match puf_trng_cli::configure_threads().and_then(|()| puf_trng_cli::run(&cli)) {
        Ok(verdict) => verdict.exit_code(),
        Err(e) => {
            eprintln!("puf-trng: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
