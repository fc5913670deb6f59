use clap::Parser;

use lifelog_cli::cli::Cli;

// Exit codes: 0 success, 1 usage, 2 data/invariant error, 3 internal.
fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = lifelog_cli::run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
