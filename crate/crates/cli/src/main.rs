use clap::Parser;

use annc_cli::app::{self, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = app::run(cli, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
