use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = twoclub_cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    let _ = io::stdout().flush();
    ExitCode::from(code)
}
