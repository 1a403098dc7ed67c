use std::process::ExitCode;

fn main() -> ExitCode {
    oncodss::cli::main()
}
