use std::process::ExitCode;

fn main() -> ExitCode {
    exact_mppi_cli::main_with_args(std::env::args_os()).into()
}
