use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gaincert::cli::run(std::env::args_os()) as u8)
}
