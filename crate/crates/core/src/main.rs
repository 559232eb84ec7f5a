use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(bibranch::cli::run(std::env::args_os()))
}
