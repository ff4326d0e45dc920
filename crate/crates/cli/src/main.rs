use std::process::ExitCode;

fn main() -> ExitCode {
    towerlab::run(std::env::args_os())
}
