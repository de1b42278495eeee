use std::process::ExitCode;

fn main() -> ExitCode {
    mislabel::cli::run()
}
