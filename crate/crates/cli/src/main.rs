use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HYPERCS_LOG", "warn")).init();
    hypercs_cli::main_with_args(std::env::args_os())
}
