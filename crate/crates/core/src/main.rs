fn main() -> std::process::ExitCode {
    abuse_diffusion::cli::run_from(std::env::args_os())
}
