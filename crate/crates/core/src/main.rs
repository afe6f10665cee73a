fn main() -> std::process::ExitCode {
    supra_hmm::cli::run(std::env::args_os())
}
