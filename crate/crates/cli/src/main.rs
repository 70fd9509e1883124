fn main() -> std::process::ExitCode {
    chorefair_cli::app::main()
}
