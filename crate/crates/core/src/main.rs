fn main() -> std::process::ExitCode {
    posilab::cli::main()
}
