fn main() -> std::process::ExitCode {
    ifp::cli::main()
}
