fn main() -> std::process::ExitCode {
    colexnet::cli::main()
}
