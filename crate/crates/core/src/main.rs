fn main() -> std::process::ExitCode {
    torus_weyl::cli::main()
}
