fn main() -> std::process::ExitCode {
    glyphforge::cli::main()
}
