fn main() -> std::process::ExitCode {
    sra_cli::main_entry()
}
