fn main() {
    std::process::exit(qdb_core::cli::main_from_env());
}
