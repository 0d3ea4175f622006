fn main() {
    std::process::exit(vacancy_lines::cli::main());
}
