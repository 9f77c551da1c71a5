fn main() {
    std::process::exit(wavereg::cli::main_with_env())
}
