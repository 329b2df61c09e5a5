fn main() {
    std::process::exit(eqlab::cli::main_entry());
}
