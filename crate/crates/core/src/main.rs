fn main() {
    std::process::exit(gelfand_orbit::cli::main_with_std());
}
