fn main() {
    std::process::exit(skewdose::cli::main_with_std());
}
