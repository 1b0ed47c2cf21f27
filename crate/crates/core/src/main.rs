fn main() { std::process::exit(ultradiff::cli::run(std::env::args().collect())); }
