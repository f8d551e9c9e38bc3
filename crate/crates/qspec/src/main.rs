fn main() { std::process::exit(qspec::cli::run()); }
