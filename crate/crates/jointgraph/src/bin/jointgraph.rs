fn main() {
    std::process::exit(jointgraph::cli::run(std::env::args_os()));
}
