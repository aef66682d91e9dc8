fn main() {
    std::process::exit(taxonomy_reorg::cli::run(std::env::args_os()));
}
