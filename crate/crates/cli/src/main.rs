fn main() {
    std::process::exit(cone_overlap_cli::run(std::env::args_os()))
}
