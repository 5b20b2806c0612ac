fn main() {
    std::process::exit(aoi_lab::cli::run(std::env::args_os()));
}
