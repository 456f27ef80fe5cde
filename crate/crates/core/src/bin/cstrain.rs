fn main() {
    std::process::exit(cstrain::cli::dispatch(std::env::args_os()));
}
