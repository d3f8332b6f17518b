fn main() {
    std::process::exit(htype_ext::cli::run(std::env::args_os()));
}
