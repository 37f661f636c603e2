fn main() {
    std::process::exit(deform_forge::cli::run(std::env::args_os()));
}
