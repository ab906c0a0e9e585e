fn main() {
    std::process::exit(sphere_blowup::cli::run(std::env::args_os()));
}
