fn main() {
    std::process::exit(torus_crit::cli::run(std::env::args_os()));
}
