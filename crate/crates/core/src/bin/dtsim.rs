fn main() {
    std::process::exit(dyntarget::cli::run(std::env::args_os()));
}
