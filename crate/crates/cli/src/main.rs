fn main() {
    std::process::exit(entloc::run(std::env::args_os()));
}
