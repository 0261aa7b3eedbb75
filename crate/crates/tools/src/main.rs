fn main() {
    std::process::exit(helly_tools::run(std::env::args_os()));
}
