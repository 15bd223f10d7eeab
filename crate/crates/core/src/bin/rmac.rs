fn main() {
    std::process::exit(rmac::harness::run(std::env::args_os()));
}
