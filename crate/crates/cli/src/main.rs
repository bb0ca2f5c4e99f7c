fn main() {
    std::process::exit(nosqlevo::run(std::env::args_os()));
}
