fn main() {
    hodgelab::memory::retain_freed_buffers();
    std::process::exit(hodgelab::cli::main_with_args(std::env::args_os()));
}
