fn main() {
    std::process::exit(sandlab_cli::commands::run());
}
