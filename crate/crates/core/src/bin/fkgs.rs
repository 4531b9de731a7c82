fn main() {
    std::process::exit(fkgs::harness::run_cli(std::env::args_os()));
}
