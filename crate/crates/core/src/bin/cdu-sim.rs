fn main() {
    std::process::exit(cdu_jcas::cli::cli_main(std::env::args_os()));
}
