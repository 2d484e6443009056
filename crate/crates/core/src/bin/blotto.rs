fn main() {
    std::process::exit(lottery_blotto::cli::main_from_args(std::env::args_os()));
}
