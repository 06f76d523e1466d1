fn main() {
    std::process::exit(dh_lab::cli::main())
}
