fn main() {
    std::process::exit(radix_xbar::cli::run());
}
