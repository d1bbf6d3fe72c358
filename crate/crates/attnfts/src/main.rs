fn main() {
    std::process::exit(attnfts::cli::run());
}
