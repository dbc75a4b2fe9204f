fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(scatter3d::cli::dispatch(&argv));
}
