fn main() {
    std::process::exit(hub_lineage::cli::run(std::env::args_os()));
}
