use czeno::cli;

fn main() {
    std::process::exit(cli::run());
}
