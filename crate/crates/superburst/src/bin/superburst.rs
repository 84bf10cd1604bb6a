//! Thin command-line entry point; all logic lives in the library.

fn main() {
    std::process::exit(superburst::cli::run());
}
