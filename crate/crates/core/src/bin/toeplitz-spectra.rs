fn main() {
    std::process::exit(toeplitz_spectra::cli::main());
}
