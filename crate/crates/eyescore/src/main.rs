fn main() {
    let stdin = std::io::stdin().lock();
    let stdout = std::io::BufWriter::new(std::io::stdout());
    let code = eyescore::cli::run(std::env::args_os(), stdin, stdout, std::io::stderr());
    std::process::exit(code);
}
