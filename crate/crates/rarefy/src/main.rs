fn main() {
    let code = rarefy::cli::main_with(
        std::env::args(),
        std::env::vars(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
