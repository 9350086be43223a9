use std::io;

fn main() {
    tempint::cli::init_threads();
    let code = tempint::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
