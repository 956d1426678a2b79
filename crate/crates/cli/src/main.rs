use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let code = compstruct_cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    if out.flush().is_err() && code == compstruct_cli::EXIT_PASS {
        std::process::exit(compstruct_cli::EXIT_INTERNAL);
    }
    drop(out);
    std::process::exit(code);
}
