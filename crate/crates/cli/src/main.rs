use std::io::Write;

fn main() {
    let out = qplex_cli::dispatch(std::env::args());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
