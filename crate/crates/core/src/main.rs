use std::io::Write;

fn main() {
    let out = excard::cli::run(std::env::args_os());
    // One write per stream, after the command has finished.
    if !out.stdout.is_empty() {
        let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    }
    if !out.stderr.is_empty() {
        let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    }
    std::process::exit(out.code);
}
